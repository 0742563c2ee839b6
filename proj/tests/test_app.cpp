#include <atomic>
#include <cstdlib>
#include <fstream>
#include <iomanip>
#include <regex>
#include <sstream>
#include <string>

#include "doctest.h"
#include "json.hpp"
#include "support.hpp"
#include "timelaw/app.hpp"
#include "timelaw/errors.hpp"

using namespace timelaw;
using namespace timelaw::app;
namespace fs = std::filesystem;
using nlohmann::json;

namespace {

fs::path scratch() {
    static std::atomic<int> counter{0};
    const fs::path dir = fs::temp_directory_path() /
                         ("timelaw_test_" + std::to_string(::getpid()) + "_" + std::to_string(counter++));
    fs::remove_all(dir);
    fs::create_directories(dir);
    return dir;
}

fs::path write(const fs::path& dir, const std::string& name, const std::string& text) {
    const fs::path p = dir / name;
    std::ofstream(p) << text;
    return p;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

std::vector<std::string> lines(const std::string& text) {
    std::vector<std::string> out;
    std::istringstream in(text);
    for (std::string l; std::getline(in, l);) out.push_back(l);
    return out;
}

std::vector<std::string> split(const std::string& line) {
    std::vector<std::string> out;
    std::string cell;
    std::istringstream in(line);
    while (std::getline(in, cell, ',')) out.push_back(cell);
    if (!line.empty() && line.back() == ',') out.emplace_back();
    return out;
}

Overrides into(const fs::path& dir) {
    Overrides o;
    o.out_dir = dir;
    return o;
}

const char* kSemicircle = R"({"curve": {"kind": "circle", "params": {"R": 1}},
  "alpha": 0.01, "mass": 1, "p0": 0, "p1": "pi", "n": 1000})";

const char* kLine = R"({"curve": {"kind": "line", "params": {"k": -2, "b": 1}},
  "alpha": 0.01, "mass": 1, "p0": 0, "p1": 1, "n": 1000})";

int cli(const std::string& args) {
    const std::string cmd = std::string(TIMELAW_CLI_PATH) + " " + args + " >/dev/null 2>&1";
    const int status = std::system(cmd.c_str());
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

}  // namespace

TEST_CASE("parse_config") {
    SUBCASE("full configuration") {
        const RunConfig c = parse_config(R"({
          "curve": {"kind": "polynomial", "params": {"x": [0, 1], "y": [1, -2, 0.5]}},
          "alpha": [0.1, 0.01], "mass": 2, "p0": "-pi", "p1": "2.5*pi", "n": 400, "variant": "paper",
          "solver": {"method": "oracle", "newton_tol": 1e-9, "max_newton_iters": 20, "segments": 3,
                     "oracle_n": 200, "grad_tol": 1e-7, "max_iters": 1000},
          "output": {"csv_path": "a.csv", "report_path": "b.json", "summary_path": "c.csv"}})");
        const auto& poly = std::get<PolynomialParams>(c.curve);
        CHECK(poly.y == std::vector<double>{1, -2, 0.5});
        CHECK(c.alphas == std::vector<double>{0.1, 0.01});
        CHECK(c.mass == 2);
        CHECK(c.p0 == -support::pi);
        CHECK(c.p1 == doctest::Approx(2.5 * support::pi));
        CHECK(c.n == 400);
        CHECK(c.variant == RhsVariant::paper_printed);
        CHECK(c.method == Method::oracle);
        CHECK(c.segments == 3);
        CHECK(c.oracle_n == 200);
        CHECK(c.oracle_max_iters == 1000);
        CHECK(c.summary_path == "c.csv");
    }
    SUBCASE("defaults") {
        const RunConfig c = parse_config(R"({"curve": {"kind": "ellipse", "params": {"a": 1, "b": 2}}})");
        CHECK(c.alphas == std::vector<double>{0.01});
        CHECK(c.variant == kDefaultVariant);
        CHECK(c.method == Method::automatic);
        CHECK(std::get<EllipseParams>(c.curve).b == 2);
    }
    SUBCASE("malformed input") {
        CHECK_THROWS_AS(parse_config("{not json"), ConfigError);
        CHECK_THROWS_AS(parse_config("[1, 2]"), ConfigError);
        CHECK_THROWS_AS(parse_config(R"({"alpha": 0.1})"), ConfigError);
        CHECK_THROWS_AS(parse_config(R"({"curve": {"kind": "spiral"}})"), ConfigError);
        CHECK_THROWS_AS(parse_config(R"({"curve": {"kind": "line"}, "alhpa": 1})"), ConfigError);
        CHECK_THROWS_AS(parse_config(R"({"curve": {"kind": "line"}, "alpha": "big"})"), ConfigError);
        CHECK_THROWS_AS(parse_config(R"({"curve": {"kind": "line"}, "n": 10.5})"), ConfigError);
        CHECK_THROWS_AS(parse_config(R"({"curve": {"kind": "line"}, "p1": "tau"})"), ConfigError);
        CHECK_THROWS_AS(parse_config(R"({"curve": {"kind": "circle", "params": {"r": 1}}})"), ConfigError);
    }
    SUBCASE("range checks are validation errors") {
        CHECK_THROWS_AS(validate(parse_config(R"({"curve": {"kind": "line"}, "alpha": 0})")), ValidationError);
        CHECK_THROWS_AS(validate(parse_config(R"({"curve": {"kind": "line"}, "alpha": [0.1, -0.1]})")),
                        ValidationError);
        CHECK_THROWS_AS(validate(parse_config(R"({"curve": {"kind": "line"}, "alpha": []})")), ValidationError);
        CHECK_THROWS_AS(validate(parse_config(R"({"curve": {"kind": "circle", "params": {"R": 0}}})")),
                        ValidationError);
        CHECK_THROWS_AS(validate(parse_config(R"({"curve": {"kind": "line"}, "n": 99})")), ValidationError);
    }
}

TEST_CASE("solve writes the law and the report") {
    const fs::path dir = scratch();
    const fs::path cfg = write(dir, "semi.json", kSemicircle);
    std::ostringstream log;
    REQUIRE(run_solve(cfg, into(dir), log) == kOk);

    const auto rows = lines(slurp(dir / "law.csv"));
    REQUIRE(rows.size() == 1002);
    CHECK(rows[0] == "t,p,dp,ddp,dddp,x,y,vx,vy,ax,ay,el_residual");
    const std::regex number(R"([-+]?\d\.\d{16}e[-+]\d{2,3})");
    for (std::size_t r = 1; r < rows.size(); ++r) {
        const auto cells = split(rows[r]);
        REQUIRE(cells.size() == 12);
        for (std::size_t k = 0; k < 11; ++k) CHECK(std::regex_match(cells[k], number));
        const std::size_t node = r - 1;
        const bool edge = node < 2 || node > 998;
        CHECK(cells[11].empty() == edge);
        if (!edge) CHECK(std::regex_match(cells[11], number));
    }
    CHECK(std::stod(split(rows.back())[1]) == doctest::Approx(support::pi).epsilon(1e-12));

    const json report = json::parse(slurp(dir / "report.json"));
    for (const char* key : {"J_total", "J_kinetic", "inertia_measure", "bc_residual", "el_residual_rms",
                            "iterations", "converged", "variant"})
        CHECK(report.contains(key));
    CHECK(report["converged"].get<bool>());
    CHECK(report["variant"] == "expanded_from_f_terms");
    CHECK(report["J_total"].get<double>() ==
          doctest::Approx(report["J_kinetic"].get<double>() + 0.005 * report["inertia_measure"].get<double>()));
}

TEST_CASE("solve is deterministic") {
    const fs::path a = scratch(), b = scratch();
    const fs::path cfg = write(a, "cfg.json", kSemicircle);
    std::ostringstream log;
    REQUIRE(run_solve(cfg, into(a), log) == kOk);
    REQUIRE(run_solve(cfg, into(b), log) == kOk);
    CHECK(slurp(a / "law.csv") == slurp(b / "law.csv"));
    CHECK(slurp(a / "report.json") == slurp(b / "report.json"));
}

TEST_CASE("solve error classes") {
    const fs::path dir = scratch();
    std::ostringstream log;
    CHECK(run_solve(dir / "missing.json", into(dir), log) == kParseError);
    CHECK(run_solve(write(dir, "bad.json", "{\"curve\": "), into(dir), log) == kParseError);
    CHECK(run_solve(write(dir, "zero.json", R"({"curve": {"kind": "line"}, "alpha": 0})"), into(dir), log) ==
          kValidationError);
    CHECK(run_solve(write(dir, "list.json", R"({"curve": {"kind": "line"}, "alpha": [0.1, 0.2]})"), into(dir),
                    log) == kValidationError);
    CHECK(run_solve(write(dir, "stuck.json", R"({"curve": {"kind": "ellipse", "params": {"a": 1, "b": 2}},
        "p1": "2pi", "solver": {"method": "shoot", "max_newton_iters": 1}})"),
                    into(dir), log) == kSolverError);
    // output directory blocked by a regular file
    write(dir, "blocker", "x");
    Overrides blocked;
    blocked.out_dir = dir / "blocker" / "sub";
    CHECK(run_solve(write(dir, "ok.json", kLine), blocked, log) == kIoError);
}

TEST_CASE("oracle method through the runner") {
    const fs::path dir = scratch();
    const fs::path cfg = write(dir, "o.json", R"({"curve": {"kind": "line", "params": {"k": -2, "b": 1}},
        "alpha": 0.01, "n": 400, "solver": {"method": "oracle"}})");
    std::ostringstream log;
    REQUIRE(run_solve(cfg, into(dir), log) == kOk);
    const json report = json::parse(slurp(dir / "report.json"));
    CHECK(report["converged"].get<bool>());
    const LineLaw law = line_analytic(0, 1, 0.01, 1);
    std::vector<StateVector> s(401);
    for (int i = 0; i <= 400; ++i) s[static_cast<std::size_t>(i)] = law.at(i / 400.0);
    const double exact = evaluate_cost(make_curve(LineParams{-2, 1}), s, 0.01, 1).total;
    CHECK(support::rel(report["J_total"].get<double>(), exact) <= 1e-3);
}

TEST_CASE("variant override") {
    const fs::path dir = scratch();
    Overrides o = into(dir);
    o.variant = RhsVariant::paper_printed;
    std::ostringstream log;
    REQUIRE(run_solve(write(dir, "line.json", kLine), o, log) == kOk);
    CHECK(json::parse(slurp(dir / "report.json"))["variant"] == "paper_printed");
}

TEST_CASE("sweep") {
    const fs::path dir = scratch();
    std::ostringstream log;
    const fs::path cfg = write(dir, "sweep.json", R"({"curve": {"kind": "line", "params": {"k": -2, "b": 1}},
        "alpha": [0.1, 0.001, 0.01], "p0": 0, "p1": 1, "n": 1000})");
    REQUIRE(run_sweep(cfg, into(dir), log) == kOk);
    const auto rows = lines(slurp(dir / "summary.csv"));
    REQUIRE(rows.size() == 4);
    CHECK(rows[0] == "alpha,J_total,J_kinetic,inertia_measure,max_abs_accel");
    double prev_alpha = 0.0, prev_inertia = INFINITY;
    for (std::size_t r = 1; r < rows.size(); ++r) {
        const auto cells = split(rows[r]);
        REQUIRE(cells.size() == 5);
        const double alpha = std::stod(cells[0]), inertia = std::stod(cells[3]);
        CHECK(alpha > prev_alpha);
        CHECK(inertia <= prev_inertia + 1e-9);
        prev_alpha = alpha;
        prev_inertia = inertia;
    }
    for (const char* a : {"0.001", "0.01", "0.1"}) {
        CHECK(fs::exists(dir / (std::string("law_alpha_") + a + ".csv")));
        CHECK(fs::exists(dir / (std::string("report_alpha_") + a + ".json")));
    }

    SUBCASE("single element matches solve") {
        const fs::path one = scratch(), ref = scratch();
        const fs::path c1 = write(one, "c.json", R"({"curve": {"kind": "line", "params": {"k": -2, "b": 1}},
            "alpha": [0.01], "n": 1000})");
        REQUIRE(run_sweep(c1, into(one), log) == kOk);
        REQUIRE(run_solve(c1, into(ref), log) == kOk);
        CHECK(slurp(one / "law_alpha_0.01.csv") == slurp(ref / "law.csv"));
        CHECK(slurp(one / "report_alpha_0.01.json") == slurp(ref / "report.json"));
        CHECK(lines(slurp(one / "summary.csv")).size() == 2);
    }
    SUBCASE("negative alpha") {
        const fs::path bad = write(dir, "neg.json", R"({"curve": {"kind": "line"}, "alpha": [0.1, -0.1]})");
        CHECK(run_sweep(bad, into(dir), log) == kValidationError);
    }
}

TEST_CASE("compare") {
    const fs::path dir = scratch();
    std::ostringstream log;
    REQUIRE(run_compare(write(dir, "line.json", kLine), into(dir), log) == kOk);
    const json r = json::parse(slurp(dir / "report.json"));
    CHECK(r["max_deviation"]["analytic_shoot"].get<double>() <= 1e-6);
    CHECK(r["max_deviation"]["analytic_oracle"].get<double>() <= 1e-3);
    CHECK(r["max_deviation"]["shoot_oracle"].get<double>() <= 1e-3);

    CHECK(run_compare(write(dir, "circle.json", kSemicircle), into(dir), log) == kValidationError);

    REQUIRE(run_compare(write(dir, "still.json", R"({"curve": {"kind": "line", "params": {"k": -2, "b": 1}},
        "alpha": 0.01, "p0": 0.5, "p1": 0.5, "n": 400})"),
                        into(dir), log) == kOk);
    const json s = json::parse(slurp(dir / "report.json"));
    for (const char* k : {"analytic_shoot", "analytic_oracle", "shoot_oracle"})
        CHECK(s["max_deviation"][k].get<double>() == 0.0);
}

TEST_CASE("validate") {
    const fs::path dir = scratch();
    std::ostringstream log;
    for (const char* spec : {R"({"kind": "line", "params": {"k": -2, "b": 1}})", R"({"kind": "circle"})",
                             R"({"kind": "parabola", "params": {"k": 1}})",
                             R"({"kind": "ellipse", "params": {"a": 1, "b": 2}})",
                             R"({"kind": "polynomial", "params": {"x": [0, 1, 0.2], "y": [0, 0.5, 0, 0.1]}})"}) {
        CAPTURE(spec);
        const fs::path cfg = write(dir, "v.json", std::string(R"({"curve": )") + spec + ", \"p1\": 2}");
        CHECK(run_validate(cfg, into(dir), log) == kOk);
        const json r = json::parse(slurp(dir / "report.json"));
        CHECK(r["passed"].get<bool>());
        CHECK(r["gradient"]["max_relative_error"].get<double>() <= 1e-6);
    }
    CHECK(run_validate(write(dir, "bad.json", "{\"curve\": [}"), into(dir), log) == kParseError);
}

TEST_CASE("evaluate") {
    const fs::path dir = scratch();
    std::ostringstream law;
    law << std::setprecision(17) << "t,p\n";
    for (int i = 0; i <= 2000; ++i) {
        const double t = i / 2000.0;
        law << t << ',' << t * t * (3 - 2 * t) << '\n';
    }
    const fs::path lp = write(dir, "law.csv", law.str());
    const fs::path cfg = write(dir, "flat.json", R"({"curve": {"kind": "line", "params": {"k": 0}}, "alpha": 0.01})");
    std::ostringstream log;
    REQUIRE(run_evaluate(cfg, lp, into(dir), log) == kOk);
    const json r = json::parse(slurp(dir / "report.json"));
    CHECK(r["J_total"].get<double>() == doctest::Approx(0.66).epsilon(1e-5));

    CHECK_THROWS_AS(read_law_csv("p,t\n0,0\n"), ConfigError);
    CHECK_THROWS_AS(read_law_csv("t,p\n0,0\n0.7,1\n1,1\n"), ValidationError);
    CHECK(run_evaluate(cfg, dir / "nope.csv", into(dir), log) == kParseError);
}

TEST_CASE("command line executable") {
    const fs::path dir = scratch();
    const std::string out = " --out-dir " + dir.string();
    const fs::path semi = write(dir, "semi.json", kSemicircle);
    CHECK(cli("solve --config " + semi.string() + out) == 0);
    CHECK(fs::exists(dir / "law.csv"));
    CHECK(cli("solve --config " + (dir / "missing.json").string() + out) == kParseError);
    CHECK(cli("compare --config " + semi.string() + out) == kValidationError);
    CHECK(cli("solve --config " + semi.string() + " --variant paper" + out) == 0);
    CHECK(json::parse(slurp(dir / "report.json"))["variant"] == "paper_printed");
    CHECK(cli("solve --config " + semi.string() + " --variant bogus" + out) == kParseError);
    CHECK(cli("frobnicate") == kParseError);
    CHECK(cli("solve") == kParseError);
    CHECK(cli("--help") == 0);
}
