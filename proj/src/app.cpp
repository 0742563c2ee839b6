#include "timelaw/app.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <future>
#include <numbers>
#include <random>
#include <regex>
#include <sstream>

#include "json.hpp"

#include "timelaw/errors.hpp"

namespace timelaw::app {

using nlohmann::json;
namespace fs = std::filesystem;

std::string_view to_string(Method method) {
    switch (method) {
        case Method::automatic: return "auto";
        case Method::shoot: return "shoot";
        case Method::oracle: return "oracle";
    }
    return "unknown";
}

namespace {

std::string sci(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.16e", v);
    return buf;
}

std::string short_number(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.6g", v);
    return buf;
}

void check_keys(const json& obj, std::initializer_list<std::string_view> allowed, std::string_view where) {
    for (const auto& item : obj.items()) {
        if (std::find(allowed.begin(), allowed.end(), item.key()) == allowed.end())
            throw ConfigError("unknown field '" + item.key() + "' in " + std::string(where));
    }
}

double number(const json& v, std::string_view name) {
    if (!v.is_number()) throw ConfigError(std::string(name) + " must be a number");
    return v.get<double>();
}

int integer(const json& v, std::string_view name) {
    if (!v.is_number_integer()) throw ConfigError(std::string(name) + " must be an integer");
    return v.get<int>();
}

std::string text(const json& v, std::string_view name) {
    if (!v.is_string()) throw ConfigError(std::string(name) + " must be a string");
    return v.get<std::string>();
}

// A number, or a string such as "pi", "2pi", "0.5*pi", "-pi".
double endpoint(const json& v, std::string_view name) {
    if (v.is_number()) return v.get<double>();
    if (v.is_string()) {
        static const std::regex pattern(R"(^\s*([+-]?(?:\d+\.?\d*|\.\d+)(?:[eE][+-]?\d+)?|[+-]?)\s*\*?\s*pi\s*$)");
        std::smatch m;
        const std::string s = v.get<std::string>();
        if (std::regex_match(s, m, pattern)) {
            const std::string factor = m[1].str();
            double k = 1.0;
            if (factor == "-") k = -1.0;
            else if (!factor.empty() && factor != "+") k = std::stod(factor);
            return k * std::numbers::pi;
        }
    }
    throw ConfigError(std::string(name) + " must be a number or a multiple of pi");
}

std::vector<double> number_list(const json& v, std::string_view name) {
    if (!v.is_array()) throw ConfigError(std::string(name) + " must be a list of numbers");
    std::vector<double> out;
    for (const auto& e : v) out.push_back(number(e, name));
    return out;
}

CurveSpec parse_curve(const json& c) {
    if (!c.is_object()) throw ConfigError("curve must be an object");
    check_keys(c, {"kind", "params"}, "curve");
    if (!c.contains("kind")) throw ConfigError("curve.kind is required");
    const std::string kind = text(c["kind"], "curve.kind");
    const json params = c.value("params", json::object());
    if (!params.is_object()) throw ConfigError("curve.params must be an object");
    auto get = [&params](const char* key, double fallback) {
        return params.contains(key) ? number(params[key], std::string("curve.params.") + key) : fallback;
    };
    CurveKind k{};
    try {
        k = curve_kind_from_string(kind);
    } catch (const ValidationError&) {
        throw ConfigError("unknown curve kind '" + kind + "'");
    }
    switch (k) {
        case CurveKind::line:
            check_keys(params, {"k", "b"}, "curve.params");
            return LineParams{get("k", 0.0), get("b", 0.0)};
        case CurveKind::circle:
            check_keys(params, {"R"}, "curve.params");
            return CircleParams{get("R", 1.0)};
        case CurveKind::parabola:
            check_keys(params, {"k", "b"}, "curve.params");
            return ParabolaParams{get("k", 0.0), get("b", 0.0)};
        case CurveKind::ellipse:
            check_keys(params, {"a", "b"}, "curve.params");
            return EllipseParams{get("a", 1.0), get("b", 1.0)};
        case CurveKind::polynomial: {
            check_keys(params, {"x", "y"}, "curve.params");
            PolynomialParams poly;
            if (params.contains("x")) poly.x = number_list(params["x"], "curve.params.x");
            if (params.contains("y")) poly.y = number_list(params["y"], "curve.params.y");
            return poly;
        }
    }
    throw ConfigError("unknown curve kind '" + kind + "'");
}

RunConfig parse_object(const json& j) {
    if (!j.is_object()) throw ConfigError("configuration must be a JSON object");
    check_keys(j, {"curve", "alpha", "mass", "p0", "p1", "n", "variant", "solver", "output"}, "configuration");
    RunConfig cfg;
    if (!j.contains("curve")) throw ConfigError("curve is required");
    cfg.curve = parse_curve(j["curve"]);
    if (j.contains("alpha")) {
        const json& a = j["alpha"];
        cfg.alphas = a.is_array() ? number_list(a, "alpha") : std::vector<double>{number(a, "alpha")};
    }
    if (j.contains("mass")) cfg.mass = number(j["mass"], "mass");
    if (j.contains("p0")) cfg.p0 = endpoint(j["p0"], "p0");
    if (j.contains("p1")) cfg.p1 = endpoint(j["p1"], "p1");
    if (j.contains("n")) cfg.n = integer(j["n"], "n");
    if (j.contains("variant")) {
        try {
            cfg.variant = variant_from_string(text(j["variant"], "variant"));
        } catch (const ValidationError& e) {
            throw ConfigError(e.what());
        }
    }
    if (j.contains("solver")) {
        const json& s = j["solver"];
        if (!s.is_object()) throw ConfigError("solver must be an object");
        check_keys(s,
                   {"method", "newton_tol", "max_newton_iters", "segments", "oracle_n", "grad_tol", "max_iters"},
                   "solver");
        if (s.contains("method")) {
            const std::string m = text(s["method"], "solver.method");
            if (m == "auto") cfg.method = Method::automatic;
            else if (m == "shoot") cfg.method = Method::shoot;
            else if (m == "oracle") cfg.method = Method::oracle;
            else throw ConfigError("solver.method must be auto, shoot or oracle");
        }
        if (s.contains("newton_tol")) cfg.newton_tol = number(s["newton_tol"], "solver.newton_tol");
        if (s.contains("max_newton_iters")) cfg.max_newton_iters = integer(s["max_newton_iters"], "solver.max_newton_iters");
        if (s.contains("segments")) cfg.segments = integer(s["segments"], "solver.segments");
        if (s.contains("oracle_n")) cfg.oracle_n = integer(s["oracle_n"], "solver.oracle_n");
        if (s.contains("grad_tol")) cfg.grad_tol = number(s["grad_tol"], "solver.grad_tol");
        if (s.contains("max_iters")) cfg.oracle_max_iters = integer(s["max_iters"], "solver.max_iters");
    }
    if (j.contains("output")) {
        const json& o = j["output"];
        if (!o.is_object()) throw ConfigError("output must be an object");
        check_keys(o, {"csv_path", "report_path", "summary_path"}, "output");
        if (o.contains("csv_path")) cfg.csv_path = text(o["csv_path"], "output.csv_path");
        if (o.contains("report_path")) cfg.report_path = text(o["report_path"], "output.report_path");
        if (o.contains("summary_path")) cfg.summary_path = text(o["summary_path"], "output.summary_path");
    }
    return cfg;
}

std::string read_file(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ConfigError("cannot read " + path.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_file(const fs::path& path, const std::string& contents) {
    std::error_code ec;
    if (path.has_parent_path()) fs::create_directories(path.parent_path(), ec);
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot write " + path.string());
    out << contents;
    out.flush();
    if (!out) throw IoError("failed writing " + path.string());
}

fs::path resolve(const Overrides& o, const std::string& path) {
    const fs::path p(path);
    if (p.is_absolute() || !o.out_dir) return p;
    return *o.out_dir / p;
}

fs::path with_alpha(const fs::path& path, double alpha) {
    fs::path out = path;
    out.replace_filename(path.stem().string() + "_alpha_" + short_number(alpha) + path.extension().string());
    return out;
}

// Everything the artifacts need from one solve.
struct Outcome {
    std::vector<StateVector> states;
    CostBreakdown cost;
    double bc_residual = 0.0;
    double el_rms = 0.0;
    int iterations = 0;
    bool converged = false;
};

std::vector<StateVector> states_from_law(const TimeLaw& law) {
    const double h = law.step();
    const LawDerivatives d = differentiate_law(law.values(), h);
    const LawDerivatives dd = differentiate_law(d.accel, h);
    std::vector<StateVector> states(law.values().size());
    for (std::size_t i = 0; i < states.size(); ++i) states[i] = {law.values()[i], d.rate[i], d.accel[i], dd.rate[i]};
    return states;
}

Outcome compute(const CurveModel& curve, const RunConfig& cfg, double alpha) {
    Outcome out;
    if (cfg.method == Method::oracle) {
        OracleConfig oc = oracle_config(cfg);
        const OracleResult r = oracle_minimize(curve, cfg.p0, cfg.p1, alpha, cfg.mass, oc);
        out.states = states_from_law(r.law);
        out.cost = evaluate_cost(curve, r.law, alpha, cfg.mass);
        const auto& s = out.states;
        out.bc_residual = std::max({std::abs(s.front().p - cfg.p0), std::abs(s.back().p - cfg.p1),
                                    std::abs(s.front().dp), std::abs(s.back().dp)});
        out.iterations = r.iterations;
        out.converged = r.converged;
    } else {
        const SolverConfig sc = solver_config(cfg, alpha);
        const SolutionReport r = cfg.method == Method::shoot ? shoot(curve, sc) : solve(curve, sc);
        out.states = r.trajectory.states;
        out.cost = r.cost;
        out.bc_residual = r.bc_residual;
        out.iterations = r.iterations;
        out.converged = r.converged;
    }
    out.el_rms = rms(el_residual(curve, out.states, alpha, cfg.mass));
    return out;
}

json report_json(const Outcome& o, const RunConfig& cfg) {
    return json{{"J_total", o.cost.total},
                {"J_kinetic", o.cost.kinetic},
                {"inertia_measure", o.cost.inertia_measure},
                {"bc_residual", o.bc_residual},
                {"el_residual_rms", o.el_rms},
                {"iterations", o.iterations},
                {"converged", o.converged},
                {"variant", std::string(to_string(cfg.variant))}};
}

double max_abs_accel(const CurveModel& curve, std::span<const StateVector> states) {
    double m = 0.0;
    for (const StateVector& z : states) {
        const Kinematics k = chain_kinematics(curve.derivatives(z.p), z);
        m = std::max(m, std::hypot(k.ax, k.ay));
    }
    return m;
}

// Runs body with the shared error-to-exit-code mapping.
template <class Body>
int guarded(std::ostream& log, Body&& body) {
    try {
        return body();
    } catch (const ConfigError& e) {
        log << "error: " << e.what() << '\n';
        return kParseError;
    } catch (const ValidationError& e) {
        log << "validation error: " << e.what() << '\n';
        return kValidationError;
    } catch (const IoError& e) {
        log << "i/o error: " << e.what() << '\n';
        return kIoError;
    } catch (const NonConvergence& e) {
        log << "solver error: " << e.what() << '\n';
        return kSolverError;
    } catch (const IntegrationFailure& e) {
        log << "solver error: " << e.what() << '\n';
        return kSolverError;
    } catch (const SingularParameterization& e) {
        log << "solver error: " << e.what() << '\n';
        return kSolverError;
    }
}

RunConfig prepare(const fs::path& config_path, const Overrides& overrides) {
    RunConfig cfg = load_config(config_path);
    if (overrides.variant) cfg.variant = *overrides.variant;
    return cfg;
}

double max_deviation(std::span<const double> a, std::span<const double> b) {
    double m = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
    return m;
}

// Linear interpolation of a uniform-grid law at t.
double sample(const TimeLaw& law, double t) {
    const double x = t * law.n();
    const int i = std::clamp(static_cast<int>(std::floor(x)), 0, law.n() - 1);
    const double w = x - i;
    return (1.0 - w) * law[i] + w * law[i + 1];
}

struct GradientCheck {
    int laws = 0;
    int n = 0;
    double max_relative_error = 0.0;
    double tolerance = 1e-6;
    [[nodiscard]] bool passed() const { return max_relative_error <= tolerance; }
};

// Analytic gradient of the discretized cost against fourth-order central differences on
// smooth random perturbations of the smoothstep law.
GradientCheck gradient_check(const CurveModel& curve, const RunConfig& cfg, double alpha) {
    GradientCheck check;
    check.laws = 3;
    check.n = 200;
    std::mt19937_64 rng(20240611);
    std::uniform_real_distribution<double> coef(-1.0, 1.0);
    const double span = std::max(1.0, std::abs(cfg.p1 - cfg.p0));
    for (int trial = 0; trial < check.laws; ++trial) {
        std::array<double, 4> c{};
        for (double& x : c) x = 0.05 * span * coef(rng);
        std::vector<double> p(static_cast<std::size_t>(check.n) + 1);
        for (int i = 0; i <= check.n; ++i) {
            const double t = static_cast<double>(i) / check.n;
            double v = smoothstep_state(cfg.p0, cfg.p1, t).p;
            for (int k = 0; k < 4; ++k) v += c[k] * std::sin((k + 1) * std::numbers::pi * t) * t * (1.0 - t);
            p[static_cast<std::size_t>(i)] = v;
        }
        apply_rest_convention(p);
        const DiscreteObjective base = discrete_objective(curve, p, alpha, cfg.mass);
        double scale = 0.0;
        for (double g : base.gradient) scale = std::max(scale, std::abs(g));
        for (std::size_t j = 0; j < base.gradient.size(); ++j) {
            const std::size_t idx = j + 2;
            const double step = 1e-5 * std::max(1.0, std::abs(p[idx]));
            auto at = [&](double offset) {
                std::vector<double> q = p;
                q[idx] += offset;
                return discrete_objective(curve, q, alpha, cfg.mass, false).value;
            };
            const double fd = (8.0 * (at(step) - at(-step)) - (at(2.0 * step) - at(-2.0 * step))) / (12.0 * step);
            const double denom = std::max(std::abs(fd), 1e-3 * scale);
            check.max_relative_error = std::max(check.max_relative_error, std::abs(base.gradient[j] - fd) / denom);
        }
    }
    return check;
}

}  // namespace

RunConfig parse_config(std::string_view text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::parse_error& e) {
        throw ConfigError(std::string("malformed JSON: ") + e.what());
    }
    return parse_object(j);
}

RunConfig load_config(const fs::path& path) { return parse_config(read_file(path)); }

void validate(const RunConfig& cfg) {
    (void)make_curve(cfg.curve);
    if (cfg.alphas.empty()) throw ValidationError("alpha list must not be empty");
    for (double a : cfg.alphas) timelaw::validate(solver_config(cfg, a));
    if (cfg.method == Method::oracle || cfg.oracle_n != 0) timelaw::validate(oracle_config(cfg));
    if (cfg.csv_path.empty() || cfg.report_path.empty() || cfg.summary_path.empty())
        throw ValidationError("output paths must not be empty");
}

SolverConfig solver_config(const RunConfig& cfg, double alpha) {
    SolverConfig s;
    s.alpha = alpha;
    s.mass = cfg.mass;
    s.p0 = cfg.p0;
    s.p1 = cfg.p1;
    s.n = cfg.n;
    s.newton_tol = cfg.newton_tol;
    s.max_newton_iters = cfg.max_newton_iters;
    s.variant = cfg.variant;
    s.segments = cfg.segments;
    return s;
}

OracleConfig oracle_config(const RunConfig& cfg) {
    OracleConfig o;
    o.n = cfg.oracle_n != 0 ? cfg.oracle_n : cfg.n;
    o.grad_tol = cfg.grad_tol;
    o.max_iters = cfg.oracle_max_iters;
    return o;
}

std::string law_csv(const CurveModel& curve, std::span<const StateVector> states, double alpha, double mass) {
    const std::vector<double> el = el_residual(curve, states, alpha, mass);
    const std::size_t n = states.size() - 1;
    std::string out = "t,p,dp,ddp,dddp,x,y,vx,vy,ax,ay,el_residual\n";
    out.reserve(out.size() + states.size() * 12 * 24);
    for (std::size_t i = 0; i <= n; ++i) {
        const StateVector& z = states[i];
        const DerivativeTable d = curve.derivatives(z.p);
        const Kinematics k = chain_kinematics(d, z);
        const double t = static_cast<double>(i) / static_cast<double>(n);
        for (double v : {t, z.p, z.dp, z.ddp, z.dddp, d.x[0], d.y[0], k.vx, k.vy, k.ax, k.ay}) {
            out += sci(v);
            out += ',';
        }
        if (i >= 2 && i + 2 <= n) out += sci(el[i - 2]);
        out += '\n';
    }
    return out;
}

TimeLaw read_law_csv(std::string_view text) {
    std::istringstream in{std::string(text)};
    std::string line;
    if (!std::getline(in, line)) throw ConfigError("empty law file");
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line != "t,p") throw ConfigError("law file header must be 't,p'");
    std::vector<double> t, p;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        const auto comma = line.find(',');
        if (comma == std::string::npos) throw ConfigError("law row without two columns: " + line);
        try {
            std::size_t used = 0;
            t.push_back(std::stod(line.substr(0, comma)));
            const std::string rest = line.substr(comma + 1);
            p.push_back(std::stod(rest, &used));
            if (used != rest.size()) throw std::invalid_argument(rest);
        } catch (const std::exception&) {
            throw ConfigError("unparsable law row: " + line);
        }
    }
    if (p.size() < 2) throw ValidationError("law needs at least two samples");
    const double n = static_cast<double>(p.size() - 1);
    for (std::size_t i = 0; i < t.size(); ++i) {
        if (std::abs(t[i] - static_cast<double>(i) / n) > 1e-9)
            throw ValidationError("law samples must lie on the uniform grid t_i = i/n");
    }
    return TimeLaw(std::move(p));
}

int run_solve(const fs::path& config_path, const Overrides& overrides, std::ostream& log) {
    return guarded(log, [&] {
        const RunConfig cfg = prepare(config_path, overrides);
        validate(cfg);
        if (cfg.alphas.size() != 1) throw ValidationError("solve takes a single alpha; use sweep for a list");
        const CurveModel curve = make_curve(cfg.curve);
        const double alpha = cfg.alphas.front();
        const Outcome o = compute(curve, cfg, alpha);
        write_file(resolve(overrides, cfg.csv_path), law_csv(curve, o.states, alpha, cfg.mass));
        write_file(resolve(overrides, cfg.report_path), report_json(o, cfg).dump(2) + "\n");
        log << "alpha " << short_number(alpha) << ": J = " << sci(o.cost.total)
            << (o.converged ? "" : " (not converged)") << '\n';
        return o.converged ? kOk : kSolverError;
    });
}

int run_sweep(const fs::path& config_path, const Overrides& overrides, std::ostream& log) {
    return guarded(log, [&] {
        const RunConfig cfg = prepare(config_path, overrides);
        validate(cfg);
        const CurveModel curve = make_curve(cfg.curve);
        std::vector<double> alphas = cfg.alphas;
        std::sort(alphas.begin(), alphas.end());
        alphas.erase(std::unique(alphas.begin(), alphas.end()), alphas.end());

        struct Member {
            double alpha = 0.0;
            Outcome outcome;
            int code = kOk;
            std::string message;
        };
        std::vector<std::future<Member>> jobs;
        for (double alpha : alphas) {
            jobs.push_back(std::async(std::launch::async, [&curve, &cfg, &overrides, alpha] {
                Member m{alpha, {}, kOk, {}};
                std::ostringstream msg;
                m.code = guarded(msg, [&] {
                    m.outcome = compute(curve, cfg, alpha);
                    write_file(resolve(overrides, with_alpha(cfg.csv_path, alpha).string()),
                               law_csv(curve, m.outcome.states, alpha, cfg.mass));
                    write_file(resolve(overrides, with_alpha(cfg.report_path, alpha).string()),
                               report_json(m.outcome, cfg).dump(2) + "\n");
                    return m.outcome.converged ? kOk : kSolverError;
                });
                m.message = msg.str();
                return m;
            }));
        }
        std::vector<Member> members;
        for (auto& job : jobs) members.push_back(job.get());

        int code = kOk;
        std::string summary = "alpha,J_total,J_kinetic,inertia_measure,max_abs_accel\n";
        for (const Member& m : members) {
            if (!m.message.empty()) log << "alpha " << short_number(m.alpha) << ": " << m.message;
            if (m.code != kOk) {
                if (code == kOk) code = m.code;
                if (m.outcome.states.empty()) continue;
            }
            const CostBreakdown& c = m.outcome.cost;
            summary += sci(m.alpha) + ',' + sci(c.total) + ',' + sci(c.kinetic) + ',' + sci(c.inertia_measure) + ',' +
                       sci(max_abs_accel(curve, m.outcome.states)) + '\n';
            if (m.code == kOk) log << "alpha " << short_number(m.alpha) << ": J = " << sci(c.total) << '\n';
        }
        write_file(resolve(overrides, cfg.summary_path), summary);
        return code;
    });
}

int run_compare(const fs::path& config_path, const Overrides& overrides, std::ostream& log) {
    return guarded(log, [&] {
        const RunConfig cfg = prepare(config_path, overrides);
        validate(cfg);
        if (kind_of(cfg.curve) != CurveKind::line) throw ValidationError("compare supports line curves only");
        if (cfg.alphas.size() != 1) throw ValidationError("compare takes a single alpha");
        const CurveModel curve = make_curve(cfg.curve);
        const double alpha = cfg.alphas.front();
        const OracleConfig oc = oracle_config(cfg);
        timelaw::validate(oc);

        const LineLaw analytic = line_analytic(cfg.p0, cfg.p1, alpha, cfg.mass);
        const SolutionReport shot = shoot(curve, solver_config(cfg, alpha));
        const OracleResult direct = oracle_minimize(curve, cfg.p0, cfg.p1, alpha, cfg.mass, oc);

        const int n = cfg.n;
        std::vector<double> pa(static_cast<std::size_t>(n) + 1), ps(pa.size()), po(pa.size());
        for (int i = 0; i <= n; ++i) {
            const double t = static_cast<double>(i) / n;
            pa[static_cast<std::size_t>(i)] = analytic.at(t).p;
            ps[static_cast<std::size_t>(i)] = shot.trajectory.states[static_cast<std::size_t>(i)].p;
            po[static_cast<std::size_t>(i)] = oc.n == n ? direct.law[i] : sample(direct.law, t);
        }
        std::vector<StateVector> exact(pa.size());
        for (int i = 0; i <= n; ++i) exact[static_cast<std::size_t>(i)] = analytic.at(static_cast<double>(i) / n);

        const json report{
            {"alpha", alpha},
            {"n", n},
            {"oracle_n", oc.n},
            {"max_deviation",
             {{"analytic_shoot", max_deviation(pa, ps)},
              {"analytic_oracle", max_deviation(pa, po)},
              {"shoot_oracle", max_deviation(ps, po)}}},
            {"J_total",
             {{"analytic", evaluate_cost(curve, exact, alpha, cfg.mass).total},
              {"shoot", shot.cost.total},
              {"oracle", evaluate_cost(curve, direct.law, alpha, cfg.mass).total}}},
            {"shoot_converged", shot.converged},
            {"oracle_converged", direct.converged},
            {"variant", std::string(to_string(cfg.variant))}};
        write_file(resolve(overrides, cfg.report_path), report.dump(2) + "\n");
        log << "analytic-shoot " << sci(report["max_deviation"]["analytic_shoot"].get<double>()) << '\n'
            << "analytic-oracle " << sci(report["max_deviation"]["analytic_oracle"].get<double>()) << '\n'
            << "shoot-oracle " << sci(report["max_deviation"]["shoot_oracle"].get<double>()) << '\n';
        return shot.converged && direct.converged ? kOk : kSolverError;
    });
}

int run_validate(const fs::path& config_path, const Overrides& overrides, std::ostream& log) {
    return guarded(log, [&] {
        const RunConfig cfg = prepare(config_path, overrides);
        const CurveModel curve = make_curve(cfg.curve);
        const double alpha = cfg.alphas.empty() ? 0.01 : cfg.alphas.front();
        if (!(alpha > 0.0) || !(cfg.mass > 0.0)) throw ValidationError("alpha and mass must be > 0");

        double lo = std::min(cfg.p0, cfg.p1), hi = std::max(cfg.p0, cfg.p1);
        if (hi - lo < 1e-6) {
            lo -= 1.0;
            hi += 1.0;
        }
        std::vector<double> grid(41);
        for (std::size_t i = 0; i < grid.size(); ++i) grid[i] = lo + (hi - lo) * static_cast<double>(i) / 40.0;
        const ValidationReport deriv = validate_derivatives(curve, grid, 1e-4);
        const GradientCheck grad = gradient_check(curve, cfg, alpha);

        const bool ok = deriv.all_passed() && grad.passed();
        const json report{{"derivatives",
                           {{"tolerance", deriv.tolerance},
                            {"max_deviation", deriv.max_deviation},
                            {"passed", deriv.passed},
                            {"all_passed", deriv.all_passed()}}},
                          {"gradient",
                           {{"laws", grad.laws},
                            {"n", grad.n},
                            {"tolerance", grad.tolerance},
                            {"max_relative_error", grad.max_relative_error},
                            {"passed", grad.passed()}}},
                          {"passed", ok}};
        write_file(resolve(overrides, cfg.report_path), report.dump(2) + "\n");
        log << "derivatives " << (deriv.all_passed() ? "pass" : "FAIL") << ", gradient "
            << (grad.passed() ? "pass" : "FAIL") << " (max relative error " << sci(grad.max_relative_error)
            << ")\n";
        return ok ? kOk : kValidationError;
    });
}

int run_evaluate(const fs::path& config_path, const fs::path& law_path, const Overrides& overrides,
                 std::ostream& log) {
    return guarded(log, [&] {
        const RunConfig cfg = prepare(config_path, overrides);
        const CurveModel curve = make_curve(cfg.curve);
        if (cfg.alphas.size() != 1) throw ValidationError("evaluate takes a single alpha");
        const TimeLaw law = read_law_csv(read_file(law_path));
        const CostBreakdown c = evaluate_cost(curve, law, cfg.alphas.front(), cfg.mass);
        const json report{{"J_total", c.total}, {"J_kinetic", c.kinetic}, {"inertia_measure", c.inertia_measure}};
        write_file(resolve(overrides, cfg.report_path), report.dump(2) + "\n");
        log << "J = " << sci(c.total) << '\n';
        return kOk;
    });
}

}  // namespace timelaw::app
