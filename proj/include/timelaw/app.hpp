#pragma once

#include <filesystem>
#include <optional>
#include <ostream>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "timelaw/bvp.hpp"
#include "timelaw/curve.hpp"
#include "timelaw/oracle.hpp"
#include "timelaw/reduced_ode.hpp"

namespace timelaw::app {

enum ExitCode : int {
    kOk = 0,
    kParseError = 2,
    kValidationError = 3,
    kSolverError = 4,
    kIoError = 5,
};

/// Malformed or unreadable configuration.
class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class IoError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

enum class Method { automatic, shoot, oracle };

std::string_view to_string(Method method);

struct RunConfig {
    CurveSpec curve = LineParams{};
    std::vector<double> alphas{0.01};
    double mass = 1.0;
    double p0 = 0.0;
    double p1 = 1.0;
    int n = 1000;
    RhsVariant variant = kDefaultVariant;
    Method method = Method::automatic;
    double newton_tol = 1e-10;
    int max_newton_iters = 50;
    int segments = 0;
    int oracle_n = 0;  // 0: same grid as the solver
    double grad_tol = 1e-8;
    int oracle_max_iters = 200000;
    std::string csv_path = "law.csv";
    std::string report_path = "report.json";
    std::string summary_path = "summary.csv";
};

/// Command-line overrides applied on top of the file.
struct Overrides {
    std::optional<RhsVariant> variant;
    std::optional<std::filesystem::path> out_dir;
};

/// Throws ConfigError on malformed JSON or unknown/mistyped fields.
RunConfig parse_config(std::string_view text);
RunConfig load_config(const std::filesystem::path& path);

/// Throws ValidationError.
void validate(const RunConfig& config);

SolverConfig solver_config(const RunConfig& config, double alpha);
OracleConfig oracle_config(const RunConfig& config);

/// One row per grid node, with columns t,p,dp,ddp,dddp,x,y,vx,vy,ax,ay,el_residual.
std::string law_csv(const CurveModel& curve, std::span<const StateVector> states, double alpha, double mass);

/// Reads a `t,p` series on a uniform grid.
TimeLaw read_law_csv(std::string_view text);

int run_solve(const std::filesystem::path& config_path, const Overrides& overrides, std::ostream& log);
int run_sweep(const std::filesystem::path& config_path, const Overrides& overrides, std::ostream& log);
int run_compare(const std::filesystem::path& config_path, const Overrides& overrides, std::ostream& log);
int run_validate(const std::filesystem::path& config_path, const Overrides& overrides, std::ostream& log);
/// Cost of a given `t,p` law under the configured curve and weights.
int run_evaluate(const std::filesystem::path& config_path, const std::filesystem::path& law_path,
                 const Overrides& overrides, std::ostream& log);

}  // namespace timelaw::app
