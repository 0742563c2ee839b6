// timelaw: optimal time laws along planar toolpaths.
#include <iostream>
#include <string>

#include "CLI11.hpp"

#include "timelaw/app.hpp"
#include "timelaw/errors.hpp"

namespace app = timelaw::app;

int main(int argc, char** argv) {
    CLI::App cli{"Rest-to-rest time laws minimizing kinetic energy plus weighted inertia along a planar curve"};
    cli.require_subcommand(1);

    std::string config;
    std::string variant;
    std::string out_dir;
    std::string law;

    auto add_common = [&](CLI::App* sub) {
        sub->add_option("--config", config, "run configuration (JSON)")->required();
        sub->add_option("--variant", variant, "reduced ODE right-hand side")
            ->check(CLI::IsMember({"paper", "expanded"}));
        sub->add_option("--out-dir", out_dir, "directory for relative output paths");
    };
    auto* solve = cli.add_subcommand("solve", "solve for one alpha; writes the law CSV and a JSON report");
    auto* sweep = cli.add_subcommand("sweep", "solve for every alpha in the list; writes per-alpha files and a summary");
    auto* compare = cli.add_subcommand("compare", "line only: analytic, shooting and oracle laws side by side");
    auto* validate = cli.add_subcommand("validate", "derivative consistency and gradient checks");
    auto* evaluate = cli.add_subcommand("evaluate", "cost of a given t,p law");
    for (auto* sub : {solve, sweep, compare, validate, evaluate}) add_common(sub);
    evaluate->add_option("--law", law, "CSV with header t,p")->required();

    try {
        cli.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = cli.exit(e);
        return code == 0 ? 0 : app::kParseError;
    }

    app::Overrides overrides;
    if (!variant.empty()) overrides.variant = timelaw::variant_from_string(variant);
    if (!out_dir.empty()) overrides.out_dir = out_dir;

    if (solve->parsed()) return app::run_solve(config, overrides, std::cerr);
    if (sweep->parsed()) return app::run_sweep(config, overrides, std::cerr);
    if (compare->parsed()) return app::run_compare(config, overrides, std::cerr);
    if (validate->parsed()) return app::run_validate(config, overrides, std::cerr);
    return app::run_evaluate(config, law, overrides, std::cerr);
}
