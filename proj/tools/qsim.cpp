// qsim: command-line front end for the quarantine/testing epidemic models.
//
// Exit codes: 0 success, 1 invalid input or usage, 2 numerical failure.

#include <exception>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "qsim/commands.hpp"
#include "qsim/config.hpp"
#include "qsim/errors.hpp"

namespace {

enum Exit { kOk = 0, kInvalid = 1, kNumerical = 2 };

void report(const qsim::RunManifest& m) {
    for (const auto& f : m.emitted_files) std::cout << (m.output_dir / f.path).generic_string() << '\n';
    std::cout << (m.output_dir / "manifest.json").generic_string() << '\n';
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Epidemic simulator with quarantine and testing"};
    app.require_subcommand(1);

    qsim::RunOverrides overrides;
    double tolerance = 0.0;
    double t_max = 0.0;
    auto* tol_opt = app.add_option("--tolerance", tolerance, "Relative tolerance of the adaptive integrator")
                        ->check(CLI::PositiveNumber);
    auto* tmax_opt = app.add_option("--t-max", t_max, "Integration horizon in days")->check(CLI::PositiveNumber);
    app.add_option("--threads", overrides.threads, "Worker threads for sweeps (0 = all cores)");

    std::string config_path;
    std::string out_dir;

    auto* simulate = app.add_subcommand("simulate", "Run one scenario and write its time series");
    simulate->add_option("--config", config_path, "JSON configuration")->required();
    simulate->add_option("--out", out_dir, "Output directory")->required();

    std::string strategy = "abrupt";
    double psi = 0.0;
    auto* match = app.add_subcommand("match-peak", "Match indiscriminate quarantine to a testing scenario's peak");
    match->add_option("--config", config_path, "JSON configuration")->required();
    match->add_option("--strategy", strategy, "abrupt or gradual")
        ->check(CLI::IsMember({"abrupt", "gradual"}))
        ->required();
    match->add_option("--psi", psi, "Testing rate of the reference scenario")->required();
    match->add_option("--out", out_dir, "Output directory")->required();

    auto* sweep = app.add_subcommand("sweep", "Peak heights over a 1D or 2D parameter grid");
    sweep->add_option("--config", config_path, "JSON configuration with a sweep section")->required();
    sweep->add_option("--out", out_dir, "Output directory")->required();

    std::vector<double> psi_grid;
    auto* cost = app.add_subcommand("cost-ratio", "Quarantine cost of indiscriminate quarantining versus testing");
    cost->add_option("--config", config_path, "JSON configuration")->required();
    cost->add_option("--psi-grid", psi_grid, "Comma-separated testing rates")->delimiter(',')->required();
    cost->add_option("--out", out_dir, "Output directory")->required();

    std::string figure_id;
    std::string valid_ids;
    for (const auto& id : qsim::figure_ids()) valid_ids += (valid_ids.empty() ? "" : ", ") + id;
    auto* figure = app.add_subcommand("figure", "Reproduce one figure (" + valid_ids + ")");
    figure->add_option("id", figure_id, "Figure id")->required();
    figure->add_option("--out", out_dir, "Output directory")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kInvalid;
    }
    if (*tol_opt) overrides.rtol = tolerance;
    if (*tmax_opt) overrides.t_max = t_max;

    try {
        if (*figure) {
            report(qsim::run_figure(figure_id, out_dir, overrides));
            return kOk;
        }
        const qsim::RunSpec spec = qsim::parse_config_file(config_path);
        if (*simulate) {
            report(qsim::run_simulate(spec, config_path, out_dir, overrides));
        } else if (*match) {
            report(qsim::run_match_peak(spec, qsim::quarantine_strategy_from_string(strategy), psi, config_path,
                                        out_dir, overrides));
        } else if (*sweep) {
            std::size_t failed = 0;
            report(qsim::run_sweep(spec, config_path, out_dir, overrides, &failed));
            if (failed > 0) {
                std::cerr << "qsim: " << failed << " sweep cell(s) failed; see sweep_errors.csv\n";
                return kNumerical;
            }
        } else if (*cost) {
            report(qsim::run_cost_ratio(spec, psi_grid, config_path, out_dir, overrides));
        }
        return kOk;
    } catch (const qsim::NumericalError& e) {
        std::cerr << "qsim: numerical failure: " << e.what() << '\n';
        return kNumerical;
    } catch (const qsim::ValidationError& e) {
        std::cerr << "qsim: " << e.what() << '\n';
        return kInvalid;
    } catch (const qsim::IoError& e) {
        std::cerr << "qsim: " << e.what() << '\n';
        return kInvalid;
    } catch (const std::exception& e) {
        std::cerr << "qsim: " << e.what() << '\n';
        return kInvalid;
    }
}
