#pragma once

#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "qsim/config.hpp"
#include "qsim/scenarios.hpp"

namespace qsim {

struct EmittedFile {
    std::string path;  ///< relative to the output directory
    std::string kind;  ///< "csv", "svg" or "json"

    bool operator==(const EmittedFile&) const = default;
};

struct RunManifest {
    std::string command;  ///< simulate, match-peak, sweep, cost-ratio or figure
    std::string config_path;
    std::filesystem::path output_dir;
    std::vector<EmittedFile> emitted_files;
};

nlohmann::json to_json(const RunManifest& manifest);
/// Writes `manifest.json` into the output directory.
void write_manifest(const RunManifest& manifest);

/// Command-line overrides applied on top of a parsed configuration.
struct RunOverrides {
    std::optional<double> rtol;
    std::optional<double> t_max;
    unsigned threads = 0;

    void apply(ScenarioConfig& config) const;
};

/// Time series of the configured observables plus a summary.json.
RunManifest run_simulate(const RunSpec& spec, const std::string& config_path, const std::filesystem::path& out_dir,
                         const RunOverrides& overrides = {});

/// Matches the indiscriminate strategy to the peak of the testing-only
/// scenario with rate psi.
RunManifest run_match_peak(const RunSpec& spec, QuarantineStrategy strategy, double psi,
                           const std::string& config_path, const std::filesystem::path& out_dir,
                           const RunOverrides& overrides = {});

/// Needs a "sweep" section in the spec. Failed cells are written as NaN and
/// listed in sweep_errors.csv; `failed_cells` reports how many there were.
RunManifest run_sweep(const RunSpec& spec, const std::string& config_path, const std::filesystem::path& out_dir,
                      const RunOverrides& overrides = {}, std::size_t* failed_cells = nullptr);

/// Both strategies for the basic model, abrupt only for the extended one.
RunManifest run_cost_ratio(const RunSpec& spec, std::span<const double> psi_grid, const std::string& config_path,
                           const std::filesystem::path& out_dir, const RunOverrides& overrides = {});

const std::vector<std::string>& figure_ids();

/// Per-panel CSV and SVG files plus params.json. Throws UsageError for an
/// unknown id.
RunManifest run_figure(std::string_view id, const std::filesystem::path& out_dir, const RunOverrides& overrides = {});

}  // namespace qsim
