#pragma once

// Internal helpers shared by the command and figure drivers.

#include <filesystem>
#include <string>
#include <vector>

#include "qsim/commands.hpp"
#include "qsim/output.hpp"

namespace qsim::detail {

/// Writes files into one output directory and records them in a manifest.
class Emitter {
public:
    Emitter(std::string command, std::string config_path, const std::filesystem::path& out_dir);

    void csv(const std::string& name, const CsvTable& table);
    void grid_csv(const std::string& name, const SweepGrid& grid);
    void line_chart(const std::string& name, std::span<const Series> series, const ChartStyle& style);
    void heatmap(const std::string& name, const SweepGrid& grid, const ChartStyle& style);
    void json(const std::string& name, const nlohmann::json& doc);

    /// Registers a file written by other means and returns its full path.
    std::filesystem::path file(const std::string& name, const char* kind);

    /// Writes manifest.json and returns the manifest.
    RunManifest finish();

private:
    RunManifest manifest_;
};

/// One observable along one trajectory.
struct Curve {
    std::string label;
    const Trajectory* trajectory;
    Observable observable;
};

/// Columns `t,<labels>` on the first curve's time grid. Other curves are
/// interpolated where their grids differ and NaN past their last sample.
CsvTable curves_table(std::span<const Curve> curves);

/// The same data as chart series, keeping every `stride`-th sample and the last.
std::vector<Series> curves_series(std::span<const Curve> curves, std::size_t stride);

/// Time-series panel: CSV plus line chart named `<name>.csv` / `<name>.svg`.
void curve_panel(Emitter& out, const std::string& name, std::span<const Curve> curves, const ChartStyle& style);

std::vector<double> linspace(double lo, double hi, std::size_t n);

}  // namespace qsim::detail
