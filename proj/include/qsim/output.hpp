#pragma once

#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "qsim/analysis.hpp"
#include "qsim/integrator.hpp"
#include "qsim/scenarios.hpp"

namespace qsim {

// ---------------------------------------------------------------------------
// CSV. RFC 4180 style, '\n' line endings, numbers as "%.17g" so every double round-trips.

struct CsvTable {
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;

    /// Cell (row, column) parsed as a number.
    double number(std::size_t row, std::size_t col) const;
};

std::string format_number(double v);

void write_csv(const std::filesystem::path& path, const CsvTable& table);
CsvTable read_csv(const std::filesystem::path& path);

/// Header `t,<observable names>`, one row per sample.
void write_timeseries_csv(const Trajectory& traj, std::span<const Observable> observables,
                          const std::filesystem::path& path);

/// First row: axis2 values (a single observable column for 1D grids).
/// First column: axis1 values. Body: peak heights.
void write_grid_csv(const SweepGrid& grid, const std::filesystem::path& path);

// ---------------------------------------------------------------------------
// SVG

struct Series {
    std::string label;
    std::vector<double> x;
    std::vector<double> y;
};

struct ChartStyle {
    std::string title;
    std::string x_label;
    std::string y_label;
    bool markers = false;
    int width = 720;
    int height = 480;
};

/// One <polyline> per series, with axes, ticks and a legend.
void write_line_chart(std::span<const Series> series, const ChartStyle& style, const std::filesystem::path& path);

/// Cells coloured by peak height with a fixed five-stop viridis ramp
/// (#440154, #3b528b, #21918c, #5ec962, #fde725) from grid min to grid max.
/// Failed cells are drawn grey.
void write_heatmap(const SweepGrid& grid, const ChartStyle& style, const std::filesystem::path& path);

/// Hex colour for a value in [0,1] on the heatmap ramp.
std::string heatmap_color(double unit);

void write_text_file(const std::filesystem::path& path, const std::string& text);

}  // namespace qsim
