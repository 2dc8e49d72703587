#include <algorithm>
#include <cmath>
#include <limits>

#include "emit.hpp"
#include "qsim/errors.hpp"

namespace qsim {

namespace detail {

Emitter::Emitter(std::string command, std::string config_path, const std::filesystem::path& out_dir) {
    manifest_.command = std::move(command);
    manifest_.config_path = std::move(config_path);
    manifest_.output_dir = out_dir;
    std::error_code ec;
    std::filesystem::create_directories(out_dir, ec);
    if (ec || !std::filesystem::is_directory(out_dir)) {
        throw IoError("cannot create output directory '" + out_dir.string() + "': " + ec.message());
    }
}

std::filesystem::path Emitter::file(const std::string& name, const char* kind) {
    manifest_.emitted_files.push_back({name, kind});
    return manifest_.output_dir / name;
}

void Emitter::csv(const std::string& name, const CsvTable& table) { write_csv(file(name, "csv"), table); }

void Emitter::grid_csv(const std::string& name, const SweepGrid& grid) { write_grid_csv(grid, file(name, "csv")); }

void Emitter::line_chart(const std::string& name, std::span<const Series> series, const ChartStyle& style) {
    write_line_chart(series, style, file(name, "svg"));
}

void Emitter::heatmap(const std::string& name, const SweepGrid& grid, const ChartStyle& style) {
    write_heatmap(grid, style, file(name, "svg"));
}

void Emitter::json(const std::string& name, const nlohmann::json& doc) {
    write_text_file(file(name, "json"), doc.dump(2) + "\n");
}

RunManifest Emitter::finish() {
    write_manifest(manifest_);
    return manifest_;
}

CsvTable curves_table(std::span<const Curve> curves) {
    if (curves.empty()) throw EmptyInputError("no curves to tabulate");
    const Trajectory& grid = *curves.front().trajectory;
    CsvTable t;
    t.header.push_back("t");
    for (const auto& c : curves) t.header.push_back(c.label);
    for (std::size_t j = 0; j < grid.size(); ++j) {
        const double time = grid.time(j);
        std::vector<std::string> row{format_number(time)};
        for (const auto& c : curves) {
            const Trajectory& tr = *c.trajectory;
            double v = std::numeric_limits<double>::quiet_NaN();
            if (j < tr.size() && tr.time(j) == time) {
                v = c.observable(tr.state(j));
            } else if (time <= tr.back_time()) {
                v = c.observable(interpolate(tr, time));
            }
            row.push_back(format_number(v));
        }
        t.rows.push_back(std::move(row));
    }
    return t;
}

std::vector<Series> curves_series(std::span<const Curve> curves, std::size_t stride) {
    stride = std::max<std::size_t>(stride, 1);
    std::vector<Series> out;
    for (const auto& c : curves) {
        Series s{c.label, {}, {}};
        const Trajectory& tr = *c.trajectory;
        for (std::size_t j = 0; j < tr.size(); ++j) {
            if (j % stride != 0 && j + 1 != tr.size()) continue;
            s.x.push_back(tr.time(j));
            s.y.push_back(c.observable(tr.state(j)));
        }
        out.push_back(std::move(s));
    }
    return out;
}

void curve_panel(Emitter& out, const std::string& name, std::span<const Curve> curves, const ChartStyle& style) {
    out.csv(name + ".csv", curves_table(curves));
    const Trajectory& first = *curves.front().trajectory;
    const double spacing = first.size() > 1 ? first.time(1) - first.time(0) : 1.0;
    const auto stride = static_cast<std::size_t>(std::max(1.0, std::round(1.0 / spacing)));
    const auto series = curves_series(curves, stride);
    out.line_chart(name + ".svg", series, style);
}

std::vector<double> linspace(double lo, double hi, std::size_t n) {
    if (n == 1) return {lo};
    std::vector<double> v(n);
    for (std::size_t i = 0; i < n; ++i) {
        v[i] = lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(n - 1);
    }
    v.back() = hi;
    return v;
}

}  // namespace detail

using detail::Curve;
using detail::Emitter;

nlohmann::json to_json(const RunManifest& manifest) {
    nlohmann::json files = nlohmann::json::array();
    for (const auto& f : manifest.emitted_files) files.push_back({{"path", f.path}, {"kind", f.kind}});
    return {{"command", manifest.command},
            {"config_path", manifest.config_path},
            {"output_dir", manifest.output_dir.generic_string()},
            {"emitted_files", files}};
}

void write_manifest(const RunManifest& manifest) {
    write_text_file(manifest.output_dir / "manifest.json", to_json(manifest).dump(2) + "\n");
}

void RunOverrides::apply(ScenarioConfig& config) const {
    if (rtol) config.integrator.rtol = *rtol;
    if (t_max) config.integrator.t_max = *t_max;
    config.integrator.validate();
}

namespace {

ScenarioConfig resolved(const RunSpec& spec, const RunOverrides& overrides) {
    ScenarioConfig c = spec.scenario;
    overrides.apply(c);
    c.validate();
    return c;
}

nlohmann::json match_json(const MatchResult& m) {
    return {{"parameter", m.parameter},         {"value", m.value},
            {"achieved_peak", m.achieved_peak}, {"target_peak", m.target_peak},
            {"iterations", m.iterations},       {"bracket", {m.bracket_lo, m.bracket_hi}}};
}

}  // namespace

RunManifest run_simulate(const RunSpec& spec, const std::string& config_path, const std::filesystem::path& out_dir,
                         const RunOverrides& overrides) {
    const ScenarioConfig config = resolved(spec, overrides);
    const ScenarioResult result = run_scenario(config);
    const ModelKind model = config.model_kind();

    std::vector<Observable> observables;
    for (auto k : spec.observables) observables.push_back(Observable::of(model, k));

    Emitter out("simulate", config_path, out_dir);
    write_timeseries_csv(result.trajectory, observables, out.file("timeseries.csv", "csv"));
    std::vector<Curve> curves;
    for (const auto& o : observables) curves.push_back({o.name(), &result.trajectory, o});
    const auto series = detail::curves_series(curves, 4);
    out.line_chart("timeseries.svg", series, {"Simulation", "t (days)", "density", false});

    nlohmann::json peaks = nlohmann::json::object();
    for (const auto& o : observables) {
        const Peak p = find_peak(result.trajectory, o);
        peaks[o.name()] = {{"time", p.time}, {"value", p.value}};
    }
    const auto& s = result.summary;
    out.json("summary.json", {{"model", std::string(to_string(model))},
                              {"peak_observable", s.observable_name},
                              {"peak_value", s.peak_value},
                              {"peak_time", s.peak_time},
                              {"end_time", s.end_time},
                              {"quarantine_integral", s.quarantine_integral},
                              {"degenerate", s.degenerate},
                              {"horizon", result.trajectory.back_time()},
                              {"peaks", peaks}});
    RunSpec effective = spec;
    effective.scenario = config;
    out.json("config.json", to_json(effective));
    return out.finish();
}

RunManifest run_match_peak(const RunSpec& spec, QuarantineStrategy strategy, double psi,
                           const std::string& config_path, const std::filesystem::path& out_dir,
                           const RunOverrides& overrides) {
    const ScenarioConfig config = resolved(spec, overrides);
    if (strategy == QuarantineStrategy::gradual && config.model_kind() != ModelKind::basic) {
        throw UnsupportedParameterError("gradual quarantining (chi) exists only in the basic model");
    }
    const ObservableKind kind = spec.match_observable;
    const ScenarioConfig testing = testing_scenario(config, psi);
    const double target = evaluate_peak(testing, kind).value;
    const ScenarioConfig base = untreated_scenario(config);

    ScenarioConfig matched = base;
    MatchResult match;
    if (strategy == QuarantineStrategy::abrupt) {
        match = match_abrupt_quarantine(target, base, kind);
        set_abrupt_quarantine(matched, match.value);
    } else {
        match = match_gradual_quarantine(target, base, kind);
        std::get<BasicParams>(matched.params).chi = match.value;
    }

    const Trajectory t_testing = simulate(testing);
    const Trajectory t_matched = simulate(matched);
    const ModelKind model = config.model_kind();
    const Observable obs = Observable::of(model, kind);
    const Observable quarantined = Observable::of(model, ObservableKind::total_quarantined);
    const std::string label = std::string(to_string(strategy));

    Emitter out("match-peak", config_path, out_dir);
    nlohmann::json doc = match_json(match);
    doc["strategy"] = label;
    doc["psi"] = psi;
    doc["observable"] = std::string(to_string(kind));
    out.json("match.json", doc);

    const Curve peak_curves[] = {{"testing", &t_testing, obs}, {label, &t_matched, obs}};
    detail::curve_panel(out, "match_observable", peak_curves,
                        {"Peak matched on " + obs.name(), "t (days)", obs.name(), false});
    const Curve q_curves[] = {{"testing", &t_testing, quarantined}, {label, &t_matched, quarantined}};
    detail::curve_panel(out, "match_quarantined", q_curves,
                        {"Quarantined population", "t (days)", quarantined.name(), false});
    return out.finish();
}

RunManifest run_sweep(const RunSpec& spec, const std::string& config_path, const std::filesystem::path& out_dir,
                      const RunOverrides& overrides, std::size_t* failed_cells) {
    if (!spec.sweep) throw ConfigError("sweep: configuration has no \"sweep\" section");
    const ScenarioConfig config = resolved(spec, overrides);
    const SweepSpec& sw = *spec.sweep;
    const ObservableKind kinds[] = {sw.observable};
    SweepOptions options;
    options.threads = overrides.threads;
    const SweepGrid grid = sweep(config, sw.axis1, sw.axis2, kinds, options).front();

    Emitter out("sweep", config_path, out_dir);
    out.grid_csv("sweep.csv", grid);
    const std::string title = "Peak of " + grid.observable;
    if (grid.axis2) {
        out.heatmap("sweep.svg", grid, {title, grid.axis1.path, grid.axis2->path, false});
    } else {
        const Series s{grid.observable, grid.axis1.values, grid.values};
        out.line_chart("sweep.svg", std::span(&s, 1), {title, grid.axis1.path, "peak", true});
    }

    std::size_t failed = 0;
    CsvTable errors;
    errors.header = {grid.axis1.path, grid.axis2 ? grid.axis2->path : std::string("axis2"), "error"};
    for (std::size_t i = 0; i < grid.rows(); ++i) {
        for (std::size_t j = 0; j < grid.cols(); ++j) {
            if (grid.error_at(i, j).empty()) continue;
            ++failed;
            errors.rows.push_back({format_number(grid.axis1.values[i]),
                                   grid.axis2 ? format_number(grid.axis2->values[j]) : std::string(),
                                   grid.error_at(i, j)});
        }
    }
    if (failed > 0) out.csv("sweep_errors.csv", errors);
    if (failed_cells) *failed_cells = failed;
    return out.finish();
}

RunManifest run_cost_ratio(const RunSpec& spec, std::span<const double> psi_grid, const std::string& config_path,
                           const std::filesystem::path& out_dir, const RunOverrides& overrides) {
    if (psi_grid.empty()) throw EmptyInputError("cost-ratio needs at least one psi value");
    const ScenarioConfig config = resolved(spec, overrides);
    std::vector<QuarantineStrategy> strategies{QuarantineStrategy::abrupt};
    if (config.model_kind() == ModelKind::basic) strategies.push_back(QuarantineStrategy::gradual);

    CsvTable table;
    table.header = {"psi",         "strategy",        "parameter",         "matched_value",
                    "target_peak", "achieved_peak",   "testing_end",       "testing_integral",
                    "indiscriminate_end", "indiscriminate_integral", "ratio"};
    std::vector<Series> ratios;
    for (auto strategy : strategies) {
        Series s{std::string(to_string(strategy)), {}, {}};
        for (double psi : psi_grid) {
            const CostRatio r = quarantine_cost_ratio(psi, config, strategy, spec.match_observable);
            table.rows.push_back({format_number(psi), s.label, r.match.parameter, format_number(r.match.value),
                                  format_number(r.match.target_peak), format_number(r.match.achieved_peak),
                                  format_number(r.testing_end), format_number(r.testing_integral),
                                  format_number(r.indiscriminate_end), format_number(r.indiscriminate_integral),
                                  format_number(r.ratio)});
            s.x.push_back(psi);
            s.y.push_back(r.ratio);
        }
        ratios.push_back(std::move(s));
    }

    Emitter out("cost-ratio", config_path, out_dir);
    out.csv("cost_ratio.csv", table);
    out.line_chart("cost_ratio.svg", ratios,
                   {"Indiscriminate / testing quarantine cost", "psi", "ratio of quarantine integrals", true});
    return out.finish();
}

}  // namespace qsim
