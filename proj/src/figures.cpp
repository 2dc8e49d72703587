#include <algorithm>
#include <cmath>
#include <deque>
#include <functional>
#include <map>

#include "emit.hpp"
#include "qsim/errors.hpp"

namespace qsim {

namespace {

using detail::Curve;
using detail::Emitter;
using detail::linspace;

constexpr ObservableKind kReported = ObservableKind::reported_active;
constexpr ObservableKind kTotal = ObservableKind::total_infected;
constexpr ObservableKind kInfectious = ObservableKind::infectious;
constexpr ObservableKind kQuarantined = ObservableKind::total_quarantined;

const char* const kTime = "t (days)";

// State shared by the panels of one figure.
class Figure {
public:
    Figure(std::string_view id, std::string title, const std::filesystem::path& out_dir,
           const RunOverrides& overrides)
        : id_(id), out_("figure", "", out_dir), overrides_(overrides) {
        params_["figure"] = id_;
        params_["title"] = std::move(title);
        params_["scenarios"] = nlohmann::json::object();
        params_["panels"] = nlohmann::json::object();
    }

    /// Applies the overrides and records the scenario in params.json.
    ScenarioConfig scenario(const std::string& label, ScenarioConfig c) {
        overrides_.apply(c);
        c.validate();
        params_["scenarios"][label] = to_json(c);
        return c;
    }

    const Trajectory& run(const ScenarioConfig& c) { return trajectories_.emplace_back(simulate(c)); }

    void curves(const std::string& panel, const std::string& description, std::span<const Curve> curves,
                const std::string& y_label) {
        params_["panels"][panel] = description;
        detail::curve_panel(out_, name(panel), curves, {description, kTime, y_label, false});
    }

    void heatmap(const std::string& panel, const std::string& description, const SweepGrid& grid,
                 const std::string& x_label, const std::string& y_label) {
        params_["panels"][panel] = description;
        out_.grid_csv(name(panel) + ".csv", grid);
        out_.heatmap(name(panel) + ".svg", grid, {description, x_label, y_label, false});
    }

    void table(const std::string& panel, const std::string& description, const CsvTable& table,
               std::span<const Series> series, const std::string& x_label, const std::string& y_label) {
        params_["panels"][panel] = description;
        out_.csv(name(panel) + ".csv", table);
        out_.line_chart(name(panel) + ".svg", series, {description, x_label, y_label, true});
    }

    nlohmann::json& params() { return params_; }
    unsigned threads() const { return overrides_.threads; }

    RunManifest finish() {
        out_.json("params.json", params_);
        return out_.finish();
    }

private:
    std::string name(const std::string& panel) const { return id_ + panel; }

    std::string id_;
    Emitter out_;
    RunOverrides overrides_;
    nlohmann::json params_;
    std::deque<Trajectory> trajectories_;
};

std::string short_num(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%g", v);
    return buf;
}

ScenarioConfig basic_default() { return ScenarioConfig::defaults(ModelKind::basic); }
ScenarioConfig extended_default() { return ScenarioConfig::defaults(ModelKind::extended); }

BasicParams& basic(ScenarioConfig& c) { return std::get<BasicParams>(c.params); }
ExtendedParams& extended(ScenarioConfig& c) { return std::get<ExtendedParams>(c.params); }

Observable obs(const ScenarioConfig& c, ObservableKind k) { return Observable::of(c.model_kind(), k); }

// One run per config, the same pair of observables on two panels.
void two_panels(Figure& fig, const std::vector<std::pair<std::string, ScenarioConfig>>& runs, const std::string& p1,
                const std::string& d1, ObservableKind k1, const std::string& p2, const std::string& d2,
                ObservableKind k2) {
    std::vector<Curve> c1, c2;
    for (const auto& [label, config] : runs) {
        const Trajectory& t = fig.run(config);
        c1.push_back({label, &t, obs(config, k1)});
        c2.push_back({label, &t, obs(config, k2)});
    }
    fig.curves(p1, d1, c1, std::string(to_string(k1)));
    fig.curves(p2, d2, c2, std::string(to_string(k2)));
}

RunManifest fig2(const std::filesystem::path& dir, const RunOverrides& ov) {
    Figure fig("fig2", "SEIR, basic and extended models without intervention", dir, ov);
    const auto seir = fig.scenario("seir", ScenarioConfig::defaults(ModelKind::seir));
    const auto base = fig.scenario("basic", basic_default());
    two_panels(fig, {{"SEIR", seir}, {"basic", base}}, "a", "I_sQ (I for SEIR)", kReported, "c",
               "I_a+I_aQ+I_sQ (I for SEIR)", kTotal);

    ScenarioConfig single = extended_default();
    single.initial.exposed = 2.0 / single.population_size;
    single.initial.exposed_a = 0.0;
    const auto ext_single = fig.scenario("extended_es_only", single);
    const auto ext_split = fig.scenario("extended", extended_default());
    two_panels(fig, {{"E_s(0)=2/N", ext_single}, {"E_s(0)=E_a(0)=1/N", ext_split}}, "b",
               "Extended model, I_sQ", kReported, "d", "Extended model, total infected incl. latent", kTotal);
    return fig.finish();
}

RunManifest fig3(const std::filesystem::path& dir, const RunOverrides& ov) {
    Figure fig("fig3", "Effect of the initial quarantine size", dir, ov);
    const std::vector<double> sizes{0.0, 0.1, 0.2, 0.3, 0.4};
    fig.params()["quarantine_sizes"] = sizes;
    std::vector<std::pair<std::string, ScenarioConfig>> b, e;
    for (double q : sizes) {
        ScenarioConfig cb = basic_default();
        set_abrupt_quarantine(cb, q);
        b.emplace_back("S_Q(0)=" + short_num(q), fig.scenario("basic_sq_" + short_num(q), cb));
        ScenarioConfig ce = extended_default();
        set_abrupt_quarantine(ce, q);
        e.emplace_back("S_sQ(0)+S_aQ(0)=" + short_num(q), fig.scenario("extended_sq_" + short_num(q), ce));
    }
    two_panels(fig, b, "a", "Basic model, I_sQ", kReported, "c", "Basic model, I_a+I_aQ+I_sQ", kTotal);
    two_panels(fig, e, "b", "Extended model, I_sQ", kReported, "d", "Extended model, total infected incl. latent",
               kTotal);
    return fig.finish();
}

RunManifest fig4(const std::filesystem::path& dir, const RunOverrides& ov) {
    Figure fig("fig4", "Effect of the quarantine conservation feedback (psi = 0.1)", dir, ov);
    std::vector<std::pair<std::string, ScenarioConfig>> runs;
    for (double q : {0.2, 0.4}) {
        for (bool feedback : {true, false}) {
            ScenarioConfig c = extended_default();
            extended(c).psi_s = extended(c).psi_a = 0.1;
            extended(c).feedback_enabled = feedback;
            set_abrupt_quarantine(c, q);
            const std::string tag = std::string(feedback ? "F conserving" : "F=0") + ", S_sQ+S_aQ=" + short_num(q);
            runs.emplace_back(tag, fig.scenario(std::string(feedback ? "feedback" : "no_feedback") + "_sq_" + short_num(q),
                                                c));
        }
    }
    two_panels(fig, runs, "a", "Extended model, I_sQ", kReported, "b", "Extended model, I_sQ+I_a+I_aQ",
               kInfectious);
    return fig.finish();
}

RunManifest fig5(const std::filesystem::path& dir, const RunOverrides& ov) {
    Figure fig("fig5", "Effect of the testing rate", dir, ov);
    const std::vector<double> rates{0.0, 0.1, 0.2, 0.3};
    fig.params()["testing_rates"] = rates;
    std::vector<std::pair<std::string, ScenarioConfig>> b, e;
    for (double psi : rates) {
        ScenarioConfig cb = basic_default();
        basic(cb).psi = psi;
        b.emplace_back("psi=" + short_num(psi), fig.scenario("basic_psi_" + short_num(psi), cb));
        ScenarioConfig ce = extended_default();
        extended(ce).psi_s = extended(ce).psi_a = psi;
        e.emplace_back("psi=" + short_num(psi), fig.scenario("extended_psi_" + short_num(psi), ce));
    }
    two_panels(fig, b, "a", "Basic model, I_sQ", kReported, "c", "Basic model, I_a+I_aQ+I_sQ", kTotal);
    two_panels(fig, e, "b", "Extended model, I_sQ", kReported, "d", "Extended model, total infected incl. latent",
               kTotal);
    return fig.finish();
}

// Extended model with S_sQ(0) = S_aQ(0) = 0.1 and no testing.
ScenarioConfig sensitivity_base() {
    ScenarioConfig c = extended_default();
    c.initial.quarantined = 0.1;
    c.initial.quarantined_a = 0.1;
    return c;
}

void heatmap_pair(Figure& fig, const ScenarioConfig& base, const SweepAxis& a1, const SweepAxis& a2,
                  const std::string& p_reported, const std::string& p_infectious, const std::string& what,
                  const std::string& x_label, const std::string& y_label) {
    const ObservableKind kinds[] = {kReported, kInfectious};
    SweepOptions options;
    options.threads = fig.threads();
    const auto grids = sweep(base, a1, a2, kinds, options);
    for (const auto& g : grids) {
        if (!g.ok()) throw NumericalError("sweep cell failed: " + g.errors[0]);
    }
    fig.heatmap(p_reported, "Peak of I_sQ, " + what, grids[0], x_label, y_label);
    fig.heatmap(p_infectious, "Peak of I_a+I_aQ+I_sQ, " + what, grids[1], x_label, y_label);
}

RunManifest fig6(const std::filesystem::path& dir, const RunOverrides& ov) {
    Figure fig("fig6", "Peak heights over the infectious periods 1/gamma_s and 1/gamma_a", dir, ov);
    const SweepAxis gs{"inv_gamma_s", linspace(2.0, 6.0, 9)};
    const SweepAxis ga{"inv_gamma_a", linspace(2.0, 6.0, 9)};
    for (double lambda : {0.5, 10.0}) {
        ScenarioConfig c = sensitivity_base();
        extended(c).lambda_s = extended(c).lambda_a = lambda;
        const auto base = fig.scenario("lambda_" + short_num(lambda), c);
        const bool slow = lambda == 0.5;
        heatmap_pair(fig, base, gs, ga, slow ? "a" : "c", slow ? "b" : "d", "lambda=" + short_num(lambda), "1/gamma_s",
                     "1/gamma_a");
    }
    return fig.finish();
}

RunManifest fig7(const std::filesystem::path& dir, const RunOverrides& ov) {
    Figure fig("fig7", "Peak heights over transmission and testing rates", dir, ov);
    const auto base = fig.scenario("base", sensitivity_base());
    heatmap_pair(fig, base, {"beta_s", linspace(0.1, 1.0, 10)}, {"beta_a", linspace(0.1, 1.0, 10)}, "a", "b",
                 "psi_s=psi_a=0", "beta_s", "beta_a");
    heatmap_pair(fig, base, {"psi_s", linspace(0.0, 0.3, 7)}, {"psi_a", linspace(0.0, 0.3, 7)}, "c", "d",
                 "beta_s=beta_a=0.5", "psi_s", "psi_a");
    return fig.finish();
}

RunManifest fig8(const std::filesystem::path& dir, const RunOverrides& ov) {
    Figure fig("fig8", "Timing and height of the I_sQ peak against the latent period", dir, ov);
    constexpr double kDelta = 1.0 / 5.5;
    const std::vector<double> latent{5.0, 4.5, 4.0, 3.5, 3.0, 2.5, 2.0, 1.5, 1.0, 0.5, 0.25, 0.1, 0.05};
    std::vector<double> lambdas;
    for (double l : latent) lambdas.push_back(1.0 / l);
    fig.params()["inv_lambda"] = latent;
    fig.params()["delta"] = kDelta;
    const auto base = fig.scenario("extended", extended_default());
    const LatencySweep sw = latency_sweep(base, lambdas, kDelta);

    CsvTable timing, height;
    timing.header = {"inv_lambda", "peak_time", "basic_reference"};
    height.header = {"inv_lambda", "peak_value", "basic_reference"};
    Series st{"extended", {}, {}}, sh{"extended", {}, {}};
    for (std::size_t i = 0; i < sw.cells.size(); ++i) {
        const auto& cell = sw.cells[i];
        if (!cell.error.empty()) throw NumericalError("latency sweep cell failed: " + cell.error);
        timing.rows.push_back({format_number(latent[i]), format_number(cell.peak_time),
                               format_number(sw.reference.time)});
        height.rows.push_back({format_number(latent[i]), format_number(cell.peak_value),
                               format_number(sw.reference.value)});
        st.x.push_back(latent[i]);
        st.y.push_back(cell.peak_time);
        sh.x.push_back(latent[i]);
        sh.y.push_back(cell.peak_value);
    }
    const Series rt{"basic model", {0.0}, {sw.reference.time}};
    const Series rh{"basic model", {0.0}, {sw.reference.value}};
    const Series timing_series[] = {st, rt};
    const Series height_series[] = {sh, rh};
    fig.table("a", "Peak time of I_sQ", timing, timing_series, "1/lambda (days)", "peak time (days)");
    fig.table("b", "Peak height of I_sQ", height, height_series, "1/lambda (days)", "peak of I_sQ");
    return fig.finish();
}

RunManifest fig9(const std::filesystem::path& dir, const RunOverrides& ov) {
    Figure fig("fig9", "Abrupt versus gradual quarantining matched on the I_sQ peak", dir, ov);
    std::vector<Curve> reported, total, quarantined;
    nlohmann::json matches = nlohmann::json::object();
    for (double q : {0.2, 0.4}) {
        ScenarioConfig abrupt = basic_default();
        set_abrupt_quarantine(abrupt, q);
        abrupt = fig.scenario("abrupt_sq_" + short_num(q), abrupt);
        const double target = evaluate_peak(abrupt, kReported).value;
        const auto m = match_gradual_quarantine(target, untreated_scenario(abrupt), kReported);
        ScenarioConfig gradual = untreated_scenario(abrupt);
        basic(gradual).chi = m.value;
        gradual = fig.scenario("gradual_for_sq_" + short_num(q), gradual);
        matches["sq_" + short_num(q)] = {{"chi", m.value}, {"target_peak", target}, {"achieved_peak", m.achieved_peak}};

        const Trajectory& ta = fig.run(abrupt);
        const Trajectory& tg = fig.run(gradual);
        const std::string la = "S_Q(0)=" + short_num(q);
        const std::string lg = "chi matched to S_Q(0)=" + short_num(q);
        for (auto [vec, kind] : {std::pair{&reported, kReported}, std::pair{&total, kTotal}, std::pair{&quarantined, kQuarantined}}) {
            vec->push_back({la, &ta, obs(abrupt, kind)});
            vec->push_back({lg, &tg, obs(gradual, kind)});
        }
    }
    fig.params()["matches"] = matches;
    fig.curves("a", "Basic model, I_sQ", reported, "reported_active");
    fig.curves("b", "Basic model, I_a+I_aQ+I_sQ", total, "total_infected");
    fig.curves("c", "Basic model, quarantined population", quarantined, "total_quarantined");
    return fig.finish();
}

// Panels (a)-(d) shared by the two cost comparisons.
RunManifest cost_figure(std::string_view id, std::string title, const ScenarioConfig& config,
                        std::span<const QuarantineStrategy> strategies, ObservableKind kind,
                        const std::filesystem::path& dir, const RunOverrides& ov) {
    Figure fig(id, std::move(title), dir, ov);
    const auto base = fig.scenario("base", config);
    std::vector<double> rates;
    for (int i = 1; i <= 12; ++i) rates.push_back(0.025 * i);
    constexpr double kShown = 0.1;
    fig.params()["testing_rates"] = rates;
    fig.params()["shown_testing_rate"] = kShown;
    fig.params()["observable"] = std::string(to_string(kind));

    std::vector<std::vector<CostRatio>> results(strategies.size());
    for (std::size_t s = 0; s < strategies.size(); ++s) {
        for (double psi : rates) results[s].push_back(quarantine_cost_ratio(psi, base, strategies[s], kind));
    }

    // (a), (b): trajectories at the shown testing rate.
    const auto shown = std::size_t(std::lround(kShown / 0.025)) - 1;
    const ScenarioConfig testing = fig.scenario("testing_psi_" + short_num(kShown), testing_scenario(base, kShown));
    std::vector<std::pair<std::string, ScenarioConfig>> runs{{"testing psi=" + short_num(kShown), testing}};
    for (std::size_t s = 0; s < strategies.size(); ++s) {
        const MatchResult& m = results[s][shown].match;
        ScenarioConfig c = untreated_scenario(base);
        if (strategies[s] == QuarantineStrategy::abrupt) {
            set_abrupt_quarantine(c, m.value);
            runs.emplace_back("S_Q(0)=" + short_num(m.value), fig.scenario("abrupt_matched", c));
        } else {
            basic(c).chi = m.value;
            runs.emplace_back("chi=" + short_num(m.value), fig.scenario("gradual_matched", c));
        }
    }
    two_panels(fig, runs, "a", "Infected with matched peaks (" + std::string(to_string(kind)) + ")", kind, "b",
               "Quarantined population", kQuarantined);

    // (c), (d): matched parameter and cost ratio against psi.
    CsvTable matched, ratio;
    matched.header = {"psi"};
    ratio.header = {"psi"};
    std::vector<Series> ms, rs;
    for (std::size_t s = 0; s < strategies.size(); ++s) {
        const std::string name(to_string(strategies[s]));
        matched.header.push_back(name == "abrupt" ? "S_Q(0)" : "chi");
        ratio.header.push_back(name);
        ms.push_back({matched.header.back(), rates, {}});
        rs.push_back({name, rates, {}});
        for (const auto& r : results[s]) {
            ms.back().y.push_back(r.match.value);
            rs.back().y.push_back(r.ratio);
        }
    }
    for (std::size_t i = 0; i < rates.size(); ++i) {
        matched.rows.push_back({format_number(rates[i])});
        ratio.rows.push_back({format_number(rates[i])});
        for (std::size_t s = 0; s < strategies.size(); ++s) {
            matched.rows.back().push_back(format_number(ms[s].y[i]));
            ratio.rows.back().push_back(format_number(rs[s].y[i]));
        }
    }
    fig.table("c", "Indiscriminate quarantine giving the same peak as testing", matched, ms, "psi",
              "matched parameter");
    fig.table("d", "Quarantine integral, indiscriminate / testing", ratio, rs, "psi", "ratio");
    return fig.finish();
}

RunManifest fig10(const std::filesystem::path& dir, const RunOverrides& ov) {
    const QuarantineStrategy both[] = {QuarantineStrategy::abrupt, QuarantineStrategy::gradual};
    return cost_figure("fig10", "Indiscriminate quarantining versus testing, basic model", basic_default(), both,
                       kTotal, dir, ov);
}

RunManifest fig11(const std::filesystem::path& dir, const RunOverrides& ov) {
    const QuarantineStrategy abrupt[] = {QuarantineStrategy::abrupt};
    return cost_figure("fig11", "Indiscriminate quarantining versus testing, extended model", extended_default(),
                       abrupt, kInfectious, dir, ov);
}

using FigureFn = RunManifest (*)(const std::filesystem::path&, const RunOverrides&);

const std::map<std::string, FigureFn, std::less<>>& registry() {
    static const std::map<std::string, FigureFn, std::less<>> r{
        {"fig2", fig2}, {"fig3", fig3}, {"fig4", fig4},   {"fig5", fig5},   {"fig6", fig6},
        {"fig7", fig7}, {"fig8", fig8}, {"fig9", fig9}, {"fig10", fig10}, {"fig11", fig11},
    };
    return r;
}

}  // namespace

const std::vector<std::string>& figure_ids() {
    static const std::vector<std::string> ids{"fig2", "fig3", "fig4", "fig5", "fig6",
                                              "fig7", "fig8", "fig9", "fig10", "fig11"};
    return ids;
}

RunManifest run_figure(std::string_view id, const std::filesystem::path& out_dir, const RunOverrides& overrides) {
    const auto& r = registry();
    const auto it = r.find(id);
    if (it == r.end()) {
        std::string valid;
        for (const auto& k : figure_ids()) valid += (valid.empty() ? "" : ", ") + k;
        throw UsageError("unknown figure id '" + std::string(id) + "'; valid ids: " + valid);
    }
    return it->second(out_dir, overrides);
}

}  // namespace qsim
