#include "qsim/scenarios.hpp"

#include <cmath>
#include <string>
#include <utility>

#include "qsim/errors.hpp"

namespace qsim {

namespace {

template <class... Ts>
struct overloaded : Ts... {
    using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

// Pointers to the fields addressed by a parameter name; aliases expand to
// several fields.
std::vector<double*> param_fields(ModelParams& params, std::string_view name) {
    return std::visit(
        overloaded{
            [&](SeirParams& p) -> std::vector<double*> {
                if (name == "beta") return {&p.beta};
                if (name == "omega") return {&p.omega};
                if (name == "delta") return {&p.delta};
                return {};
            },
            [&](BasicParams& p) -> std::vector<double*> {
                if (name == "beta") return {&p.beta};
                if (name == "omega") return {&p.omega};
                if (name == "delta") return {&p.delta};
                if (name == "psi") return {&p.psi};
                if (name == "chi") return {&p.chi};
                if (name == "rho") return {&p.rho};
                if (name == "k") return {&p.k};
                return {};
            },
            [&](ExtendedParams& p) -> std::vector<double*> {
                if (name == "beta_s") return {&p.beta_s};
                if (name == "beta_a") return {&p.beta_a};
                if (name == "omega_s") return {&p.omega_s};
                if (name == "omega_a") return {&p.omega_a};
                if (name == "lambda_s") return {&p.lambda_s};
                if (name == "lambda_a") return {&p.lambda_a};
                if (name == "gamma_s") return {&p.gamma_s};
                if (name == "gamma_a") return {&p.gamma_a};
                if (name == "psi_s") return {&p.psi_s};
                if (name == "psi_a") return {&p.psi_a};
                if (name == "rho") return {&p.rho};
                if (name == "beta") return {&p.beta_s, &p.beta_a};
                if (name == "omega") return {&p.omega_s, &p.omega_a};
                if (name == "lambda") return {&p.lambda_s, &p.lambda_a};
                if (name == "gamma") return {&p.gamma_s, &p.gamma_a};
                if (name == "psi") return {&p.psi_s, &p.psi_a};
                return {};
            },
        },
        params);
}

double* initial_field(InitialConditions& init, std::string_view name) {
    if (name == "exposed") return &init.exposed;
    if (name == "exposed_a") return &init.exposed_a;
    if (name == "quarantined") return &init.quarantined;
    if (name == "quarantined_a") return &init.quarantined_a;
    return nullptr;
}

[[noreturn]] void unknown_path(const ScenarioConfig& config, std::string_view path) {
    throw ConfigError("unknown parameter path '" + std::string(path) + "' for model " +
                      std::string(to_string(config.model_kind())));
}

void require_unit(double v, const char* name) {
    if (!(std::isfinite(v) && v >= 0.0 && v <= 1.0)) {
        throw ConfigError(std::string("initial.") + name + " must lie in [0,1], got " + describe(v));
    }
}

// Re-throws numerical failures with the scenario described in front.
template <typename F>
auto with_context(const ScenarioConfig& config, F&& body) -> decltype(body()) {
    const auto ctx = [&config] {
        return "scenario (model " + std::string(to_string(config.model_kind())) + ", t_max " +
               describe(config.integrator.t_max) + "): ";
    };
    try {
        return body();
    } catch (const DivergenceError& e) {
        throw DivergenceError(ctx() + e.what());
    } catch (const StiffnessError& e) {
        throw StiffnessError(ctx() + e.what());
    }
}

double relative_mismatch(double achieved, double target) { return std::abs(achieved - target) / target; }

void require_no_intervention(const ScenarioConfig& base, bool allow_initial_quarantine) {
    std::visit(overloaded{
                   [](const SeirParams&) {
                       throw UnsupportedParameterError("quarantine matching needs the basic or extended model");
                   },
                   [](const BasicParams& p) {
                       if (p.psi != 0.0 || p.chi != 0.0) {
                           throw ConfigError("matching base must have psi = chi = 0");
                       }
                   },
                   [](const ExtendedParams& p) {
                       if (p.psi_s != 0.0 || p.psi_a != 0.0) {
                           throw ConfigError("matching base must have psi_s = psi_a = 0");
                       }
                   },
               },
               base.params);
    if (!allow_initial_quarantine && (base.initial.quarantined != 0.0 || base.initial.quarantined_a != 0.0)) {
        throw ConfigError("matching base must start without quarantine");
    }
}

// Monotone-decreasing bisection of `peak_at` over [lo, hi].
template <typename PeakAt>
MatchResult bisect_peak(std::string name, double target, double lo, double hi, double tolerance,
                        PeakAt&& peak_at) {
    if (!(target > 0.0) || !std::isfinite(target)) {
        throw DomainError("target peak must be positive, got " + describe(target));
    }
    MatchResult out;
    out.parameter = std::move(name);
    out.target_peak = target;
    out.bracket_lo = lo;
    out.bracket_hi = hi;

    const double peak_lo = peak_at(lo);
    if (relative_mismatch(peak_lo, target) <= tolerance) {
        out.value = lo;
        out.achieved_peak = peak_lo;
        return out;
    }
    const double peak_hi = peak_at(hi);
    if (relative_mismatch(peak_hi, target) <= tolerance) {
        out.value = hi;
        out.achieved_peak = peak_hi;
        return out;
    }
    if (target > peak_lo || target < peak_hi) {
        throw BracketError("target peak " + describe(target) + " outside achievable range [" +
                           describe(peak_hi) + ", " + describe(peak_lo) + "] for " + out.parameter +
                           " in [" + describe(lo) + ", " + describe(hi) + "]");
    }
    double a = lo, b = hi;
    {
        const double mid = 0.5 * (a + b);
        const double peak_mid = peak_at(mid);
        if (peak_mid > peak_lo || peak_mid < peak_hi) {
            throw NonMonotoneError("peak is not monotone in " + out.parameter + ": peak(" + describe(lo) +
                                   ")=" + describe(peak_lo) + ", peak(" + describe(mid) +
                                   ")=" + describe(peak_mid) + ", peak(" + describe(hi) +
                                   ")=" + describe(peak_hi));
        }
        out.iterations = 1;
        if (relative_mismatch(peak_mid, target) <= tolerance) {
            out.value = mid;
            out.achieved_peak = peak_mid;
            return out;
        }
        (peak_mid > target ? a : b) = mid;
    }
    while (out.iterations < kMaxBisectionIterations) {
        ++out.iterations;
        const double mid = 0.5 * (a + b);
        const double peak = peak_at(mid);
        if (relative_mismatch(peak, target) <= tolerance) {
            out.value = mid;
            out.achieved_peak = peak;
            return out;
        }
        (peak > target ? a : b) = mid;
    }
    throw NumericalError("bisection on " + out.parameter + " did not reach the tolerance in " +
                         describe(kMaxBisectionIterations) + " iterations");
}

}  // namespace

std::string_view to_string(QuarantineSplit split) { return split == QuarantineSplit::sum ? "sum" : "each"; }

QuarantineSplit quarantine_split_from_string(std::string_view name) {
    if (name == "sum") return QuarantineSplit::sum;
    if (name == "each") return QuarantineSplit::each;
    throw ConfigError("unknown quarantine_split '" + std::string(name) + "' (expected sum or each)");
}

std::string_view to_string(QuarantineStrategy s) { return s == QuarantineStrategy::abrupt ? "abrupt" : "gradual"; }

QuarantineStrategy quarantine_strategy_from_string(std::string_view name) {
    if (name == "abrupt") return QuarantineStrategy::abrupt;
    if (name == "gradual") return QuarantineStrategy::gradual;
    throw ConfigError("unknown strategy '" + std::string(name) + "' (expected abrupt or gradual)");
}

ScenarioConfig ScenarioConfig::defaults(ModelKind model, double population_size) {
    ScenarioConfig c;
    c.population_size = population_size;
    switch (model) {
        case ModelKind::seir:
            c.params = SeirParams{};
            c.initial.exposed = 2.0 / population_size;
            break;
        case ModelKind::basic:
            c.params = BasicParams{};
            c.initial.exposed = 2.0 / population_size;
            break;
        case ModelKind::extended:
            c.params = ExtendedParams{};
            c.initial.exposed = 1.0 / population_size;
            c.initial.exposed_a = 1.0 / population_size;
            break;
        case ModelKind::generic:
            throw ConfigError("a scenario needs a concrete model");
    }
    return c;
}

ModelKind ScenarioConfig::model_kind() const {
    switch (params.index()) {
        case 0: return ModelKind::seir;
        case 1: return ModelKind::basic;
        default: return ModelKind::extended;
    }
}

void ScenarioConfig::validate() const {
    std::visit([](const auto& p) { qsim::validate(p); }, params);
    if (!(std::isfinite(population_size) && population_size >= 1.0)) {
        throw ConfigError("population_size must be at least 1, got " + describe(population_size));
    }
    require_unit(initial.exposed, "exposed");
    require_unit(initial.exposed_a, "exposed_a");
    require_unit(initial.quarantined, "quarantined");
    require_unit(initial.quarantined_a, "quarantined_a");
    const ModelKind model = model_kind();
    if (model != ModelKind::extended && (initial.exposed_a != 0.0 || initial.quarantined_a != 0.0)) {
        throw ConfigError("initial.exposed_a and initial.quarantined_a apply to the extended model only");
    }
    if (model == ModelKind::seir && initial.quarantined != 0.0) {
        throw ConfigError("the SEIR model has no quarantine compartment (initial.quarantined must be 0)");
    }
    const double allocated = initial.exposed + initial.exposed_a + initial.quarantined + initial.quarantined_a;
    if (allocated > 1.0) {
        throw ConfigError("initial seeds and quarantine allocate " + describe(allocated) +
                          " > 1 of the population");
    }
    integrator.validate();
}

void set_parameter(ScenarioConfig& config, std::string_view path, double value) {
    if (path == "population_size") {
        config.population_size = value;
        return;
    }
    if (path.starts_with("initial.")) {
        const auto field = path.substr(8);
        if (field == "quarantine_total") {
            set_abrupt_quarantine(config, value);
            return;
        }
        if (double* f = initial_field(config.initial, field)) {
            *f = value;
            return;
        }
        unknown_path(config, path);
    }
    if (path.starts_with("inv_")) {
        auto fields = param_fields(config.params, path.substr(4));
        if (fields.empty()) unknown_path(config, path);
        if (value == 0.0) throw DomainError("cannot set " + std::string(path) + " to 0");
        for (double* f : fields) *f = 1.0 / value;
        return;
    }
    auto fields = param_fields(config.params, path);
    if (fields.empty()) unknown_path(config, path);
    for (double* f : fields) *f = value;
}

double get_parameter(const ScenarioConfig& config, std::string_view path) {
    // param_fields needs mutable access; work on a copy.
    ScenarioConfig copy = config;
    if (path == "population_size") return copy.population_size;
    if (path.starts_with("initial.")) {
        const auto field = path.substr(8);
        if (field == "quarantine_total") return copy.initial.quarantined + copy.initial.quarantined_a;
        if (double* f = initial_field(copy.initial, field)) return *f;
        unknown_path(config, path);
    }
    if (path.starts_with("inv_")) {
        auto fields = param_fields(copy.params, path.substr(4));
        if (fields.empty()) unknown_path(config, path);
        return 1.0 / *fields.front();
    }
    auto fields = param_fields(copy.params, path);
    if (fields.empty()) unknown_path(config, path);
    return *fields.front();
}

std::vector<double> build_initial_state(const ScenarioConfig& config) {
    config.validate();
    const InitialConditions& in = config.initial;
    switch (config.model_kind()) {
        case ModelKind::seir: {
            SeirState x;
            x.e = in.exposed;
            x.s = 1.0 - in.exposed;
            const auto a = x.to_array();
            return {a.begin(), a.end()};
        }
        case ModelKind::basic: {
            BasicState x;
            x.e = in.exposed;
            x.s_q = in.quarantined;
            x.s = 1.0 - in.exposed - in.quarantined;
            const auto a = x.to_array();
            return {a.begin(), a.end()};
        }
        default: {
            ExtendedState x;
            x.e_s = in.exposed;
            x.e_a = in.exposed_a;
            x.s_sq = in.quarantined;
            x.s_aq = in.quarantined_a;
            const double free = 1.0 - in.exposed - in.exposed_a - in.quarantined - in.quarantined_a;
            x.s_s = 0.5 * free;
            x.s_a = 0.5 * free;
            const auto a = x.to_array();
            return {a.begin(), a.end()};
        }
    }
}

VectorField make_vector_field(const ModelParams& params) {
    return std::visit(
        overloaded{
            [](const SeirParams& p) -> VectorField {
                return [p](double, std::span<const double> x, std::span<double> dx) { seir_rhs(x, dx, p); };
            },
            [](const BasicParams& p) -> VectorField {
                return [p](double, std::span<const double> x, std::span<double> dx) { basic_rhs(x, dx, p); };
            },
            [](const ExtendedParams& p) -> VectorField {
                return [p](double, std::span<const double> x, std::span<double> dx) { extended_rhs(x, dx, p); };
            },
        },
        params);
}

Trajectory simulate(const ScenarioConfig& config) {
    const auto x0 = build_initial_state(config);
    return with_context(config, [&] {
        return integrate(make_vector_field(config.params), x0, config.integrator, config.model_kind());
    });
}

ScenarioResult run_scenario(const ScenarioConfig& config) {
    Trajectory traj = simulate(config);
    try {
        auto summary = summarize(traj, config.population_size);
        return {std::move(traj), std::move(summary)};
    } catch (const HorizonTooShortError&) {
        ScenarioConfig longer = config;
        longer.integrator.t_max *= 2.0;
        Trajectory retry = simulate(longer);
        auto summary = summarize(retry, longer.population_size);
        return {std::move(retry), std::move(summary)};
    }
}

std::vector<Peak> evaluate_peaks(const ScenarioConfig& config, std::span<const ObservableKind> observables) {
    ScenarioConfig current = config;
    for (int attempt = 0;; ++attempt) {
        const Trajectory traj = simulate(current);
        std::vector<Peak> peaks;
        bool rising = false;
        for (auto kind : observables) {
            peaks.push_back(find_peak(traj, Observable::of(traj.model_kind(), kind)));
            rising = rising || (traj.size() > 1 && peaks.back().index + 1 == traj.size());
        }
        if (!rising || attempt == 4) return peaks;
        current.integrator.t_max *= 2.0;
    }
}

Peak evaluate_peak(const ScenarioConfig& config, ObservableKind observable) {
    const ObservableKind kinds[] = {observable};
    return evaluate_peaks(config, kinds).front();
}

double max_abrupt_quarantine(const ScenarioConfig& config) {
    const double free = 1.0 - config.initial.exposed - config.initial.exposed_a;
    if (config.model_kind() == ModelKind::extended && config.quarantine_split == QuarantineSplit::each) {
        return 0.5 * free;
    }
    return free;
}

void set_abrupt_quarantine(ScenarioConfig& config, double q) {
    switch (config.model_kind()) {
        case ModelKind::seir:
            throw UnsupportedParameterError("the SEIR model has no quarantine compartment");
        case ModelKind::basic:
            config.initial.quarantined = q;
            config.initial.quarantined_a = 0.0;
            break;
        default: {
            const double each = config.quarantine_split == QuarantineSplit::sum ? 0.5 * q : q;
            config.initial.quarantined = each;
            config.initial.quarantined_a = each;
            break;
        }
    }
}

MatchResult match_abrupt_quarantine(double target_peak, const ScenarioConfig& base, ObservableKind observable,
                                    double tolerance) {
    require_no_intervention(base, true);
    const auto peak_at = [&](double q) {
        ScenarioConfig c = base;
        set_abrupt_quarantine(c, q);
        return evaluate_peak(c, observable).value;
    };
    return bisect_peak("initial.quarantine_total", target_peak, 0.0, max_abrupt_quarantine(base), tolerance,
                       peak_at);
}

MatchResult match_gradual_quarantine(double target_peak, const ScenarioConfig& base, ObservableKind observable,
                                     double tolerance) {
    if (base.model_kind() != ModelKind::basic) {
        throw UnsupportedParameterError("gradual quarantining (chi) exists only in the basic model");
    }
    require_no_intervention(base, false);
    const auto peak_at = [&](double chi) {
        ScenarioConfig c = base;
        std::get<BasicParams>(c.params).chi = chi;
        return evaluate_peak(c, observable).value;
    };
    double chi_max = kInitialChiBracket;
    for (int doubling = 0; doubling < kChiBracketDoublings && peak_at(chi_max) > target_peak; ++doubling) {
        chi_max *= 2.0;
    }
    return bisect_peak("chi", target_peak, 0.0, chi_max, tolerance, peak_at);
}

ScenarioConfig untreated_scenario(const ScenarioConfig& base) {
    ScenarioConfig c = base;
    std::visit(overloaded{
                   [](SeirParams&) {},
                   [](BasicParams& p) {
                       p.psi = 0.0;
                       p.chi = 0.0;
                   },
                   [](ExtendedParams& p) {
                       p.psi_s = 0.0;
                       p.psi_a = 0.0;
                   },
               },
               c.params);
    c.initial.quarantined = 0.0;
    c.initial.quarantined_a = 0.0;
    return c;
}

ScenarioConfig testing_scenario(const ScenarioConfig& base, double psi) {
    ScenarioConfig c = untreated_scenario(base);
    std::visit(overloaded{
                   [](SeirParams&) { throw UnsupportedParameterError("the SEIR model has no testing rate"); },
                   [psi](BasicParams& p) { p.psi = psi; },
                   [psi](ExtendedParams& p) {
                       p.psi_s = psi;
                       p.psi_a = psi;
                   },
               },
               c.params);
    return c;
}

CostRatio quarantine_cost_ratio(double psi, const ScenarioConfig& base, QuarantineStrategy strategy,
                                ObservableKind observable) {
    if (!(psi > 0.0) || !std::isfinite(psi)) {
        throw DomainError("testing rate psi must be positive, got " + describe(psi));
    }
    if (strategy == QuarantineStrategy::gradual && base.model_kind() != ModelKind::basic) {
        throw UnsupportedParameterError("gradual quarantining (chi) exists only in the basic model");
    }
    CostRatio out;
    out.psi = psi;
    out.strategy = strategy;

    const ScenarioConfig testing = testing_scenario(base, psi);
    const double target = evaluate_peak(testing, observable).value;
    const ScenarioResult tested = run_scenario(testing);
    out.testing_end = tested.summary.end_time;
    out.testing_integral = tested.summary.quarantine_integral;

    const ScenarioConfig untreated = untreated_scenario(base);
    ScenarioConfig matched = untreated;
    if (strategy == QuarantineStrategy::abrupt) {
        out.match = match_abrupt_quarantine(target, untreated, observable);
        set_abrupt_quarantine(matched, out.match.value);
    } else {
        out.match = match_gradual_quarantine(target, untreated, observable);
        std::get<BasicParams>(matched.params).chi = out.match.value;
    }
    const ScenarioResult indiscriminate = run_scenario(matched);
    out.indiscriminate_end = indiscriminate.summary.end_time;
    out.indiscriminate_integral = indiscriminate.summary.quarantine_integral;
    if (!(out.testing_integral > 0.0)) {
        throw NumericalError("testing scenario has a zero quarantine integral; ratio undefined");
    }
    out.ratio = out.indiscriminate_integral / out.testing_integral;
    return out;
}

LatencySweep latency_sweep(const ScenarioConfig& base, std::span<const double> lambda_values, double delta) {
    const auto* ext = std::get_if<ExtendedParams>(&base.params);
    if (ext == nullptr) throw UnsupportedParameterError("latency sweep needs the extended model");
    if (ext->psi_s != 0.0 || ext->psi_a != 0.0) throw ConfigError("latency sweep base must have psi_s = psi_a = 0");

    LatencySweep out;
    for (double lambda : lambda_values) {
        LatencyCell cell;
        cell.lambda = lambda;
        try {
            cell.gamma = split_infectious_period(delta, lambda);
            ScenarioConfig c = base;
            auto& p = std::get<ExtendedParams>(c.params);
            p.lambda_s = p.lambda_a = lambda;
            p.gamma_s = p.gamma_a = cell.gamma;
            const Peak peak = evaluate_peak(c, ObservableKind::reported_active);
            cell.peak_time = peak.time;
            cell.peak_value = peak.value;
        } catch (const std::exception& e) {
            cell.error = e.what();
            cell.peak_time = cell.peak_value = std::nan("");
        }
        out.cells.push_back(std::move(cell));
    }

    // Equal symptomatic/asymptomatic susceptible pools correspond to k = 1/2.
    ScenarioConfig reference = ScenarioConfig::defaults(ModelKind::basic, base.population_size);
    BasicParams bp;
    bp.beta = ext->beta_s;
    bp.omega = ext->omega_s;
    bp.delta = delta;
    bp.rho = ext->rho;
    bp.k = 0.5;
    reference.params = bp;
    reference.initial.exposed = base.initial.exposed + base.initial.exposed_a;
    reference.initial.quarantined = base.initial.quarantined + base.initial.quarantined_a;
    reference.integrator = base.integrator;
    out.reference = evaluate_peak(reference, ObservableKind::reported_active);
    return out;
}

}  // namespace qsim
