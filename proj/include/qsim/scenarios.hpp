#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "qsim/analysis.hpp"
#include "qsim/integrator.hpp"
#include "qsim/model.hpp"

namespace qsim {

inline constexpr double kDefaultPopulation = 500000.0;
inline constexpr double kMatchTolerance = 1e-3;
inline constexpr int kMaxBisectionIterations = 200;
inline constexpr double kInitialChiBracket = 50.0;
inline constexpr int kChiBracketDoublings = 4;

/// How a single abrupt-quarantine size q is split between the symptomatic
/// and asymptomatic quarantined susceptibles of the extended model.
enum class QuarantineSplit {
    sum,   ///< S_sQ(0) = S_aQ(0) = q/2
    each,  ///< S_sQ(0) = S_aQ(0) = q
};

std::string_view to_string(QuarantineSplit split);
QuarantineSplit quarantine_split_from_string(std::string_view name);

/// Initial densities. SEIR and basic use `exposed` (E) and `quarantined`
/// (S_Q); the extended model also uses the `_a` fields for its
/// asymptomatic group. Whatever is left goes to the susceptibles.
struct InitialConditions {
    double exposed = 0.0;
    double exposed_a = 0.0;
    double quarantined = 0.0;
    double quarantined_a = 0.0;

    bool operator==(const InitialConditions&) const = default;
};

using ModelParams = std::variant<SeirParams, BasicParams, ExtendedParams>;

struct ScenarioConfig {
    ModelParams params = BasicParams{};
    double population_size = kDefaultPopulation;
    InitialConditions initial;
    QuarantineSplit quarantine_split = QuarantineSplit::sum;
    IntegratorConfig integrator;

    /// Default parameters with the usual seeding: E(0) = 2/N for SEIR and
    /// basic, E_s(0) = E_a(0) = 1/N for the extended model.
    static ScenarioConfig defaults(ModelKind model, double population_size = kDefaultPopulation);

    ModelKind model_kind() const;
    /// Throws ConfigError / DomainError when anything is out of range.
    void validate() const;

    bool operator==(const ScenarioConfig&) const = default;
};

struct ScenarioResult {
    Trajectory trajectory;
    EpidemicSummary summary;
};

struct MatchResult {
    std::string parameter;
    double value = 0.0;
    double achieved_peak = 0.0;
    double target_peak = 0.0;
    int iterations = 0;
    double bracket_lo = 0.0;
    double bracket_hi = 0.0;
};

enum class QuarantineStrategy { abrupt, gradual };

std::string_view to_string(QuarantineStrategy s);
QuarantineStrategy quarantine_strategy_from_string(std::string_view name);

struct CostRatio {
    double psi = 0.0;
    QuarantineStrategy strategy = QuarantineStrategy::abrupt;
    MatchResult match;
    double testing_end = 0.0;
    double testing_integral = 0.0;
    double indiscriminate_end = 0.0;
    double indiscriminate_integral = 0.0;
    double ratio = 0.0;  ///< indiscriminate_integral / testing_integral
};

struct SweepAxis {
    std::string path;
    std::vector<double> values;

    bool operator==(const SweepAxis&) const = default;
};

/// Peak heights of one observable over a 1D or 2D parameter grid, stored
/// row-major (axis1 rows, axis2 columns). Cells whose run failed hold NaN
/// and a message in `errors`.
struct SweepGrid {
    SweepAxis axis1;
    std::optional<SweepAxis> axis2;
    std::string observable;
    std::vector<double> values;
    std::vector<std::string> errors;

    std::size_t rows() const { return axis1.values.size(); }
    std::size_t cols() const { return axis2 ? axis2->values.size() : 1; }
    double at(std::size_t i, std::size_t j = 0) const { return values[i * cols() + j]; }
    const std::string& error_at(std::size_t i, std::size_t j = 0) const { return errors[i * cols() + j]; }
    bool ok() const;
};

struct SweepOptions {
    unsigned threads = 0;                 ///< 0 = hardware concurrency
    std::vector<std::size_t> order;       ///< optional permutation of cell indices
};

struct LatencyCell {
    double lambda = 0.0;
    double gamma = 0.0;
    double peak_time = 0.0;
    double peak_value = 0.0;
    std::string error;  ///< non-empty if this cell could not be run
};

struct LatencySweep {
    std::vector<LatencyCell> cells;
    Peak reference;  ///< basic model with the same total infectious period
};

// Parameter paths: any parameter field name of the model ("beta", "psi_a",
// ...), "inv_<field>" for its reciprocal, the extended-model aliases
// "beta", "omega", "lambda", "gamma", "psi" (both groups at once),
// "initial.<field>", "initial.quarantine_total" (split per the config's
// convention) and "population_size".
void set_parameter(ScenarioConfig& config, std::string_view path, double value);
double get_parameter(const ScenarioConfig& config, std::string_view path);

std::vector<double> build_initial_state(const ScenarioConfig& config);
VectorField make_vector_field(const ModelParams& params);

/// Integrates the configured scenario; no summary.
Trajectory simulate(const ScenarioConfig& config);

/// build -> integrate -> summarize. If the reported cases have not fallen
/// back to 0.1/N by the horizon, the horizon is doubled once.
ScenarioResult run_scenario(const ScenarioConfig& config);

/// Peaks of several observables from one run. The horizon is doubled (up to
/// four times) while any of them is still rising at the last sample.
std::vector<Peak> evaluate_peaks(const ScenarioConfig& config, std::span<const ObservableKind> observables);
Peak evaluate_peak(const ScenarioConfig& config, ObservableKind observable);

/// Applies an abrupt-quarantine size q to the config (S_Q(0), or the
/// extended split per config.quarantine_split).
void set_abrupt_quarantine(ScenarioConfig& config, double q);
/// Largest admissible abrupt-quarantine size for the config's seeding.
double max_abrupt_quarantine(const ScenarioConfig& config);

/// Bisection on the initial quarantine size so the observable's peak hits
/// `target_peak` (testing and indiscriminate quarantining switched off in
/// `base`). Throws BracketError if the target is not attainable.
MatchResult match_abrupt_quarantine(double target_peak, const ScenarioConfig& base, ObservableKind observable,
                                    double tolerance = kMatchTolerance);

/// Bisection on chi (basic model only). Throws UnsupportedParameterError for
/// other models.
MatchResult match_gradual_quarantine(double target_peak, const ScenarioConfig& base, ObservableKind observable,
                                     double tolerance = kMatchTolerance);

/// Testing-only scenario with rate psi (no indiscriminate quarantine) versus
/// the indiscriminate strategy matched to the same peak; ratio of their
/// quarantine integrals, each over its own epidemic duration.
CostRatio quarantine_cost_ratio(double psi, const ScenarioConfig& base, QuarantineStrategy strategy,
                                ObservableKind observable = ObservableKind::total_infected);

/// The testing-only scenario used by quarantine_cost_ratio.
ScenarioConfig testing_scenario(const ScenarioConfig& base, double psi);
/// `base` with testing, chi and initial quarantine all set to zero.
ScenarioConfig untreated_scenario(const ScenarioConfig& base);

SweepGrid sweep_1d(const ScenarioConfig& base, const SweepAxis& axis, ObservableKind observable,
                   const SweepOptions& options = {});
SweepGrid sweep_2d(const ScenarioConfig& base, const SweepAxis& axis1, const SweepAxis& axis2,
                   ObservableKind observable, const SweepOptions& options = {});
/// One grid per observable from a single pass over the cells.
std::vector<SweepGrid> sweep(const ScenarioConfig& base, const SweepAxis& axis1,
                             const std::optional<SweepAxis>& axis2, std::span<const ObservableKind> observables,
                             const SweepOptions& options = {});

/// For each lambda, sets lambda_s = lambda_a = lambda and gamma_s = gamma_a
/// = split_infectious_period(delta, lambda), then records the reported-cases
/// peak. Also runs the basic model with recovery rate delta as reference.
LatencySweep latency_sweep(const ScenarioConfig& base, std::span<const double> lambda_values, double delta);

}  // namespace qsim
