#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "qsim/integrator.hpp"
#include "qsim/model.hpp"

namespace qsim {

enum class ObservableKind {
    reported_active,    ///< I_sQ (I for SEIR)
    total_infected,     ///< infected compartments, latent ones included
    infectious,         ///< I_a + I_aQ + I_sQ (I for SEIR)
    total_quarantined,  ///< everyone in quarantine, detected cases included
    quarantine_pool,    ///< quarantined mass excluding detected cases I_sQ
};

std::string_view to_string(ObservableKind kind);
ObservableKind observable_kind_from_string(std::string_view name);

/// A linear functional over compartment densities. Linearity lets the same
/// weights act on stored derivatives, which the peak/crossing/quadrature
/// routines use for Hermite interpolation.
class Observable {
public:
    Observable(std::string name, std::vector<double> weights) : name_(std::move(name)), weights_(std::move(weights)) {}

    static Observable of(ModelKind model, ObservableKind kind);
    /// Picks a single state component; handy for synthetic trajectories.
    static Observable component(std::size_t dim, std::size_t index, std::string name = "x");

    const std::string& name() const { return name_; }
    std::size_t dimension() const { return weights_.size(); }
    double operator()(std::span<const double> x) const;

private:
    std::string name_;
    std::vector<double> weights_;
};

struct Peak {
    double time = 0.0;
    double value = 0.0;
    std::size_t index = 0;  ///< discrete argmax sample
};

struct EpidemicSummary {
    std::string observable_name;
    double peak_value = 0.0;
    double peak_time = 0.0;
    double end_time = 0.0;  ///< t_e
    double quarantine_integral = 0.0;
    /// Reported cases never exceeded the end threshold; end_time and the
    /// integral are then zero by convention.
    bool degenerate = false;
};

/// Global maximum, refined by a parabola through the argmax sample and its
/// two neighbours. Ties resolve to the earliest sample.
Peak find_peak(const Trajectory& traj, const Observable& obs);

/// First time after the peak of `obs` where it falls to `threshold`,
/// bisected on the Hermite interpolant.
/// Throws NoEpidemicError if the peak never exceeds the threshold and
/// HorizonTooShortError if the crossing lies beyond the last sample.
double epidemic_end(const Trajectory& traj, const Observable& obs, double threshold);
/// Same, with the model's reported active cases as observable.
double epidemic_end(const Trajectory& traj, double threshold);

/// Integral of the Hermite interpolant of `obs` over [t0, t1].
double integrate_observable(const Trajectory& traj, const Observable& obs, double t0, double t1);

/// Time integral of the total quarantined population over [start, end_time].
double quarantine_integral(const Trajectory& traj, double end_time);

/// Peak of total infected, t_e at threshold 0.1/population_size and the
/// quarantine integral over [0, t_e].
EpidemicSummary summarize(const Trajectory& traj, double population_size);

}  // namespace qsim
