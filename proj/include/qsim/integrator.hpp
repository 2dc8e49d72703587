#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <string_view>
#include <vector>

#include "qsim/model.hpp"

namespace qsim {

enum class Method { fixed_rk4, adaptive_dp54 };

std::string_view to_string(Method m);
Method method_from_string(std::string_view name);

struct IntegratorConfig {
    Method method = Method::adaptive_dp54;
    double dt = 1e-2;  ///< fixed step, or first trial step in adaptive mode (day)
    double rtol = 1e-8;
    double atol = 1e-12;
    double t_max = 600.0;
    double output_dt = 0.25;

    /// Throws ConfigError if any field is non-positive or non-finite.
    void validate() const;
    bool operator==(const IntegratorConfig&) const = default;
};

/// Right-hand side f(t, x) -> dx.
using VectorField = std::function<void(double t, std::span<const double> x, std::span<double> dx)>;

/// Sampled solution with the derivative stored at every sample, so that any
/// point in between can be recovered by cubic Hermite interpolation.
class Trajectory {
public:
    Trajectory(ModelKind kind, std::size_t dim) : kind_(kind), dim_(dim) {}

    /// Appends a sample. Times must be strictly increasing.
    void append(double t, std::span<const double> state, std::span<const double> derivative);

    ModelKind model_kind() const { return kind_; }
    std::size_t dimension() const { return dim_; }
    std::size_t size() const { return times_.size(); }
    bool empty() const { return times_.empty(); }

    const std::vector<double>& times() const { return times_; }
    double time(std::size_t j) const { return times_[j]; }
    std::span<const double> state(std::size_t j) const { return {states_.data() + j * dim_, dim_}; }
    std::span<const double> derivative(std::size_t j) const { return {derivs_.data() + j * dim_, dim_}; }

    double front_time() const { return times_.front(); }
    double back_time() const { return times_.back(); }

    /// Index j of the sample interval [t_j, t_{j+1}] containing t (t inside the range).
    std::size_t interval_index(double t) const;

    bool operator==(const Trajectory&) const = default;

private:
    ModelKind kind_;
    std::size_t dim_;
    std::vector<double> times_;
    std::vector<double> states_;
    std::vector<double> derivs_;
};

/// Solves x' = f(t, x) on [0, config.t_max] from `initial`, storing samples
/// every config.output_dt (plus t_max itself).
///
/// Adaptive mode uses the Dormand-Prince 5(4) pair with a max-norm error
/// test against atol + rtol*|x| and lands exactly on every output time.
/// Fixed mode uses classical RK4 with steps of config.dt, shortened only
/// where needed to hit an output time.
///
/// Throws StiffnessError when the adaptive step underflows and
/// DivergenceError when the state stops being finite.
Trajectory integrate(const VectorField& rhs, std::span<const double> initial, const IntegratorConfig& config,
                     ModelKind kind = ModelKind::generic);

/// Cubic Hermite interpolation; exact at the samples. Throws OutOfRangeError
/// outside [front_time, back_time].
std::vector<double> interpolate(const Trajectory& traj, double t);

// Model-bound conveniences.
Trajectory simulate(const SeirParams& p, const SeirState& x0, const IntegratorConfig& config);
Trajectory simulate(const BasicParams& p, const BasicState& x0, const IntegratorConfig& config);
Trajectory simulate(const ExtendedParams& p, const ExtendedState& x0, const IntegratorConfig& config);

}  // namespace qsim
