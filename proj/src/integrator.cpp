#include "qsim/integrator.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <string>

#include "qsim/errors.hpp"

namespace qsim {

namespace {

constexpr double kMinStep = 1e-12;
constexpr double kSafety = 0.9;
constexpr double kMinFactor = 0.2;
constexpr double kMaxFactor = 5.0;

// Dormand-Prince 5(4) tableau.
constexpr double c2 = 1.0 / 5.0, c3 = 3.0 / 10.0, c4 = 4.0 / 5.0, c5 = 8.0 / 9.0;
constexpr double a21 = 1.0 / 5.0;
constexpr double a31 = 3.0 / 40.0, a32 = 9.0 / 40.0;
constexpr double a41 = 44.0 / 45.0, a42 = -56.0 / 15.0, a43 = 32.0 / 9.0;
constexpr double a51 = 19372.0 / 6561.0, a52 = -25360.0 / 2187.0, a53 = 64448.0 / 6561.0,
                 a54 = -212.0 / 729.0;
constexpr double a61 = 9017.0 / 3168.0, a62 = -355.0 / 33.0, a63 = 46732.0 / 5247.0, a64 = 49.0 / 176.0,
                 a65 = -5103.0 / 18656.0;
constexpr double b1 = 35.0 / 384.0, b3 = 500.0 / 1113.0, b4 = 125.0 / 192.0, b5 = -2187.0 / 6784.0,
                 b6 = 11.0 / 84.0;
// Difference between the 5th- and 4th-order weights.
constexpr double e1 = 71.0 / 57600.0, e3 = -71.0 / 16695.0, e4 = 71.0 / 1920.0, e5 = -17253.0 / 339200.0,
                 e6 = 22.0 / 525.0, e7 = -1.0 / 40.0;

using Vec = std::vector<double>;

bool all_finite(const Vec& v) {
    return std::all_of(v.begin(), v.end(), [](double x) { return std::isfinite(x); });
}

std::vector<double> output_times(const IntegratorConfig& cfg) {
    std::vector<double> out;
    const double slack = 1e-9 * cfg.output_dt;
    for (std::size_t k = 0;; ++k) {
        const double t = static_cast<double>(k) * cfg.output_dt;
        if (t >= cfg.t_max - slack) break;
        out.push_back(t);
    }
    out.push_back(cfg.t_max);
    return out;
}

class Stepper {
public:
    Stepper(const VectorField& rhs, std::size_t n) : rhs_(rhs), tmp_(n) {}

    void eval(double t, const Vec& x, Vec& dx) {
        if (!all_finite(x)) {
            throw DivergenceError("state became non-finite at t=" + describe(t));
        }
        try {
            rhs_(t, x, dx);
        } catch (const InvalidStateError& e) {
            throw DivergenceError(std::string("vector field rejected state at t=") + describe(t) + ": " +
                                  e.what());
        }
    }

    // Classical RK4 from (t, x) with k1 = f(t, x) already known.
    void rk4(double t, double h, const Vec& x, const Vec& k1, Vec& out) {
        const std::size_t n = x.size();
        resize(n);
        for (std::size_t j = 0; j < n; ++j) tmp_[j] = x[j] + 0.5 * h * k1[j];
        eval(t + 0.5 * h, tmp_, k2_);
        for (std::size_t j = 0; j < n; ++j) tmp_[j] = x[j] + 0.5 * h * k2_[j];
        eval(t + 0.5 * h, tmp_, k3_);
        for (std::size_t j = 0; j < n; ++j) tmp_[j] = x[j] + h * k3_[j];
        eval(t + h, tmp_, k4_);
        out.resize(n);
        for (std::size_t j = 0; j < n; ++j) {
            out[j] = x[j] + h / 6.0 * (k1[j] + 2.0 * k2_[j] + 2.0 * k3_[j] + k4_[j]);
        }
    }

    // One Dormand-Prince attempt. Returns the scaled max-norm error; writes
    // the 5th-order solution to `out` and f(t+h, out) to `k7` (FSAL).
    double dp54(double t, double h, const Vec& x, const Vec& k1, Vec& out, Vec& k7, double rtol,
                double atol) {
        const std::size_t n = x.size();
        resize(n);
        for (std::size_t j = 0; j < n; ++j) tmp_[j] = x[j] + h * a21 * k1[j];
        eval(t + c2 * h, tmp_, k2_);
        for (std::size_t j = 0; j < n; ++j) tmp_[j] = x[j] + h * (a31 * k1[j] + a32 * k2_[j]);
        eval(t + c3 * h, tmp_, k3_);
        for (std::size_t j = 0; j < n; ++j) tmp_[j] = x[j] + h * (a41 * k1[j] + a42 * k2_[j] + a43 * k3_[j]);
        eval(t + c4 * h, tmp_, k4_);
        for (std::size_t j = 0; j < n; ++j) {
            tmp_[j] = x[j] + h * (a51 * k1[j] + a52 * k2_[j] + a53 * k3_[j] + a54 * k4_[j]);
        }
        eval(t + c5 * h, tmp_, k5_);
        for (std::size_t j = 0; j < n; ++j) {
            tmp_[j] = x[j] + h * (a61 * k1[j] + a62 * k2_[j] + a63 * k3_[j] + a64 * k4_[j] + a65 * k5_[j]);
        }
        eval(t + h, tmp_, k6_);
        out.resize(n);
        for (std::size_t j = 0; j < n; ++j) {
            out[j] = x[j] + h * (b1 * k1[j] + b3 * k3_[j] + b4 * k4_[j] + b5 * k5_[j] + b6 * k6_[j]);
        }
        eval(t + h, out, k7);
        double err = 0.0;
        for (std::size_t j = 0; j < n; ++j) {
            const double local =
                h * (e1 * k1[j] + e3 * k3_[j] + e4 * k4_[j] + e5 * k5_[j] + e6 * k6_[j] + e7 * k7[j]);
            const double scale = atol + rtol * std::max(std::abs(x[j]), std::abs(out[j]));
            err = std::max(err, std::abs(local) / scale);
        }
        return err;
    }

private:
    void resize(std::size_t n) {
        tmp_.resize(n);
        k2_.resize(n);
        k3_.resize(n);
        k4_.resize(n);
        k5_.resize(n);
        k6_.resize(n);
    }

    const VectorField& rhs_;
    Vec tmp_, k2_, k3_, k4_, k5_, k6_;
};

Trajectory integrate_fixed(const VectorField& rhs, Vec x, const IntegratorConfig& cfg, ModelKind kind) {
    const std::size_t n = x.size();
    Trajectory traj(kind, n);
    Stepper stepper(rhs, n);
    const auto outputs = output_times(cfg);

    Vec dx(n), next(n);
    double t = outputs.front();
    stepper.eval(t, x, dx);
    traj.append(t, x, dx);

    for (std::size_t k = 1; k < outputs.size(); ++k) {
        const double span = outputs[k] - t;
        const auto steps = static_cast<std::size_t>(std::max(1.0, std::ceil(span / cfg.dt - 1e-9)));
        const double h = span / static_cast<double>(steps);
        for (std::size_t s = 0; s < steps; ++s) {
            if (s > 0) stepper.eval(t, x, dx);
            stepper.rk4(t, h, x, dx, next);
            std::swap(x, next);
            t = (s + 1 == steps) ? outputs[k] : t + h;
        }
        stepper.eval(t, x, dx);
        traj.append(t, x, dx);
    }
    return traj;
}

Trajectory integrate_adaptive(const VectorField& rhs, Vec x, const IntegratorConfig& cfg, ModelKind kind) {
    const std::size_t n = x.size();
    Trajectory traj(kind, n);
    Stepper stepper(rhs, n);
    const auto outputs = output_times(cfg);

    Vec k1(n), k7(n), next(n);
    double t = outputs.front();
    stepper.eval(t, x, k1);
    traj.append(t, x, k1);

    double h = cfg.dt;
    for (std::size_t k = 1; k < outputs.size(); ++k) {
        const double target = outputs[k];
        while (t < target) {
            const bool lands = t + h >= target - 1e-12 * std::max(1.0, std::abs(target));
            const double step = lands ? target - t : h;
            const double err = stepper.dp54(t, step, x, k1, next, k7, cfg.rtol, cfg.atol);
            if (!std::isfinite(err)) {
                throw DivergenceError("local error estimate is not finite at t=" + describe(t));
            }
            if (err <= 1.0) {
                t = lands ? target : t + step;
                std::swap(x, next);
                std::swap(k1, k7);
                const double grow = err == 0.0 ? kMaxFactor : kSafety * std::pow(err, -0.2);
                const double proposed = step * std::clamp(grow, kMinFactor, kMaxFactor);
                // A step shortened to hit an output time says little about the
                // admissible step size, so it never shrinks h.
                h = lands ? std::max(h, proposed) : proposed;
            } else {
                h = step * std::clamp(kSafety * std::pow(err, -0.2), kMinFactor, 1.0);
                if (h < kMinStep) {
                    throw StiffnessError("adaptive step underflow (h=" + describe(h) +
                                         ") at t=" + describe(t));
                }
            }
        }
        traj.append(t, x, k1);
    }
    return traj;
}

}  // namespace

std::string_view to_string(Method m) {
    return m == Method::fixed_rk4 ? "fixed-rk4" : "adaptive-dp54";
}

Method method_from_string(std::string_view name) {
    if (name == "fixed-rk4") return Method::fixed_rk4;
    if (name == "adaptive-dp54") return Method::adaptive_dp54;
    throw ConfigError("unknown integrator method '" + std::string(name) +
                      "' (expected fixed-rk4 or adaptive-dp54)");
}

void IntegratorConfig::validate() const {
    const auto positive = [](double v, const char* name) {
        if (!(std::isfinite(v) && v > 0.0)) {
            throw ConfigError(std::string("integrator.") + name + " must be positive and finite, got " +
                              describe(v));
        }
    };
    positive(dt, "dt");
    positive(rtol, "rtol");
    positive(atol, "atol");
    positive(t_max, "t_max");
    positive(output_dt, "output_dt");
}

void Trajectory::append(double t, std::span<const double> state, std::span<const double> derivative) {
    if (state.size() != dim_ || derivative.size() != dim_) {
        throw InvalidStateError("trajectory sample has wrong dimension");
    }
    if (!times_.empty() && !(t > times_.back())) {
        throw InvalidStateError("trajectory times must be strictly increasing");
    }
    times_.push_back(t);
    states_.insert(states_.end(), state.begin(), state.end());
    derivs_.insert(derivs_.end(), derivative.begin(), derivative.end());
}

std::size_t Trajectory::interval_index(double t) const {
    auto it = std::upper_bound(times_.begin(), times_.end(), t);
    auto j = static_cast<std::size_t>(std::distance(times_.begin(), it));
    if (j == 0) return 0;
    return std::min(j - 1, times_.size() - 2);
}

Trajectory integrate(const VectorField& rhs, std::span<const double> initial, const IntegratorConfig& config,
                     ModelKind kind) {
    config.validate();
    if (initial.empty()) throw InvalidStateError("initial state is empty");
    Vec x(initial.begin(), initial.end());
    if (!all_finite(x)) throw InvalidStateError("initial state is not finite");
    return config.method == Method::fixed_rk4 ? integrate_fixed(rhs, std::move(x), config, kind)
                                              : integrate_adaptive(rhs, std::move(x), config, kind);
}

std::vector<double> interpolate(const Trajectory& traj, double t) {
    if (traj.size() < 2) throw OutOfRangeError("cannot interpolate a trajectory with fewer than two samples");
    if (!(t >= traj.front_time() && t <= traj.back_time())) {
        throw OutOfRangeError("time " + describe(t) + " outside trajectory range [" +
                              describe(traj.front_time()) + ", " + describe(traj.back_time()) + "]");
    }
    const std::size_t j = traj.interval_index(t);
    const auto x0 = traj.state(j);
    const auto x1 = traj.state(j + 1);
    if (t == traj.time(j)) return {x0.begin(), x0.end()};
    if (t == traj.time(j + 1)) return {x1.begin(), x1.end()};

    const auto d0 = traj.derivative(j);
    const auto d1 = traj.derivative(j + 1);
    const double h = traj.time(j + 1) - traj.time(j);
    const double s = (t - traj.time(j)) / h;
    const double s2 = s * s;
    const double s3 = s2 * s;
    const double h00 = 2.0 * s3 - 3.0 * s2 + 1.0;
    const double h10 = s3 - 2.0 * s2 + s;
    const double h01 = -2.0 * s3 + 3.0 * s2;
    const double h11 = s3 - s2;

    std::vector<double> out(traj.dimension());
    for (std::size_t k = 0; k < out.size(); ++k) {
        out[k] = h00 * x0[k] + h10 * h * d0[k] + h01 * x1[k] + h11 * h * d1[k];
    }
    return out;
}

Trajectory simulate(const SeirParams& p, const SeirState& x0, const IntegratorConfig& config) {
    validate(p);
    const auto init = x0.to_array();
    return integrate([&p](double, std::span<const double> x, std::span<double> dx) { seir_rhs(x, dx, p); },
                     init, config, ModelKind::seir);
}

Trajectory simulate(const BasicParams& p, const BasicState& x0, const IntegratorConfig& config) {
    validate(p);
    const auto init = x0.to_array();
    return integrate([&p](double, std::span<const double> x, std::span<double> dx) { basic_rhs(x, dx, p); },
                     init, config, ModelKind::basic);
}

Trajectory simulate(const ExtendedParams& p, const ExtendedState& x0, const IntegratorConfig& config) {
    validate(p);
    const auto init = x0.to_array();
    return integrate(
        [&p](double, std::span<const double> x, std::span<double> dx) { extended_rhs(x, dx, p); }, init, config,
        ModelKind::extended);
}

}  // namespace qsim
