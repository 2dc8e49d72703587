#include "qsim/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "qsim/errors.hpp"

namespace qsim {

namespace {

struct Node {
    double t, y, dy;
};

Node node(const Trajectory& traj, const Observable& obs, std::size_t j) {
    return {traj.time(j), obs(traj.state(j)), obs(traj.derivative(j))};
}

// Hermite cubic through two nodes, evaluated at t.
double hermite(const Node& a, const Node& b, double t) {
    const double h = b.t - a.t;
    const double s = (t - a.t) / h;
    const double s2 = s * s;
    const double s3 = s2 * s;
    return (2.0 * s3 - 3.0 * s2 + 1.0) * a.y + (s3 - 2.0 * s2 + s) * h * a.dy + (-2.0 * s3 + 3.0 * s2) * b.y +
           (s3 - s2) * h * b.dy;
}

// Exact integral of the Hermite cubic over [u, v] within [a.t, b.t].
double hermite_integral(const Node& a, const Node& b, double u, double v) {
    if (u == a.t && v == b.t) {
        const double h = b.t - a.t;
        return 0.5 * h * (a.y + b.y) + h * h * (a.dy - b.dy) / 12.0;
    }
    // Two-point Gauss-Legendre is exact for cubics.
    const double mid = 0.5 * (u + v);
    const double half = 0.5 * (v - u);
    const double off = half / std::sqrt(3.0);
    return half * (hermite(a, b, mid - off) + hermite(a, b, mid + off));
}

void require_samples(const Trajectory& traj, const Observable& obs) {
    if (traj.empty()) throw EmptyInputError("trajectory has no samples");
    if (obs.dimension() != traj.dimension()) {
        throw InvalidStateError("observable '" + obs.name() + "' does not match trajectory dimension");
    }
}

}  // namespace

std::string_view to_string(ObservableKind kind) {
    switch (kind) {
        case ObservableKind::reported_active: return "reported_active";
        case ObservableKind::total_infected: return "total_infected";
        case ObservableKind::infectious: return "infectious";
        case ObservableKind::total_quarantined: return "total_quarantined";
        case ObservableKind::quarantine_pool: return "quarantine_pool";
    }
    return "unknown";
}

ObservableKind observable_kind_from_string(std::string_view name) {
    for (auto k : {ObservableKind::reported_active, ObservableKind::total_infected, ObservableKind::infectious,
                   ObservableKind::total_quarantined, ObservableKind::quarantine_pool}) {
        if (to_string(k) == name) return k;
    }
    throw ConfigError("unknown observable '" + std::string(name) +
                      "' (expected reported_active, total_infected, infectious, total_quarantined or "
                      "quarantine_pool)");
}

Observable Observable::of(ModelKind model, ObservableKind kind) {
    std::vector<double> w(qsim::dimension(model), 0.0);
    const auto set = [&w](std::initializer_list<std::size_t> idx) {
        for (auto j : idx) w[j] = 1.0;
    };
    switch (model) {
        case ModelKind::seir:
            // S, E, I, R
            if (kind == ObservableKind::reported_active || kind == ObservableKind::total_infected ||
                kind == ObservableKind::infectious) {
                set({2});
            }
            break;
        case ModelKind::basic:
            // S, S_Q, E, E_Q, I_a, I_aQ, I_sQ, R, R_Q
            switch (kind) {
                case ObservableKind::reported_active: set({6}); break;
                case ObservableKind::total_infected:
                case ObservableKind::infectious: set({4, 5, 6}); break;
                case ObservableKind::total_quarantined: set({1, 3, 5, 6, 8}); break;
                case ObservableKind::quarantine_pool: set({1, 3, 5, 8}); break;
            }
            break;
        case ModelKind::extended:
            // S_s, S_sQ, E_s, E_sQ, L_s, L_sQ, I_sQ, R_s, S_a, S_aQ, E_a, E_aQ, L_a, L_aQ, I_a, I_aQ, R_a, R_aQ
            switch (kind) {
                case ObservableKind::reported_active: set({6}); break;
                case ObservableKind::total_infected: set({4, 5, 12, 13, 14, 15, 6}); break;
                case ObservableKind::infectious: set({14, 15, 6}); break;
                case ObservableKind::total_quarantined: set({1, 3, 5, 9, 11, 13, 15, 17, 6}); break;
                case ObservableKind::quarantine_pool: set({1, 3, 5, 9, 11, 13, 15, 17}); break;
            }
            break;
        case ModelKind::generic:
            throw InvalidStateError("named observables need a concrete model");
    }
    return Observable(std::string(to_string(kind)), std::move(w));
}

Observable Observable::component(std::size_t dim, std::size_t index, std::string name) {
    if (index >= dim) throw OutOfRangeError("observable component index out of range");
    std::vector<double> w(dim, 0.0);
    w[index] = 1.0;
    return Observable(std::move(name), std::move(w));
}

double Observable::operator()(std::span<const double> x) const {
    double sum = 0.0;
    for (std::size_t j = 0; j < weights_.size(); ++j) {
        if (weights_[j] != 0.0) sum += weights_[j] * x[j];
    }
    return sum;
}

Peak find_peak(const Trajectory& traj, const Observable& obs) {
    require_samples(traj, obs);
    Peak best{traj.time(0), obs(traj.state(0)), 0};
    for (std::size_t j = 1; j < traj.size(); ++j) {
        const double y = obs(traj.state(j));
        if (y > best.value) best = {traj.time(j), y, j};
    }
    if (best.index == 0 || best.index + 1 >= traj.size()) return best;

    const std::size_t j = best.index;
    const double t0 = traj.time(j - 1), t1 = traj.time(j), t2 = traj.time(j + 1);
    const double y0 = obs(traj.state(j - 1)), y1 = best.value, y2 = obs(traj.state(j + 1));
    const double d01 = (y1 - y0) / (t1 - t0);
    const double d12 = (y2 - y1) / (t2 - t1);
    const double curvature = (d12 - d01) / (t2 - t0);
    if (!(curvature < 0.0)) return best;

    double t = 0.5 * (t0 + t1) - d01 / (2.0 * curvature);
    t = std::clamp(t, t0, t2);
    const double y = y0 + d01 * (t - t0) + curvature * (t - t0) * (t - t1);
    if (y < best.value) return best;
    return {t, y, j};
}

double epidemic_end(const Trajectory& traj, const Observable& obs, double threshold) {
    require_samples(traj, obs);
    Peak peak{traj.time(0), obs(traj.state(0)), 0};
    for (std::size_t j = 1; j < traj.size(); ++j) {
        const double y = obs(traj.state(j));
        if (y > peak.value) peak = {traj.time(j), y, j};
    }
    if (!(peak.value > threshold)) {
        throw NoEpidemicError(obs.name() + " never exceeds the end threshold " + describe(threshold) +
                              " (peak " + describe(peak.value) + ")");
    }
    for (std::size_t j = peak.index + 1; j < traj.size(); ++j) {
        Node b = node(traj, obs, j);
        if (b.y > threshold) continue;
        if (b.y == threshold) return b.t;
        Node a = node(traj, obs, j - 1);
        double lo = a.t, hi = b.t;
        while (hi - lo > 1e-9) {
            const double mid = 0.5 * (lo + hi);
            if (hermite(a, b, mid) > threshold) {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        return 0.5 * (lo + hi);
    }
    throw HorizonTooShortError(obs.name() + " is still above " + describe(threshold) +
                               " at the horizon t=" + describe(traj.back_time()));
}

double epidemic_end(const Trajectory& traj, double threshold) {
    return epidemic_end(traj, Observable::of(traj.model_kind(), ObservableKind::reported_active), threshold);
}

double integrate_observable(const Trajectory& traj, const Observable& obs, double t0, double t1) {
    require_samples(traj, obs);
    if (!(t0 >= traj.front_time() && t1 <= traj.back_time() && t0 <= t1)) {
        throw OutOfRangeError("integration window [" + describe(t0) + ", " + describe(t1) +
                              "] outside trajectory range");
    }
    if (t0 == t1) return 0.0;
    double total = 0.0;
    const std::size_t first = traj.interval_index(t0);
    for (std::size_t j = first; j + 1 < traj.size(); ++j) {
        const double a_t = traj.time(j), b_t = traj.time(j + 1);
        if (a_t >= t1) break;
        const double u = std::max(a_t, t0);
        const double v = std::min(b_t, t1);
        if (v <= u) continue;
        total += hermite_integral(node(traj, obs, j), node(traj, obs, j + 1), u, v);
    }
    return total;
}

double quarantine_integral(const Trajectory& traj, double end_time) {
    if (traj.empty()) throw EmptyInputError("trajectory has no samples");
    return integrate_observable(traj, Observable::of(traj.model_kind(), ObservableKind::total_quarantined),
                                traj.front_time(), end_time);
}

EpidemicSummary summarize(const Trajectory& traj, double population_size) {
    if (!(population_size > 0.0)) throw DomainError("population size must be positive");
    const ModelKind model = traj.model_kind();
    const Observable infected = Observable::of(model, ObservableKind::total_infected);
    const Peak peak = find_peak(traj, infected);

    EpidemicSummary out;
    out.observable_name = infected.name();
    out.peak_value = peak.value;
    out.peak_time = peak.time;
    try {
        out.end_time = epidemic_end(traj, 0.1 / population_size);
        out.quarantine_integral = quarantine_integral(traj, out.end_time);
    } catch (const NoEpidemicError&) {
        out.degenerate = true;
        out.end_time = 0.0;
        out.quarantine_integral = 0.0;
    }
    return out;
}

}  // namespace qsim
