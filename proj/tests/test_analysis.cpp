#include <doctest.h>

#include <cmath>
#include <functional>

#include "oracle.hpp"
#include "qsim/analysis.hpp"
#include "qsim/errors.hpp"
#include "qsim/scenarios.hpp"

using namespace qsim;

namespace {

constexpr double kN = 500000.0;

// One-component trajectory sampled from f with exact derivative df.
Trajectory synthetic(const std::function<double(double)>& f, const std::function<double(double)>& df, double t_end,
                     double h = 0.25) {
    Trajectory t(ModelKind::generic, 1);
    const auto n = static_cast<std::size_t>(std::llround(t_end / h));
    for (std::size_t j = 0; j <= n; ++j) {
        const double s = static_cast<double>(j) * h;
        const double x[] = {f(s)};
        const double d[] = {df(s)};
        t.append(s, x, d);
    }
    return t;
}

const Observable kX = Observable::component(1, 0);

ScenarioResult default_basic(double sq = 0.0) {
    auto c = ScenarioConfig::defaults(ModelKind::basic);
    c.initial.quarantined = sq;
    return run_scenario(c);
}

oracle::Field basic_field() {
    return [](const oracle::Vec& x, oracle::Vec& d) { oracle::Basic{}(x, d); };
}

}  // namespace

TEST_CASE("peak of a sampled parabola") {
    const auto t = synthetic([](double s) { return -(s - 10.0) * (s - 10.0) + 4.0; },
                             [](double s) { return -2.0 * (s - 10.0); }, 20.0);
    const Peak p = find_peak(t, kX);
    CHECK(p.time == doctest::Approx(10.0).epsilon(1e-9));
    CHECK(p.value == doctest::Approx(4.0).epsilon(1e-9));

    const auto off = synthetic([](double s) { return -(s - 10.1) * (s - 10.1) + 4.0; },
                               [](double s) { return -2.0 * (s - 10.1); }, 20.0);
    const Peak q = find_peak(off, kX);
    CHECK(q.time == doctest::Approx(10.1).epsilon(1e-12));
    CHECK(q.value == doctest::Approx(4.0).epsilon(1e-12));
}

TEST_CASE("constant trajectory peaks at the first sample") {
    const auto t = synthetic([](double) { return 0.3; }, [](double) { return 0.0; }, 5.0);
    const Peak p = find_peak(t, kX);
    CHECK(p.time == 0.0);
    CHECK(p.value == 0.3);
    CHECK(p.index == 0);
}

TEST_CASE("monotone trajectory peaks at the boundary") {
    const auto t = synthetic([](double s) { return s; }, [](double) { return 1.0; }, 5.0);
    CHECK(find_peak(t, kX).time == 5.0);
}

TEST_CASE("threshold crossing of exp(-t)") {
    const auto t = synthetic([](double s) { return std::exp(-s); }, [](double s) { return -std::exp(-s); }, 10.0);
    CHECK(epidemic_end(t, kX, std::exp(-2.0)) == doctest::Approx(2.0).epsilon(1e-7));
    CHECK(std::abs(epidemic_end(t, kX, std::exp(-2.0)) - 2.0) < 1e-6);
    CHECK_THROWS_AS(epidemic_end(t, kX, 2.0), NoEpidemicError);
    CHECK_THROWS_AS(epidemic_end(t, kX, std::exp(-11.0)), HorizonTooShortError);
}

TEST_CASE("end time decreases with the threshold") {
    const auto r = default_basic();
    const Observable rep = Observable::of(ModelKind::basic, ObservableKind::reported_active);
    double prev = INFINITY;
    for (double level : {1e-7, 1e-6, 1e-5, 1e-4, 1e-3}) {
        const double te = epidemic_end(r.trajectory, rep, level);
        CHECK(te < prev);
        prev = te;
    }
}

TEST_CASE("quadrature") {
    SUBCASE("rectangle") {
        const auto t = synthetic([](double) { return 0.2; }, [](double) { return 0.0; }, 150.0);
        CHECK(integrate_observable(t, kX, 0.0, 100.0) == doctest::Approx(20.0).epsilon(1e-14));
    }
    SUBCASE("zero") {
        const auto t = synthetic([](double) { return 0.0; }, [](double) { return 0.0; }, 50.0);
        CHECK(integrate_observable(t, kX, 0.0, 33.3) == 0.0);
    }
    SUBCASE("cubic is integrated exactly, partial intervals included") {
        const auto f = [](double s) { return s * s * s - 2.0 * s; };
        const auto t = synthetic(f, [](double s) { return 3.0 * s * s - 2.0; }, 10.0);
        const auto F = [](double s) { return s * s * s * s / 4.0 - s * s; };
        CHECK(integrate_observable(t, kX, 0.1, 7.3) == doctest::Approx(F(7.3) - F(0.1)).epsilon(1e-13));
    }
    SUBCASE("additive over adjacent intervals") {
        const auto r = default_basic(0.2);
        const Observable q = Observable::of(ModelKind::basic, ObservableKind::total_quarantined);
        for (double mid : {0.3, 17.0, 133.71, 250.125}) {
            const double whole = integrate_observable(r.trajectory, q, 0.0, 300.0);
            const double parts = integrate_observable(r.trajectory, q, 0.0, mid) +
                                 integrate_observable(r.trajectory, q, mid, 300.0);
            CHECK(std::abs(whole - parts) < 1e-12);
        }
    }
}

TEST_CASE("SEIR peak against a dense-grid oracle") {
    const auto traj = simulate(ScenarioConfig::defaults(ModelKind::seir));
    const Peak p = find_peak(traj, Observable::of(ModelKind::seir, ObservableKind::reported_active));
    const auto dense = oracle::rk4([](const oracle::Vec& x, oracle::Vec& d) { oracle::Seir{}(x, d); },
                                   oracle::seir_initial(kN), 1e-3, 600.0);
    const auto ref = oracle::peak(dense, [](const oracle::Vec& x) { return x[2]; });
    CHECK(p.value == doctest::Approx(ref.value).epsilon(1e-7));
    CHECK(std::abs(p.time - ref.time) < 1e-2);
    CHECK(std::abs(p.time - traj.time(p.index)) <= 0.25);
}

TEST_CASE("basic default summary against oracles") {
    const auto r = default_basic();
    const auto dense = oracle::rk4(basic_field(), oracle::basic_initial(kN), 1e-3, 600.0);
    const double te = oracle::crossing_after_peak(dense, oracle::basic_reported, 0.1 / kN);
    const auto peak = oracle::peak(dense, oracle::basic_total);
    CHECK(std::abs(r.summary.end_time - te) < 1e-3);
    CHECK(r.summary.peak_value == doctest::Approx(peak.value).epsilon(1e-7));
    CHECK(r.summary.observable_name == "total_infected");
    CHECK_FALSE(r.summary.degenerate);
    CHECK(r.summary.quarantine_integral ==
          doctest::Approx(oracle::trapezoid(dense, oracle::basic_quarantined, te)).epsilon(1e-5));
}

TEST_CASE("quarantine integral with an initial quarantine against a trapezoid oracle") {
    const auto r = default_basic(0.135);
    const auto dense = oracle::rk4(basic_field(), oracle::basic_initial(kN, 0.135), 1e-3, 600.0);
    const double te = r.summary.end_time;
    const double ref = oracle::trapezoid(dense, oracle::basic_quarantined, te);
    CHECK(quarantine_integral(r.trajectory, te) == doctest::Approx(ref).epsilon(1e-5));
}

TEST_CASE("degenerate summary") {
    auto c = ScenarioConfig::defaults(ModelKind::basic);
    c.initial.exposed = 0.0;
    const auto r = run_scenario(c);
    CHECK(r.summary.degenerate);
    CHECK(r.summary.peak_value == 0.0);
    CHECK(r.summary.end_time == 0.0);
    CHECK(r.summary.quarantine_integral == 0.0);
}

TEST_CASE("larger population lowers the threshold and delays the end") {
    auto a = ScenarioConfig::defaults(ModelKind::basic);
    auto b = a;
    b.population_size *= 10.0;  // seed density held fixed
    const auto ra = run_scenario(a);
    const auto rb = run_scenario(b);
    CHECK(rb.summary.end_time > ra.summary.end_time);
    CHECK(rb.summary.peak_value == ra.summary.peak_value);
}

TEST_CASE("total infected dominates reported cases without testing") {
    for (auto model : {ModelKind::basic, ModelKind::extended}) {
        const auto traj = simulate(ScenarioConfig::defaults(model));
        const double tot = find_peak(traj, Observable::of(model, ObservableKind::total_infected)).value;
        const double rep = find_peak(traj, Observable::of(model, ObservableKind::reported_active)).value;
        CHECK(tot >= rep);
    }
}

TEST_CASE("observable names round-trip") {
    for (auto k : {ObservableKind::reported_active, ObservableKind::total_infected, ObservableKind::infectious,
                   ObservableKind::total_quarantined, ObservableKind::quarantine_pool}) {
        CHECK(observable_kind_from_string(to_string(k)) == k);
    }
    CHECK_THROWS(observable_kind_from_string("deaths"));
    // SEIR has no quarantine compartments; the observable is identically zero.
    const double x[] = {0.2, 0.3, 0.4, 0.1};
    CHECK(Observable::of(ModelKind::seir, ObservableKind::quarantine_pool)(x) == 0.0);
    CHECK(Observable::of(ModelKind::seir, ObservableKind::total_infected)(x) == 0.4);
}
