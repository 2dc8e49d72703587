#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numeric>

#include "oracle.hpp"
#include "qsim/errors.hpp"
#include "qsim/scenarios.hpp"

using namespace qsim;

namespace {

constexpr double kN = kDefaultPopulation;

ScenarioConfig basic_with(double psi = 0.0, double chi = 0.0) {
    auto c = ScenarioConfig::defaults(ModelKind::basic);
    auto& p = std::get<BasicParams>(c.params);
    p.psi = psi;
    p.chi = chi;
    return c;
}

double oracle_peak(const oracle::Basic& f, double sq, double dt = 0.01) {
    return oracle::streaming_peak([&f](const oracle::Vec& x, oracle::Vec& d) { f(x, d); },
                                  oracle::basic_initial(kN, sq), dt, 600.0, oracle::basic_total);
}

}  // namespace

TEST_CASE("initial states") {
    auto b = ScenarioConfig::defaults(ModelKind::basic);
    b.initial.quarantined = 0.3;
    const auto xb = build_initial_state(b);
    REQUIRE(xb.size() == 9);
    CHECK(xb[0] == doctest::Approx(0.7 - 4e-6).epsilon(1e-15));
    CHECK(xb[1] == 0.3);
    CHECK(xb[2] == 4e-6);

    auto e = ScenarioConfig::defaults(ModelKind::extended);
    set_abrupt_quarantine(e, 0.2);
    const auto xe = build_initial_state(e);
    REQUIRE(xe.size() == 18);
    CHECK(xe[1] == doctest::Approx(0.1));
    CHECK(xe[9] == doctest::Approx(0.1));
    CHECK(xe[0] == doctest::Approx((0.8 - 2.0 / kN) / 2.0).epsilon(1e-14));
    CHECK(xe[8] == xe[0]);
    CHECK(std::accumulate(xe.begin(), xe.end(), 0.0) == doctest::Approx(1.0).epsilon(1e-15));

    e.quarantine_split = QuarantineSplit::each;
    set_abrupt_quarantine(e, 0.2);
    const auto xe2 = build_initial_state(e);
    CHECK(xe2[1] == doctest::Approx(0.2));
    CHECK(xe2[9] == doctest::Approx(0.2));

    auto s = ScenarioConfig::defaults(ModelKind::seir);
    s.initial.quarantined = 0.1;
    CHECK_THROWS_AS(s.validate(), ConfigError);
    b.initial.quarantined = 1.0;
    CHECK_THROWS_AS(b.validate(), ConfigError);
}

TEST_CASE("run_scenario matches the oracle") {
    const auto r = run_scenario(basic_with(0.1));
    oracle::Basic f;
    f.psi = 0.1;
    CHECK(r.summary.peak_value == doctest::Approx(oracle_peak(f, 0.0, 1e-3)).epsilon(1e-6));
}

TEST_CASE("basic model with k = 1 and no interventions reduces to SEIR") {
    auto b = basic_with();
    std::get<BasicParams>(b.params).k = 1.0;
    b.integrator.rtol = b.integrator.atol = 1e-10;
    auto s = ScenarioConfig::defaults(ModelKind::seir);
    s.integrator = b.integrator;
    const auto tb = simulate(b);
    const auto ts = simulate(s);
    REQUIRE(tb.size() == ts.size());
    double worst = 0.0;
    for (std::size_t j = 0; j < tb.size(); ++j) {
        const auto xb = tb.state(j);
        const auto xs = ts.state(j);
        worst = std::max({worst, std::abs(xb[0] - xs[0]), std::abs(xb[2] - xs[1]), std::abs(xb[4] - xs[2]),
                          std::abs(xb[7] - xs[3])});
    }
    CHECK(worst <= 1e-8);
}

TEST_CASE("peak falls with the testing rate") {
    double prev = INFINITY;
    for (double psi : {0.0, 0.05, 0.1, 0.2, 0.3}) {
        const double p = evaluate_peak(basic_with(psi), ObservableKind::total_infected).value;
        CHECK(p < prev);
        prev = p;
    }
}

TEST_CASE("peak falls with the abrupt quarantine size") {
    for (auto model : {ModelKind::basic, ModelKind::extended}) {
        double prev = INFINITY;
        for (double q : {0.0, 0.1, 0.2, 0.3, 0.4}) {
            auto c = ScenarioConfig::defaults(model);
            set_abrupt_quarantine(c, q);
            const double p = evaluate_peak(c, ObservableKind::total_infected).value;
            CHECK(p < prev);
            prev = p;
        }
    }
}

TEST_CASE("abrupt matching agrees with a grid search") {
    oracle::Basic tested;
    tested.psi = 0.1;
    const double target = oracle_peak(tested, 0.0);
    const auto m = match_abrupt_quarantine(target, basic_with(), ObservableKind::total_infected);
    CHECK(m.parameter == "initial.quarantine_total");
    CHECK(std::abs(m.achieved_peak - target) <= kMatchTolerance * target);

    // First grid point whose peak is at or below the target, then linear interpolation.
    const oracle::Basic plain;
    const double h = 0.005;
    double q_prev = 0.0;
    double p_prev = oracle_peak(plain, 0.0);
    double q_grid = NAN;
    for (double q = h; q < 0.6; q += h) {
        const double p = oracle_peak(plain, q);
        if (p <= target) {
            q_grid = q_prev + (p_prev - target) / (p_prev - p) * (q - q_prev);
            break;
        }
        q_prev = q;
        p_prev = p;
    }
    REQUIRE(std::isfinite(q_grid));
    CHECK(std::abs(m.value - q_grid) < 2e-3);
}

TEST_CASE("gradual matching") {
    const double target = evaluate_peak(basic_with(0.1), ObservableKind::total_infected).value;
    const auto m = match_gradual_quarantine(target, basic_with(), ObservableKind::total_infected);
    CHECK(m.parameter == "chi");
    CHECK(m.value > 0.0);
    CHECK(std::abs(m.achieved_peak - target) <= kMatchTolerance * target);
    const double again = evaluate_peak(basic_with(0.0, m.value), ObservableKind::total_infected).value;
    CHECK(again == doctest::Approx(m.achieved_peak).epsilon(1e-12));

    CHECK_THROWS_AS(match_gradual_quarantine(target, ScenarioConfig::defaults(ModelKind::extended),
                                             ObservableKind::total_infected),
                    UnsupportedParameterError);
}

TEST_CASE("matching edge cases") {
    const double untreated = evaluate_peak(basic_with(), ObservableKind::total_infected).value;
    CHECK_THROWS_AS(match_abrupt_quarantine(untreated * 1.05, basic_with(), ObservableKind::total_infected),
                    BracketError);
    const auto m = match_abrupt_quarantine(untreated, basic_with(), ObservableKind::total_infected);
    CHECK(m.value == 0.0);
    CHECK_THROWS_AS(match_abrupt_quarantine(untreated, basic_with(0.1), ObservableKind::total_infected), ConfigError);
    CHECK_THROWS_AS(match_abrupt_quarantine(-1.0, basic_with(), ObservableKind::total_infected), DomainError);
}

TEST_CASE("quarantine cost ratio") {
    const auto r = quarantine_cost_ratio(0.1, basic_with(), QuarantineStrategy::abrupt);
    CHECK(r.ratio > 1.0);
    CHECK(r.ratio == doctest::Approx(r.indiscriminate_integral / r.testing_integral));
    CHECK(r.testing_end > 0.0);
    CHECK(r.indiscriminate_end > 0.0);
    CHECK_THROWS_AS(quarantine_cost_ratio(0.0, basic_with(), QuarantineStrategy::abrupt), DomainError);
    CHECK_THROWS_AS(quarantine_cost_ratio(0.1, ScenarioConfig::defaults(ModelKind::extended),
                                          QuarantineStrategy::gradual),
                    UnsupportedParameterError);
}

TEST_CASE("single-point sweep equals a direct run") {
    const auto g = sweep_1d(basic_with(), {"psi", {0.15}}, ObservableKind::total_infected);
    REQUIRE(g.ok());
    CHECK(g.at(0) == evaluate_peak(basic_with(0.15), ObservableKind::total_infected).value);
}

TEST_CASE("2D sweep") {
    const auto base = ScenarioConfig::defaults(ModelKind::extended);
    const SweepAxis a{"beta_s", {0.3, 0.5, 0.7}};
    const SweepAxis b{"beta_a", {0.3, 0.5, 0.7}};
    const auto g = sweep_2d(base, a, b, ObservableKind::total_infected, SweepOptions{.threads = 3, .order = {}});
    REQUIRE(g.ok());
    CHECK(g.rows() == 3);
    CHECK(g.cols() == 3);
    CHECK(g.at(0, 0) < g.at(1, 1));
    CHECK(g.at(1, 1) < g.at(2, 2));

    SweepOptions reversed;
    reversed.threads = 2;
    reversed.order.resize(9);
    std::iota(reversed.order.rbegin(), reversed.order.rend(), std::size_t{0});
    const auto h = sweep_2d(base, a, b, ObservableKind::total_infected, reversed);
    CHECK(h.values == g.values);
}

TEST_CASE("failed sweep cells are reported per cell") {
    const auto g = sweep_1d(basic_with(), {"rho", {0.5, 1.5, 0.7}}, ObservableKind::total_infected);
    CHECK_FALSE(g.ok());
    CHECK(std::isfinite(g.at(0)));
    CHECK(std::isnan(g.at(1)));
    CHECK(g.error_at(1).find("rho") != std::string::npos);
    CHECK(std::isfinite(g.at(2)));
    CHECK(g.error_at(0).empty());
}

TEST_CASE("latency sweep") {
    const auto base = ScenarioConfig::defaults(ModelKind::extended);
    const double delta = 1.0 / 5.5;
    const double lambdas[] = {20.0, delta / 2.0};
    const auto ls = latency_sweep(base, lambdas, delta);
    REQUIRE(ls.cells.size() == 2);
    CHECK(ls.cells[0].error.empty());
    CHECK(ls.cells[0].gamma == doctest::Approx(1.0 / (5.5 - 0.05)));
    CHECK(std::abs(ls.cells[0].peak_value / ls.reference.value - 1.0) < 0.02);
    CHECK_FALSE(ls.cells[1].error.empty());
    CHECK(std::isnan(ls.cells[1].peak_value));
    CHECK_THROWS_AS(latency_sweep(basic_with(), lambdas, delta), UnsupportedParameterError);
}

TEST_CASE("parameter paths") {
    auto b = basic_with();
    set_parameter(b, "inv_delta", 7.0);
    CHECK(std::get<BasicParams>(b.params).delta == doctest::Approx(1.0 / 7.0));
    CHECK(get_parameter(b, "inv_delta") == doctest::Approx(7.0));
    set_parameter(b, "initial.quarantined", 0.25);
    CHECK(b.initial.quarantined == 0.25);
    set_parameter(b, "population_size", 1000.0);
    CHECK(b.population_size == 1000.0);
    CHECK_THROWS_AS(set_parameter(b, "beta_s", 0.1), ConfigError);
    CHECK_THROWS_AS(set_parameter(b, "inv_delta", 0.0), DomainError);

    auto e = ScenarioConfig::defaults(ModelKind::extended);
    set_parameter(e, "psi", 0.2);
    const auto& p = std::get<ExtendedParams>(e.params);
    CHECK(p.psi_s == 0.2);
    CHECK(p.psi_a == 0.2);
    set_parameter(e, "inv_gamma_a", 4.0);
    CHECK(p.gamma_a == 0.25);
    CHECK(p.gamma_s == doctest::Approx(1.0 / 3.5));
    set_parameter(e, "initial.quarantine_total", 0.3);
    CHECK(e.initial.quarantined == doctest::Approx(0.15));
    CHECK(e.initial.quarantined_a == doctest::Approx(0.15));
    CHECK(get_parameter(e, "initial.quarantine_total") == doctest::Approx(0.3));
    CHECK_THROWS_AS(set_parameter(e, "nonsense", 1.0), ConfigError);
}
