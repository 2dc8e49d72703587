#include <doctest.h>

#include <cmath>
#include <limits>
#include <random>

#include "oracle.hpp"
#include "qsim/errors.hpp"
#include "qsim/model.hpp"
#include "random_states.hpp"

using namespace qsim;

namespace {

template <std::size_t N>
double component_sum(const std::array<double, N>& d) {
    double s = 0.0;
    for (double v : d) s += v;
    return s;
}

BasicParams random_basic(std::mt19937_64& rng) {
    BasicParams p;
    p.beta = uniform(rng, 0.05, 2.0);
    p.omega = uniform(rng, 0.05, 2.0);
    p.delta = uniform(rng, 0.05, 2.0);
    p.psi = uniform(rng, 0.0, 1.0);
    p.chi = uniform(rng, 0.0, 5.0);
    p.rho = uniform(rng, 0.0, 1.0);
    p.k = uniform(rng, 0.0, 1.0);
    return p;
}

ExtendedParams random_extended(std::mt19937_64& rng) {
    ExtendedParams p;
    p.beta_s = uniform(rng, 0.05, 2.0);
    p.beta_a = uniform(rng, 0.05, 2.0);
    p.omega_s = uniform(rng, 0.05, 2.0);
    p.omega_a = uniform(rng, 0.05, 2.0);
    p.lambda_s = uniform(rng, 0.05, 5.0);
    p.lambda_a = uniform(rng, 0.05, 5.0);
    p.gamma_s = uniform(rng, 0.05, 2.0);
    p.gamma_a = uniform(rng, 0.05, 2.0);
    p.psi_s = uniform(rng, 0.0, 1.0);
    p.psi_a = uniform(rng, 0.0, 1.0);
    p.rho = uniform(rng, 0.0, 1.0);
    return p;
}

}  // namespace

TEST_CASE("seir_rhs hand-evaluated example") {
    SeirState x{0.5, 0.0, 0.1, 0.4};
    const auto d = seir_rhs(x, SeirParams{});
    CHECK(d.s == doctest::Approx(-0.025).epsilon(1e-15));
    CHECK(d.e == doctest::Approx(0.025).epsilon(1e-15));
    CHECK(d.i == doctest::Approx(-0.1 / 5.5).epsilon(1e-15));
    CHECK(d.r == doctest::Approx(0.1 / 5.5).epsilon(1e-15));
}

TEST_CASE("disease-free states are equilibria") {
    CHECK(seir_rhs(SeirState{}, SeirParams{}) == SeirState{0, 0, 0, 0});
    const auto db = basic_rhs(BasicState{}, BasicParams{});
    for (double v : db.to_array()) CHECK(v == 0.0);
    const auto de = extended_rhs(ExtendedState{}, ExtendedParams{});
    for (double v : de.to_array()) CHECK(v == 0.0);
}

TEST_CASE("basic_rhs hand-evaluated example") {
    BasicState x;
    x.s = 0.5;
    x.i_a = 0.1;
    x.r = 0.4;
    const auto d = basic_rhs(x, BasicParams{});
    CHECK(d.s == doctest::Approx(-0.025).epsilon(1e-15));
    CHECK(d.e == doctest::Approx(0.025).epsilon(1e-15));
    CHECK(d.i_a == doctest::Approx(-0.1 / 5.5).epsilon(1e-15));
    CHECK(d.r == doctest::Approx(0.1 / 5.5).epsilon(1e-15));
    for (double v : {d.s_q, d.e_q, d.i_aq, d.i_sq, d.r_q}) CHECK(v == 0.0);
}

TEST_CASE("extended_rhs hand-evaluated example") {
    ExtendedState x;
    x.s_s = 0.4;
    x.s_a = 0.0;
    x.l_s = 0.1;
    const auto d = extended_rhs(x, ExtendedParams{});
    CHECK(d.e_s == doctest::Approx(0.02).epsilon(1e-15));
    CHECK(d.l_s == doctest::Approx(-0.05).epsilon(1e-15));
    CHECK(d.i_sq == doctest::Approx(0.05).epsilon(1e-15));
    CHECK(d.s_s == doctest::Approx(-0.02).epsilon(1e-15));
    const auto a = d.to_array();
    int nonzero = 0;
    for (double v : a) nonzero += v != 0.0;
    CHECK(nonzero == 4);
}

TEST_CASE("feedback terms") {
    ExtendedParams p;
    p.psi_s = p.psi_a = 0.1;
    ExtendedState x;
    CHECK(feedback_terms(x, p).recruitment == 0.0);

    x.l_sq = 0.1;
    x.l_aq = 0.05;
    x.i_aq = 0.02;
    CHECK(feedback_terms(x, p).recruitment == doctest::Approx(0.067).epsilon(1e-14));

    SUBCASE("linear in the quarantined arguments") {
        ExtendedState y = x;
        y.l_sq *= 2;
        y.l_aq *= 2;
        y.i_aq *= 2;
        CHECK(feedback_terms(y, p).recruitment == 2.0 * feedback_terms(x, p).recruitment);
    }
    SUBCASE("disabled") {
        p.feedback_enabled = false;
        CHECK(feedback_terms(x, p).recruitment == 0.0);
    }
    SUBCASE("sigma") {
        x.s_s = 0.3;
        x.s_a = 0.2;
        x.r_a = 0.1;
        CHECK(feedback_terms(x, p).unquarantined == doctest::Approx(0.6));
    }
}

TEST_CASE("recruitment is dropped when nothing is left outside quarantine") {
    ExtendedParams p;
    p.psi_s = p.psi_a = 0.2;
    ExtendedState x;
    x.s_s = 0.0;
    x.s_a = 0.0;
    x.s_sq = 0.5;
    x.l_sq = 0.3;
    x.i_aq = 0.2;
    const auto d = extended_rhs(x, p);
    for (double v : d.to_array()) CHECK(std::isfinite(v));
    CHECK(d.s_s == 0.0);
}

TEST_CASE("aggregates") {
    BasicState b;
    b.i_a = 0.1;
    b.i_aq = 0.05;
    b.i_sq = 0.02;
    CHECK(total_infected(b) == doctest::Approx(0.17));
    BasicState q;
    q.s_q = 0.1;
    q.e_q = 0.01;
    q.i_aq = 0.02;
    q.i_sq = 0.03;
    q.r_q = 0.04;
    CHECK(total_quarantined(q) == doctest::Approx(0.20));
    CHECK(total_infected(BasicState{}) == 0.0);
    CHECK(total_infected(ExtendedState{}) == 0.0);

    ExtendedState e;
    e.l_s = 0.01;
    e.l_sq = 0.02;
    e.l_a = 0.03;
    e.l_aq = 0.04;
    e.i_a = 0.05;
    e.i_aq = 0.06;
    e.i_sq = 0.07;
    e.r_s = 0.5;
    CHECK(total_infected(e) == doctest::Approx(0.28));
    CHECK(reported_active(e) == 0.07);
    CHECK(total_quarantined(e) == doctest::Approx(quarantine_pool(e) + 0.07));
}

TEST_CASE("r0_to_beta") {
    CHECK(r0_to_beta(2.75, 1.0 / 5.5) == doctest::Approx(0.5));
    CHECK(r0_to_beta(1.0, 1.0) == 1.0);
    CHECK(r0_to_beta(3.58, 1.0 / 5.5) == doctest::Approx(0.6509).epsilon(1e-4));
    CHECK_THROWS_AS(r0_to_beta(0.0, 1.0), DomainError);
    CHECK_THROWS_AS(r0_to_beta(1.0, -1.0), DomainError);
}

TEST_CASE("split_infectious_period") {
    CHECK(split_infectious_period(1.0 / 5.5, 0.5) == doctest::Approx(1.0 / 3.5).epsilon(1e-14));
    CHECK(split_infectious_period(0.5, 1.0) == doctest::Approx(1.0));
    CHECK(split_infectious_period(1.0 / 5.5, 20.0) == doctest::Approx(1.0 / 5.45).epsilon(1e-14));
    CHECK_THROWS_AS(split_infectious_period(1.0 / 5.5, 1.0 / 5.5), DomainError);
    CHECK_THROWS_AS(split_infectious_period(0.5, 0.25), DomainError);
}

TEST_CASE("non-finite states are rejected") {
    const double nan = std::numeric_limits<double>::quiet_NaN();
    CHECK_THROWS_AS(seir_rhs(SeirState{nan, 0, 0, 0}, SeirParams{}), InvalidStateError);
    BasicState b;
    b.e = std::numeric_limits<double>::infinity();
    CHECK_THROWS_AS(basic_rhs(b, BasicParams{}), InvalidStateError);
    ExtendedState e;
    e.r_aq = nan;
    CHECK_THROWS_AS(extended_rhs(e, ExtendedParams{}), InvalidStateError);
}

TEST_CASE("parameter validation names the field") {
    BasicParams p;
    p.rho = 1.5;
    try {
        validate(p);
        FAIL("expected DomainError");
    } catch (const DomainError& e) {
        CHECK(std::string(e.what()).find("rho") != std::string::npos);
    }
    ExtendedParams q;
    q.gamma_a = 0.0;
    CHECK_THROWS_AS(validate(q), DomainError);
    SeirParams s;
    s.beta = -1;
    CHECK_THROWS_AS(validate(s), DomainError);
}

TEST_CASE("derivatives sum to zero on random states") {
    std::mt19937_64 rng(20240601);
    for (int n = 0; n < 100; ++n) {
        const auto xs = random_simplex<4>(rng);
        SeirParams sp{uniform(rng, 0.05, 2), uniform(rng, 0.05, 2), uniform(rng, 0.05, 2)};
        CHECK(std::abs(component_sum(seir_rhs(SeirState::from_span(xs), sp).to_array())) <= 1e-14);

        const auto xb = random_simplex<9>(rng);
        CHECK(std::abs(component_sum(basic_rhs(BasicState::from_span(xb), random_basic(rng)).to_array())) <=
              1e-14);

        const auto xe = random_simplex<18>(rng);
        auto ep = random_extended(rng);
        ep.feedback_enabled = n % 2 == 0;
        CHECK(std::abs(component_sum(extended_rhs(ExtendedState::from_span(xe), ep).to_array())) <= 1e-14);
    }
}

TEST_CASE("quarantined sum is stationary with feedback") {
    std::mt19937_64 rng(7);
    for (int n = 0; n < 100; ++n) {
        const auto d = extended_rhs(ExtendedState::from_span(random_simplex<18>(rng)), random_extended(rng));
        CHECK(std::abs(quarantine_pool(d)) <= 1e-14);
    }
}

TEST_CASE("equilibrium continua") {
    std::mt19937_64 rng(11);
    for (int n = 0; n < 50; ++n) {
        const auto w = random_simplex<4>(rng);
        BasicState b;
        b.s = w[0];
        b.s_q = w[1];
        b.r = w[2];
        b.r_q = w[3];
        for (double v : basic_rhs(b, random_basic(rng)).to_array()) CHECK(v == 0.0);

        const auto u = random_simplex<3>(rng);
        ExtendedState e;
        e.s_s = e.s_a = 0.0;
        e.s_sq = u[0];
        e.s_aq = u[1];
        e.r_aq = u[2];
        for (double v : extended_rhs(e, random_extended(rng)).to_array()) CHECK(v == 0.0);
    }
}

TEST_CASE("basic model reduces to SEIR exactly") {
    std::mt19937_64 rng(3);
    for (int n = 0; n < 100; ++n) {
        const auto w = random_simplex<4>(rng);
        const SeirParams sp{uniform(rng, 0.05, 2), uniform(rng, 0.05, 2), uniform(rng, 0.05, 2)};
        BasicParams bp;
        bp.beta = sp.beta;
        bp.omega = sp.omega;
        bp.delta = sp.delta;
        bp.k = bp.rho = bp.chi = bp.psi = 0.0;
        BasicState b;
        b.s = w[0];
        b.e = w[1];
        b.i_sq = w[2];
        b.r = w[3];
        const auto ds = seir_rhs(SeirState{w[0], w[1], w[2], w[3]}, sp);
        const auto db = basic_rhs(b, bp);
        CHECK(db.s == ds.s);
        CHECK(db.e == ds.e);
        CHECK(db.i_sq == ds.i);
        CHECK(db.r == ds.r);
        for (double v : {db.s_q, db.e_q, db.i_a, db.i_aq, db.r_q}) CHECK(v == 0.0);
    }
}

TEST_CASE("vector fields agree with the independent transcription") {
    std::mt19937_64 rng(99);
    for (int n = 0; n < 50; ++n) {
        const auto xb = random_simplex<9>(rng);
        const auto bp = random_basic(rng);
        oracle::Basic ob{bp.beta, bp.omega, bp.delta, bp.psi, bp.chi, bp.rho, bp.k};
        oracle::Vec ref;
        ob(oracle::Vec(xb.begin(), xb.end()), ref);
        const auto db = basic_rhs(BasicState::from_span(xb), bp).to_array();
        for (std::size_t i = 0; i < 9; ++i) CHECK(db[i] == doctest::Approx(ref[i]).epsilon(1e-13));

        const auto xe = random_simplex<18>(rng);
        const auto ep = random_extended(rng);
        oracle::Extended oe{ep.beta_s, ep.beta_a,  ep.omega_s, ep.omega_a, ep.lambda_s, ep.lambda_a,
                            ep.gamma_s, ep.gamma_a, ep.psi_s,   ep.psi_a,   ep.rho,      true};
        oe(oracle::Vec(xe.begin(), xe.end()), ref);
        const auto de = extended_rhs(ExtendedState::from_span(xe), ep).to_array();
        for (std::size_t i = 0; i < 18; ++i) CHECK(de[i] == doctest::Approx(ref[i]).epsilon(1e-13));
    }
}

TEST_CASE("model kind names and dimensions") {
    for (auto k : {ModelKind::seir, ModelKind::basic, ModelKind::extended}) {
        CHECK(model_kind_from_string(to_string(k)) == k);
    }
    CHECK(dimension(ModelKind::seir) == 4);
    CHECK(dimension(ModelKind::basic) == 9);
    CHECK(dimension(ModelKind::extended) == 18);
    CHECK_THROWS(model_kind_from_string("sir"));
}
