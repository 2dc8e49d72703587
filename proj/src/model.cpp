#include "qsim/model.hpp"

#include <cmath>
#include <string>

#include "qsim/errors.hpp"

namespace qsim {

namespace {

template <std::size_t N>
void require_finite(const std::array<double, N>& v, const char* model) {
    for (std::size_t j = 0; j < N; ++j) {
        if (!std::isfinite(v[j])) {
            throw InvalidStateError(std::string(model) + " state component " + std::to_string(j) +
                                    " is not finite");
        }
    }
}

void require_size(std::span<const double> v, std::size_t n, const char* model) {
    if (v.size() != n) {
        throw InvalidStateError(std::string(model) + " state needs " + std::to_string(n) +
                                " components, got " + std::to_string(v.size()));
    }
}

void require_positive(double v, const char* name) {
    if (!(std::isfinite(v) && v > 0.0)) {
        throw DomainError(std::string(name) + " must be positive and finite, got " + std::to_string(v));
    }
}

void require_non_negative(double v, const char* name) {
    if (!(std::isfinite(v) && v >= 0.0)) {
        throw DomainError(std::string(name) + " must be non-negative and finite, got " + std::to_string(v));
    }
}

void require_unit(double v, const char* name) {
    if (!(std::isfinite(v) && v >= 0.0 && v <= 1.0)) {
        throw DomainError(std::string(name) + " must lie in [0,1], got " + std::to_string(v));
    }
}

template <typename Array>
void copy_to(const Array& a, std::span<double> out) {
    for (std::size_t j = 0; j < a.size(); ++j) out[j] = a[j];
}

}  // namespace

std::string_view to_string(ModelKind kind) {
    switch (kind) {
        case ModelKind::seir: return "seir";
        case ModelKind::basic: return "basic";
        case ModelKind::extended: return "extended";
        case ModelKind::generic: break;
    }
    return "generic";
}

ModelKind model_kind_from_string(std::string_view name) {
    if (name == "seir") return ModelKind::seir;
    if (name == "basic") return ModelKind::basic;
    if (name == "extended") return ModelKind::extended;
    throw ConfigError("unknown model '" + std::string(name) + "' (expected seir, basic or extended)");
}

std::size_t dimension(ModelKind kind) {
    switch (kind) {
        case ModelKind::seir: return SeirState::size;
        case ModelKind::basic: return BasicState::size;
        case ModelKind::extended: return ExtendedState::size;
        case ModelKind::generic: break;
    }
    return 0;
}

SeirState SeirState::from_span(std::span<const double> v) {
    require_size(v, size, "seir");
    return {v[0], v[1], v[2], v[3]};
}

BasicState BasicState::from_span(std::span<const double> v) {
    require_size(v, size, "basic");
    return {v[0], v[1], v[2], v[3], v[4], v[5], v[6], v[7], v[8]};
}

ExtendedState ExtendedState::from_span(std::span<const double> v) {
    require_size(v, size, "extended");
    return {v[0],  v[1],  v[2],  v[3],  v[4],  v[5],  v[6],  v[7],  v[8],
            v[9],  v[10], v[11], v[12], v[13], v[14], v[15], v[16], v[17]};
}

void validate(const SeirParams& p) {
    require_positive(p.beta, "beta");
    require_positive(p.omega, "omega");
    require_positive(p.delta, "delta");
}

void validate(const BasicParams& p) {
    require_positive(p.beta, "beta");
    require_positive(p.omega, "omega");
    require_positive(p.delta, "delta");
    require_non_negative(p.psi, "psi");
    require_non_negative(p.chi, "chi");
    require_unit(p.rho, "rho");
    require_unit(p.k, "k");
}

void validate(const ExtendedParams& p) {
    require_positive(p.beta_s, "beta_s");
    require_positive(p.beta_a, "beta_a");
    require_positive(p.omega_s, "omega_s");
    require_positive(p.omega_a, "omega_a");
    require_positive(p.lambda_s, "lambda_s");
    require_positive(p.lambda_a, "lambda_a");
    require_positive(p.gamma_s, "gamma_s");
    require_positive(p.gamma_a, "gamma_a");
    require_non_negative(p.psi_s, "psi_s");
    require_non_negative(p.psi_a, "psi_a");
    require_unit(p.rho, "rho");
}

SeirState seir_rhs(const SeirState& x, const SeirParams& p) {
    require_finite(x.to_array(), "seir");
    const double infection = p.beta * x.s * x.i;
    const double onset = p.omega * x.e;
    const double recovery = p.delta * x.i;
    return {-infection, infection - onset, onset - recovery, recovery};
}

BasicState basic_rhs(const BasicState& x, const BasicParams& p) {
    require_finite(x.to_array(), "basic");
    const double leak = 1.0 - p.rho;
    const double quarantined_infectious = x.i_aq + x.i_sq;
    const double quarantining = p.chi * x.i_sq;

    // Force of infection on non-quarantined and quarantined susceptibles.
    const double infect_free = p.beta * x.s * x.i_a + p.beta * leak * x.s * quarantined_infectious;
    const double infect_quar = p.beta * leak * x.s_q * x.i_a + p.beta * leak * leak * x.s_q * quarantined_infectious;

    BasicState d;
    d.s = -infect_free - quarantining * x.s;
    d.s_q = -infect_quar + quarantining * x.s;
    d.e = infect_free - p.omega * x.e - quarantining * x.e;
    d.e_q = infect_quar - p.omega * x.e_q + quarantining * x.e;
    d.i_a = p.k * p.omega * x.e - quarantining * x.i_a - p.delta * x.i_a - p.psi * x.i_a;
    d.i_aq = p.k * p.omega * x.e_q + quarantining * x.i_a - p.delta * x.i_aq - p.psi * x.i_aq;
    d.i_sq = (1.0 - p.k) * p.omega * (x.e + x.e_q) + p.psi * (x.i_a + x.i_aq) - p.delta * x.i_sq;
    d.r = p.delta * (x.i_a + x.i_sq) - quarantining * x.r;
    d.r_q = p.delta * x.i_aq + quarantining * x.r;
    return d;
}

FeedbackTerms feedback_terms(const ExtendedState& x, const ExtendedParams& p) {
    FeedbackTerms out;
    out.unquarantined = x.s_s + x.s_a + x.e_s + x.e_a + x.l_s + x.l_a + x.i_a + x.r_a;
    if (p.feedback_enabled) {
        out.recruitment = p.lambda_s * x.l_sq + p.psi_s * x.l_sq + p.psi_a * (x.l_aq + x.i_aq);
    }
    return out;
}

ExtendedState extended_rhs(const ExtendedState& x, const ExtendedParams& p) {
    require_finite(x.to_array(), "extended");
    const double leak = 1.0 - p.rho;

    const FeedbackTerms fb = feedback_terms(x, p);
    const double recruit = fb.unquarantined < kSigmaMin ? 0.0 : fb.recruitment / fb.unquarantined;

    // Pressure from non-quarantined infectious individuals.
    const double free_pressure = p.beta_s * x.l_s + p.beta_a * (x.l_a + x.i_a);
    // Pressure from quarantined infectious individuals, felt only outside quarantine.
    const double quar_pressure = p.beta_s * (x.l_sq + x.i_sq) + p.beta_a * (x.l_aq + x.i_aq);
    const double force_free = free_pressure + leak * quar_pressure;
    const double force_quar = leak * free_pressure;

    const double exit_s = p.lambda_s + p.psi_s;

    ExtendedState d;
    d.s_s = -x.s_s * force_free - x.s_s * recruit;
    d.s_sq = -x.s_sq * force_quar + x.s_s * recruit;
    d.e_s = x.s_s * force_free - p.omega_s * x.e_s - x.e_s * recruit;
    d.e_sq = x.s_sq * force_quar - p.omega_s * x.e_sq + x.e_s * recruit;
    d.l_s = p.omega_s * x.e_s - exit_s * x.l_s - x.l_s * recruit;
    d.l_sq = p.omega_s * x.e_sq - exit_s * x.l_sq + x.l_s * recruit;
    d.i_sq = exit_s * x.l_s + exit_s * x.l_sq - p.gamma_s * x.i_sq + p.psi_a * (x.l_a + x.l_aq) +
             p.psi_a * (x.i_a + x.i_aq);
    d.r_s = p.gamma_s * x.i_sq;

    d.s_a = -x.s_a * force_free - x.s_a * recruit;
    d.s_aq = -x.s_aq * force_quar + x.s_a * recruit;
    d.e_a = x.s_a * force_free - p.omega_a * x.e_a - x.e_a * recruit;
    d.e_aq = x.s_aq * force_quar - p.omega_a * x.e_aq + x.e_a * recruit;
    d.l_a = p.omega_a * x.e_a - p.lambda_a * x.l_a - p.psi_a * x.l_a - x.l_a * recruit;
    d.l_aq = p.omega_a * x.e_aq - p.lambda_a * x.l_aq - p.psi_a * x.l_aq + x.l_a * recruit;
    d.i_a = p.lambda_a * x.l_a - p.psi_a * x.i_a - p.gamma_a * x.i_a - x.i_a * recruit;
    d.i_aq = p.lambda_a * x.l_aq - p.psi_a * x.i_aq - p.gamma_a * x.i_aq + x.i_a * recruit;
    d.r_a = p.gamma_a * x.i_a - x.r_a * recruit;
    d.r_aq = p.gamma_a * x.i_aq + x.r_a * recruit;
    return d;
}

void seir_rhs(std::span<const double> x, std::span<double> dx, const SeirParams& p) {
    require_size(dx, SeirState::size, "seir");
    copy_to(seir_rhs(SeirState::from_span(x), p).to_array(), dx);
}

void basic_rhs(std::span<const double> x, std::span<double> dx, const BasicParams& p) {
    require_size(dx, BasicState::size, "basic");
    copy_to(basic_rhs(BasicState::from_span(x), p).to_array(), dx);
}

void extended_rhs(std::span<const double> x, std::span<double> dx, const ExtendedParams& p) {
    require_size(dx, ExtendedState::size, "extended");
    copy_to(extended_rhs(ExtendedState::from_span(x), p).to_array(), dx);
}

double reported_active(const SeirState& x) { return x.i; }
double reported_active(const BasicState& x) { return x.i_sq; }
double reported_active(const ExtendedState& x) { return x.i_sq; }

double total_infected(const SeirState& x) { return x.i; }
double total_infected(const BasicState& x) { return x.i_a + x.i_aq + x.i_sq; }
double total_infected(const ExtendedState& x) {
    return x.l_s + x.l_sq + x.l_a + x.l_aq + x.i_a + x.i_aq + x.i_sq;
}

double total_quarantined(const SeirState&) { return 0.0; }
double total_quarantined(const BasicState& x) { return x.s_q + x.e_q + x.i_aq + x.i_sq + x.r_q; }
double total_quarantined(const ExtendedState& x) { return quarantine_pool(x) + x.i_sq; }

double quarantine_pool(const ExtendedState& x) {
    return x.s_sq + x.e_sq + x.l_sq + x.s_aq + x.e_aq + x.l_aq + x.i_aq + x.r_aq;
}

double r0_to_beta(double r0, double delta) {
    require_positive(r0, "R0");
    require_positive(delta, "delta");
    return delta * r0;
}

double split_infectious_period(double delta, double lambda) {
    require_positive(delta, "delta");
    require_positive(lambda, "lambda");
    if (!(lambda > delta)) {
        throw DomainError("latent exit rate lambda=" + std::to_string(lambda) +
                          " must exceed the total recovery rate delta=" + std::to_string(delta));
    }
    return 1.0 / (1.0 / delta - 1.0 / lambda);
}

}  // namespace qsim
