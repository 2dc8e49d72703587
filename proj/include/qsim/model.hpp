#pragma once

// Compartment states, rate parameters and vector fields of the three
// epidemic models: classical SEIR, the nine-compartment model with testing
// and indiscriminate quarantining ("basic"), and the eighteen-compartment
// model with separate symptomatic/asymptomatic groups and a latent stage
// ("extended").
//
// All densities are fractions of a unit population. Derivatives are returned
// in the same record type as the state.

#include <array>
#include <cstddef>
#include <span>
#include <string_view>

namespace qsim {

enum class ModelKind { generic, seir, basic, extended };

std::string_view to_string(ModelKind kind);
ModelKind model_kind_from_string(std::string_view name);

/// Number of compartments of a model (0 for generic).
std::size_t dimension(ModelKind kind);

// ---------------------------------------------------------------------------
// SEIR

struct SeirParams {
    double beta = 0.5;
    double omega = 1.0 / 4.0;
    double delta = 1.0 / 5.5;

    bool operator==(const SeirParams&) const = default;
};

struct SeirState {
    static constexpr std::size_t size = 4;

    double s = 1.0;
    double e = 0.0;
    double i = 0.0;
    double r = 0.0;

    std::array<double, size> to_array() const { return {s, e, i, r}; }
    static SeirState from_span(std::span<const double> v);
    bool operator==(const SeirState&) const = default;
};

// ---------------------------------------------------------------------------
// Basic model: S, S_Q, E, E_Q, I_a, I_aQ, I_sQ, R, R_Q

struct BasicParams {
    double beta = 0.5;
    double omega = 1.0 / 4.0;
    double delta = 1.0 / 5.5;
    double psi = 0.0;  ///< testing rate of infectious asymptomatic individuals
    double chi = 0.0;  ///< indiscriminate quarantining rate coefficient
    double rho = 0.5;  ///< isolation effectiveness
    double k = 0.5;    ///< asymptomatic fraction

    bool operator==(const BasicParams&) const = default;
};

struct BasicState {
    static constexpr std::size_t size = 9;

    double s = 1.0;
    double s_q = 0.0;
    double e = 0.0;
    double e_q = 0.0;
    double i_a = 0.0;
    double i_aq = 0.0;
    double i_sq = 0.0;
    double r = 0.0;
    double r_q = 0.0;

    std::array<double, size> to_array() const { return {s, s_q, e, e_q, i_a, i_aq, i_sq, r, r_q}; }
    static BasicState from_span(std::span<const double> v);
    bool operator==(const BasicState&) const = default;
};

// ---------------------------------------------------------------------------
// Extended model

struct ExtendedParams {
    double beta_s = 0.5;
    double beta_a = 0.5;
    double omega_s = 1.0 / 4.0;
    double omega_a = 1.0 / 4.0;
    double lambda_s = 1.0 / 2.0;
    double lambda_a = 1.0 / 2.0;
    double gamma_s = 1.0 / 3.5;
    double gamma_a = 1.0 / 3.5;
    double psi_s = 0.0;
    double psi_a = 0.0;
    double rho = 0.5;
    /// When false the quarantine recruitment F is forced to zero and the
    /// quarantined total is no longer conserved.
    bool feedback_enabled = true;

    bool operator==(const ExtendedParams&) const = default;
};

struct ExtendedState {
    static constexpr std::size_t size = 18;

    double s_s = 0.5;
    double s_sq = 0.0;
    double e_s = 0.0;
    double e_sq = 0.0;
    double l_s = 0.0;
    double l_sq = 0.0;
    double i_sq = 0.0;
    double r_s = 0.0;
    double s_a = 0.5;
    double s_aq = 0.0;
    double e_a = 0.0;
    double e_aq = 0.0;
    double l_a = 0.0;
    double l_aq = 0.0;
    double i_a = 0.0;
    double i_aq = 0.0;
    double r_a = 0.0;
    double r_aq = 0.0;

    std::array<double, size> to_array() const {
        return {s_s, s_sq, e_s, e_sq, l_s, l_sq, i_sq, r_s, s_a,
                s_aq, e_a, e_aq, l_a, l_aq, i_a, i_aq, r_a, r_aq};
    }
    static ExtendedState from_span(std::span<const double> v);
    bool operator==(const ExtendedState&) const = default;
};

/// Below this non-quarantined mass the F/Sigma recruitment terms are dropped.
inline constexpr double kSigmaMin = 1e-12;

struct FeedbackTerms {
    double recruitment = 0.0;     ///< F, rate at which quarantine is refilled
    double unquarantined = 0.0;   ///< Sigma, mass available for recruitment
};

// Parameter validation; throws DomainError naming the offending field.
void validate(const SeirParams& p);
void validate(const BasicParams& p);
void validate(const ExtendedParams& p);

// Vector fields. Throw InvalidStateError on non-finite input.
SeirState seir_rhs(const SeirState& x, const SeirParams& p);
BasicState basic_rhs(const BasicState& x, const BasicParams& p);
ExtendedState extended_rhs(const ExtendedState& x, const ExtendedParams& p);

FeedbackTerms feedback_terms(const ExtendedState& x, const ExtendedParams& p);

// Flat-vector forms used by the integrator. Sizes must match the model dimension.
void seir_rhs(std::span<const double> x, std::span<double> dx, const SeirParams& p);
void basic_rhs(std::span<const double> x, std::span<double> dx, const BasicParams& p);
void extended_rhs(std::span<const double> x, std::span<double> dx, const ExtendedParams& p);

// Aggregates.
double reported_active(const SeirState& x);
double reported_active(const BasicState& x);
double reported_active(const ExtendedState& x);
double total_infected(const SeirState& x);
double total_infected(const BasicState& x);
double total_infected(const ExtendedState& x);
double total_quarantined(const SeirState& x);
double total_quarantined(const BasicState& x);
double total_quarantined(const ExtendedState& x);

/// Quarantined mass conserved by the extended model's feedback loop:
/// S_sQ + E_sQ + L_sQ + S_aQ + E_aQ + L_aQ + I_aQ + R_aQ.
double quarantine_pool(const ExtendedState& x);

/// Transmission rate for a given basic reproduction number, beta = delta * R0.
double r0_to_beta(double r0, double delta);

/// Recovery rate gamma of the post-latent stage such that 1/delta = 1/lambda + 1/gamma.
double split_infectious_period(double delta, double lambda);

}  // namespace qsim
