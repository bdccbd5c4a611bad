#pragma once

#include <vector>

#include "igflow/integrate.hpp"
#include "igflow/types.hpp"

namespace igflow {

inline constexpr double kMinProbability = 1e-300;

// Canonical ensemble over discrete energy levels at coldness beta = 1/(k_B T).
struct DiscreteEnsemble {
    Vector probs;
    Vector levels;
    double beta = 0.0;
};

// Start and limit of the KL gradient flow. Both are strictly positive
// probability vectors of the same length.
struct FlowEndpoints {
    Vector q0;
    Vector q2;

    // Throws DomainError when either vector is not a valid distribution or the
    // lengths differ.
    void validate() const;
};

// Throws DomainError unless p has strictly positive finite entries summing to
// 1 within 1e-12.
void require_distribution(const Vector& p, const char* what);

// ln Z = ln sum exp(-beta E_i), evaluated with a max shift. A negative beta is
// accepted with a warning on stderr. Throws ConfigError for empty or
// non-finite levels.
[[nodiscard]] double log_partition_function(const Vector& levels, double beta);
[[nodiscard]] double partition_function(const Vector& levels, double beta);
[[nodiscard]] Vector canonical_distribution(const Vector& levels, double beta);
[[nodiscard]] DiscreteEnsemble canonical_ensemble(const Vector& levels, double beta);

// U = sum p_i E_i.
[[nodiscard]] double average_energy(const Vector& levels, double beta);

// D(p || q) = sum p_i ln(p_i / q_i) over the common support. Throws
// DomainError when the supports differ.
[[nodiscard]] double kl_divergence(const Vector& p, const Vector& q);

// dq_i/dt = q_i (-ln(q_i / q2_i) + D(q || q2)).
[[nodiscard]] Vector kl_flow_rhs(const Vector& q, const FlowEndpoints& endpoints);

// Psi(t) = ln sum exp(e^{-t} ln q0_i + (1 - e^{-t}) ln q2_i).
[[nodiscard]] double log_normalizer(double t, const FlowEndpoints& endpoints);
// Q(t) = exp(e^{-t} ln q0 + (1 - e^{-t}) ln q2), componentwise.
[[nodiscard]] Vector unnormalized_q(double t, const FlowEndpoints& endpoints);
// q(t) = Q(t) e^{-Psi(t)}.
[[nodiscard]] Vector closed_form_q(double t, const FlowEndpoints& endpoints);

struct DiscreteSample {
    double t;
    Vector q;
    double divergence;  // D(q(t) || q2)
};

// RK4 (or rk45) integration of kl_flow_rhs. A probability that drops below
// kMinProbability, or a normalization error above 1e-9, stops the run with
// IntegrationError; samples are never renormalized.
[[nodiscard]] std::vector<DiscreteSample> integrate_discrete_flow(const FlowEndpoints& endpoints,
                                                                  Span span,
                                                                  const IntegratorConfig& cfg);

// Residual of d/dt ln(p_i/p0) = -[ln(p_i/p0) - sum_j p_j ln(p_j/p0)] with
// p = canonical_distribution(levels, e^{-t}) and p0 uniform. The left side is
// the analytic derivative e^{-t} (E_i - U).
[[nodiscard]] Vector canonical_flow_residual(const Vector& levels, double t);

// f(t) = K exp(c e^{-t}).
[[nodiscard]] double gompertz(double t, double K, double c);
// f'(t) + f ln(f/K) with the analytic derivative; identically zero.
[[nodiscard]] double gompertz_residual(double t, double K, double c);

}  // namespace igflow
