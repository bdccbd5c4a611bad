#pragma once

#include "igflow/integrate.hpp"
#include "igflow/models.hpp"
#include "igflow/trajectory.hpp"

namespace igflow {

// Hamiltonian H = sqrt(g^{mu nu}(q) p_mu p_nu) on a vielbein model, with the
// conserved energy E fixed at construction.
struct HamiltonSystem {
    VielbeinModel model;
    double energy;
};

// E = sqrt(eta^{ij} r_i r_j) from the model's charges and frame metric.
[[nodiscard]] HamiltonSystem make_system(VielbeinModel model);

// Throws DomainError when the quadratic form is not positive.
[[nodiscard]] double hamiltonian(const HamiltonSystem& system, const PhaseState& state);

struct PhaseVelocity {
    Vector dq;
    Vector dp;
};

// dq/dtau = g^{mu nu} p_nu / H,  dp/dtau = -(1/2H) (d g^{nu rho}/d q^mu) p_nu p_rho.
// H is evaluated at the state, so off-shell inputs follow their own level set;
// on shell H equals system.energy.
[[nodiscard]] PhaseVelocity hamilton_rhs(const HamiltonSystem& system, const PhaseState& state);

// RK4 with step 1e-3 E and samples every output_dt * E, so the grid is
// uniform in the gradient-flow parameter t = tau / E.
[[nodiscard]] IntegratorConfig hamilton_config(double energy, double output_dt = 0.01);

// Integrates Hamilton's equations over tau in span (start <= end). Each sample
// carries its eikonal residual. Throws DomainError for an inadmissible start
// and IntegrationError if the flow leaves the domain.
[[nodiscard]] Trajectory integrate_hamilton(const HamiltonSystem& system, const PhaseState& state0,
                                            Span span, const IntegratorConfig& cfg);

// Hamilton's characteristic function for the built-in families:
//   ideal / log-affine: W = sum P_mu ln q^mu
//   van der Waals:      W = P_u ln(u + a/v) + P_v ln(v - b)
// Integration constant is zero. UnsupportedModelError for custom models.
[[nodiscard]] double characteristic_W(const VielbeinModel& model, const Vector& q, const Vector& P);

// Energy as a function of the conserved charges, sqrt(sum P_i^2 / eta_ii).
[[nodiscard]] double energy_of_charges(const VielbeinModel& model, const Vector& P);

// S = W - E(P) tau.
[[nodiscard]] double action(const VielbeinModel& model, const Vector& q, const Vector& P, double tau);

// G = S(q, P, tau) - S(q0, P, tau0) with the model's own charges.
[[nodiscard]] double generating_G(const VielbeinModel& model, const Vector& q, double tau,
                                  const Vector& q0, double tau0);

// Packs/unpacks a phase state as [q; p] for the generic integrator.
[[nodiscard]] Vector pack(const PhaseState& state);
[[nodiscard]] PhaseState unpack(const Vector& y);

}  // namespace igflow
