#pragma once

#include "igflow/integrate.hpp"
#include "igflow/models.hpp"
#include "igflow/trajectory.hpp"

namespace igflow {

// d theta / dt = -theta.
[[nodiscard]] Vector theta_flow_rhs(const Vector& theta);

// dq^mu/dt = g^{mu nu}(q) ds/dq^nu with the model's metric and entropy.
[[nodiscard]] Vector eta_flow_rhs(const VielbeinModel& model, const Vector& q);

// RK4, step 1e-3, samples every output_dt.
[[nodiscard]] IntegratorConfig gradient_config(double output_dt = 0.01);

// Integrates the eta-flow over t in span (start <= end). Each sample carries
// the on-shell momenta p = e^{-1}(q) r and its eikonal residual.
[[nodiscard]] Trajectory integrate_gradient_flow(const VielbeinModel& model, const Vector& q0,
                                                 Span span, const IntegratorConfig& cfg);

// tau = E t. A t-trajectory is scaled by E, a tau-trajectory by 1/E; states
// are unchanged. Throws ConfigError unless E is finite and positive.
[[nodiscard]] Trajectory reparametrize(const Trajectory& traj, double energy);

// T(t) = T0 e^t.
[[nodiscard]] double temperature_of_t(double T0, double t);
// t = -ln beta (integration constant zero).
[[nodiscard]] double t_of_beta(double beta);
// beta = e^{-t} + C.
[[nodiscard]] double beta_of_t(double t, double C = 0.0);

// theta = -p, i.e. (-1/T, -P/T) for the gas models.
[[nodiscard]] inline Vector theta_coordinates(const PhaseState& state) { return -state.p; }

}  // namespace igflow
