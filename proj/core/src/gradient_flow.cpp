#include "igflow/gradient_flow.hpp"

#include <cmath>
#include <sstream>

#include "igflow/error.hpp"

namespace igflow {

Vector theta_flow_rhs(const Vector& theta) { return -theta; }

Vector eta_flow_rhs(const VielbeinModel& model, const Vector& q) {
    return model.metric(q).g_inv * model.entropy_gradient(q);
}

IntegratorConfig gradient_config(double output_dt) {
    IntegratorConfig cfg;
    cfg.method = Method::rk4;
    cfg.step = 1e-3;
    cfg.output_step = output_dt;
    return cfg;
}

Trajectory integrate_gradient_flow(const VielbeinModel& model, const Vector& q0, Span span,
                                   const IntegratorConfig& cfg) {
    model.require_admissible(q0);
    if (span.end < span.start) throw ConfigError("t span must satisfy start <= end");

    const Rhs rhs = [&model](double, const Vector& q) { return eta_flow_rhs(model, q); };
    const auto raw = integrate(rhs, q0, span, cfg);

    std::ostringstream os;
    os.precision(17);
    os << "gradient|" << model_to_json(model) << '|' << static_cast<int>(cfg.method) << '|'
       << cfg.step << '|' << cfg.rtol << '|' << cfg.atol << '|' << cfg.output_step;

    const double E = model.energy();
    Trajectory traj;
    traj.kind = ParameterKind::t;
    traj.metadata = {model.name(), E, fnv1a(os.str())};
    traj.samples.reserve(raw.size());
    for (const auto& s : raw) {
        PhaseState st = on_shell_state(model, s.y);
        const double residual = eikonal_residual(model.metric(st.q).g_inv, st.p, E);
        traj.samples.push_back({s.param, std::move(st), residual});
    }
    return traj;
}

Trajectory reparametrize(const Trajectory& traj, double energy) {
    if (!std::isfinite(energy) || energy <= 0.0)
        throw ConfigError("reparametrization needs a positive, finite energy");
    Trajectory out = traj;
    const bool to_tau = traj.kind == ParameterKind::t;
    const double factor = to_tau ? energy : 1.0 / energy;
    for (auto& s : out.samples) s.param *= factor;
    out.kind = to_tau ? ParameterKind::tau : ParameterKind::t;
    out.metadata.energy = energy;
    return out;
}

double temperature_of_t(double T0, double t) {
    if (!(T0 > 0.0)) throw DomainError("initial temperature must be positive");
    return T0 * std::exp(t);
}

double t_of_beta(double beta) {
    if (!(beta > 0.0)) throw DomainError("coldness beta must be positive");
    return -std::log(beta);
}

double beta_of_t(double t, double C) { return std::exp(-t) + C; }

}  // namespace igflow
