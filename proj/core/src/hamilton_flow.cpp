#include "igflow/hamilton_flow.hpp"

#include <cmath>
#include <sstream>

#include "igflow/error.hpp"

namespace igflow {

HamiltonSystem make_system(VielbeinModel model) {
    const double E = model.energy();
    return {std::move(model), E};
}

double hamiltonian(const HamiltonSystem& system, const PhaseState& state) {
    const MetricAt m = system.model.metric(state.q);
    const double h2 = state.p.dot(m.g_inv * state.p);
    if (!(h2 > 0.0))
        throw DomainError("g^{mu nu} p_mu p_nu is not positive at q = " + describe(state.q));
    return std::sqrt(h2);
}

PhaseVelocity hamilton_rhs(const HamiltonSystem& system, const PhaseState& state) {
    const auto& model = system.model;
    const MetricAt m = model.metric(state.q);
    const Vector gp = m.g_inv * state.p;
    const double h2 = state.p.dot(gp);
    if (!(h2 > 0.0))
        throw DomainError("g^{mu nu} p_mu p_nu is not positive at q = " + describe(state.q));
    const double H = std::sqrt(h2);

    PhaseVelocity v{gp / H, Vector(model.dim())};
    for (int k = 0; k < model.dim(); ++k) {
        const Matrix dg = model.metric_inverse_derivative(state.q, k);
        v.dp[k] = -0.5 * state.p.dot(dg * state.p) / H;
    }
    return v;
}

Vector pack(const PhaseState& state) {
    Vector y(state.q.size() + state.p.size());
    y << state.q, state.p;
    return y;
}

PhaseState unpack(const Vector& y) {
    const Eigen::Index n = y.size() / 2;
    return {y.head(n), y.tail(n)};
}

IntegratorConfig hamilton_config(double energy, double output_dt) {
    IntegratorConfig cfg;
    cfg.method = Method::rk4;
    cfg.step = 1e-3 * energy;
    cfg.output_step = output_dt * energy;
    return cfg;
}

namespace {

std::uint64_t run_hash(const VielbeinModel& model, const char* kind, const IntegratorConfig& cfg) {
    std::ostringstream os;
    os.precision(17);
    os << kind << '|' << model_to_json(model) << '|' << static_cast<int>(cfg.method) << '|'
       << cfg.step << '|' << cfg.rtol << '|' << cfg.atol << '|' << cfg.min_step << '|'
       << cfg.max_step << '|' << cfg.output_step;
    for (double x : cfg.extra_outputs) os << ',' << x;
    return fnv1a(os.str());
}

}  // namespace

Trajectory integrate_hamilton(const HamiltonSystem& system, const PhaseState& state0, Span span,
                              const IntegratorConfig& cfg) {
    const auto& model = system.model;
    model.require_admissible(state0.q);
    if (state0.p.size() != state0.q.size()) throw DomainError("q and p dimensions disagree");
    if (span.end < span.start) throw ConfigError("tau span must satisfy start <= end");

    const Rhs rhs = [&system](double, const Vector& y) {
        const PhaseVelocity v = hamilton_rhs(system, unpack(y));
        Vector dy(y.size());
        dy << v.dq, v.dp;
        return dy;
    };
    const auto raw = integrate(rhs, pack(state0), span, cfg);

    Trajectory traj;
    traj.kind = ParameterKind::tau;
    traj.metadata = {model.name(), system.energy, run_hash(model, "hamilton", cfg)};
    traj.samples.reserve(raw.size());
    for (const auto& s : raw) {
        PhaseState st = unpack(s.y);
        const double residual = eikonal_residual(model.metric(st.q).g_inv, st.p, system.energy);
        traj.samples.push_back({s.param, std::move(st), residual});
    }
    return traj;
}

double characteristic_W(const VielbeinModel& model, const Vector& q, const Vector& P) {
    model.require_admissible(q);
    if (P.size() != model.dim()) throw DomainError("charge vector has the wrong dimension");
    switch (model.family()) {
        case ModelFamily::ideal:
        case ModelFamily::log_affine:
            return P.dot(q.array().log().matrix());
        case ModelFamily::vdw: {
            const double a = model.params().a, b = model.params().b;
            return P[0] * std::log(q[0] + a / q[1]) + P[1] * std::log(q[1] - b);
        }
        case ModelFamily::custom:
            break;
    }
    throw UnsupportedModelError("no closed-form characteristic function for model " + model.name());
}

double energy_of_charges(const VielbeinModel& model, const Vector& P) {
    return std::sqrt(P.cwiseAbs2().cwiseQuotient(model.eta().lower()).sum());
}

double action(const VielbeinModel& model, const Vector& q, const Vector& P, double tau) {
    return characteristic_W(model, q, P) - energy_of_charges(model, P) * tau;
}

double generating_G(const VielbeinModel& model, const Vector& q, double tau, const Vector& q0,
                    double tau0) {
    const Vector& P = model.charges();
    return action(model, q, P, tau) - action(model, q0, P, tau0);
}

}  // namespace igflow
