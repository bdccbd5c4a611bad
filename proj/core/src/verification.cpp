#include "igflow/verification.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <functional>
#include <limits>
#include <random>
#include <sstream>

#include <json.hpp>

#include "igflow/discrete_flow.hpp"
#include "igflow/error.hpp"
#include "igflow/gradient_flow.hpp"

namespace igflow {

std::size_t VerificationReport::passed() const {
    return static_cast<std::size_t>(
        std::count_if(checks.begin(), checks.end(), [](const Check& c) { return c.pass; }));
}

std::string VerificationReport::to_json() const {
    using nlohmann::ordered_json;
    ordered_json doc;
    doc["checks"] = ordered_json::array();
    for (const auto& c : checks) {
        ordered_json entry;
        entry["name"] = c.name;
        entry["anchor"] = c.anchor;
        entry["residual"] = std::isfinite(c.residual) ? ordered_json(c.residual) : ordered_json();
        entry["tolerance"] = c.tolerance;
        entry["pass"] = c.pass;
        doc["checks"].push_back(std::move(entry));
    }
    doc["summary"] = {{"passed", passed()}, {"total", total()}};
    doc["config"] = config.empty() ? ordered_json::object() : ordered_json::parse(config);
    return doc.dump(2) + "\n";
}

Suite parse_suite(std::string_view name) {
    if (name == "all") return Suite::all;
    if (name == "geometry") return Suite::geometry;
    if (name == "flows") return Suite::flows;
    if (name == "discrete") return Suite::discrete;
    throw ConfigError("unknown suite \"" + std::string(name) +
                      "\" (expected all, geometry, flows or discrete)");
}

const char* suite_name(Suite suite) {
    switch (suite) {
        case Suite::all: return "all";
        case Suite::geometry: return "geometry";
        case Suite::flows: return "flows";
        case Suite::discrete: return "discrete";
    }
    return "all";
}

Tolerances Tolerances::defaults() {
    Tolerances t;
    t.values_ = {
        {"geometry.metric_inverse_identity", 1e-10},
        {"geometry.metric_symmetry", 1e-12},
        {"geometry.eikonal_on_shell", 1e-10},
        {"geometry.eikonal_frame_rescaling", 1e-10},
        {"geometry.vielbein_ruppeiner_agreement", 1e-5},
        {"geometry.maxwell_relation", 1e-6},
        {"geometry.mixed_partial_symmetry", 1e-6},
        {"geometry.arc_length_equals_tau", 1e-4},
        {"geometry.arc_length_additivity", 1e-12},
        {"flows.energy_conservation", 1e-8},
        {"flows.charge_conservation", 1e-8},
        {"flows.null_lagrangian", 1e-10},
        {"flows.unit_speed", 1e-8},
        {"flows.momentum_reconstruction", 1e-8},
        {"flows.closed_form", 1e-8},
        {"flows.closed_form.vdw", 1e-7},
        {"flows.dW_equals_E_dtau", 1e-8},
        {"flows.generating_stationarity", 1e-8},
        {"flows.entropy_identity", 1e-6},
        {"flows.dtau_equals_E_dt", 1e-6},
        {"flows.theta_linearity", 1e-7},
        {"flows.entropy_growth", 0.0},
        {"flows.entropy_rate", 1e-6},
        {"flows.constant_pressure", 1e-6},
        {"flows.pressure_drift_rate", 1e-4},
        {"flows.mathieu_conjugacy", 1e-6},
        {"flows.mathieu_one_form", 1e-8},
        {"flows.mathieu_roundtrip", 1e-12},
        {"flows.legendre_duality", 1e-10},
        {"flows.theta_potential_gradient", 1e-6},
        {"flows.temperature_dictionary", 1e-8},
        {"flows.reversibility", 1e-7},
        {"flows.no_interior_fixed_point", 0.0},
        {"discrete.closed_form_agreement", 1e-6},
        {"discrete.kl_monotone", 0.0},
        {"discrete.normalization", 1e-10},
        {"discrete.double_exponential", 1e-10},
        {"discrete.canonical_flow_residual", 1e-10},
        {"discrete.canonical_flow_fd", 1e-7},
        {"discrete.gompertz_closed_form", 1e-12},
        {"discrete.gompertz_rule", 1e-8},
        {"discrete.average_energy_fd", 1e-6},
        {"discrete.potential_identity", 1e-10},
        {"discrete.kl_gibbs", 0.0},
    };
    return t;
}

void Tolerances::merge_json(std::string_view text) {
    nlohmann::json doc;
    try {
        doc = nlohmann::json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
        throw ConfigError(std::string("tolerances file is not valid JSON: ") + e.what());
    }
    if (!doc.is_object()) throw ConfigError("tolerances file must be a JSON object");
    for (const auto& [key, value] : doc.items()) {
        if (!values_.count(key)) throw ConfigError("unknown tolerance \"" + key + "\"");
        if (!value.is_number() || value.get<double>() < 0.0)
            throw ConfigError("tolerance \"" + key + "\" must be a non-negative number");
        values_[key] = value.get<double>();
    }
}

void Tolerances::load_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open tolerances file " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    merge_json(buf.str());
}

double Tolerances::get(const std::string& name) const {
    auto it = values_.find(name);
    if (it == values_.end()) throw ConfigError("no tolerance registered for check " + name);
    return it->second;
}

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

class Recorder {
public:
    explicit Recorder(const Tolerances& tol) : tol_(tol) {}

    void add(const std::string& name, const std::string& anchor, const std::function<double()>& fn) {
        const double tolerance = tol_.get(name);
        double residual = kInf;
        try {
            residual = fn();
        } catch (const std::exception&) {
            residual = kInf;
        }
        const bool pass = std::isfinite(residual) && residual <= tolerance;
        checks_.push_back({name, anchor, residual, tolerance, pass});
    }

    std::vector<Check> take() {
        std::sort(checks_.begin(), checks_.end(),
                  [](const Check& a, const Check& b) { return a.name < b.name; });
        return std::move(checks_);
    }

private:
    const Tolerances& tol_;
    std::vector<Check> checks_;
};

double max_abs(const Vector& v) { return v.size() ? v.cwiseAbs().maxCoeff() : 0.0; }

double rel_err(const Vector& a, const Vector& b) {
    return max_abs(a - b) / std::max(max_abs(b), 1e-300);
}

bool is_builtin(const VielbeinModel& m) { return m.family() != ModelFamily::custom; }
bool is_gas(const VielbeinModel& m) {
    return m.family() == ModelFamily::ideal || m.family() == ModelFamily::vdw;
}

std::vector<Vector> random_states(const VielbeinModel& model, std::mt19937_64& rng, int count) {
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    std::vector<Vector> out;
    int attempts = 0;
    while (static_cast<int>(out.size()) < count && attempts < 100 * count) {
        ++attempts;
        Vector q(model.dim());
        for (int i = 0; i < model.dim(); ++i) {
            switch (model.family()) {
                case ModelFamily::vdw:
                    q[i] = (i == 1 ? model.params().b : 0.0) + 0.5 + 2.5 * unit(rng);
                    break;
                case ModelFamily::custom:
                    q[i] = model.reference_state()[i] * (0.8 + 0.4 * unit(rng));
                    break;
                default:
                    q[i] = 0.5 + 2.5 * unit(rng);
            }
        }
        if (model.admissible(q)) out.push_back(q);
    }
    return out;
}

// Samples of a Hamilton flow and the matching gradient flow, shared by most
// flow and geometry checks.
struct Runs {
    Trajectory hamilton;  // tau in [0, 3E], samples every 0.01 E
    Trajectory gradient;  // t in [0, 3], samples every 0.01
};

Runs make_runs(const HamiltonSystem& sys, const Vector& q0) {
    const double E = sys.energy;
    Runs r;
    r.hamilton = integrate_hamilton(sys, on_shell_state(sys.model, q0), {0.0, 3.0 * E},
                                    hamilton_config(E));
    r.gradient = integrate_gradient_flow(sys.model, q0, {0.0, 3.0}, gradient_config());
    return r;
}

void geometry_checks(Recorder& rec, const HamiltonSystem& sys, const Vector& q0,
                     std::mt19937_64& rng) {
    const auto& model = sys.model;
    const auto states = random_states(model, rng, 20);

    rec.add("geometry.metric_inverse_identity", "g_{mu rho} g^{rho nu} = delta", [&] {
        double worst = 0.0;
        for (const auto& q : states) {
            const MetricAt m = model.metric(q);
            const Matrix id = Matrix::Identity(model.dim(), model.dim());
            worst = std::max(worst, (m.g * m.g_inv - id).cwiseAbs().maxCoeff());
        }
        return worst;
    });
    rec.add("geometry.metric_symmetry", "g_{mu nu} = g_{nu mu}", [&] {
        double worst = 0.0;
        for (const auto& q : states) {
            const MetricAt m = model.metric(q);
            worst = std::max(worst, (m.g - m.g.transpose()).cwiseAbs().maxCoeff());
            worst = std::max(worst, (m.g_inv - m.g_inv.transpose()).cwiseAbs().maxCoeff());
        }
        return worst;
    });
    rec.add("geometry.eikonal_on_shell", "g^{mu nu} p_mu p_nu = E^2", [&] {
        double worst = 0.0;
        for (const auto& q : states) {
            const Vector p = on_shell_momenta(model, q);
            worst = std::max(worst, std::abs(eikonal_residual(model.metric(q).g_inv, p,
                                                              model.energy())));
        }
        return worst;
    });
    rec.add("geometry.eikonal_frame_rescaling",
            "eta^{ij} -> lambda_i eta^{ij}, r_i^2 -> r_i^2 / lambda_i leaves the eikonal residual",
            [&] {
                std::uniform_real_distribution<double> lam(0.25, 4.0);
                Vector lambda(model.dim());
                for (int i = 0; i < model.dim(); ++i) lambda[i] = lam(rng);
                const DiagonalScale scaled(model.eta().lower().cwiseQuotient(lambda));
                const Vector r = model.charges().cwiseQuotient(lambda.cwiseSqrt());
                const double E2 = r.cwiseAbs2().cwiseQuotient(scaled.lower()).sum();
                double worst = 0.0;
                for (const auto& q : states) {
                    const Matrix e = model.vielbein(q);
                    const Vector p = e.fullPivLu().solve(r);
                    const MetricAt m = metric_inverse_from_vielbein(e, scaled, q);
                    const double res = p.dot(m.g_inv * p) - E2;
                    const double base = eikonal_residual(model.metric(q).g_inv,
                                                         on_shell_momenta(model, q), model.energy());
                    worst = std::max(worst, std::abs(res - base));
                }
                return worst;
            });

    if ((model.family() == ModelFamily::ideal || model.family() == ModelFamily::log_affine) &&
        has_charge_scales(model)) {
        rec.add("geometry.vielbein_ruppeiner_agreement",
                "eta_ij e_mu^i e_nu^j = d^2(-s)/dq^mu dq^nu", [&] {
                    double worst = 0.0;
                    const Admissible adm = [&model](const Vector& x) { return model.admissible(x); };
                    const ScalarField s = [&model](const Vector& x) { return model.entropy(x); };
                    for (const auto& q : states) {
                        const MetricAt rup = ruppeiner_metric(s, q, std::nullopt, adm);
                        worst = std::max(worst, (rup.g - model.metric(q).g).cwiseAbs().maxCoeff());
                    }
                    return worst;
                });
    }

    if (model.dim() >= 2) {
        rec.add("geometry.maxwell_relation", "d p_mu / d q^nu = d p_nu / d q^mu", [&] {
            double worst = 0.0;
            for (const auto& q : states) {
                Matrix J(model.dim(), model.dim());
                for (int k = 0; k < model.dim(); ++k) {
                    Vector dq = Vector::Zero(model.dim());
                    dq[k] = 1e-5 * std::max(1.0, std::abs(q[k]));
                    J.col(k) = (on_shell_momenta(model, q + dq) - on_shell_momenta(model, q - dq)) /
                               (2.0 * dq[k]);
                }
                worst = std::max(worst, (J - J.transpose()).cwiseAbs().maxCoeff());
            }
            return worst;
        });
        rec.add("geometry.mixed_partial_symmetry", "d^2(-s)/du dv = d^2(-s)/dv du", [&] {
            double worst = 0.0;
            const Admissible adm = [&model](const Vector& x) { return model.admissible(x); };
            const ScalarField s = [&model](const Vector& x) { return model.entropy(x); };
            for (const auto& q : states)
                worst = std::max(worst, negentropy_hessian(s, q, std::nullopt, adm).max_asymmetry);
            return worst;
        });
    }

    rec.add("geometry.arc_length_equals_tau", "d tau^2 = g_{mu nu} dq^mu dq^nu", [&] {
        IntegratorConfig cfg = hamilton_config(sys.energy);
        cfg.output_step = 1e-3;
        const auto traj = integrate_hamilton(sys, on_shell_state(model, q0), {0.0, 1.0}, cfg);
        const double L = arc_length(traj, [&model](const Vector& q) { return model.metric(q); });
        return std::abs(L - 1.0);
    });
    rec.add("geometry.arc_length_additivity", "L(a + b) = L(a) + L(b)", [&] {
        const auto traj = integrate_hamilton(sys, on_shell_state(model, q0), {0.0, 1.0},
                                             hamilton_config(sys.energy));
        const auto mid = static_cast<std::ptrdiff_t>(traj.samples.size() / 2);
        Trajectory first = traj, second = traj;
        first.samples.assign(traj.samples.begin(), traj.samples.begin() + mid + 1);
        second.samples.assign(traj.samples.begin() + mid, traj.samples.end());
        const MetricField g = [&model](const Vector& q) { return model.metric(q); };
        return std::abs(arc_length(first, g) + arc_length(second, g) - arc_length(traj, g));
    });
}

void flow_checks(Recorder& rec, const HamiltonSystem& sys, const Vector& q0) {
    const auto& model = sys.model;
    const double E = sys.energy;
    std::optional<Runs> runs_storage;
    auto runs = [&]() -> const Runs& {
        if (!runs_storage) runs_storage = make_runs(sys, q0);
        return *runs_storage;
    };

    rec.add("flows.energy_conservation", "H(q(tau), p(tau)) = E", [&] {
        double worst = 0.0;
        for (const auto& s : runs().hamilton.samples)
            worst = std::max(worst, std::abs(hamiltonian(sys, s.state) - E) / E);
        return worst;
    });
    rec.add("flows.charge_conservation", "e_i^mu(q(tau)) p_mu(tau) = r_i", [&] {
        double worst = 0.0;
        const Vector& r = model.charges();
        for (const auto& s : runs().hamilton.samples)
            worst = std::max(worst, max_abs(model.vielbein(s.state.q) * s.state.p - r) / max_abs(r));
        return worst;
    });
    rec.add("flows.null_lagrangian", "p_mu dq^mu/dtau - H = 0", [&] {
        double worst = 0.0;
        for (const auto& s : runs().hamilton.samples) {
            const PhaseVelocity v = hamilton_rhs(sys, s.state);
            worst = std::max(worst, std::abs(s.state.p.dot(v.dq) - hamiltonian(sys, s.state)));
        }
        return worst;
    });
    rec.add("flows.unit_speed", "g_{mu nu} (dq^mu/dtau)(dq^nu/dtau) = 1", [&] {
        double worst = 0.0;
        for (const auto& s : runs().hamilton.samples) {
            const PhaseVelocity v = hamilton_rhs(sys, s.state);
            worst = std::max(worst, std::abs(v.dq.dot(model.metric(s.state.q).g * v.dq) - 1.0));
        }
        return worst;
    });
    rec.add("flows.reversibility", "forward then backward integration returns the start", [&] {
        const Rhs rhs = [&sys](double, const Vector& y) {
            const PhaseVelocity v = hamilton_rhs(sys, unpack(y));
            Vector dy(y.size());
            dy << v.dq, v.dp;
            return dy;
        };
        IntegratorConfig cfg = hamilton_config(E);
        const Vector y0 = pack(on_shell_state(model, q0));
        const Vector y1 = integrate(rhs, y0, {0.0, E}, cfg).back().y;
        const Vector y2 = integrate(rhs, y1, {E, 0.0}, cfg).back().y;

        const Rhs grad = [&model](double, const Vector& q) { return eta_flow_rhs(model, q); };
        const Vector g1 = integrate(grad, q0, {0.0, 1.0}, gradient_config()).back().y;
        const Vector g2 = integrate(grad, g1, {1.0, 0.0}, gradient_config()).back().y;
        return std::max(rel_err(y2, y0), rel_err(g2, q0));
    });

    rec.add("flows.entropy_identity", "s(q(tau)) - s(q0) = E tau", [&] {
        double worst = 0.0;
        const double s0 = model.entropy(q0);
        for (const auto& s : runs().hamilton.samples)
            worst = std::max(worst, std::abs(model.entropy(s.state.q) - s0 - E * s.param));
        return worst;
    });
    rec.add("flows.dtau_equals_E_dt", "d tau = E dt", [&] {
        const Trajectory mapped = reparametrize(runs().gradient, E);
        const auto& ham = runs().hamilton.samples;
        if (mapped.samples.size() != ham.size()) return kInf;
        double worst = 0.0;
        for (std::size_t i = 0; i < ham.size(); ++i) {
            worst = std::max(worst, rel_err(mapped.samples[i].state.q, ham[i].state.q));
            worst = std::max(worst, std::abs(mapped.samples[i].param - ham[i].param) /
                                        std::max(1.0, ham[i].param));
        }
        return worst;
    });
    rec.add("flows.entropy_growth", "s(q(t)) strictly increasing along the gradient flow", [&] {
        int violations = 0;
        const auto& g = runs().gradient.samples;
        for (std::size_t i = 1; i < g.size(); ++i)
            if (!(model.entropy(g[i].state.q) > model.entropy(g[i - 1].state.q))) ++violations;
        return static_cast<double>(violations);
    });
    rec.add("flows.entropy_rate", "s(q(t)) - s(q0) = E^2 t", [&] {
        double worst = 0.0;
        const double Em = model.energy();
        const double s0 = model.entropy(q0);
        for (const auto& s : runs().gradient.samples)
            worst = std::max(worst, std::abs(model.entropy(s.state.q) - s0 - Em * Em * s.param));
        return worst;
    });
    rec.add("flows.no_interior_fixed_point", "gradient flows have no interior rest point", [&] {
        int zeros = 0;
        const Vector rq = model.reference_state();
        for (int i = -4; i <= 4; ++i) {
            const Vector q = rq * std::pow(1.25, i);
            if (model.admissible(q) && eta_flow_rhs(model, q).norm() == 0.0) ++zeros;
            const Vector theta = -on_shell_momenta(model, q.cwiseMax(rq));
            if (theta_flow_rhs(theta).norm() == 0.0) ++zeros;
        }
        return static_cast<double>(zeros);
    });

    if (!is_builtin(model)) return;

    const bool vdw = model.family() == ModelFamily::vdw;
    const std::string closed_name = vdw ? "flows.closed_form.vdw" : "flows.closed_form";
    rec.add(closed_name,
            vdw ? "v = b + (v0-b) e^{P_v tau/(beta^2 E)}, u = -a/v + (u0+a/v0) e^{P_u tau/(alpha^2 E)}"
                : "q(tau) = q0 exp(P tau / (alpha^2 E))",
            [&] {
                double worst = 0.0;
                for (const auto& s : runs().hamilton.samples)
                    worst = std::max(worst,
                                     rel_err(s.state.q, closed_form_state(model, q0, s.param)));
                return worst;
            });
    rec.add("flows.momentum_reconstruction", "p_mu = dW/dq^mu", [&] {
        double worst = 0.0;
        const Vector& P = model.charges();
        for (const auto& s : runs().hamilton.samples) {
            const Vector& q = s.state.q;
            Vector grad(model.dim());
            for (int k = 0; k < model.dim(); ++k) {
                Vector dq = Vector::Zero(model.dim());
                dq[k] = 1e-5 * std::abs(q[k]);
                grad[k] = (characteristic_W(model, q + dq, P) - characteristic_W(model, q - dq, P)) /
                          (2.0 * dq[k]);
            }
            worst = std::max(worst, rel_err(grad, s.state.p));
        }
        return worst;
    });
    rec.add("flows.dW_equals_E_dtau", "dW = E d tau", [&] {
        double worst = 0.0;
        const Vector& P = model.charges();
        const double W0 = characteristic_W(model, q0, P);
        for (const auto& s : runs().hamilton.samples)
            worst = std::max(worst, std::abs(characteristic_W(model, s.state.q, P) - W0 - E * s.param));
        return worst;
    });
    rec.add("flows.generating_stationarity", "dG/dP_i = 0 along the flow", [&] {
        double worst = 0.0;
        const Vector P = model.charges();
        for (const auto& s : runs().hamilton.samples) {
            for (int i = 0; i < model.dim(); ++i) {
                Vector dP = Vector::Zero(model.dim());
                dP[i] = 1e-6 * P[i];
                auto G = [&](const Vector& charges) {
                    return action(model, s.state.q, charges, s.param) - action(model, q0, charges, 0.0);
                };
                worst = std::max(worst, std::abs((G(P + dP) - G(P - dP)) / (2.0 * dP[i])));
            }
        }
        return worst;
    });
    rec.add("flows.theta_linearity", "theta(t) = theta(0) e^{-t}", [&] {
        // Exponential rate r_mu / eta_mu of each theta coordinate; 1 when the
        // scales equal the charges. The van der Waals gas is linear in the
        // transformed momenta (1/T~, P~/T~).
        const Vector rate = model.charges().cwiseQuotient(model.eta().lower());
        auto theta = [&](const PhaseState& st) {
            return vdw ? theta_coordinates(mathieu_forward(model.params().a, model.params().b, st))
                       : theta_coordinates(st);
        };
        const auto& g = runs().gradient.samples;
        const Vector theta0 = theta(g.front().state);
        double worst = 0.0;
        for (const auto& s : g) {
            const Vector expected = theta0.cwiseProduct((-rate * s.param).array().exp().matrix());
            worst = std::max(worst, rel_err(theta(s.state), expected));
        }
        return worst;
    });

    if (model.family() != ModelFamily::vdw) {
        rec.add("flows.legendre_duality", "Psi(theta) + Psi*(eta) - theta.eta = 0", [&] {
            double worst = 0.0;
            for (const auto& s : runs().hamilton.samples) {
                const Vector theta = theta_coordinates(s.state);
                const Vector& eta = s.state.q;
                worst = std::max(worst, std::abs(theta_potential(model, theta) +
                                                 eta_potential(model, eta) - theta.dot(eta)));
            }
            return worst;
        });
        rec.add("flows.theta_potential_gradient", "dPsi/dtheta = eta", [&] {
            double worst = 0.0;
            for (const auto& s : runs().gradient.samples) {
                const Vector theta = theta_coordinates(s.state);
                Vector grad(model.dim());
                for (int k = 0; k < model.dim(); ++k) {
                    Vector d = Vector::Zero(model.dim());
                    d[k] = 1e-6 * std::abs(theta[k]);
                    grad[k] = (theta_potential(model, theta + d) - theta_potential(model, theta - d)) /
                              (2.0 * d[k]);
                }
                worst = std::max(worst, rel_err(grad, s.state.q));
            }
            return worst;
        });
    }

    if (is_gas(model)) {
        if (has_charge_scales(model)) {
            rec.add("flows.constant_pressure",
                    vdw ? "alpha^2 = P_u, beta^2 = P_v: P + a/v^2 constant"
                        : "alpha^2 = P_u, beta^2 = P_v: P constant",
                    [&] {
                        const auto& h = runs().hamilton.samples;
                        const double P0 = effective_pressure(model, h.front().state);
                        double worst = 0.0;
                        for (const auto& s : h)
                            worst = std::max(worst,
                                             std::abs(effective_pressure(model, s.state) - P0) / P0);
                        return worst;
                    });
        } else {
            rec.add("flows.pressure_drift_rate", "dP/dtau = (P/E)(P_u/alpha^2 - P_v/beta^2)", [&] {
                const auto& h = runs().hamilton.samples;
                double worst = 0.0;
                for (std::size_t i = 1; i + 1 < h.size(); ++i) {
                    const double fd = (effective_pressure(model, h[i + 1].state) -
                                       effective_pressure(model, h[i - 1].state)) /
                                      (h[i + 1].param - h[i - 1].param);
                    const double exact = pressure_drift(model, h[i].state);
                    worst = std::max(worst, std::abs(fd - exact) / std::abs(exact));
                }
                return worst;
            });
        }
    }

    if (model.family() == ModelFamily::ideal && has_charge_scales(model)) {
        rec.add("flows.temperature_dictionary", "dt = d ln T", [&] {
            const auto& g = runs().gradient.samples;
            const double lnT0 = -std::log(g.front().state.p[0]);
            double worst = 0.0;
            for (const auto& s : g)
                worst = std::max(worst, std::abs(-std::log(s.state.p[0]) - lnT0 - s.param));
            return worst;
        });
    }

    if (vdw) {
        const double a = model.params().a, b = model.params().b;
        const auto ideal = ideal_gas(model.params().f, model.params().k_B, model.eta().lower()[0],
                                     model.eta().lower()[1], Vector::Ones(2));
        rec.add("flows.mathieu_conjugacy", "Mathieu image of the vdW flow = ideal-gas flow", [&] {
            const auto& h = runs().hamilton.samples;
            const PhaseState start = mathieu_forward(a, b, h.front().state);
            double worst = 0.0;
            for (const auto& s : h) {
                const PhaseState mapped = mathieu_forward(a, b, s.state);
                worst = std::max(worst, rel_err(mapped.q, closed_form_state(ideal, start.q, s.param)));
                worst = std::max(worst, rel_err(mapped.p, on_shell_momenta(ideal, mapped.q)));
            }
            return worst;
        });
        rec.add("flows.mathieu_one_form", "p_i dq^i = p~_i dq~^i", [&] {
            double worst = 0.0;
            for (const auto& s : runs().hamilton.samples) {
                const Vector dq = hamilton_rhs(sys, s.state).dq * 1e-4;
                const PhaseState lo{s.state.q - 0.5 * dq, s.state.p};
                const PhaseState hi{s.state.q + 0.5 * dq, s.state.p};
                const PhaseState mid = mathieu_forward(a, b, s.state);
                const Vector dq_t = mathieu_forward(a, b, hi).q - mathieu_forward(a, b, lo).q;
                worst = std::max(worst, std::abs(s.state.p.dot(dq) - mid.p.dot(dq_t)));
            }
            return worst;
        });
        rec.add("flows.mathieu_roundtrip", "inverse(forward(x)) = x", [&] {
            double worst = 0.0;
            for (const auto& s : runs().hamilton.samples) {
                const PhaseState back = mathieu_inverse(a, b, mathieu_forward(a, b, s.state));
                worst = std::max(worst, std::max(rel_err(back.q, s.state.q), rel_err(back.p, s.state.p)));
            }
            return worst;
        });
    }
}

Vector random_simplex(std::mt19937_64& rng, int n) {
    std::uniform_real_distribution<double> unit(0.05, 1.0);
    Vector p(n);
    for (int i = 0; i < n; ++i) p[i] = unit(rng);
    return p / p.sum();
}

Vector random_levels(std::mt19937_64& rng, int n) {
    std::uniform_real_distribution<double> gap(0.1, 1.5);
    Vector levels(n);
    double e = 0.0;
    for (int i = 0; i < n; ++i) {
        levels[i] = e;
        e += gap(rng);
    }
    return levels;
}

void discrete_checks(Recorder& rec, std::mt19937_64& rng) {
    std::uniform_int_distribution<int> size(2, 8);

    std::vector<FlowEndpoints> pairs;
    for (int k = 0; k < 10; ++k) {
        const int n = size(rng);
        pairs.push_back({random_simplex(rng, n), random_simplex(rng, n)});
    }
    std::vector<std::vector<DiscreteSample>> flows;
    auto flow_runs = [&]() -> const std::vector<std::vector<DiscreteSample>>& {
        if (flows.empty()) {
            IntegratorConfig cfg;
            cfg.output_step = 0.01;
            for (const auto& ep : pairs) flows.push_back(integrate_discrete_flow(ep, {0.0, 5.0}, cfg));
        }
        return flows;
    };

    rec.add("discrete.closed_form_agreement", "q(t) = exp(e^{-t} ln q0 + (1-e^{-t}) ln q2 - Psi)", [&] {
        double worst = 0.0;
        for (std::size_t k = 0; k < pairs.size(); ++k)
            for (const auto& s : flow_runs()[k])
                worst = std::max(worst, max_abs(s.q - closed_form_q(s.t, pairs[k])));
        return worst;
    });
    rec.add("discrete.kl_monotone", "D(q(t) || q2) nonincreasing", [&] {
        double worst = 0.0;
        for (const auto& run : flow_runs())
            for (std::size_t i = 1; i < run.size(); ++i)
                if (run[i - 1].divergence > 1e-12)
                    worst = std::max(worst, run[i].divergence - run[i - 1].divergence);
        return worst;
    });
    rec.add("discrete.normalization", "sum_i q_i(t) = 1", [&] {
        double worst = 0.0;
        for (const auto& run : flow_runs())
            for (const auto& s : run) worst = std::max(worst, std::abs(s.q.sum() - 1.0));
        return worst;
    });
    rec.add("discrete.kl_gibbs", "D(p || q) >= 0", [&] {
        double worst = 0.0;
        for (int k = 0; k < 100; ++k) {
            const int n = size(rng);
            worst = std::max(worst, -kl_divergence(random_simplex(rng, n), random_simplex(rng, n)));
        }
        return worst;
    });

    std::vector<Vector> level_sets;
    for (int k = 0; k < 5; ++k) level_sets.push_back(random_levels(rng, size(rng)));
    std::vector<double> t_grid;
    for (int i = 0; i <= 40; ++i) t_grid.push_back(-2.0 + 0.25 * i);

    rec.add("discrete.double_exponential", "p_i(e^{-t}) = q(t) with q0 = p(beta=1), q2 = uniform", [&] {
        double worst = 0.0;
        for (const auto& levels : level_sets) {
            const auto n = levels.size();
            const FlowEndpoints ep{canonical_distribution(levels, 1.0),
                                   Vector::Constant(n, 1.0 / static_cast<double>(n))};
            for (double t : t_grid)
                worst = std::max(worst, max_abs(canonical_distribution(levels, std::exp(-t)) -
                                                closed_form_q(t, ep)));
        }
        return worst;
    });
    rec.add("discrete.canonical_flow_residual",
            "d/dt ln(p_i/p0) = -[ln(p_i/p0) - sum_j p_j ln(p_j/p0)]", [&] {
                double worst = 0.0;
                for (std::size_t k = 0; k < 3; ++k)
                    for (double t : t_grid)
                        worst = std::max(worst, max_abs(canonical_flow_residual(level_sets[k], t)));
                return worst;
            });
    rec.add("discrete.canonical_flow_fd", "finite-difference d/dt ln p_i(e^{-t})", [&] {
        double worst = 0.0;
        const double h = 1e-5;
        for (std::size_t k = 0; k < 3; ++k) {
            const Vector& levels = level_sets[k];
            const double log_p0 = -std::log(static_cast<double>(levels.size()));
            for (double t : t_grid) {
                const Vector lp = canonical_distribution(levels, std::exp(-(t + h))).array().log();
                const Vector lm = canonical_distribution(levels, std::exp(-(t - h))).array().log();
                const Vector p = canonical_distribution(levels, std::exp(-t));
                const Vector log_ratio = (p.array().log() - log_p0).matrix();
                const Vector rhs = -(log_ratio.array() - p.dot(log_ratio)).matrix();
                worst = std::max(worst, max_abs((lp - lm) / (2.0 * h) - rhs));
            }
        }
        return worst;
    });
    rec.add("discrete.average_energy_fd", "U = -d ln Z / d beta", [&] {
        double worst = 0.0;
        const double h = 1e-4;
        for (const auto& levels : level_sets)
            for (double beta : {0.25, 0.5, 1.0, 2.0}) {
                const double fd = -(log_partition_function(levels, beta + h) -
                                    log_partition_function(levels, beta - h)) /
                                  (2.0 * h);
                worst = std::max(worst, std::abs(average_energy(levels, beta) - fd));
            }
        return worst;
    });
    rec.add("discrete.potential_identity", "sum p ln p = -beta U - ln Z", [&] {
        double worst = 0.0;
        for (const auto& levels : level_sets)
            for (double beta : {0.0, 0.5, 1.0, 2.0, 10.0}) {
                const Vector p = canonical_distribution(levels, beta);
                const double lhs = p.dot(p.array().log().matrix());
                worst = std::max(worst, std::abs(lhs + beta * average_energy(levels, beta) +
                                                 log_partition_function(levels, beta)));
            }
        return worst;
    });
    std::vector<double> forward_grid;
    for (int i = 0; i <= 20; ++i) forward_grid.push_back(0.25 * i);

    rec.add("discrete.gompertz_closed_form", "q(t) e^{Psi(t)} = q2 exp(ln(q0/q2) e^{-t})", [&] {
        double worst = 0.0;
        for (const auto& ep : pairs)
            for (double t : forward_grid) {
                const Vector Q = closed_form_q(t, ep) * std::exp(log_normalizer(t, ep));
                for (Eigen::Index i = 0; i < Q.size(); ++i) {
                    const double K = gompertz(t, ep.q2[i], std::log(ep.q0[i] / ep.q2[i]));
                    worst = std::max(worst, std::abs(Q[i] - K) / K);
                }
            }
        return worst;
    });
    rec.add("discrete.gompertz_rule", "d/dt ln Q = -ln(Q/q2)", [&] {
        double worst = 0.0;
        const double h = 1e-4;
        for (const auto& ep : pairs)
            for (double t : forward_grid) {
                const Vector fd = (unnormalized_q(t + h, ep).array().log() -
                                   unnormalized_q(t - h, ep).array().log()) /
                                  (2.0 * h);
                const Vector rule = -(unnormalized_q(t, ep).array() / ep.q2.array()).log();
                worst = std::max(worst, max_abs(fd - rule));
            }
        return worst;
    });
}

}  // namespace

VerificationReport run_verification(const HamiltonSystem& system, const VerifyOptions& options) {
    const auto& model = system.model;
    const Vector q0 = options.q0 ? *options.q0 : model.reference_state();
    model.require_admissible(q0);

    Recorder rec(options.tolerances);
    std::mt19937_64 rng(options.seed);
    const Suite suite = options.suite;
    if (suite == Suite::all || suite == Suite::geometry) geometry_checks(rec, system, q0, rng);
    if (suite == Suite::all || suite == Suite::flows) flow_checks(rec, system, q0);
    if (suite == Suite::all || suite == Suite::discrete) discrete_checks(rec, rng);

    nlohmann::ordered_json config;
    config["model"] = nlohmann::ordered_json::parse(model_to_json(model));
    config["energy"] = system.energy;
    config["q0"] = std::vector<double>(q0.data(), q0.data() + q0.size());
    config["suite"] = suite_name(suite);
    config["seed"] = options.seed;

    VerificationReport report;
    report.checks = rec.take();
    report.config = config.dump();
    return report;
}

}  // namespace igflow
