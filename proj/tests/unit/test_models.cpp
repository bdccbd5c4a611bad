#include <cmath>
#include <cstdio>
#include <fstream>

#include <doctest.h>

#include "igflow/error.hpp"
#include "igflow/hamilton_flow.hpp"
#include "igflow/models.hpp"
#include "oracles.hpp"

using namespace igflow;

namespace {

Vector vec2(double a, double b) {
    Vector v(2);
    v << a, b;
    return v;
}

double max_entry(const Matrix& m) { return m.cwiseAbs().maxCoeff(); }

}  // namespace

TEST_CASE("ideal gas charges, energy and entropy") {
    const auto m = ideal_gas(3.0, 1.0);
    CHECK(m.charges()[0] == 1.5);
    CHECK(m.charges()[1] == 1.0);
    CHECK(m.energy() == doctest::Approx(std::sqrt(2.5)).epsilon(1e-15));
    CHECK(m.energy() == doctest::Approx(1.581139).epsilon(1e-6));
    CHECK(m.entropy(vec2(2, 1)) == doctest::Approx(1.5 * std::log(2.0)).epsilon(1e-15));
    CHECK(m.entropy(vec2(2, 1)) == doctest::Approx(1.039721).epsilon(1e-6));
    CHECK(m.entropy(m.reference_state()) == 0.0);
    CHECK(has_charge_scales(m));
}

TEST_CASE("ideal gas with numeric scales") {
    const auto m = ideal_gas(3.0, 1.0, 1.0, 1.0);
    CHECK(m.energy() == doctest::Approx(std::sqrt(1.5 * 1.5 + 1.0)));
    CHECK_FALSE(has_charge_scales(m));
    CHECK_THROWS_AS((void)ideal_gas(0.0, 1.0), ConfigError);
    CHECK_THROWS_AS((void)ideal_gas(3.0, -1.0), ConfigError);
    CHECK_THROWS_AS((void)ideal_gas(3.0, 1.0, std::string("Pw")), ConfigError);
    CHECK_THROWS_AS((void)ideal_gas(3.0, 1.0, -2.0), ConfigError);
}

TEST_CASE("van der Waals vielbein, entropy and domain") {
    const auto m = vdw_gas(3.0, 1.0, 0.5, 0.1);
    Matrix expected(2, 2);
    expected << 2.5, 0.0, 0.45, 0.9;
    CHECK(max_entry(m.vielbein(vec2(2, 1)) - expected) < 1e-15);
    CHECK(m.entropy(vec2(2, 1)) == doctest::Approx(1.5 * std::log(5.0 / 3.0)).epsilon(1e-14));
    CHECK(m.entropy(vec2(2, 1)) == doctest::Approx(0.766238).epsilon(1e-6));
    CHECK_THROWS_AS(m.require_admissible(vec2(2, 0.1)), DomainError);
    CHECK_FALSE(m.admissible(vec2(2, 0.05)));
}

TEST_CASE("van der Waals with a = b = 0 reduces to the ideal gas") {
    const auto vdw = vdw_gas(3.0, 1.0, 0.0, 0.0);
    const auto ideal = ideal_gas(3.0, 1.0);
    for (double u : {0.5, 1.0, 4.0})
        for (double v : {0.3, 1.0, 2.5}) {
            const Vector q = vec2(u, v);
            CHECK(max_entry(vdw.vielbein(q) - ideal.vielbein(q)) == 0.0);
            CHECK(vdw.entropy(q) == doctest::Approx(ideal.entropy(q)).epsilon(1e-15));
            CHECK(max_entry(vdw.metric(q).g - ideal.metric(q).g) < 1e-15);
        }
}

TEST_CASE("analytic vielbein derivatives match finite differences") {
    const auto m = vdw_gas(3.0, 1.0, 0.5, 0.1);
    const Vector q = vec2(2.0, 1.3);
    for (int k = 0; k < 2; ++k) {
        Vector d = Vector::Zero(2);
        d[k] = 1e-6;
        const Matrix fd = (m.vielbein(q + d) - m.vielbein(q - d)) / 2e-6;
        CHECK(max_entry(fd - m.vielbein_derivative(q, k)) < 1e-8);
        const Matrix fdg = (m.metric(q + d).g_inv - m.metric(q - d).g_inv) / 2e-6;
        CHECK(max_entry(fdg - m.metric_inverse_derivative(q, k)) < 1e-7);
    }
}

TEST_CASE("entropy gradients are the on-shell momenta") {
    for (const auto& m : {ideal_gas(), vdw_gas(5.0, 1.0, 0.5, 0.1), log_affine(vec2(2.0, 0.5))}) {
        const Vector q = vec2(2.0, 1.3);
        const Vector fd = oracle::gradient([&](const Vector& x) { return m.entropy(x); }, q);
        CHECK(oracle::max_rel(fd, m.entropy_gradient(q)) < 1e-8);
        CHECK(oracle::max_rel(on_shell_momenta(m, q), m.entropy_gradient(q)) < 1e-14);
    }
}

TEST_CASE("log-affine family") {
    const auto one = log_affine(Vector::Constant(1, 4.0));
    CHECK(one.energy() == 2.0);
    CHECK(on_shell_momenta(one, Vector::Constant(1, 2.0))[0] == 2.0);
    CHECK_THROWS_AS((void)log_affine(vec2(1.0, 0.0)), ConfigError);

    // Unit charges: the dual potential is -sum ln eta.
    const auto unit = log_affine(Vector::Ones(3));
    Vector eta(3);
    eta << 0.5, 2.0, 3.0;
    CHECK(eta_potential(unit, eta) == doctest::Approx(-eta.array().log().sum()).epsilon(1e-15));
}

TEST_CASE("log-affine with P = (1.5, 1) follows the ideal-gas flow") {
    const auto ideal = ideal_gas();
    const auto la = log_affine(vec2(1.5, 1.0));
    const Vector q0 = vec2(1.2, 0.7);
    const auto a = integrate_hamilton(make_system(ideal), on_shell_state(ideal, q0), {0, 1},
                                      hamilton_config(ideal.energy()));
    const auto b = integrate_hamilton(make_system(la), on_shell_state(la, q0), {0, 1},
                                      hamilton_config(la.energy()));
    REQUIRE(a.size() == b.size());
    for (std::size_t i = 0; i < a.size(); ++i) CHECK(oracle::max_abs(a.samples[i].state.q - b.samples[i].state.q) < 1e-14);
}

TEST_CASE("closed-form states") {
    const auto ideal = ideal_gas();
    const Vector q0 = vec2(1, 1);
    CHECK(closed_form_state(ideal, q0, 0.0) == q0);
    const Vector e1 = closed_form_state(ideal, q0, ideal.energy());
    CHECK(e1[0] == doctest::Approx(std::exp(1.0)).epsilon(1e-15));
    CHECK(e1[1] == doctest::Approx(std::exp(1.0)).epsilon(1e-15));

    // RK4 on dq/dtau = q / E as an independent reference.
    const double E = ideal.energy();
    const oracle::Vec ref = oracle::rk4([E](double, const oracle::Vec& y) { return oracle::Vec(y / E); },
                                        q0, 0.0, E, 1000);
    CHECK(oracle::max_rel(e1, ref) < 1e-12);

    const auto vdw = vdw_gas(3.0, 1.0, 0.5, 0.1);
    const Vector v = closed_form_state(vdw, vec2(2, 1), vdw.energy() * std::log(2.0));
    CHECK(v[1] == doctest::Approx(1.9).epsilon(1e-14));

    auto custom = custom_model("c", {{2, [](const Vector& q) { return Matrix(q.asDiagonal()); }},
                                     [](const Vector& q) { return q.array().log().sum(); }, {}},
                               DiagonalScale::identity(2), Vector::Ones(2), Vector::Ones(2));
    CHECK_THROWS_AS((void)closed_form_state(custom, q0, 1.0), UnsupportedModelError);
}

TEST_CASE("Mathieu map") {
    const PhaseState s{vec2(2, 1), vec2(0.6, 1.1)};
    const PhaseState id = mathieu_forward(0.0, 0.0, s);
    CHECK(id.q == s.q);
    CHECK(id.p == s.p);

    const PhaseState t = mathieu_forward(0.5, 0.1, s);
    CHECK(t.q[0] == doctest::Approx(2.5));
    CHECK(t.q[1] == doctest::Approx(0.9));
    CHECK(t.p[0] == s.p[0]);
    CHECK(t.p[1] == doctest::Approx(1.1 + 0.5 * 0.6));

    const PhaseState back = mathieu_inverse(0.5, 0.1, t);
    CHECK(oracle::max_abs(back.q - s.q) < 1e-15);
    CHECK(oracle::max_abs(back.p - s.p) < 1e-15);
}

TEST_CASE("pressure drift") {
    const auto iso = ideal_gas();
    const PhaseState on = on_shell_state(iso, vec2(1.3, 0.8));
    CHECK(pressure_drift(iso, on) == 0.0);

    const auto unit = ideal_gas(3.0, 1.0, 1.0, 1.0);
    // State with P = 1: p_u = P_u / u = p_v = P_v / v, e.g. (u, v) = (1.5, 1).
    const PhaseState s = on_shell_state(unit, vec2(1.5, 1.0));
    CHECK(pressure(s) == doctest::Approx(1.0));
    CHECK(pressure_drift(unit, s) == doctest::Approx(0.5 / unit.energy()).epsilon(1e-14));

    const auto sys = make_system(unit);
    IntegratorConfig cfg = hamilton_config(sys.energy);
    cfg.output_step = 1e-3;
    const auto traj = integrate_hamilton(sys, s, {-1e-3, 1e-3}, cfg);
    REQUIRE(traj.size() == 3);
    const double fd = (pressure(traj.samples[2].state) - pressure(traj.samples[0].state)) / 2e-3;
    CHECK(fd == doctest::Approx(pressure_drift(unit, traj.samples[1].state)).epsilon(1e-6));
}

TEST_CASE("legendre duality of the dual potentials") {
    for (const auto& m : {ideal_gas(), log_affine(Vector::Ones(3))}) {
        const Vector q = m.reference_state() * 1.7;
        const Vector theta = -on_shell_momenta(m, q);
        CHECK(std::abs(theta_potential(m, theta) + eta_potential(m, q) - theta.dot(q)) < 1e-12);
    }
    CHECK_THROWS_AS((void)theta_potential(vdw_gas(3, 1, 0.5, 0.1), -vec2(1, 1)), UnsupportedModelError);
}

TEST_CASE("planck potential is s - p.q") {
    const auto m = ideal_gas();
    const PhaseState s = on_shell_state(m, vec2(2, 3));
    CHECK(planck_potential(m, s) == doctest::Approx(m.entropy(s.q) - 2.5).epsilon(1e-14));
}

TEST_CASE("model configuration documents") {
    const auto m = model_from_json(R"({"model": "vdw", "a": 0.5, "b": 0.1, "alpha2": 1, "beta2": "Pv"})");
    CHECK(m.family() == ModelFamily::vdw);
    CHECK(m.eta().lower()[0] == 1.0);
    CHECK(m.eta().lower()[1] == 1.0);
    CHECK(model_to_json(model_from_json(model_to_json(m))) == model_to_json(m));

    CHECK_THROWS_AS((void)model_from_json(R"({"model": "ideal", "a": 1})"), ConfigError);
    CHECK_THROWS_AS((void)model_from_json(R"({"model": "ideal", "colour": 1})"), ConfigError);
    CHECK_THROWS_AS((void)model_from_json(R"({"model": "plasma"})"), ConfigError);
    CHECK_THROWS_AS((void)model_from_json("{not json"), ConfigError);
    CHECK_THROWS_AS((void)model_from_json(R"({"model": "vdw", "a": 0.5, "b": 0.1, "reference_state": [1, 0.05]})"),
                    ConfigError);
    CHECK_THROWS_AS((void)load_model_config("/nonexistent/model.json"), ConfigError);
}

TEST_CASE("with_scale keeps the equations of state") {
    const auto m = ideal_gas();
    const auto halved = m.with_scale(DiagonalScale(vec2(0.75, 1.0)));
    const Vector q = vec2(2, 1);
    CHECK(halved.vielbein(q) == m.vielbein(q));
    CHECK(halved.entropy(q) == m.entropy(q));
    CHECK(halved.energy() == doctest::Approx(std::sqrt(1.5 * 1.5 / 0.75 + 1.0)));
}
