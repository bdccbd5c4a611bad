#include <cmath>

#include <doctest.h>

#include "igflow/error.hpp"
#include "igflow/hamilton_flow.hpp"
#include "oracles.hpp"

using namespace igflow;

namespace {

Vector vec2(double a, double b) {
    Vector v(2);
    v << a, b;
    return v;
}

}  // namespace

TEST_CASE("hamiltonian values") {
    const auto ideal = make_system(ideal_gas());
    CHECK(hamiltonian(ideal, on_shell_state(ideal.model, vec2(3.3, 0.4))) ==
          doctest::Approx(std::sqrt(2.5)).epsilon(1e-14));

    const auto la = make_system(log_affine(vec2(1, 1)));
    CHECK(hamiltonian(la, on_shell_state(la.model, vec2(2, 5))) == doctest::Approx(std::sqrt(2.0)).epsilon(1e-14));

    auto flat = custom_model("flat", {{2, [](const Vector&) { return Matrix(Matrix::Identity(2, 2)); }},
                                      [](const Vector& q) { return q.sum(); }, {}},
                             DiagonalScale::identity(2), vec2(0.6, 0.8), Vector::Zero(2));
    const auto flat_sys = make_system(flat);
    CHECK(hamiltonian(flat_sys, {vec2(0, 0), vec2(0.6, 0.8)}) == doctest::Approx(1.0));
    CHECK_THROWS_AS((void)hamiltonian(flat_sys, {vec2(0, 0), vec2(0, 0)}), DomainError);
}

TEST_CASE("phase velocity") {
    const auto ideal = make_system(ideal_gas());
    const PhaseVelocity v = hamilton_rhs(ideal, on_shell_state(ideal.model, vec2(1, 1)));
    CHECK(v.dq[0] == doctest::Approx(1.0 / std::sqrt(2.5)).epsilon(1e-14));
    CHECK(v.dq[1] == doctest::Approx(0.632456).epsilon(1e-6));

    const auto vdw = make_system(vdw_gas(3.0, 1.0, 0.5, 0.1));
    const PhaseState s = on_shell_state(vdw.model, vec2(2, 1));
    const PhaseVelocity w = hamilton_rhs(vdw, s);
    CHECK(w.dq[1] == doctest::Approx(0.9 / std::sqrt(2.5)).epsilon(1e-13));

    // Finite difference of the closed form in tau.
    const double h = 1e-6;
    const Vector fd = (closed_form_state(vdw.model, s.q, h) - closed_form_state(vdw.model, s.q, -h)) / (2 * h);
    CHECK(oracle::max_rel(fd, w.dq) < 1e-8);
}

TEST_CASE("momenta follow the on-shell relation along the flow") {
    const auto sys = make_system(vdw_gas(3.0, 1.0, 0.5, 0.1));
    const auto traj = integrate_hamilton(sys, on_shell_state(sys.model, vec2(2, 1)), {0, 1},
                                         hamilton_config(sys.energy));
    for (const auto& s : traj.samples) {
        CHECK(oracle::max_rel(s.state.p, on_shell_momenta(sys.model, s.state.q)) < 1e-10);
        CHECK(std::abs(s.eikonal_residual) < 1e-10);
    }
}

TEST_CASE("ideal-gas Hamilton flow against the closed form and an independent RK4") {
    const auto sys = make_system(ideal_gas());
    const Vector q0 = vec2(1, 1);
    IntegratorConfig cfg = hamilton_config(sys.energy);
    cfg.step = 1e-3;
    const auto traj = integrate_hamilton(sys, on_shell_state(sys.model, q0), {0, 2}, cfg);
    CHECK(traj.back().param == 2.0);
    CHECK(oracle::max_rel(traj.back().state.q, closed_form_state(sys.model, q0, 2.0)) < 1e-8);

    // Reference: dq/dtau = q P / (eta E) integrated with 2000 steps.
    const double E = sys.energy;
    const oracle::Vec ref = oracle::rk4(
        [E](double, const oracle::Vec& q) { return oracle::Vec(q / E); }, q0, 0.0, 2.0, 2000);
    CHECK(oracle::max_rel(traj.back().state.q, ref) < 1e-12);
}

TEST_CASE("zero-length span gives the start state") {
    const auto sys = make_system(ideal_gas());
    const PhaseState s0 = on_shell_state(sys.model, vec2(2, 3));
    const auto traj = integrate_hamilton(sys, s0, {0.5, 0.5}, hamilton_config(sys.energy));
    REQUIRE(traj.size() == 1);
    CHECK(traj.front().state.q == s0.q);
    CHECK(traj.front().state.p == s0.p);
}

TEST_CASE("integration errors") {
    const auto sys = make_system(ideal_gas());
    CHECK_THROWS_AS((void)integrate_hamilton(sys, on_shell_state(sys.model, vec2(1, 1)), {1, 0},
                                             hamilton_config(sys.energy)),
                    ConfigError);
    CHECK_THROWS_AS((void)integrate_hamilton(sys, {vec2(-1, 1), vec2(1, 1)}, {0, 1}, hamilton_config(sys.energy)),
                    DomainError);

    // A flat one-dimensional model whose domain ends at q = 1: the flow
    // q(tau) = tau reaches the boundary before the end of the span.
    auto walled = custom_model("walled", {{1, [](const Vector&) { return Matrix(Matrix::Identity(1, 1)); }},
                                          [](const Vector& x) { return x[0]; },
                                          [](const Vector& x) { return x[0] < 1.0; }},
                               DiagonalScale::identity(1), Vector::Ones(1), Vector::Zero(1));
    const auto wsys = make_system(walled);
    try {
        (void)integrate_hamilton(wsys, on_shell_state(walled, Vector::Zero(1)), {0, 2}, hamilton_config(1.0));
        FAIL("expected IntegrationError");
    } catch (const IntegrationError& e) {
        CHECK(e.last_param() < 1.0);
        CHECK(e.last_state()[0] < 1.0);
    }
}

TEST_CASE("characteristic function and generating function") {
    const auto ideal = ideal_gas();
    CHECK(characteristic_W(ideal, vec2(1, 1), ideal.charges()) == 0.0);
    CHECK(energy_of_charges(ideal, ideal.charges()) == doctest::Approx(ideal.energy()));

    // p = grad W at random states.
    const auto vdw = vdw_gas(3.0, 1.0, 0.5, 0.1);
    const Vector q = vec2(1.7, 2.2);
    const Vector grad = oracle::gradient([&](const Vector& x) { return characteristic_W(vdw, x, vdw.charges()); }, q);
    CHECK(oracle::max_rel(grad, on_shell_momenta(vdw, q)) < 1e-8);

    // G vanishes at the start and equals W difference minus E dtau.
    const Vector q0 = vec2(1, 1);
    const double tau = 0.7;
    const Vector q1 = closed_form_state(ideal, q0, tau);
    CHECK(generating_G(ideal, q1, tau, q0, 0.0) == doctest::Approx(0.0).epsilon(1e-12));

    auto custom = custom_model("c", {{2, [](const Vector& x) { return Matrix(x.asDiagonal()); }},
                                     [](const Vector& x) { return x.array().log().sum(); }, {}},
                               DiagonalScale::identity(2), Vector::Ones(2), Vector::Ones(2));
    CHECK_THROWS_AS((void)characteristic_W(custom, q0, custom.charges()), UnsupportedModelError);
}

TEST_CASE("custom models integrate through the generic vielbein path") {
    auto custom = custom_model("diag", {{2, [](const Vector& x) { return Matrix(x.asDiagonal()); }},
                                        [](const Vector& x) { return 1.5 * std::log(x[0]) + std::log(x[1]); },
                                        [](const Vector& x) { return (x.array() > 0).all(); }},
                               DiagonalScale(vec2(1.5, 1.0)), vec2(1.5, 1.0), Vector::Ones(2));
    const auto sys = make_system(custom);
    const auto traj = integrate_hamilton(sys, on_shell_state(custom, vec2(1, 1)), {0, 1}, hamilton_config(sys.energy));
    CHECK(oracle::max_rel(traj.back().state.q, closed_form_state(ideal_gas(), vec2(1, 1), 1.0)) < 1e-8);
}

TEST_CASE("trajectories carry a deterministic configuration hash") {
    const auto sys = make_system(ideal_gas());
    const PhaseState s = on_shell_state(sys.model, vec2(1, 1));
    const auto a = integrate_hamilton(sys, s, {0, 0.1}, hamilton_config(sys.energy));
    const auto b = integrate_hamilton(sys, s, {0, 0.1}, hamilton_config(sys.energy));
    CHECK(a.metadata.config_hash == b.metadata.config_hash);
    IntegratorConfig other = hamilton_config(sys.energy);
    other.step *= 0.5;
    CHECK(integrate_hamilton(sys, s, {0, 0.1}, other).metadata.config_hash != a.metadata.config_hash);
    CHECK_NOTHROW(a.check());
}
