#include <cmath>
#include <limits>

#include <doctest.h>

#include "igflow/error.hpp"
#include "igflow/integrate.hpp"
#include "oracles.hpp"

using namespace igflow;

namespace {
Vector scalar(double x) { return Vector::Constant(1, x); }
}  // namespace

TEST_CASE("zero right-hand side keeps the state") {
    const Rhs rhs = [](double, const Vector& y) { return Vector::Zero(y.size()); };
    Vector y0(3);
    y0 << 1, -2, 3;
    for (Method m : {Method::rk4, Method::rk45}) {
        IntegratorConfig cfg;
        cfg.method = m;
        const auto out = integrate(rhs, y0, {0.0, 2.0}, cfg);
        for (const auto& s : out) CHECK((s.y - y0).norm() == 0.0);
    }
}

TEST_CASE("exponential decay and growth match the exact solution") {
    IntegratorConfig cfg;
    cfg.step = 1e-3;
    const Rhs decay = [](double, const Vector& y) -> Vector { return -y; };
    const Rhs growth = [](double, const Vector& y) -> Vector { return y; };
    CHECK(std::abs(integrate(decay, scalar(1.0), {0.0, 1.0}, cfg).back().y[0] - std::exp(-1.0)) < 1e-9);
    CHECK(std::abs(integrate(growth, scalar(1.0), {0.0, std::log(2.0)}, cfg).back().y[0] - 2.0) < 1e-9);

    cfg.method = Method::rk45;
    CHECK(std::abs(integrate(decay, scalar(1.0), {0.0, 1.0}, cfg).back().y[0] - std::exp(-1.0)) < 1e-9);
    CHECK(std::abs(integrate(growth, scalar(1.0), {0.0, std::log(2.0)}, cfg).back().y[0] - 2.0) < 1e-9);
}

TEST_CASE("rk4 samples agree with an independent RK4 at the same step") {
    // Harmonic oscillator, step 1e-2 over [0, 1] with samples every 0.25.
    const Rhs rhs = [](double, const Vector& y) {
        Vector d(2);
        d << y[1], -y[0];
        return d;
    };
    IntegratorConfig cfg;
    cfg.step = 1e-2;
    cfg.output_step = 0.25;
    Vector y0(2);
    y0 << 1.0, 0.0;
    const auto out = integrate(rhs, y0, {0.0, 1.0}, cfg);
    REQUIRE(out.size() == 5);
    const oracle::Vec ref = oracle::rk4([&](double t, const oracle::Vec& y) { return rhs(t, y); }, y0,
                                        0.0, 1.0, 100);
    CHECK(oracle::max_abs(out.back().y - ref) < 1e-13);
}

TEST_CASE("rk45 cubic Hermite output is accurate between accepted steps") {
    const Rhs rhs = [](double t, const Vector& y) -> Vector { return scalar(std::cos(t)) + 0.0 * y; };
    IntegratorConfig cfg;
    cfg.method = Method::rk45;
    cfg.output_step = 0.01;
    cfg.max_step = 0.5;
    const auto out = integrate(rhs, scalar(0.0), {0.0, 3.0}, cfg);
    double worst = 0.0;
    for (const auto& s : out) worst = std::max(worst, std::abs(s.y[0] - std::sin(s.param)));
    CHECK(worst < 1e-6);

    cfg.max_step = 0.05;
    double fine = 0.0;
    for (const auto& s : integrate(rhs, scalar(0.0), {0.0, 3.0}, cfg))
        fine = std::max(fine, std::abs(s.y[0] - std::sin(s.param)));
    // Cubic Hermite interpolation error bound h^4 / 384 max|y''''|.
    CHECK(fine <= std::pow(0.05, 4) / 384 * 1.01);
}

TEST_CASE("output grid") {
    IntegratorConfig cfg;
    cfg.output_step = 0.5;
    SUBCASE("includes the end point") {
        const auto g = output_grid({0.0, 1.2}, cfg);
        REQUIRE(g.size() == 4);
        CHECK(g.front() == 0.0);
        CHECK(g[2] == doctest::Approx(1.0));
        CHECK(g.back() == 1.2);
    }
    SUBCASE("extra outputs are merged in order") {
        cfg.extra_outputs = {std::log(2.0), 5.0};
        const auto g = output_grid({0.0, 1.0}, cfg);
        REQUIRE(g.size() == 4);
        CHECK(g[1] == 0.5);
        CHECK(g[2] == std::log(2.0));
    }
    SUBCASE("zero-length span gives one sample") {
        const Rhs rhs = [](double, const Vector& y) -> Vector { return y; };
        const auto out = integrate(rhs, scalar(3.0), {1.0, 1.0}, cfg);
        REQUIRE(out.size() == 1);
        CHECK(out[0].y[0] == 3.0);
    }
}

TEST_CASE("backward integration retraces the forward solution") {
    const Rhs rhs = [](double, const Vector& y) -> Vector { return y; };
    IntegratorConfig cfg;
    const auto out = integrate(rhs, scalar(std::exp(1.0)), {1.0, 0.0}, cfg);
    CHECK(out.front().param == 1.0);
    CHECK(out.back().param == 0.0);
    CHECK(std::abs(out.back().y[0] - 1.0) < 1e-11);
}

TEST_CASE("non-finite right-hand side raises IntegrationError with the last good sample") {
    const Rhs rhs = [](double t, const Vector& y) -> Vector {
        if (t > 0.55) return scalar(std::numeric_limits<double>::quiet_NaN());
        return y;
    };
    IntegratorConfig cfg;
    cfg.output_step = 0.1;
    try {
        (void)integrate(rhs, scalar(1.0), {0.0, 1.0}, cfg);
        FAIL("expected IntegrationError");
    } catch (const IntegrationError& e) {
        CHECK(e.last_param() <= 0.55);
        CHECK(e.last_state().allFinite());
    }
}

TEST_CASE("a DomainError inside the right-hand side becomes an IntegrationError") {
    const Rhs rhs = [](double, const Vector& y) -> Vector {
        if (y[0] < 0.5) throw DomainError("left the domain");
        return -y;
    };
    CHECK_THROWS_AS((void)integrate(rhs, scalar(1.0), {0.0, 2.0}, IntegratorConfig{}), IntegrationError);
}

TEST_CASE("rk45 step underflow is reported") {
    const Rhs rhs = [](double t, const Vector&) -> Vector { return scalar(1.0 / (1.0 - t)); };
    IntegratorConfig cfg;
    cfg.method = Method::rk45;
    cfg.min_step = 1e-6;
    CHECK_THROWS_AS((void)integrate(rhs, scalar(0.0), {0.0, 2.0}, cfg), IntegrationError);
}

TEST_CASE("invalid configurations are rejected") {
    IntegratorConfig cfg;
    cfg.step = 0.0;
    CHECK_THROWS_AS(cfg.validate(), ConfigError);
    cfg = IntegratorConfig{};
    cfg.output_step = -1.0;
    CHECK_THROWS_AS(cfg.validate(), ConfigError);
    cfg = IntegratorConfig{};
    cfg.method = Method::rk45;
    cfg.min_step = 1.0;
    cfg.max_step = 0.1;
    CHECK_THROWS_AS(cfg.validate(), ConfigError);
}
