#pragma once

#include <functional>
#include <vector>

#include "igflow/types.hpp"

namespace igflow {

enum class Method {
    rk4,   // classical fixed-step Runge-Kutta
    rk45,  // Dormand-Prince 5(4), adaptive, Hermite dense output
};

struct IntegratorConfig {
    Method method = Method::rk4;
    // Fixed step for rk4; initial trial step for rk45.
    double step = 1e-3;
    double rtol = 1e-11;
    double atol = 1e-13;
    double min_step = 1e-12;
    double max_step = 0.1;
    // Samples land on start + k * output_step plus the end point. Entries of
    // extra_outputs inside the span are added to that grid.
    double output_step = 0.1;
    std::vector<double> extra_outputs;

    // Throws ConfigError when the step bounds are not positive and ordered.
    void validate() const;
};

struct Span {
    double start = 0.0;
    double end = 0.0;

    [[nodiscard]] double length() const { return end - start; }
};

struct Sample {
    double param;
    Vector y;
};

using Rhs = std::function<Vector(double, const Vector&)>;

// Integrates dy/dparam = rhs(param, y) over span (forward or backward).
// The first sample is (span.start, y0) and the last is the end point.
//
// rk4 takes equal substeps of at most cfg.step between consecutive output
// points, so samples are exact RK4 states rather than interpolants. rk45
// interpolates output points inside accepted steps with cubic Hermite
// polynomials.
//
// Throws IntegrationError carrying the last valid sample if the right-hand
// side fails (non-finite output or DomainError). The same happens when the
// adaptive step underflows cfg.min_step.
[[nodiscard]] std::vector<Sample> integrate(const Rhs& rhs, const Vector& y0, Span span,
                                            const IntegratorConfig& cfg);

// Output grid used by integrate(); exposed for tests and for callers that
// need to line up samples from different runs.
[[nodiscard]] std::vector<double> output_grid(Span span, const IntegratorConfig& cfg);

}  // namespace igflow
