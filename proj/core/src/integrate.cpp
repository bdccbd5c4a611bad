#include "igflow/integrate.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "igflow/error.hpp"

namespace igflow {

void IntegratorConfig::validate() const {
    auto positive = [](double x) { return std::isfinite(x) && x > 0.0; };
    if (!positive(step)) throw ConfigError("integrator step must be positive");
    if (!positive(output_step)) throw ConfigError("output_step must be positive");
    if (method == Method::rk45) {
        if (!positive(rtol) || !positive(atol))
            throw ConfigError("rk45 tolerances must be positive");
        if (!positive(min_step) || !positive(max_step) || min_step > max_step)
            throw ConfigError("rk45 step bounds must satisfy 0 < min_step <= max_step");
        if (output_step < min_step) throw ConfigError("output_step must be >= min_step");
    }
}

std::vector<double> output_grid(Span span, const IntegratorConfig& cfg) {
    std::vector<double> grid{span.start};
    const double length = span.length();
    if (length == 0.0) return grid;

    const double dir = length > 0.0 ? 1.0 : -1.0;
    const double tol = 1e-9 * cfg.output_step;
    for (long k = 1;; ++k) {
        const double x = span.start + dir * static_cast<double>(k) * cfg.output_step;
        if (dir * (span.end - x) <= tol) break;
        grid.push_back(x);
    }
    for (double x : cfg.extra_outputs) {
        if (dir * (x - span.start) > tol && dir * (span.end - x) > tol) grid.push_back(x);
    }
    grid.push_back(span.end);

    std::sort(grid.begin(), grid.end(),
              [dir](double a, double b) { return dir > 0 ? a < b : a > b; });
    auto same = [](double a, double b) {
        return std::abs(a - b) <= 1e-12 * std::max(1.0, std::abs(a));
    };
    grid.erase(std::unique(grid.begin(), grid.end(), same), grid.end());
    // unique() keeps the first of a run; make sure the exact end point survives.
    grid.back() = span.end;
    return grid;
}

namespace {

class Stepper {
public:
    Stepper(const Rhs& rhs, const Sample& last) : rhs_(rhs), last_(last) {}

    Vector eval(double x, const Vector& y) const {
        Vector f;
        try {
            f = rhs_(x, y);
        } catch (const DomainError& e) {
            throw IntegrationError(std::string("right-hand side left the admissible domain: ") +
                                       e.what(),
                                   last_.param, last_.y);
        }
        if (!f.allFinite()) {
            throw IntegrationError("right-hand side produced a non-finite value at parameter " +
                                       std::to_string(x),
                                   last_.param, last_.y);
        }
        return f;
    }

    void accept(double x, const Vector& y) {
        if (!y.allFinite())
            throw IntegrationError("state became non-finite", last_.param, last_.y);
        last_ = {x, y};
    }

    [[nodiscard]] const Sample& last() const { return last_; }

private:
    const Rhs& rhs_;
    Sample last_;
};

std::vector<Sample> integrate_rk4(const Rhs& rhs, const Vector& y0,
                                  const std::vector<double>& grid, const IntegratorConfig& cfg) {
    std::vector<Sample> out;
    out.reserve(grid.size());
    out.push_back({grid.front(), y0});
    Stepper stepper(rhs, out.back());

    Vector y = y0;
    for (std::size_t i = 1; i < grid.size(); ++i) {
        const double a = grid[i - 1];
        const double b = grid[i];
        const auto n = std::max<long>(1, static_cast<long>(std::ceil(std::abs(b - a) / cfg.step - 1e-9)));
        const double h = (b - a) / static_cast<double>(n);
        for (long k = 0; k < n; ++k) {
            const double x = a + static_cast<double>(k) * h;
            const Vector k1 = stepper.eval(x, y);
            const Vector k2 = stepper.eval(x + 0.5 * h, y + 0.5 * h * k1);
            const Vector k3 = stepper.eval(x + 0.5 * h, y + 0.5 * h * k2);
            const Vector k4 = stepper.eval(x + h, y + h * k3);
            y += (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
            stepper.accept(k + 1 == n ? b : x + h, y);
        }
        out.push_back({b, y});
    }
    return out;
}

// Dormand-Prince 5(4) tableau.
constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
constexpr double a21 = 1.0 / 5;
constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561,
                 a54 = -212.0 / 729;
constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247, a64 = 49.0 / 176,
                 a65 = -5103.0 / 18656;
constexpr double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192, b5 = -2187.0 / 6784,
                 b6 = 11.0 / 84;
constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920, e5 = -17253.0 / 339200,
                 e6 = 22.0 / 525, e7 = -1.0 / 40;

Vector hermite(double x0, const Vector& y0, const Vector& f0, double x1, const Vector& y1,
               const Vector& f1, double x) {
    const double h = x1 - x0;
    const double s = (x - x0) / h;
    const double s2 = s * s;
    const double s3 = s2 * s;
    const double h00 = 2 * s3 - 3 * s2 + 1;
    const double h10 = s3 - 2 * s2 + s;
    const double h01 = -2 * s3 + 3 * s2;
    const double h11 = s3 - s2;
    return h00 * y0 + h10 * h * f0 + h01 * y1 + h11 * h * f1;
}

std::vector<Sample> integrate_rk45(const Rhs& rhs, const Vector& y0,
                                   const std::vector<double>& grid, const IntegratorConfig& cfg) {
    std::vector<Sample> out;
    out.reserve(grid.size());
    out.push_back({grid.front(), y0});
    Stepper stepper(rhs, out.back());

    const double start = grid.front();
    const double end = grid.back();
    const double dir = end > start ? 1.0 : -1.0;

    double x = start;
    Vector y = y0;
    Vector f = stepper.eval(x, y);
    double h = std::min(cfg.step, cfg.max_step);
    std::size_t next = 1;

    while (next < grid.size()) {
        const double remaining = std::abs(end - x);
        bool last_step = false;
        if (h >= remaining) {
            h = remaining;
            last_step = true;
        }
        const double hs = dir * h;

        const Vector k1 = f;
        const Vector k2 = stepper.eval(x + c2 * hs, y + hs * (a21 * k1));
        const Vector k3 = stepper.eval(x + c3 * hs, y + hs * (a31 * k1 + a32 * k2));
        const Vector k4 = stepper.eval(x + c4 * hs, y + hs * (a41 * k1 + a42 * k2 + a43 * k3));
        const Vector k5 =
            stepper.eval(x + c5 * hs, y + hs * (a51 * k1 + a52 * k2 + a53 * k3 + a54 * k4));
        const Vector k6 = stepper.eval(
            x + hs, y + hs * (a61 * k1 + a62 * k2 + a63 * k3 + a64 * k4 + a65 * k5));
        const Vector y_new = y + hs * (b1 * k1 + b3 * k3 + b4 * k4 + b5 * k5 + b6 * k6);
        const double x_new = last_step ? end : x + hs;
        const Vector k7 = stepper.eval(x_new, y_new);

        const Vector err = hs * (e1 * k1 + e3 * k3 + e4 * k4 + e5 * k5 + e6 * k6 + e7 * k7);
        const Vector scale =
            (cfg.atol + cfg.rtol * y.cwiseAbs().cwiseMax(y_new.cwiseAbs()).array()).matrix();
        const double err_norm = err.cwiseQuotient(scale).cwiseAbs().maxCoeff();

        if (err_norm <= 1.0) {
            while (next < grid.size() && dir * (grid[next] - x_new) <= 0.0) {
                const double xo = grid[next];
                out.push_back({xo, xo == x_new ? y_new : hermite(x, y, f, x_new, y_new, k7, xo)});
                ++next;
            }
            x = x_new;
            y = y_new;
            f = k7;
            stepper.accept(x, y);
        }

        const double factor =
            err_norm == 0.0 ? 5.0 : std::clamp(0.9 * std::pow(err_norm, -0.2), 0.2, 5.0);
        const double h_next = std::min(h * factor, cfg.max_step);
        if (err_norm > 1.0 && h_next < cfg.min_step) {
            throw IntegrationError("adaptive step fell below min_step", stepper.last().param,
                                   stepper.last().y);
        }
        h = std::max(h_next, cfg.min_step);
    }
    return out;
}

}  // namespace

std::vector<Sample> integrate(const Rhs& rhs, const Vector& y0, Span span,
                              const IntegratorConfig& cfg) {
    cfg.validate();
    if (!std::isfinite(span.start) || !std::isfinite(span.end))
        throw ConfigError("integration span must be finite");
    if (!y0.allFinite()) throw ConfigError("initial state must be finite");

    const auto grid = output_grid(span, cfg);
    if (grid.size() == 1) return {{span.start, y0}};
    return cfg.method == Method::rk4 ? integrate_rk4(rhs, y0, grid, cfg)
                                     : integrate_rk45(rhs, y0, grid, cfg);
}

}  // namespace igflow
