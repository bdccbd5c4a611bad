#pragma once
// Independent numerical references used only by the tests. Nothing here calls
// into the integrator or geometry code under test.

#include <cmath>
#include <functional>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace oracle {

using Vec = Eigen::VectorXd;
using Field = std::function<Vec(double, const Vec&)>;

// Plain fixed-step RK4 from t0 to t1 with n equal steps.
inline Vec rk4(const Field& f, Vec y, double t0, double t1, int n) {
    const double h = (t1 - t0) / n;
    double t = t0;
    for (int i = 0; i < n; ++i) {
        const Vec k1 = f(t, y);
        const Vec k2 = f(t + h / 2, y + h / 2 * k1);
        const Vec k3 = f(t + h / 2, y + h / 2 * k2);
        const Vec k4 = f(t + h, y + h * k3);
        y += h / 6 * (k1 + 2 * k2 + 2 * k3 + k4);
        t += h;
    }
    return y;
}

// Central difference gradient of a scalar function.
inline Vec gradient(const std::function<double(const Vec&)>& f, const Vec& x, double rel = 1e-6) {
    Vec g(x.size());
    for (Eigen::Index i = 0; i < x.size(); ++i) {
        Vec d = Vec::Zero(x.size());
        d[i] = rel * std::max(1.0, std::abs(x[i]));
        g[i] = (f(x + d) - f(x - d)) / (2 * d[i]);
    }
    return g;
}

// Five-point second derivative matrix of a scalar function.
inline Eigen::MatrixXd hessian(const std::function<double(const Vec&)>& f, const Vec& x,
                               double h = 1e-3) {
    const auto n = x.size();
    Eigen::MatrixXd H(n, n);
    for (Eigen::Index i = 0; i < n; ++i)
        for (Eigen::Index j = 0; j < n; ++j) {
            Vec ei = Vec::Zero(n), ej = Vec::Zero(n);
            ei[i] = h;
            ej[j] = h;
            H(i, j) = (f(x + ei + ej) - f(x + ei - ej) - f(x - ei + ej) + f(x - ei - ej)) / (4 * h * h);
        }
    return H;
}

// Length of a polyline under a constant or position-dependent metric, using
// Simpson's rule on each segment.
inline double curve_length(const std::vector<Vec>& pts,
                           const std::function<Eigen::MatrixXd(const Vec&)>& g) {
    double L = 0.0;
    for (std::size_t k = 1; k < pts.size(); ++k) {
        const Vec d = pts[k] - pts[k - 1];
        auto speed = [&](double s) {
            const Vec x = pts[k - 1] + s * d;
            return std::sqrt(d.dot(g(x) * d));
        };
        L += (speed(0.0) + 4 * speed(0.5) + speed(1.0)) / 6.0;
    }
    return L;
}

inline double max_abs(const Vec& v) { return v.cwiseAbs().maxCoeff(); }

inline double max_rel(const Vec& a, const Vec& b) { return max_abs(a - b) / max_abs(b); }

}  // namespace oracle
