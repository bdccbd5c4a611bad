#include "igflow/geometry.hpp"

#include <cmath>
#include <iostream>

#include "igflow/error.hpp"

namespace igflow {

DiagonalScale::DiagonalScale(Vector lower) : lower_(std::move(lower)) {
    if (lower_.size() == 0) throw ConfigError("diagonal scale must be non-empty");
    for (Eigen::Index i = 0; i < lower_.size(); ++i) {
        if (!std::isfinite(lower_[i]) || lower_[i] <= 0.0)
            throw ConfigError("scale factors must be strictly positive");
    }
}

MetricAt metric_inverse_from_vielbein(const Matrix& e, const DiagonalScale& eta, const Vector& q) {
    if (e.rows() != e.cols() || e.rows() != eta.dim())
        throw DomainError("vielbein and scale dimensions disagree");
    if (!e.allFinite()) throw DomainError("vielbein is not finite at q = " + describe(q));

    Eigen::FullPivLU<Matrix> lu(e);
    if (std::abs(lu.determinant()) <= kVielbeinSingularityEps)
        throw DomainError("singular vielbein at q = " + describe(q));
    const Matrix e_inv = lu.inverse();  // e_mu^i: rows mu, columns i

    MetricAt m;
    m.g_inv = e.transpose() * eta.upper().asDiagonal() * e;
    m.g = e_inv * eta.lower().asDiagonal() * e_inv.transpose();
    return m;
}

double eikonal_residual(const Matrix& g_inv, const Vector& p, double energy) {
    return p.dot(g_inv * p) - energy * energy;
}

Vector default_hessian_steps(const Vector& q) {
    return (1e-4 * q.cwiseAbs().cwiseMax(1.0).array()).matrix();
}

HessianEstimate negentropy_hessian(const ScalarField& entropy, const Vector& q,
                                   const std::optional<Vector>& steps,
                                   const Admissible& admissible) {
    const Eigen::Index n = q.size();
    const Vector h = steps ? *steps : default_hessian_steps(q);
    if (h.size() != n || (h.array() <= 0.0).any())
        throw ConfigError("finite-difference steps must be positive, one per coordinate");

    auto f = [&](const Vector& x) {
        if (admissible && !admissible(x))
            throw DomainError("Hessian stencil leaves the admissible domain near q = " + describe(q));
        const double s = entropy(x);
        if (!std::isfinite(s)) throw DomainError("entropy is not finite at " + describe(x));
        return -s;
    };
    auto shifted = [&](Eigen::Index i, double di, Eigen::Index j, double dj) {
        Vector x = q;
        x[i] += di;
        x[j] += dj;
        return x;
    };

    if (admissible) {
        for (Eigen::Index i = 0; i < n; ++i) {
            if (!admissible(shifted(i, 2 * h[i], i, 0.0)) || !admissible(shifted(i, -2 * h[i], i, 0.0)))
                throw DomainError("q = " + describe(q) +
                                  " is within two finite-difference steps of the domain boundary");
        }
    }

    HessianEstimate est;
    est.hessian = Matrix::Zero(n, n);
    const double f0 = f(q);
    for (Eigen::Index i = 0; i < n; ++i) {
        const double fp = f(shifted(i, h[i], i, 0.0));
        const double fm = f(shifted(i, -h[i], i, 0.0));
        est.hessian(i, i) = (fp - 2.0 * f0 + fm) / (h[i] * h[i]);
        for (Eigen::Index j = 0; j < i; ++j) {
            const double fpp = f(shifted(i, h[i], j, h[j]));
            const double fpm = f(shifted(i, h[i], j, -h[j]));
            const double fmp = f(shifted(i, -h[i], j, h[j]));
            const double fmm = f(shifted(i, -h[i], j, -h[j]));
            // d/dq^i of the central difference in q^j, and the reverse order.
            const double ij = ((fpp - fpm) / (2 * h[j]) - (fmp - fmm) / (2 * h[j])) / (2 * h[i]);
            const double ji = ((fpp - fmp) / (2 * h[i]) - (fpm - fmm) / (2 * h[i])) / (2 * h[j]);
            est.max_asymmetry = std::max(est.max_asymmetry, std::abs(ij - ji));
            est.hessian(i, j) = est.hessian(j, i) = 0.5 * (ij + ji);
        }
    }
    return est;
}

MetricAt ruppeiner_metric(const ScalarField& entropy, const Vector& q,
                          const std::optional<Vector>& steps, const Admissible& admissible) {
    auto est = negentropy_hessian(entropy, q, steps, admissible);
    if (est.max_asymmetry > kMixedPartialWarnThreshold) {
        std::cerr << "warning: mixed partials of -s differ by " << est.max_asymmetry
                  << " at q = " << describe(q) << '\n';
    }
    MetricAt m;
    m.g = std::move(est.hessian);
    Eigen::FullPivLU<Matrix> lu(m.g);
    if (lu.isInvertible()) m.g_inv = lu.inverse();
    return m;
}

double arc_length(const Trajectory& traj, const MetricField& metric_field) {
    double total = 0.0;
    for (std::size_t i = 1; i < traj.samples.size(); ++i) {
        const Vector& a = traj.samples[i - 1].state.q;
        const Vector& b = traj.samples[i].state.q;
        const Vector dq = b - a;
        const MetricAt m = metric_field(0.5 * (a + b));
        const double ds2 = dq.dot(m.g * dq);
        if (!(ds2 >= 0.0)) throw DomainError("metric is not positive along the trajectory");
        total += std::sqrt(ds2);
    }
    return total;
}

}  // namespace igflow
