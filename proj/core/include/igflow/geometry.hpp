#pragma once

#include <functional>
#include <optional>

#include "igflow/trajectory.hpp"
#include "igflow/types.hpp"

namespace igflow {

inline constexpr double kVielbeinSingularityEps = 1e-12;
inline constexpr int kMaxDimension = 16;

// Vielbein e_i^mu(q): rows are orthogonal-frame indices i, columns are
// coordinate indices mu.
struct VielbeinField {
    int dim = 0;
    std::function<Matrix(const Vector&)> eval;
};

// Diagonal frame metric. `lower` holds eta_ii (alpha^2, beta^2, ...); the
// raised metric eta^ii is its entrywise reciprocal.
class DiagonalScale {
public:
    DiagonalScale() = default;
    // Throws ConfigError unless every entry is finite and strictly positive.
    explicit DiagonalScale(Vector lower);

    static DiagonalScale identity(int dim) { return DiagonalScale(Vector::Ones(dim)); }

    [[nodiscard]] const Vector& lower() const { return lower_; }
    [[nodiscard]] Vector upper() const { return lower_.cwiseInverse(); }
    [[nodiscard]] Eigen::Index dim() const { return lower_.size(); }

private:
    Vector lower_;
};

// Lower-index metric g_{mu nu} together with its inverse g^{mu nu}. The
// inverse is empty when g is singular (e.g. a degenerate Hessian).
struct MetricAt {
    Matrix g;
    Matrix g_inv;

    [[nodiscard]] bool has_inverse() const { return g_inv.size() != 0; }
};

using ScalarField = std::function<double(const Vector&)>;
using MetricField = std::function<MetricAt(const Vector&)>;
using Admissible = std::function<bool(const Vector&)>;

// g^{mu nu} = eta^{ij} e_i^mu e_j^nu and g_{mu nu} = eta_{ij} e_mu^i e_nu^j.
// Throws DomainError naming q when |det e| <= kVielbeinSingularityEps.
[[nodiscard]] MetricAt metric_inverse_from_vielbein(const Matrix& e, const DiagonalScale& eta,
                                                    const Vector& q);

// g^{mu nu} p_mu p_nu - E^2.
[[nodiscard]] double eikonal_residual(const Matrix& g_inv, const Vector& p, double energy);

struct HessianEstimate {
    Matrix hessian;
    // Largest |H_{mu nu} - H_{nu mu}| between the two mixed-partial orderings
    // before symmetrization.
    double max_asymmetry = 0.0;
};

inline constexpr double kMixedPartialWarnThreshold = 1e-5;

// Default finite-difference step 1e-4 * max(1, |q^mu|) per coordinate.
[[nodiscard]] Vector default_hessian_steps(const Vector& q);

// Central second differences of -s at q. Throws DomainError when a stencil
// point within 2h of q is not admissible or s is not finite there.
[[nodiscard]] HessianEstimate negentropy_hessian(const ScalarField& entropy, const Vector& q,
                                                 const std::optional<Vector>& steps = std::nullopt,
                                                 const Admissible& admissible = {});

// Ruppeiner metric (g^R)_{mu nu} = d^2(-s)/dq^mu dq^nu. Writes a warning to
// stderr when the mixed partials disagree by more than
// kMixedPartialWarnThreshold.
[[nodiscard]] MetricAt ruppeiner_metric(const ScalarField& entropy, const Vector& q,
                                        const std::optional<Vector>& steps = std::nullopt,
                                        const Admissible& admissible = {});

// Sum over segments of sqrt(dq^T g(q_mid) dq).
[[nodiscard]] double arc_length(const Trajectory& traj, const MetricField& metric_field);

}  // namespace igflow
