#pragma once

#include <Eigen/Dense>

namespace igflow {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

// Extensive coordinates q and conjugate intensive momenta p at one equilibrium
// point. For the gas models q = (u, v) and p = (1/T, P/T).
struct PhaseState {
    Vector q;
    Vector p;

    [[nodiscard]] Eigen::Index dim() const { return q.size(); }
};

}  // namespace igflow
