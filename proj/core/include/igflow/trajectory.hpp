#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "igflow/types.hpp"

namespace igflow {

// Which parameter drives a trajectory: the Hamilton-Jacobi "time" tau or the
// gradient-flow parameter t.
enum class ParameterKind { tau, t };

[[nodiscard]] inline const char* parameter_name(ParameterKind kind) {
    return kind == ParameterKind::tau ? "tau" : "t";
}

struct TrajectorySample {
    double param;
    PhaseState state;
    // g^{mu nu} p_mu p_nu - E^2 at this sample; zero on the model manifold.
    double eikonal_residual = 0.0;
};

struct TrajectoryMetadata {
    std::string model;
    double energy = 0.0;
    std::uint64_t config_hash = 0;
};

// Ordered samples from one integration. Parameter values are strictly
// increasing.
struct Trajectory {
    ParameterKind kind = ParameterKind::tau;
    std::vector<TrajectorySample> samples;
    TrajectoryMetadata metadata;

    [[nodiscard]] std::size_t size() const { return samples.size(); }
    [[nodiscard]] const TrajectorySample& front() const { return samples.front(); }
    [[nodiscard]] const TrajectorySample& back() const { return samples.back(); }

    // Throws DomainError if parameters are not strictly increasing or sample
    // dimensions disagree.
    void check() const;
};

// 64-bit FNV-1a, used to tag trajectories with the configuration that
// produced them.
[[nodiscard]] std::uint64_t fnv1a(std::string_view text);

}  // namespace igflow
