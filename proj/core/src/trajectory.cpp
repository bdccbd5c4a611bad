#include "igflow/trajectory.hpp"

#include "igflow/error.hpp"

namespace igflow {

void Trajectory::check() const {
    for (std::size_t i = 0; i < samples.size(); ++i) {
        const auto& s = samples[i];
        if (s.state.q.size() != samples.front().state.q.size() ||
            s.state.p.size() != s.state.q.size())
            throw DomainError("trajectory sample " + std::to_string(i) + " has inconsistent dimension");
        if (i > 0 && !(s.param > samples[i - 1].param))
            throw DomainError("trajectory parameters must be strictly increasing");
    }
}

std::uint64_t fnv1a(std::string_view text) {
    std::uint64_t h = 14695981039346656037ull;
    for (unsigned char c : text) {
        h ^= c;
        h *= 1099511628211ull;
    }
    return h;
}

}  // namespace igflow
