#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "igflow/hamilton_flow.hpp"

namespace igflow {

struct Check {
    std::string name;
    std::string anchor;  // the identity being checked, as a formula
    double residual;
    double tolerance;
    bool pass;
};

struct VerificationReport {
    std::vector<Check> checks;  // sorted by name
    std::string config;         // JSON echo of the run settings

    [[nodiscard]] std::size_t passed() const;
    [[nodiscard]] std::size_t total() const { return checks.size(); }
    [[nodiscard]] bool all_passed() const { return passed() == total(); }
    // {"checks":[{name, anchor, residual, tolerance, pass}], "summary":{passed, total}, "config":{...}}
    // Non-finite residuals serialize as null. Output is deterministic.
    [[nodiscard]] std::string to_json() const;
};

enum class Suite { all, geometry, flows, discrete };

// Throws ConfigError for anything other than all|geometry|flows|discrete.
[[nodiscard]] Suite parse_suite(std::string_view name);
[[nodiscard]] const char* suite_name(Suite suite);

// Named tolerances with defaults taken from the documented invariants.
class Tolerances {
public:
    static Tolerances defaults();

    // Overrides entries from a JSON object {"check.name": number, ...}.
    // Unknown names raise ConfigError.
    void merge_json(std::string_view text);
    void load_file(const std::string& path);

    [[nodiscard]] double get(const std::string& name) const;
    [[nodiscard]] const std::map<std::string, double>& values() const { return values_; }

private:
    std::map<std::string, double> values_;
};

struct VerifyOptions {
    Suite suite = Suite::all;
    Tolerances tolerances = Tolerances::defaults();
    std::uint64_t seed = 20200818;
    // Start of the flows; defaults to the model's reference state.
    std::optional<Vector> q0;
};

// Runs every invariant of the selected suite against `system`. The system's
// energy is used for reparametrization, so a system whose metric no longer
// matches its energy fails the tau = E t check. Checks that need a closed form
// are omitted for custom models. A check that throws is recorded as failed
// with a non-finite residual.
[[nodiscard]] VerificationReport run_verification(const HamiltonSystem& system,
                                                  const VerifyOptions& options);

}  // namespace igflow
