#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace igflow::cli {

enum ExitCode : int {
    kOk = 0,
    kChecksFailed = 1,
    kConfigError = 2,
    kIntegrationFailure = 3,
};

// Runs the igflow command line with args (excluding the program name).
// Results go to out, diagnostics to err.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace igflow::cli
