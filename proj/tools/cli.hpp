#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace shuttle::cli {

inline constexpr const char* kToolVersion = "shuttle 1.0.0";

enum ExitCode : int {
    kOk = 0,
    kConfigError = 2,
    kNumericalError = 3,
    kDesignError = 4,
};

/// Runs one CLI invocation; args exclude the program name. Reports go to
/// `out` (JSON), errors to `err` as a single JSON line. CSV goes to --out,
/// or to `out` when --out is absent (the report then goes to `err`).
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace shuttle::cli
