#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace contab::cli {

/// Exit statuses: 0 success, 1 domain error (unbalanced, infeasible, no
/// interior, budget exhausted, ...), 2 invocation, I/O or parse error.
inline constexpr int kOk = 0;
inline constexpr int kDomainError = 1;
inline constexpr int kUsageError = 2;

/// Parses `args` (without the program name) and runs the verb.
int dispatch(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace contab::cli
