#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace vulncat {

inline constexpr int kExitOk = 0;
inline constexpr int kExitFindings = 1;
inline constexpr int kExitUsage = 2;

/// Runs one command. `args` excludes the program name. Data goes to `out`,
/// diagnostics and usage errors to `err`.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace vulncat
