// Command-line front end. Exit codes: 0 success, 2 configuration error,
// 3 infeasible or degenerate target, 4 invariant violation.

#ifndef QNDSIM_CLI_HPP
#define QNDSIM_CLI_HPP

#include <ostream>
#include <string>
#include <vector>

namespace qndsim {

inline constexpr int kExitOk = 0;
inline constexpr int kExitConfig = 2;
inline constexpr int kExitInfeasible = 3;
inline constexpr int kExitInvariant = 4;

/// `args` excludes the program name.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace qndsim

#endif  // QNDSIM_CLI_HPP
