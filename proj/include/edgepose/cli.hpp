#ifndef EDGEPOSE_CLI_HPP
#define EDGEPOSE_CLI_HPP

#include <iosfwd>
#include <string>
#include <vector>

namespace edgepose {

// Exit codes: 0 success, 1 input error, 2 infeasible, 3 numerical failure.
constexpr int kExitOk = 0;
constexpr int kExitInputError = 1;
constexpr int kExitInfeasible = 2;
constexpr int kExitNumericalFailure = 3;

// Runs one command (optimize / compare / sweep / simulate / fit) against the
// given argument list; out and err receive what the binary would print.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace edgepose

#endif
