#ifndef COGSENSE_TOOLS_CLI_HPP_
#define COGSENSE_TOOLS_CLI_HPP_

#include <ostream>
#include <string>
#include <vector>

namespace cogsense::cli {

enum ExitCode : int {
  kOk = 0,
  kFailure = 1,        // I/O and unexpected errors
  kUsageOrConfig = 2,  // bad flags, unreadable or invalid scenario, domain errors
  kNumerical = 3,      // non-convergence or infeasible constraint
};

/// Runs the command line `args` (without the program name). CSV goes to `out`
/// unless --out is given; diagnostics go to `err`.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace cogsense::cli

#endif  // COGSENSE_TOOLS_CLI_HPP_
