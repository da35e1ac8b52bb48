#ifndef FAIRSHARE_TOOLS_CLI_H_
#define FAIRSHARE_TOOLS_CLI_H_

#include <iosfwd>
#include <string>
#include <vector>

namespace fairshare {

enum ExitCode { kExitOk = 0, kExitUsage = 1, kExitFailure = 2 };

// Entry point of the fairshare command. Machine output goes to `out`,
// progress and diagnostics to `err`.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace fairshare

#endif  // FAIRSHARE_TOOLS_CLI_H_
