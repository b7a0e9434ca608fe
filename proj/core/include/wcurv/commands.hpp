#ifndef WCURV_COMMANDS_HPP
#define WCURV_COMMANDS_HPP

#include <cstdint>
#include <string>

namespace wcurv {

// Exit codes shared by every subcommand:
//   0 success, 1 verification failure, 2 config error,
//   3 solver non-convergence, 4 internal error.
inline constexpr int kExitOk = 0;
inline constexpr int kExitVerifyFail = 1;
inline constexpr int kExitConfigError = 2;
inline constexpr int kExitNoConvergence = 3;
inline constexpr int kExitInternal = 4;

struct CliOptions {
  std::string subcommand;
  std::string config_path;
  std::string out_dir = ".";
  std::uint64_t seed = 42;
  int order_override = 0;  // 0: use the config's stencil order
  int refine = 3;          // refinement levels for verify
};

// Runs one batch command: reads the config, writes <out>/report.json
// (atomically) plus any requested CSV dumps, and returns the exit code.
int run_command(const CliOptions& opts);

}  // namespace wcurv

#endif
