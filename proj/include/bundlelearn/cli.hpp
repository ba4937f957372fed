#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace bundlelearn {

// Environment variable naming the directory for outputs written under default names.
inline constexpr const char* kOutputDirEnv = "BUNDLELEARN_OUTPUT_DIR";

/// Runs one subcommand. `args` excludes the program name.
/// Exit codes: 0 success, 1 runtime error ("error[Code]: message" on `err`),
/// 2 usage error (message and usage text on `err`).
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace bundlelearn
