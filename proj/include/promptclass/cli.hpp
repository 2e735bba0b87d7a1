#pragma once

namespace promptclass {

// Full command-line entry point. Returns the process exit code: 0 on
// success, 1 for input or configuration errors, 2 for runtime failures.
int run_cli(int argc, char** argv);

}  // namespace promptclass
