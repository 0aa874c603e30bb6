#pragma once

namespace loctemp {

// Full command-line front end; returns the process exit code.
// 0: all checks passed. 1: at least one check failed.
// 2: inconclusive results present, none failed. 3: usage or config error.
int run_cli(int argc, const char* const* argv);

}  // namespace loctemp
