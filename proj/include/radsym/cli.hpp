#pragma once

namespace radsym {

/// Exit codes of the radsym executable.
enum ExitCode : int { kExitOk = 0, kExitUsage = 1, kExitNumerical = 2, kExitVerifyFailed = 3 };

/// Entry point of the radsym executable: envelope, solve, verify, symmetry, oracle.
int run_cli(int argc, char** argv);

}  // namespace radsym
