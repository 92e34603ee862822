#pragma once

namespace graspkit {

/// Entry point shared by the binary and the tests. Subcommands: plan, gen,
/// bench, oracle. Returns 0 on success, 1 on usage errors, 2 on processing
/// failures.
int run_cli(int argc, const char* const* argv);

}  // namespace graspkit
