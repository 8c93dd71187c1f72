#pragma once

namespace tikflow::cli {

/// Entry point of the `tikflow` tool.
/// Exit codes: 0 success, 1 validation error, 2 numerical failure,
/// 3 acceptance failure.
int run(int argc, char** argv);

}  // namespace tikflow::cli
