#pragma once

namespace cudfmoo {

// Command-line entry point. Exit codes: 0 success or positive verdict,
// 1 negative verdict, 2 input rejected (parse, type, or usage error),
// 3 I/O failure.
int run_cli(int argc, const char* const* argv);

}  // namespace cudfmoo
