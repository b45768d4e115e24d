#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace evp {

inline constexpr int kExitOk = 0;
inline constexpr int kExitSimulationError = 1;
inline constexpr int kExitInputError = 2;
inline constexpr int kExitPropertyFailure = 3;

// Full command-line entry point, factored out of main() so tests can drive it
// with captured streams and assert on exit codes.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);
int run_cli(int argc, const char* const* argv);

}  // namespace evp
