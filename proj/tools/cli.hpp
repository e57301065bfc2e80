#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace ncp::cli {

// Exit codes beyond 0 = YES/success, 1 = NO, 2 = DecodeFailure/NotFound.
inline constexpr int kExitError = 3;

/// Runs the `ncp` command line. args excludes the program name.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace ncp::cli
