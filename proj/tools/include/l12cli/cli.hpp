#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

namespace l12::cli {

/// Exit codes shared by every command.
inline constexpr int kExitOk = 0;       // success, YES, all checks passed
inline constexpr int kExitNo = 1;       // NO, or a verification failure
inline constexpr int kExitError = 2;    // usage, input or internal error

/// Runs the l12lab command line. `args` excludes the program name.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

/// Parses "1, 2,3" into integers. Throws std::invalid_argument on an empty
/// list or a token that is not an integer.
std::vector<std::int64_t> parse_integer_list(const std::string& text);

}  // namespace l12::cli
