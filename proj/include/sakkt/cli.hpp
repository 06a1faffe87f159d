#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace sakkt {

/// Exit codes of the command-line tool.
namespace exit_code {
inline constexpr int kOk = 0;
inline constexpr int kUsage = 1;
inline constexpr int kMaxOuter = 2;
inline constexpr int kFailure = 3;
inline constexpr int kVerifyFail = 4;
inline constexpr int kInconclusive = 5;
}  // namespace exit_code

/// Runs one command; `args` excludes the program name.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

/// "1,2.5,-3" -> vector. Throws ContractViolation on junk.
std::vector<double> parse_number_list(const std::string& text);

}  // namespace sakkt
