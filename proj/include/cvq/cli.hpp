#pragma once

#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

namespace cvq::cli {

// Exit codes of run().
inline constexpr int kOk = 0;
inline constexpr int kRejected = 1;  // unphysical input, truncation or grid failure, failed lab check
inline constexpr int kUsage = 2;

// "a:b:s" -> a, a + s, ... up to b (inclusive within 1e-12). Throws
// std::invalid_argument for malformed text, s <= 0 or a > b.
std::vector<double> parse_grid(std::string_view text);

// Runs the tool on argv-style arguments (without the program name). Data goes
// to `out` (or --output), diagnostics to `err`.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

} // namespace cvq::cli
