#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace kapitza::cli {

/// Exit codes: 0 certified, 1 input error, 2 outside the certified range, 3 Bogolyubov fails.
int run(int argc, char** argv, std::ostream& out, std::ostream& err);
/// args exclude the program name.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

/// "0.1, 0.2,0.3" -> {0.1, 0.2, 0.3}; empty or blank input gives an empty list.
[[nodiscard]] std::vector<double> parse_grid(const std::string& text);

}  // namespace kapitza::cli
