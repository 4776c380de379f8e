#pragma once

#include <array>
#include <iosfwd>
#include <string>
#include <vector>

namespace pra {

/// Accepts decimals ("0.5", "-1e-3") and multiples of pi ("pi", "-pi/2",
/// "2pi/3", "2*pi/3", "0.25pi"). Throws argument_error otherwise.
double parse_angle(const std::string& text);

/// Comma separated list of angles.
std::vector<double> parse_angle_list(const std::string& text);

enum ExitCode : int { exit_ok = 0, exit_invalid = 1, exit_numerical = 2 };

/// Entry point of the command-line tool; returns the process exit code.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

} // namespace pra
