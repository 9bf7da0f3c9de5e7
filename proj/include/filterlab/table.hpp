#pragma once

#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "filterlab/hmm.hpp"

namespace filterlab {

/// 17 significant digits ("%.17g"), which round-trips every double.
std::string format_real(double v);

/// Parses a real written by format_real (or any strtod-accepted form).
/// Throws std::invalid_argument on trailing garbage.
double parse_real(const std::string& token);

/// Writes `fields` joined by tabs, newline-terminated.
void write_row(std::ostream& os, std::span<const std::string> fields);

/// Splits on blanks and tabs.
std::vector<std::string> split_fields(const std::string& line);

/// A discrete observation is written as its symbol index; a Gaussian one as
/// its coordinates separated by spaces.
std::string format_observation(const Observation& y);
Observation parse_observation(const std::string& text, bool discrete);

/// One observation per line; blank lines and lines starting with '#' skipped.
void write_observations(std::ostream& os, std::span<const Observation> ys);
std::vector<Observation> read_observations(std::istream& is, bool discrete);

}  // namespace filterlab
