#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace mqcsim {

/// Shortest decimal text that parses back to exactly the same double.
std::string format_double(double value);

/// Strict parse of a full-precision decimal (also accepts inf/nan spellings
/// produced by format_double). Throws Error on trailing garbage.
double parse_double(std::string_view text);

/// Splits on a single-character delimiter, keeping empty fields.
std::vector<std::string_view> split(std::string_view text, char delimiter);

std::string_view trim(std::string_view text);

}  // namespace mqcsim
