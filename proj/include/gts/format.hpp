#pragma once

#include <string>

namespace gts {

/// Shortest decimal text that parses back to the same double.
std::string format_double(double x);
double parse_double(const std::string& text);

}  // namespace gts
