#pragma once

#include <string>
#include <string_view>

namespace smatch {

/// Shortest decimal text that parses back to exactly the same double.
std::string format_real(double v);

/// Strict parse of a whole field; throws ConfigError on trailing garbage.
double parse_real(std::string_view text);

}  // namespace smatch
