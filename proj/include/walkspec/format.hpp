#pragma once

#include <string>

namespace walkspec {

// Shortest decimal string that parses back to exactly the same double. Non-finite values
// print as nan, inf, -inf.
std::string format_double(double x);

}  // namespace walkspec
