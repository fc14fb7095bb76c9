#pragma once

#include <string>

namespace shehu {

// Shortest decimal text that round-trips to the same double.
std::string format_number(double value);

}  // namespace shehu
