#pragma once

#include <string>

namespace bridgescore {

// Shortest round-trip decimal form; identical values always print identically.
std::string format_double(double value);

}  // namespace bridgescore
