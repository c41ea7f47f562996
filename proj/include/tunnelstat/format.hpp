#pragma once

#include <string>

namespace tunnelstat {

/// Shortest "%.12g" rendering used by every CSV writer.
std::string format_number(double value);

}  // namespace tunnelstat
