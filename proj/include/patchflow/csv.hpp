#pragma once

#include <string>
#include <vector>

namespace patchflow::csv {

/// C-locale, 17 significant digits.
std::string format(double v);
std::string format(long long v);
inline std::string format(int v) { return format(static_cast<long long>(v)); }

/// Joins cells with ',' and terminates with '\n'.
std::string row(const std::vector<std::string>& cells);

}  // namespace patchflow::csv
