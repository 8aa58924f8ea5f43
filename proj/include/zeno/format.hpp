#pragma once

#include <string>

namespace zeno {

// 17 significant digits, '.' separator, independent of the global locale.
std::string format_double(double value);

}  // namespace zeno
