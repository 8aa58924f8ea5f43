// Command-line surface. Exit codes: 0 success, 1 validation error,
// 2 numerical guard trip.

#pragma once

#include <ostream>

namespace zeno {

inline constexpr int kExitOk = 0;
inline constexpr int kExitValidation = 1;
inline constexpr int kExitGuard = 2;

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace zeno
