#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace serlab::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitValidation = 1;
inline constexpr int kExitRuntime = 2;

// `args` excludes the program name. Returns 0 on success, 1 on invalid
// input or usage, 2 on runtime failure.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace serlab::cli
