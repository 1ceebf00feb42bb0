#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace oodgate::cli {

// Entry point behind the `oodgate` executable. `args` excludes the program
// name. Returns the process exit code: 0 success, 1 usage/config error,
// 2 data/format error, 3 empty-result condition.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace oodgate::cli
