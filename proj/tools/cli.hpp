#pragma once

#include <string>
#include <vector>

namespace rapidtail::cli {

enum ExitCode : int { kPass = 0, kFail = 1, kUsage = 2, kNumeric = 3 };

int run(int argc, const char* const* argv);
int run(const std::vector<std::string>& args);  // args[0] is the program name

}  // namespace rapidtail::cli
