#pragma once

#include <string>
#include <vector>

namespace shehu::cli {

struct CommandResult {
  bool ok = false;
  std::string error_kind;  // empty when ok
  std::string error_message;
  // Rendered record: "key: value" lines, or one JSON line with --porcelain.
  std::string output;
  int exit_code = 0;  // 0 ok, 1 usage/input error, 2 mathematical failure
};

// argv without the program name, e.g. {"transform", "exp(q+r+s+t)"}.
CommandResult run(const std::vector<std::string>& argv);

}  // namespace shehu::cli
