#include <iostream>
#include <string>
#include <vector>

#include "shehu/cli.hpp"

int main(int argc, char** argv) {
  const std::vector<std::string> args(argv + 1, argv + argc);
  const shehu::cli::CommandResult r = shehu::cli::run(args);
  std::cout << r.output;
  if (!r.ok) std::cerr << "error: " << r.error_kind << ": " << r.error_message << '\n';
  return r.exit_code;
}
