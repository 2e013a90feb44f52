#pragma once

#include <string>
#include <vector>

namespace hclab {

struct CliResult {
  int exit_code = 0;
  std::string out;  // report body (empty when written to --out)
  std::string err;
};

// Runs one command: zoo | check | decompose | spectral | classify | verify.
// args excludes the program name. Exit codes: 0 clean, 1 parse,
// 2 precondition, 3 numerical, 4 inconclusive.
CliResult run_cli(const std::vector<std::string>& args);

}  // namespace hclab
