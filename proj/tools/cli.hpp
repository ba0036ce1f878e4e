#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace omega {

// Runs one command line (without the program name). JSON goes to out,
// diagnostics to err. Exit codes: 0 success, 1 violations found, 2 usage or
// parse error, 3 resource budget exceeded.
int run_command(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

} // namespace omega
