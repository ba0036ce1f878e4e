#pragma once

#include <stdexcept>
#include <string>

namespace omega {

// Precondition failures: wrong dimensions, unknown cells, mismatched domains.
struct DomainError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// A configured bound (rewrite steps, universe size, search budget) ran out.
struct ResourceError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct ParseError : std::runtime_error {
  int line = 0;
  int col = 0;
  ParseError(const std::string& msg, int l, int c)
      : std::runtime_error(msg + " at line " + std::to_string(l) + ", column " + std::to_string(c)),
        line(l), col(c) {}
};

struct Violation {
  std::string kind;
  std::string where;
  std::string detail;
};

} // namespace omega
