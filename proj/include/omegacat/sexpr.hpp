#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "omegacat/errors.hpp"

namespace omega {

struct SExpr {
  bool is_list = false;
  std::string atom;
  std::vector<SExpr> items;
  int line = 0;
  int col = 0;

  bool is_atom() const { return !is_list; }
  bool head_is(std::string_view h) const {
    return is_list && !items.empty() && items[0].is_atom() && items[0].atom == h;
  }
  [[noreturn]] void fail(const std::string& msg) const { throw ParseError(msg, line, col); }
  int as_int() const;
  const std::string& as_atom() const;
};

// Parses a sequence of top-level expressions. ';' starts a line comment;
// "..." is an atom that may hold parentheses and spaces (backslash escapes).
std::vector<SExpr> parse_sexprs(std::string_view text);
SExpr parse_sexpr(std::string_view text);

// Quotes atoms that would not read back as a single atom.
std::string to_string(const SExpr& e);

SExpr atom(std::string s);
SExpr list(std::vector<SExpr> items);

} // namespace omega
