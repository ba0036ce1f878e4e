#include "omegacat/sexpr.hpp"

#include <cctype>
#include <charconv>

namespace omega {

int SExpr::as_int() const {
  if (is_list) fail("expected integer, found list");
  int v = 0;
  auto [p, ec] = std::from_chars(atom.data(), atom.data() + atom.size(), v);
  if (ec != std::errc() || p != atom.data() + atom.size()) fail("expected integer, found '" + atom + "'");
  return v;
}

const std::string& SExpr::as_atom() const {
  if (is_list) fail("expected atom, found list");
  return atom;
}

namespace {

struct Reader {
  std::string_view s;
  size_t pos = 0;
  int line = 1;
  int col = 1;

  void advance() {
    if (s[pos] == '\n') {
      ++line;
      col = 1;
    } else {
      ++col;
    }
    ++pos;
  }

  void skip() {
    while (pos < s.size()) {
      char c = s[pos];
      if (c == ';') {
        while (pos < s.size() && s[pos] != '\n') advance();
      } else if (std::isspace(static_cast<unsigned char>(c))) {
        advance();
      } else {
        break;
      }
    }
  }

  SExpr read() {
    skip();
    if (pos >= s.size()) throw ParseError("unexpected end of input", line, col);
    SExpr e;
    e.line = line;
    e.col = col;
    char c = s[pos];
    if (c == ')') throw ParseError("unexpected ')'", line, col);
    if (c == '(') {
      e.is_list = true;
      advance();
      for (;;) {
        skip();
        if (pos >= s.size()) throw ParseError("unbalanced '(' opened", e.line, e.col);
        if (s[pos] == ')') {
          advance();
          break;
        }
        e.items.push_back(read());
      }
      return e;
    }
    if (c == '"') {
      advance();
      while (pos < s.size() && s[pos] != '"') {
        if (s[pos] == '\\') {
          advance();
          if (pos >= s.size()) break;
        }
        e.atom += s[pos];
        advance();
      }
      if (pos >= s.size()) throw ParseError("unterminated string", e.line, e.col);
      advance();
      return e;
    }
    size_t start = pos;
    while (pos < s.size() && s[pos] != '(' && s[pos] != ')' && s[pos] != ';' && s[pos] != '"' &&
           !std::isspace(static_cast<unsigned char>(s[pos])))
      advance();
    e.atom = std::string(s.substr(start, pos - start));
    return e;
  }
};

} // namespace

std::vector<SExpr> parse_sexprs(std::string_view text) {
  Reader r{text};
  std::vector<SExpr> out;
  for (;;) {
    r.skip();
    if (r.pos >= text.size()) break;
    out.push_back(r.read());
  }
  return out;
}

SExpr parse_sexpr(std::string_view text) {
  auto all = parse_sexprs(text);
  if (all.size() != 1) throw ParseError("expected exactly one expression", 1, 1);
  return all[0];
}

namespace {

bool needs_quotes(const std::string& a) {
  if (a.empty()) return true;
  for (char c : a)
    if (c == '(' || c == ')' || c == ';' || c == '"' || c == '\\' || std::isspace(static_cast<unsigned char>(c)))
      return true;
  return false;
}

} // namespace

std::string to_string(const SExpr& e) {
  if (!e.is_list) {
    if (!needs_quotes(e.atom)) return e.atom;
    std::string out = "\"";
    for (char c : e.atom) {
      if (c == '"' || c == '\\') out += '\\';
      out += c;
    }
    return out + "\"";
  }
  std::string out = "(";
  for (size_t i = 0; i < e.items.size(); ++i) {
    if (i) out += ' ';
    out += to_string(e.items[i]);
  }
  return out + ")";
}

SExpr atom(std::string s) {
  SExpr e;
  e.atom = std::move(s);
  return e;
}

SExpr list(std::vector<SExpr> items) {
  SExpr e;
  e.is_list = true;
  e.items = std::move(items);
  return e;
}

} // namespace omega
