#include "doctest.h"

#include <filesystem>
#include <fstream>
#include <sstream>

#include "omegacat/document.hpp"

using namespace omega;

namespace {

const char* theta_text = "(gset :maxdim 2 (cells 0 a b) (cells 1 (f a b) (g a b)) (cells 2 (alpha f g)))";

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

ParseError parse_failure(const std::string& text) {
  try {
    parse_document(text);
  } catch (const ParseError& e) {
    return e;
  }
  FAIL("no parse error for " << text);
  return ParseError("", 0, 0);
}

} // namespace

TEST_CASE("theta document") {
  Document d = parse_document(theta_text);
  REQUIRE(d.gsets.size() == 1);
  const GlobularSet& g = *d.gsets.at("gset");
  CHECK(g.size(0) == 2);
  CHECK(g.size(1) == 2);
  CHECK(g.size(2) == 1);
  CHECK(g.id(1, g.src(2, 0)) == "f");
}

TEST_CASE("syntax errors carry positions") {
  auto e = parse_failure("(gset :maxdim 1\n  (cells 0 a b)\n  (cells 1 (f a b)");
  // the innermost list left open
  CHECK(e.line == 3);
  CHECK(e.col == 3);
  CHECK(std::string(e.what()).find("unbalanced") != std::string::npos);
  auto u = parse_failure("(gset :maxdim 0 (cells 0 a))\n)");
  CHECK(u.line == 2);
  CHECK(parse_failure("(gset :maxdim 0 (cells 0 \"a))").line == 1);
}

TEST_CASE("reference errors") {
  auto e = parse_failure(std::string(theta_text) + "\n(collection C :gset nowhere (arity a \"()\"))");
  CHECK(std::string(e.what()).find("unresolved reference nowhere") != std::string::npos);
  CHECK(e.line == 2);
  auto dup = parse_failure(std::string(theta_text) + std::string(theta_text));
  CHECK(std::string(dup.what()).find("duplicate name") != std::string::npos);
  // forward references inside a globular set
  auto fwd = parse_failure("(gset :maxdim 1 (cells 1 (f a b)) (cells 0 a b))");
  CHECK(std::string(fwd.what()).find("forward reference") != std::string::npos);
  CHECK(fwd.col == 26);
  CHECK_THROWS_AS(parse_document("(term (gen f))"), ParseError);
  CHECK_THROWS_AS(parse_document(std::string(theta_text) + "(term (gen h))"), ParseError);
  CHECK_THROWS_AS(parse_document("(widget)"), ParseError);
}

TEST_CASE("validation collects semantic violations") {
  auto vs = validate_document("(gset bad :maxdim 2 (cells 0 a b c) (cells 1 (f a b) (g a c)) (cells 2 (alpha f g)))");
  REQUIRE(vs.size() == 1);
  CHECK(vs[0].kind == "globularity");
  CHECK(vs[0].where == "bad/alpha");
  auto missing = validate_document(std::string(theta_text) + "(collection Q (arity a \"()\"))");
  CHECK(missing.size() == 4);
  auto wrong = validate_document(std::string(theta_text) +
                                 "(collection Q (arity a \"()\") (arity b \"()\") (arity f \"(())\") (arity g \"(())\")"
                                 " (arity alpha \"((())(()))\"))");
  CHECK(!wrong.empty());
  CHECK(validate_document(theta_text).empty());
}

TEST_CASE("quoted atoms") {
  SExpr e = parse_sexpr("(arity f \"(()({0}))\" \"a b\" \"q\\\"x\")");
  CHECK(e.items[2].atom == "(()({0}))");
  CHECK(e.items[3].atom == "a b");
  CHECK(e.items[4].atom == "q\"x");
  CHECK(to_string(parse_sexpr(to_string(e))) == to_string(e));
  CHECK(to_string(atom("plain")) == "plain");
}

TEST_CASE("print then parse round-trips the sample documents") {
  int seen = 0;
  for (auto& entry : std::filesystem::directory_iterator(OMEGACAT_DATA_DIR)) {
    if (entry.path().extension() != ".sexp") continue;
    std::string text = slurp(entry.path());
    if (!validate_document(text).empty()) continue;
    ++seen;
    Document d = parse_document(text);
    std::string printed = print_document(d);
    Document again = parse_document(printed);
    CHECK_MESSAGE(again == d, entry.path().filename().string());
    CHECK(print_document(again) == printed);
  }
  CHECK(seen >= 5);
}

TEST_CASE("exported free operad round-trips with the same laws") {
  FreeOperad f = initial_operad(1, 1, 1);
  Document d = export_operad(f, "L");
  std::string text = print_document(d);
  Document back = parse_document(text);
  CHECK(back == d);
  ContractedOperad p = build_operad(back, "L");
  CHECK(p.coll.size(0) == f.operad.coll.size(0));
  CHECK(p.coll.size(1) == f.operad.coll.size(1));
  for (int s : {0, 1}) {
    LawOptions o;
    o.max_stage = s;
    auto direct = check_operad_laws(f.operad, o);
    auto read = check_operad_laws(p, o);
    CHECK(direct.checked == read.checked);
    CHECK(direct.skipped == read.skipped);
    CHECK(direct.failures.size() == read.failures.size());
  }
  auto direct = check_operadic_contraction(f.operad, {});
  auto read = check_operadic_contraction(p, {});
  CHECK(direct.checked == read.checked);
  CHECK(direct.failures.size() == read.failures.size());
}

TEST_CASE("extensional algebra") {
  // the one-point algebra: every operation acts trivially
  std::string text =
      "(operad T :terminal 1 :bound 1)\n"
      "(gset pt :maxdim 1 (cells 0 x) (cells 1 (e x x)))\n"
      "(algebra A :gset pt\n"
      "  (act 0 \"()\" (gen x) x)\n"
      "  (act 1 \"()^1\" (id (gen x)) e)\n"
      "  (act 1 \"(())\" (gen e) e)\n"
      "  (act 1 \"(({0}))\" (inv 0 (gen e)) e))";
  Document d = parse_document(text);
  ContractedOperad p = build_operad(d, "T");
  TAlgebra a = build_algebra(d, "A", p);
  LawOptions o;
  o.bound = 1;
  auto r = check_algebra(p, a, o);
  CHECK(r.failures.empty());
  CHECK(r.checked > 0);
  CHECK(parse_document(print_document(d)) == d);
}
