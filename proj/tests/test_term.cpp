#include "doctest.h"

#include <set>

#include "omegacat/monad.hpp"
#include "omegacat/normalizer.hpp"

using namespace omega;

namespace {

// f: a → b, g: b → c, h: c → d plus 2-cells α, β: f ⇒ f.
GSetPtr path_set() {
  auto g = std::make_shared<GlobularSet>(2);
  for (auto id : {"a", "b", "c", "d"}) g->add(0, id);
  g->add(1, "f", "a", "b");
  g->add(1, "g", "b", "c");
  g->add(1, "h", "c", "d");
  g->add(2, "alpha", "f", "f");
  g->add(2, "beta", "f", "f");
  return g;
}

Term T(const std::string& s, const GlobularSet& g) { return parse_term(s, g); }

} // namespace

TEST_CASE("dim_of") {
  auto g = path_set();
  CHECK(dim_of(gen(1, "f")) == 1);
  CHECK(dim_of(id_term(gen(0, "a"))) == 1);
  CHECK(dim_of(T("(inv 0 (comp 0 (gen g) (gen f)))", *g)) == 1);
}

TEST_CASE("boundary_of_term") {
  auto g = path_set();
  CHECK(term_equal(boundary_of_term(*g, inv(0, gen(1, "f")), Side::source), gen(0, "b")));
  CHECK(term_equal(boundary_of_term(*g, id_term(gen(0, "a")), Side::source), gen(0, "a")));
  CHECK(term_equal(boundary_of_term(*g, comp(0, gen(1, "g"), gen(1, "f")), Side::source), gen(0, "a")));
  CHECK(term_equal(boundary_of_term(*g, comp(0, gen(1, "g"), gen(1, "f")), Side::target), gen(0, "c")));
  CHECK_THROWS_AS(boundary_of_term(*g, gen(0, "a"), Side::source), DomainError);
}

TEST_CASE("inv grounding happens at construction") {
  Term f = gen(1, "f");
  CHECK(inv(1, f) == f);
  CHECK(inv(5, f) == f);
  CHECK(inv(0, f)->kind == TermKind::inv);
}

TEST_CASE("well_formed") {
  auto g = path_set();
  CHECK(well_formed(T("(comp 0 (gen g) (gen f))", *g), *g, Mode::strict).empty());
  auto bad = well_formed(T("(comp 0 (gen f) (gen g))", *g), *g, Mode::strict);
  REQUIRE(bad.size() == 1);
  CHECK(bad[0].kind == "composability");
  CHECK(bad[0].where == "/");

  // boundaries meet only after identity elimination
  auto g2 = std::make_shared<GlobularSet>(2);
  g2->add(0, "a");
  g2->add(1, "f", "a", "a");
  g2->add(2, "alpha", "f", "f");
  g2->add(2, "beta", "f", "f");
  Term t = comp(0, gen(2, "alpha"), comp(0, gen(2, "beta"), id_term(gen(0, "a"), 2)));
  CHECK(well_formed(t, *g2, Mode::strict).empty());

  auto strict_inv = well_formed(inv(0, gen(1, "f")), *g, Mode::strict);
  REQUIRE(strict_inv.size() == 1);
  CHECK(strict_inv[0].kind == "involution-in-strict-mode");
  CHECK(well_formed(inv(0, gen(1, "f")), *g, Mode::involutive).empty());

  auto unknown = well_formed(comp(0, gen(1, "g"), gen(1, "zz")), *g, Mode::strict);
  REQUIRE(unknown.size() == 1);
  CHECK(unknown[0].kind == "unknown-cell");
  CHECK(unknown[0].where == "/1");
}

TEST_CASE("parse and print terms") {
  auto g = path_set();
  Term t = T("(comp 0 (inv 0 (gen g)) (id (gen a)))", *g);
  CHECK(to_string(t) == "(comp 0 (inv 0 (gen g)) (id (gen a)))");
  CHECK(term_equal(T(to_string(t), *g), t));
  CHECK_THROWS_AS(T("(gen zz)", *g), ParseError);
  CHECK_THROWS_AS(T("(comp 0 (gen f)", *g), ParseError);
  CHECK_THROWS_AS(T("(frob (gen f))", *g), ParseError);
}

TEST_CASE("enumerate_terms small censuses") {
  auto t1 = terminal_set(1);
  auto strict = enumerate_terms(*t1, Mode::strict, 1, 1);
  REQUIRE(strict.size() == 1);
  CHECK(strict[0]->kind == TermKind::gen);
  auto strict2 = enumerate_terms(*t1, Mode::strict, 2, 1);
  CHECK(strict2.size() == 2);
  CHECK(term_equal(strict2[1], id_term(gen(0, "*0"))));
  auto inv2 = enumerate_terms(*t1, Mode::involutive, 2, 1);
  CHECK(inv2.size() == 3);
  bool has_inv = false;
  for (auto& t : inv2) has_inv |= term_equal(t, inv(0, gen(1, "*1")));
  CHECK(has_inv);
  CHECK(enumerate_terms(*t1, Mode::strict, 0, 1).empty());
}

TEST_CASE("enumerate_terms is duplicate-free and subterm-closed") {
  auto g = terminal_set(2);
  for (Mode m : {Mode::strict, Mode::involutive}) {
    std::set<std::string> seen;
    std::vector<std::set<std::string>> by_dim(3);
    for (int d = 0; d <= 2; ++d)
      for (auto& t : enumerate_terms(*g, m, 5, d)) {
        CHECK(seen.insert(to_string(t)).second);
        by_dim[d].insert(to_string(t));
        CHECK(well_formed(t, *g, m).empty());
      }
    for (int d = 0; d <= 2; ++d)
      for (auto& s : by_dim[d]) {
        Term t = parse_term(s, *g);
        for (Term sub : {t->a, t->b})
          if (sub) CHECK(by_dim[sub->dim].count(to_string(sub)) == 1);
      }
  }
}

TEST_CASE("term boundaries are globular up to normalizer equality") {
  auto g = terminal_set(3);
  for (auto& t : enumerate_terms(*g, Mode::involutive, 6, 3)) {
    CHECK(dim_of(boundary_of_term(*g, t, Side::source)) == 2);
    for (Side side : {Side::source, Side::target}) {
      Term a = boundary_of_term(*g, boundary_of_term(*g, t, Side::source), side);
      Term b = boundary_of_term(*g, boundary_of_term(*g, t, Side::target), side);
      CHECK(equal_terms(*g, a, b, Mode::involutive));
    }
  }
}
