#include "doctest.h"

#include <map>
#include <set>
#include <unordered_map>

#include "omegacat/monad.hpp"
#include "omegacat/normalizer.hpp"
#include "omegacat/pasting.hpp"

using namespace omega;

namespace {

GSetPtr fgh_set() {
  auto g = std::make_shared<GlobularSet>(2);
  for (auto id : {"a", "b", "c", "d"}) g->add(0, id);
  g->add(1, "f", "a", "b");
  g->add(1, "g", "b", "c");
  g->add(1, "h", "c", "d");
  return g;
}

// 2×2 grid: α: f ⇒ f', α′: f' ⇒ f'' over a → b, β: g ⇒ g', β′: g' ⇒ g'' over b → c.
GSetPtr grid_set() {
  auto g = std::make_shared<GlobularSet>(2);
  for (auto id : {"a", "b", "c"}) g->add(0, id);
  for (auto id : {"f", "f1", "f2"}) g->add(1, id, "a", "b");
  for (auto id : {"g", "g1", "g2"}) g->add(1, id, "b", "c");
  g->add(2, "alpha", "f", "f1");
  g->add(2, "alpha1", "f1", "f2");
  g->add(2, "beta", "g", "g1");
  g->add(2, "beta1", "g1", "g2");
  return g;
}

Term G(int d, const char* id) { return gen(d, id); }

} // namespace

TEST_CASE("normalize examples") {
  auto g = fgh_set();
  Term f = G(1, "f");
  CHECK(term_equal(normalize(*g, inv(0, inv(0, f)), Mode::involutive), f));
  CHECK(term_equal(normalize(*g, comp(0, id_term(G(0, "b")), f), Mode::strict), f));
  Term gf = comp(0, G(1, "g"), f);
  CHECK(term_equal(normalize(*g, inv(0, gf), Mode::involutive), comp(0, inv(0, f), inv(0, G(1, "g")))));
  CHECK(term_equal(normalize(*g, inv(1, f), Mode::strict), f));
}

TEST_CASE("normalize rejects Inv in strict mode and enforces the budget") {
  auto g = fgh_set();
  Term f = G(1, "f");
  CHECK_THROWS_AS(normalize(*g, inv(0, f), Mode::strict), DomainError);
  NormalizeOptions opts;
  opts.budget = 0;
  try {
    normalize_traced(*g, inv(0, inv(0, f)), Mode::involutive, opts);
    FAIL("expected ResourceError");
  } catch (const ResourceError& e) {
    CHECK(std::string(e.what()).find("(inv 0 (inv 0 (gen f)))") != std::string::npos);
  }
}

TEST_CASE("equal_terms examples") {
  auto g = fgh_set();
  Term f = G(1, "f"), gg = G(1, "g"), h = G(1, "h");
  CHECK(equal_terms(*g, comp(0, comp(0, h, gg), f), comp(0, h, comp(0, gg, f)), Mode::strict));
  CHECK_FALSE(equal_terms(*g, f, inv(0, f), Mode::involutive));
  CHECK_THROWS_AS(equal_terms(*g, f, G(0, "a"), Mode::strict), DomainError);

  auto q = grid_set();
  Term a = G(2, "alpha"), a1 = G(2, "alpha1"), b = G(2, "beta"), b1 = G(2, "beta1");
  Term lhs = comp(1, comp(0, b1, a1), comp(0, b, a));
  Term rhs = comp(0, comp(1, b1, b), comp(1, a1, a));
  CHECK(equal_terms(*q, lhs, rhs, Mode::strict));
  CHECK(term_equal(normalize(*q, lhs, Mode::strict), normalize(*q, rhs, Mode::strict)));
}

TEST_CASE("oracle examples") {
  auto t1 = terminal_set(1);
  CHECK(congruence_closure_oracle(*t1, Mode::strict, 0).terms.empty());

  // dim-1 classes with ≤ 4 nodes are the paths of length 0, 1, 2
  auto part = congruence_closure_oracle(*t1, Mode::strict, 4, {0, 4000000, 1});
  std::set<int> dim1_classes;
  std::map<int, int> class_gens;
  for (size_t i = 0; i < part.terms.size(); ++i)
    if (part.terms[i]->dim == 1) {
      dim1_classes.insert(part.cls[i]);
      FreeCell c = make_cell(t1, part.terms[i], Mode::strict);
      class_gens[part.cls[i]] = static_cast<int>(tree_encode(c).root.kids.size());
    }
  CHECK(dim1_classes.size() == 3);
  std::set<int> lengths;
  for (auto& [c, n] : class_gens) lengths.insert(n);
  CHECK(lengths == std::set<int>{0, 1, 2});

  // x and Inv(q, Inv(q, x)) share a class
  auto t2 = terminal_set(2);
  auto p2 = congruence_closure_oracle(*t2, Mode::involutive, 3);
  std::unordered_map<Term, int, TermHash, TermEq> cls;
  for (size_t i = 0; i < p2.terms.size(); ++i) cls[p2.terms[i]] = p2.cls[i];
  Term x = G(1, "*1");
  CHECK(cls.at(x) == cls.at(inv(0, inv(0, x))));
  CHECK(cls.at(x) != cls.at(inv(0, x)));
}

TEST_CASE("oracle budget") {
  OracleOptions o;
  o.max_terms = 50;
  CHECK_THROWS_AS(congruence_closure_oracle(*terminal_set(2), Mode::involutive, 6, o), ResourceError);
}

TEST_CASE("every rewrite step stays inside one oracle class") {
  auto g = terminal_set(2);
  auto part = congruence_closure_oracle(*g, Mode::involutive, 6, {2, 20000000, -1});
  std::unordered_map<Term, int, TermHash, TermEq> cls;
  for (size_t i = 0; i < part.terms.size(); ++i) cls[part.terms[i]] = part.cls[i];
  long steps = 0, compared = 0;
  NormalizeOptions opts;
  opts.trace = true;
  for (auto& t : part.terms) {
    auto res = normalize_traced(*g, t, Mode::involutive, opts);
    for (auto& s : res.trace) {
      ++steps;
      CHECK(eval(*g, s.before) == eval(*g, s.after));
      auto a = cls.find(s.before), b = cls.find(s.after);
      if (a != cls.end() && b != cls.end()) {
        ++compared;
        CHECK(a->second == b->second);
      }
    }
  }
  CHECK(steps > 0);
  CHECK(compared > 0);
}

TEST_CASE("normalize invariants on the bounded universe") {
  auto g = terminal_set(2);
  for (Mode m : {Mode::strict, Mode::involutive})
    for (int d = 0; d <= 2; ++d)
      for (auto& t : enumerate_terms(*g, m, 5, d)) {
        Term nf = normalize(*g, t, m);
        CHECK(term_equal(normalize(*g, nf, m), nf));
        CHECK(nf->dim == t->dim);
        if (m == Mode::strict) CHECK_FALSE(contains_inv(nf));
        if (d >= 1) {
          for (Side side : {Side::source, Side::target})
            CHECK(equal_terms(*g, boundary_of_term(*g, nf, side), boundary_of_term(*g, t, side), m));
        }
        if (m == Mode::involutive && d >= 1) {
          CHECK(term_equal(normalize(*g, inv(d, t), m), nf));
          for (int p = 0; p < d; ++p)
            for (int q = 0; q < d; ++q)
              CHECK(term_equal(normalize(*g, inv(p, inv(q, t)), m), normalize(*g, inv(q, inv(p, t)), m)));
        }
      }
}

TEST_CASE("trace replays to the canonical form") {
  auto q = grid_set();
  Term t = inv(1, comp(1, comp(0, G(2, "beta1"), G(2, "alpha1")), comp(0, G(2, "beta"), G(2, "alpha"))));
  NormalizeOptions opts;
  opts.trace = true;
  auto res = normalize_traced(*q, t, Mode::involutive, opts);
  REQUIRE(!res.trace.empty());
  Term cur = t;
  for (auto& s : res.trace) {
    if (s.rule == "interchange-canonicalize") {
      CHECK(term_equal(s.before, cur));
      cur = s.after;
      continue;
    }
    std::vector<int> path;
    for (size_t i = 1; i < s.path.size(); i += 2) path.push_back(s.path[i] - '0');
    CHECK(term_equal(subterm(cur, path), s.before));
    cur = replace_at(cur, path, s.after);
  }
  CHECK(term_equal(cur, res.nf));
  CHECK(res.steps == static_cast<long>(res.trace.size()));
}
