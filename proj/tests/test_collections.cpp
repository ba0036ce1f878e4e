#include "doctest.h"

#include <random>
#include <set>

#include "omegacat/collections.hpp"
#include "omegacat/normalizer.hpp"

using namespace omega;

namespace {

TCollection theta_collection() {
  auto g = theta_set();
  return make_collection(g, {{tree_unit(0), tree_unit(0)}, {tree_unit(1), tree_unit(1)}, {tree_unit(2)}});
}

int cell(const TCollection& c, int dim, const std::string& id) { return c.carrier->index(dim, id); }

FreeCell tree_cell(const TCollection& c, const Term& t) { return make_cell(c.carrier, t, Mode::involutive); }

} // namespace

TEST_CASE("collection validation") {
  CHECK(validate_collection(theta_collection()).empty());
  auto g = theta_set();
  CHECK_THROWS_AS(make_collection(g, {{tree_unit(0), tree_unit(0)}, {tree_unit(1), parse_tree("((()))")}, {tree_unit(2)}}),
                  DomainError);
  // π(alpha) must have boundary π(f)
  CHECK(!validate_collection({g, {{tree_unit(0), tree_unit(0)}, {tree_unit(1), tree_unit(1)}, {parse_tree("((())(()))")}}})
             .empty());
  CHECK(validate_collection(empty_collection(3)).empty());
  TCollection t = tree_collection(2, 2);
  CHECK(validate_collection(t).empty());
  CHECK(t.size(1) == static_cast<int>(enumerate_trees(1, 2, Mode::involutive).size()));
  CHECK(validate_collection(identity_collection(theta_set())).empty());
}

TEST_CASE("projection_morphism") {
  TCollection th = theta_collection();
  TCollection t = tree_collection(2, 2);
  GlobularMorphism f = projection_morphism(th, t);
  CHECK(validate_collection_morphism(th, t, f).empty());
  CHECK(t.carrier->id(2, f.map[2][0]) == "((()))");
  CHECK_THROWS_AS(projection_morphism(tree_collection(1, 3), tree_collection(1, 2)), DomainError);
}

TEST_CASE("par_set examples") {
  TCollection th = theta_collection();
  auto p1 = par_set(th, 1, 2);
  // (a|b, (()), a|b) and the involuted edge
  std::set<std::string> texts;
  for (auto& t : p1) texts.insert(to_string(th, t));
  CHECK(texts.count("(b, (()), a)") == 1);
  CHECK(texts.count("(a, (({0})), b)") == 1);
  auto p2 = par_set(th, 2, 3);
  bool found = false;
  for (auto& t : p2) {
    CHECK(is_par(th, t));
    if (t.plus == cell(th, 1, "g") && t.minus == cell(th, 1, "f") && to_string(t.shape) == "((()()))") found = true;
  }
  CHECK(found);
  CHECK(par_set(empty_collection(2), 1, 3).empty());
  CHECK(par_set(empty_collection(2), 2, 3).empty());
  CHECK_THROWS_AS(par_set(th, 0, 2), DomainError);
}

TEST_CASE("terminal contraction") {
  TCollection t = tree_collection(2, 3);
  Contraction kappa = [&](const ParTriple& p) -> std::optional<int> {
    int i = t.carrier->index(p.dim(), to_string(p.shape));
    if (i < 0) return std::nullopt;
    return i;
  };
  CHECK(validate_contraction(t, kappa, 3).empty());
  // every triple loses its cell
  long triples = 0;
  for (int n = 1; n <= 2; ++n) triples += static_cast<long>(par_set(t, n, 3).size());
  auto none = validate_contraction(t, Contraction{}, 3);
  CHECK(static_cast<long>(none.size()) == triples);
  for (auto& v : none) CHECK(v.kind == "completeness");
  Contraction wrong = [&](const ParTriple& p) -> std::optional<int> {
    return t.carrier->index(p.dim(), to_string(tree_unit(p.dim())));
  };
  bool projection = false;
  for (auto& v : validate_contraction(t, wrong, 3)) projection |= v.kind == "projection";
  CHECK(projection);
}

TEST_CASE("par_pushforward") {
  TCollection th = theta_collection();
  auto triples = par_set(th, 2, 2);
  auto same = par_pushforward(th, th, identity_morphism(th.carrier), triples);
  std::set<ParTriple> distinct(triples.begin(), triples.end());
  CHECK(same == std::vector<ParTriple>(distinct.begin(), distinct.end()));
  TCollection t = tree_collection(2, 2);
  auto image = par_pushforward(th, t, projection_morphism(th, t), triples);
  for (auto& p : image) CHECK(p.plus == p.minus);
  CHECK(par_pushforward(th, t, projection_morphism(th, t), {}).empty());
  GlobularMorphism to_self = identity_morphism(th.carrier);
  TCollection other = make_collection(th.carrier, {{tree_unit(0), tree_unit(0)},
                                                   {parse_tree("(({0}))"), parse_tree("(({0}))")},
                                                   {parse_tree("(({0}))^2")}});
  CHECK_THROWS_AS(par_pushforward(th, other, to_self, triples), DomainError);
}

TEST_CASE("graft") {
  TCollection t = tree_collection(1, 3);
  FreeCell tau = tree_cell(t, comp(0, gen(1, "(()()())"), gen(1, "(())")));
  CHECK(to_string(graft(t, tau)) == "(()()()())");
  CHECK(to_string(graft(t, tree_cell(t, gen(0, "()")))) == "()");
  CHECK(to_string(graft(t, tree_cell(t, gen(1, "()^1")))) == "()^1");
}

TEST_CASE("compose example") {
  TCollection t = tree_collection(1, 3);
  Composite c = compose_collections(t, t, 3);
  CHECK(validate_collection(c.coll).empty());
  int p = cell(t, 1, "(()())");
  FreeCell tau = tree_cell(t, comp(0, gen(1, "(()()())"), gen(1, "(())")));
  auto k = c.find(1, p, tau);
  REQUIRE(k.has_value());
  CHECK(to_string(c.coll.pi(1, *k)) == "(()()()())");
  // cells over the unit tree of dimension 0 are the 0-cells
  CHECK(c.coll.size(0) == 1);
  ComposeOptions o;
  o.bound = 3;
  o.max_result = 3;
  CHECK(!compose_collections(t, t, o).find(1, p, tau));
  o.max_result = -1;
  o.budget = 5;
  CHECK_THROWS_AS(compose_collections(t, t, o), ResourceError);
  CHECK(compose_collections(empty_collection(1), t, 3).coll.size(1) == 0);
}

TEST_CASE("composite boundaries") {
  TCollection t = tree_collection(2, 2);
  Composite c = compose_collections(t, t, 2);
  CHECK(validate_collection(c.coll).empty());
  const GlobularSet& g = *c.coll.carrier;
  for (int n = 1; n <= 2; ++n)
    for (int k = 0; k < g.size(n); ++k) {
      auto& [p, tau] = c.pairs[n][k];
      CHECK(c.pairs[n - 1][g.src(n, k)].first == t.carrier->src(n, p));
      FreeCell s = make_cell(t.carrier, boundary_of_term(*t.carrier, tau.nf, Side::source), Mode::involutive);
      CHECK(c.pairs[n - 1][g.src(n, k)].second == s);
    }
}

TEST_CASE("unitors") {
  for (auto& p : {tree_collection(1, 3), tree_collection(2, 2), theta_collection()}) {
    auto l = left_unitor(p, 2);
    auto r = right_unitor(p, 2);
    CHECK(l.checked > 0);
    CHECK(r.checked > 0);
    CHECK(l.violations.empty());
    CHECK(r.violations.empty());
  }
}

TEST_CASE("associator") {
  TCollection t = tree_collection(1, 2);
  Associator a = associator_witness(t, t, t, 2);
  CHECK(a.repair.checked > 0);
  CHECK(a.repair.violations.empty());
  TCollection th = theta_collection();
  TCollection t2 = tree_collection(2, 2);
  Associator b = associator_witness(th, t2, th, 2);
  CHECK(b.repair.checked > 0);
  CHECK(b.repair.violations.empty());
}

TEST_CASE("pentagon") {
  TCollection t = tree_collection(1, 2);
  auto r = pentagon_witness(t, t, t, t, 2);
  CHECK(r.checked > 0);
  CHECK(r.violations.empty());
  for (auto& v : r.violations) MESSAGE(v.kind << " " << v.where << " " << v.detail);
}

TEST_CASE("congruence and quotient") {
  TCollection th = theta_collection();
  Congruence diag(*th.carrier);
  Quotient q = quotient_collection(th, diag);
  CHECK(q.coll.size(1) == 2);
  CHECK(validate_morphism(q.map).empty());

  Congruence fib(*th.carrier);
  fib.merge(1, 0, 1);
  fib.merge(0, 0, 1);
  CHECK(check_congruence(th, fib).empty());
  Quotient fq = quotient_collection(th, fib);
  for (int n = 0; n <= 2; ++n) CHECK(fq.coll.size(n) == 1);
  CHECK(validate_collection(fq.coll).empty());

  // merging f and g without closing the boundaries is fine: a and b stay apart
  Congruence fg(*th.carrier);
  fg.merge(1, 0, 1);
  CHECK(check_congruence(th, fg).empty());
  CHECK(quotient_collection(th, fg).coll.size(1) == 1);

  auto g = std::make_shared<GlobularSet>(1);
  g->add(0, "a");
  g->add(0, "b");
  g->add(1, "f", "a", "b");
  g->add(1, "h", "a", "a");
  TCollection c = make_collection(g, {{tree_unit(0), tree_unit(0)}, {tree_unit(1), tree_unit(1)}});
  Congruence e(*g);
  e.merge(1, 0, 1);
  auto v = check_congruence(c, e);
  REQUIRE(!v.empty());
  CHECK(v.front().kind == "c-st");
  CHECK_THROWS_WITH_AS(quotient_collection(c, e), doctest::Contains("c-st"), DomainError);
  close_boundaries(*g, e);
  CHECK(check_congruence(c, e).empty());
  CHECK(quotient_collection(c, e).coll.size(0) == 1);

  auto two = std::make_shared<GlobularSet>(1);
  two->add(0, "a");
  two->add(0, "b");
  two->add(1, "f", "a", "b");
  two->add(1, "g", "a", "b");
  TCollection mixed = make_collection(two, {{tree_unit(0), tree_unit(0)}, {tree_unit(1), parse_tree("(({0}))")}});
  Congruence bad(*two);
  bad.merge(1, 0, 1);
  CHECK(check_congruence(mixed, bad).front().kind == "projection");
  CHECK_THROWS_WITH_AS(quotient_collection(mixed, bad), doctest::Contains("projection"), DomainError);
}

TEST_CASE("induced congruence is the fiberwise congruence") {
  TCollection t = tree_collection(2, 2);
  std::mt19937_64 rng(8);
  for (int k = 0; k < 10; ++k) {
    auto g = random_globular(rng, 2, 3);
    // π(x) = the unit tree of x's dimension
    TCollection c = identity_collection(g);
    GlobularMorphism f = projection_morphism(c, t);
    Congruence e = induced_congruence(*g, f, Congruence(*t.carrier));
    for (int n = 0; n <= 2; ++n) CHECK(e.num_classes(n) == (g->size(n) > 0 ? 1 : 0));
    CHECK(check_congruence(c, e).empty());
  }
  TCollection th = theta_collection();
  Congruence e = induced_congruence(*th.carrier, identity_morphism(th.carrier), Congruence(*th.carrier));
  for (int n = 0; n <= 2; ++n) CHECK(e.num_classes(n) == th.size(n));
}

TEST_CASE("relabel_cell") {
  TCollection th = theta_collection();
  FreeCell a = tree_cell(th, gen(2, "alpha"));
  auto same = relabel_cell(a, th.carrier, [](int, int c) -> std::optional<int> { return c; });
  REQUIRE(same);
  CHECK(*same == a);
  CHECK(!relabel_cell(a, th.carrier, [](int, int) -> std::optional<int> { return std::nullopt; }));
  // f ↦ g, a ↦ a, b ↦ b keeps a 1-cell valid
  FreeCell f = tree_cell(th, gen(1, "f"));
  auto g = relabel_cell(f, th.carrier, [](int d, int c) -> std::optional<int> { return d == 1 ? 1 : c; });
  REQUIRE(g);
  CHECK(term_equal(g->nf, gen(1, "g")));
}

TEST_CASE("cells_of_shape covers the term universe") {
  std::mt19937_64 rng(31);
  for (int k = 0; k < 4; ++k) {
    auto q = random_globular(rng, 2, 3);
    for (Mode m : {Mode::strict, Mode::involutive})
      for (int d = 0; d <= 2; ++d)
        for (auto& y : enumerate_trees(d, 2, m)) {
          std::set<std::string> fast;
          for (auto& c : cells_of_shape(q, m, y)) {
            CHECK(shape_tree(c) == y);
            fast.insert(c.key());
          }
          for (auto& t : enumerate_terms(*q, m, 5, d)) {
            FreeCell c = make_cell(q, t, m);
            if (shape_tree(c) == y) CHECK(fast.count(c.key()) == 1);
          }
        }
  }
}
