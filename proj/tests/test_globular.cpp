#include "doctest.h"

#include <random>

#include "omegacat/globular.hpp"

using namespace omega;

namespace {

GlobularData theta_data() {
  GlobularData d;
  d.max_dim = 2;
  d.cells = {{{"a", "", ""}, {"b", "", ""}}, {{"f", "a", "b"}, {"g", "a", "b"}}, {{"alpha", "f", "g"}}};
  return d;
}

bool has_detail(const std::vector<Violation>& vs, const std::string& kind, const std::string& needle) {
  for (auto& v : vs)
    if (v.kind == kind && v.detail.find(needle) != std::string::npos) return true;
  return false;
}

} // namespace

TEST_CASE("validate_globular accepts terminal and theta sets") {
  CHECK(validate_globular(*terminal_set(2)).empty());
  CHECK(validate_globular(theta_data()).empty());
}

TEST_CASE("validate_globular reports a broken globularity equation") {
  GlobularData d;
  d.max_dim = 2;
  d.cells = {{{"a", "", ""}, {"b", "", ""}, {"c", "", ""}}, {{"f", "a", "b"}, {"g", "a", "c"}}, {{"alpha", "f", "g"}}};
  auto vs = validate_globular(d);
  REQUIRE(vs.size() == 1);
  CHECK(vs[0].where == "alpha");
  CHECK(has_detail(vs, "globularity", "tgt∘src ≠ tgt∘tgt"));
}

TEST_CASE("structural problems are kept apart from globularity") {
  GlobularData d;
  d.max_dim = 1;
  d.cells = {{{"a", "", ""}, {"a", "", ""}}, {{"f", "a", "zz"}}};
  auto vs = validate_globular(d);
  CHECK(has_detail(vs, "structural", "duplicate"));
  CHECK(has_detail(vs, "structural", "unknown target zz"));
  for (auto& v : vs) CHECK(v.kind == "structural");
}

TEST_CASE("add rejects forward references, duplicates and non-globular cells") {
  GlobularSet g(2);
  g.add(0, "a");
  CHECK_THROWS_AS(g.add(1, "f", "a", "b"), DomainError);
  g.add(0, "b");
  g.add(0, "c");
  CHECK_THROWS_AS(g.add(0, "a"), DomainError);
  g.add(1, "f", "a", "b");
  g.add(1, "h", "a", "c");
  CHECK_THROWS_AS(g.add(2, "alpha", "f", "h"), DomainError);
}

TEST_CASE("iterated_boundary on theta") {
  auto g = build_globular(theta_data());
  CHECK(iterated_boundary(*g, {2, "alpha"}, 2, Side::source) == CellRef{0, "a"});
  CHECK(iterated_boundary(*g, {2, "alpha"}, 1, Side::target) == CellRef{1, "g"});
  CHECK(iterated_boundary(*g, {1, "f"}, 0, Side::source) == CellRef{1, "f"});
  CHECK_THROWS_AS(iterated_boundary(*g, {1, "f"}, 2, Side::source), DomainError);
}

TEST_CASE("parallel") {
  auto g = build_globular(theta_data());
  CHECK(parallel(*g, CellRef{0, "a"}, CellRef{0, "b"}));
  CHECK(parallel(*g, CellRef{1, "f"}, CellRef{1, "g"}));
  CHECK_THROWS_AS(parallel(*g, CellRef{1, "f"}, CellRef{0, "a"}), DomainError);
  GlobularSet h(1);
  h.add(0, "a");
  h.add(0, "b");
  h.add(0, "c");
  h.add(1, "f", "a", "b");
  h.add(1, "g", "a", "c");
  CHECK_FALSE(parallel(h, CellRef{1, "f"}, CellRef{1, "g"}));
}

TEST_CASE("parallel is an equivalence relation on random sets") {
  std::mt19937_64 rng(7);
  for (int k = 0; k < 30; ++k) {
    auto g = random_globular(rng, 2, 5);
    for (int n = 0; n <= 2; ++n) {
      int m = g->size(n);
      for (int x = 0; x < m; ++x) {
        CHECK(parallel(*g, n, x, x));
        for (int y = 0; y < m; ++y) {
          CHECK(parallel(*g, n, x, y) == parallel(*g, n, y, x));
          for (int z = 0; z < m; ++z)
            if (parallel(*g, n, x, y) && parallel(*g, n, y, z)) CHECK(parallel(*g, n, x, z));
        }
      }
    }
  }
}

TEST_CASE("globularity holds for every cell of a validated random set") {
  std::mt19937_64 rng(11);
  for (int k = 0; k < 30; ++k) {
    auto g = random_globular(rng, 3, 4);
    CHECK(validate_globular(*g).empty());
    for (int n = 2; n <= 3; ++n)
      for (int i = 0; i < g->size(n); ++i) {
        CellRef x = g->ref(n, i);
        for (Side side : {Side::source, Side::target}) {
          CellRef via_src = iterated_boundary(*g, iterated_boundary(*g, x, 1, Side::source), 1, side);
          CellRef via_tgt = iterated_boundary(*g, iterated_boundary(*g, x, 1, Side::target), 1, side);
          CHECK(via_src == via_tgt);
        }
      }
  }
}

TEST_CASE("terminal set") {
  CHECK(terminal_set(0)->total_size() == 1);
  CHECK(terminal_set(3)->total_size() == 4);
  std::mt19937_64 rng(3);
  auto g = random_globular(rng, 2, 4);
  int count = 0;
  for_each_morphism(g, terminal_set(2), [&](const GlobularMorphism&) {
    ++count;
    return true;
  });
  CHECK(count == 1);
  CHECK(validate_morphism(terminal_morphism(g)).empty());
}

TEST_CASE("compose_morphisms identities and terminal absorption") {
  std::mt19937_64 rng(5);
  auto a = random_globular(rng, 2, 3);
  auto b = random_globular(rng, 2, 3);
  auto f = random_morphism(a, b, rng);
  if (!f) f = random_morphism(a, a, rng);
  REQUIRE(f);
  CHECK(compose_morphisms(*f, identity_morphism(f->dom)) == *f);
  CHECK(compose_morphisms(identity_morphism(f->cod), *f) == *f);
  auto t = terminal_set(2);
  CHECK(compose_morphisms(terminal_morphism(f->cod, t), *f) == terminal_morphism(f->dom, t));
  GlobularMorphism bad = *f;
  CHECK_THROWS_AS(compose_morphisms(bad, identity_morphism(terminal_set(2))), DomainError);
}

TEST_CASE("pullback examples") {
  auto theta = build_globular(theta_data());
  auto t = terminal_set(2);
  auto pb = pullback(terminal_morphism(theta, t), terminal_morphism(theta, t));
  CHECK(pb.set->size(0) == 4);
  CHECK(pb.set->size(1) == 4);
  CHECK(pb.set->size(2) == 1);
  CHECK(validate_globular(*pb.set).empty());

  auto id = identity_morphism(t);
  auto pb2 = pullback(id, terminal_morphism(theta, t));
  for (int n = 0; n <= 2; ++n) CHECK(pb2.set->size(n) == theta->size(n));

  auto other = terminal_set(1);
  CHECK_THROWS_AS(pullback(terminal_morphism(theta, t), terminal_morphism(terminal_set(1), other)), DomainError);
}

TEST_CASE("pullback squares commute and satisfy the universal property") {
  std::mt19937_64 rng(2024);
  int spans = 0;
  while (spans < 100) {
    auto X = random_globular(rng, 2, 3);
    auto A = random_globular(rng, 2, 5);
    auto B = random_globular(rng, 2, 5);
    auto f = random_morphism(A, X, rng);
    auto g = random_morphism(B, X, rng);
    if (!f || !g) continue;
    auto pb = pullback(*f, *g);
    REQUIRE(validate_globular(*pb.set).empty());
    CHECK(validate_morphism(pb.p1).empty());
    CHECK(validate_morphism(pb.p2).empty());
    CHECK(compose_morphisms(*f, pb.p1) == compose_morphisms(*g, pb.p2));

    // a competing span S → A, S → B over X
    auto S = random_globular(rng, 2, 5);
    auto u = random_morphism(S, A, rng);
    if (!u) continue;
    auto fu = compose_morphisms(*f, *u);
    std::optional<GlobularMorphism> v;
    for_each_morphism(S, B, [&](const GlobularMorphism& m) {
      if (compose_morphisms(*g, m) == fu) {
        v = m;
        return false;
      }
      return true;
    });
    if (!v) continue;
    int factorizations = 0;
    for_each_morphism(S, pb.set, [&](const GlobularMorphism& w) {
      if (compose_morphisms(pb.p1, w) == *u && compose_morphisms(pb.p2, w) == *v) ++factorizations;
      return true;
    });
    CHECK(factorizations == 1);
    ++spans;
  }
}
