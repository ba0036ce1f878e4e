#include "doctest.h"

#include <map>
#include <random>
#include <set>

#include "omegacat/normalizer.hpp"
#include "omegacat/operads.hpp"

using namespace omega;

namespace {

FreeCell tree_cell(const TCollection& c, const Term& t) { return make_cell(c.carrier, t, Mode::involutive); }

int cell(const TCollection& c, int dim, const std::string& id) { return c.carrier->index(dim, id); }

bool has_family(const LawReport& r, const std::string& law) {
  for (auto& f : r.failures)
    if (f.law == law) return true;
  return false;
}

const FreeOperad& initial12() {
  static const FreeOperad f = initial_operad(1, 2, 2);
  return f;
}

std::map<int, long> stage_census(const FreeMagma& m, int dim) {
  std::map<int, long> out;
  for (auto& c : m.cells[dim]) ++out[c.stage];
  return out;
}

} // namespace

TEST_CASE("terminal operad examples") {
  ContractedOperad t = terminal_operad(1, 4);
  int p = cell(t.coll, 1, "(()())");
  FreeCell tau = tree_cell(t.coll, comp(0, gen(1, "(()()())"), gen(1, "(())")));
  auto m = t.mu(1, p, tau);
  REQUIRE(m.has_value());
  CHECK(t.coll.carrier->id(1, *m) == "(()()()())");
  // inputs must have the shape of the operation
  CHECK(!t.mu(1, cell(t.coll, 1, "(())"), tau));
  CHECK(t.coll.carrier->id(0, t.eta[0]) == "()");
  CHECK(t.coll.carrier->id(1, t.eta[1]) == "(())");
  int o = cell(t.coll, 0, "()");
  auto k = t.kappa({o, parse_tree("(()())"), o});
  REQUIRE(k.has_value());
  CHECK(t.coll.carrier->id(1, *k) == "(()())");
  // the unit tree of dimension 2 has two edges
  CHECK(terminal_operad(2, 1).eta[2] == -1);
}

TEST_CASE("terminal operad satisfies the laws and the contraction diagrams") {
  ContractedOperad t = terminal_operad(2, 3);
  LawOptions o;
  o.bound = 3;
  auto laws = check_operad_laws(t, o);
  CHECK(laws.failures.empty());
  CHECK(laws.checked > 0);
  auto c = check_operadic_contraction(t, o);
  CHECK(c.failures.empty());
  CHECK(c.checked > 0);
}

TEST_CASE("empty carrier passes vacuously") {
  OperadicMagma m;
  m.coll = empty_collection(1);
  m.eta = {-1, -1};
  m.mu = [](int, int, const FreeCell&) -> std::optional<int> { return std::nullopt; };
  m.kappa = [](const ParTriple&) -> std::optional<int> { return std::nullopt; };
  auto r = check_operad_laws(m, {});
  CHECK(r.failures.empty());
  CHECK(r.checked == 0);
}

TEST_CASE("perturbed structure is detected") {
  ContractedOperad t = terminal_operad(1, 3);
  auto mu = t.mu;
  int path2 = cell(t.coll, 1, "(()())"), path3 = cell(t.coll, 1, "(()()())");
  ContractedOperad bad = t;
  bad.mu = [mu, path2, path3](int n, int x, const FreeCell& tau) -> std::optional<int> {
    auto v = mu(n, x, tau);
    if (v && n == 1 && *v == path2) return path3;
    return v;
  };
  LawOptions o;
  o.bound = 3;
  CHECK(!check_operad_laws(bad, o).failures.empty());

  auto kappa = t.kappa;
  ContractedOperad twisted = t;
  twisted.kappa = [kappa, path2, path3](const ParTriple& tr) -> std::optional<int> {
    auto v = kappa(tr);
    if (v && *v == path2) return path3;
    return v;
  };
  auto r = check_operadic_contraction(twisted, o);
  CHECK(has_family(r, "contraction"));
}

TEST_CASE("free magma stage census") {
  const FreeMagma& m = initial12().free;
  // level 0: η at stage 0, everything else is built from it
  CHECK(stage_census(m, 0)[0] == 1);
  // level 1 stage 0: η and κ(η, y, η) for the 7 dimension-1 trees with at
  // most 2 edges: ()^1, two single edges, four two-edge paths
  CHECK(stage_census(m, 1)[0] == 8);
  for (int n = 0; n <= 1; ++n)
    for (auto& c : m.cells[n]) {
      CHECK(c.stage <= 2);
      if (c.kind != CellKind::gen) CHECK(tree_size(m.magma.coll.pi(n, &c - m.cells[n].data())) <= 2);
    }
  CHECK(validate_collection(m.magma.coll).empty());
}

TEST_CASE("contraction cells have the prescribed boundaries") {
  const FreeMagma& m = initial12().free;
  const GlobularSet& g = *m.magma.coll.carrier;
  long seen = 0;
  for (int i = 0; i < g.size(1); ++i) {
    auto& c = m.cells[1][i];
    if (c.kind != CellKind::kappa) continue;
    ++seen;
    CHECK(g.src(1, i) == c.triple.minus);
    CHECK(g.tgt(1, i) == c.triple.plus);
    CHECK(m.magma.coll.pi(1, i) == c.triple.shape);
    CHECK(m.magma.kappa(c.triple) == std::optional<int>(i));
  }
  CHECK(seen > 0);
}

TEST_CASE("raw magma fails the unit laws, the quotient satisfies them") {
  const FreeOperad& f = initial12();
  LawOptions o;
  o.max_stage = 0;
  auto raw = check_operad_laws(f.free.magma, o);
  CHECK(has_family(raw, "left-unit"));
  auto q = check_operad_laws(f.operad, o);
  CHECK(q.failures.empty());
  CHECK(q.checked > 0);
  o.max_stage = 1;
  CHECK(check_operad_laws(f.operad, o).failures.empty());
}

TEST_CASE("initial operad in dimension 0 is a point") {
  const FreeOperad& f = initial12();
  CHECK(f.operad.coll.size(0) == 1);
  CHECK(f.pairs > 0);
  CHECK(check_congruence(f.free.magma.coll, f.congruence).empty());
}

TEST_CASE("congruence closure matches the independent oracle") {
  FreeOperad f = initial_operad(1, 1, 2);
  CHECK(oracle_operad_classes(f.free) == f.congruence.classes());
  ClosureOptions plain;
  plain.close_contraction = false;
  auto c = operad_congruence(f.free, generating_pairs(f.free), plain);
  CHECK(oracle_operad_classes(f.free, plain) == c.classes());
}

TEST_CASE("unique morphism to the terminal operad") {
  const FreeOperad& f = initial12();
  ContractedOperad t = terminal_operad(1, 2);
  GlobularMorphism phi{f.zeta.dom, t.coll.carrier, std::vector<std::vector<int>>(2)};
  auto hat = universal_factorization(f, t, phi);
  // the factorization is the projection to arities
  CHECK(hat.map == projection_morphism(f.operad.coll, t.coll).map);
  auto all = structure_morphisms(f, t, phi, 2);
  REQUIRE(all.size() == 1);
  CHECK(all[0].map == hat.map);
}

TEST_CASE("factorization through random generators") {
  std::mt19937_64 rng(11);
  int done = 0;
  while (done < 5) {
    auto q = random_collection(rng, 1, 2, 1);
    if (!q) continue;
    ++done;
    FreeOperad f = free_contracted_operad(*q, 1, 1);
    ContractedOperad t = terminal_operad(1, 1);
    auto phi = projection_morphism(*q, t.coll);
    auto hat = universal_factorization(f, t, phi);
    CHECK(compose_morphisms(hat, f.zeta).map == phi.map);
    auto all = structure_morphisms(f, t, phi, 2);
    CHECK(all.size() == 1);
  }
}

TEST_CASE("factorization rejects a target without units") {
  FreeOperad f = initial_operad(2, 0, 1);
  ContractedOperad t = terminal_operad(2, 1);
  GlobularMorphism phi{f.zeta.dom, t.coll.carrier, std::vector<std::vector<int>>(3)};
  CHECK_THROWS_AS(universal_factorization(f, t, phi), DomainError);
}

TEST_CASE("algebras") {
  ContractedOperad t = terminal_operad(1, 3);
  LawOptions o;
  o.bound = 3;
  TAlgebra a = terminal_algebra(1, 3);
  auto r = check_algebra(t, a, o);
  CHECK(r.failures.empty());
  CHECK(r.checked > 0);

  auto act = a.act;
  int path2 = a.carrier->index(1, "(()())"), path1 = a.carrier->index(1, "(())");
  TAlgebra bad{a.carrier, [act, path2, path1](int n, int p, const FreeCell& x) -> std::optional<int> {
                 auto v = act(n, p, x);
                 if (v && n == 1 && *v == path2) return path1;
                 return v;
               }};
  CHECK(!check_algebra(t, bad, o).failures.empty());

  TAlgebra empty{empty_collection(1).carrier, [](int, int, const FreeCell&) -> std::optional<int> { return std::nullopt; }};
  auto e = check_algebra(t, empty, o);
  CHECK(e.failures.empty());
  CHECK(e.checked == 0);
}

TEST_CASE("the free contracted operad is not an operadic contraction") {
  // κ carries no compatibility with η, so κ(η⁰, unit, η⁰) stays a separate class
  FreeOperad f = initial_operad(1, 1, 1);
  auto r = check_operadic_contraction(f.operad, {});
  CHECK(has_family(r, "d1"));
  auto k = f.operad.kappa({f.operad.eta[0], tree_unit(1), f.operad.eta[0]});
  REQUIRE(k.has_value());
  CHECK(*k != f.operad.eta[1]);
}
