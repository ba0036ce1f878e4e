#include "omegacat/acceptance.hpp"

#include <algorithm>
#include <chrono>
#include <functional>
#include <map>
#include <random>
#include <set>
#include <sstream>
#include <unordered_map>
#include <unordered_set>

#include "omegacat/monad.hpp"
#include "omegacat/normalizer.hpp"
#include "omegacat/operads.hpp"

namespace omega {

namespace {

struct Outcome {
  bool pass;
  std::string detail;
};

// AC-1

Outcome ac1(const AcceptanceOptions&) {
  auto g = terminal_set(2);
  std::ostringstream out;
  long mismatches = 0, pairs = 0;
  for (Mode m : {Mode::strict, Mode::involutive}) {
    auto part = congruence_closure_oracle(*g, m, 6);
    std::vector<std::vector<size_t>> by_dim(3);
    for (size_t i = 0; i < part.terms.size(); ++i) by_dim[part.terms[i]->dim].push_back(i);
    // both sides must range over the same universe
    std::unordered_set<Term, TermHash, TermEq> oracle_terms(part.terms.begin(), part.terms.end());
    long enumerated = 0;
    for (int d = 0; d <= 2; ++d)
      for (auto& t : enumerate_terms(*g, m, 6, d)) {
        ++enumerated;
        if (!oracle_terms.count(t)) ++mismatches;
      }
    if (enumerated != static_cast<long>(part.terms.size())) ++mismatches;
    for (auto& idx : by_dim)
      for (size_t x = 0; x < idx.size(); ++x)
        for (size_t y = x + 1; y < idx.size(); ++y) {
          ++pairs;
          bool eq = equal_terms(*g, part.terms[idx[x]], part.terms[idx[y]], m);
          if (eq != (part.cls[idx[x]] == part.cls[idx[y]])) ++mismatches;
        }
    out << to_string(m) << ": " << part.terms.size() << " terms, " << part.num_classes << " classes; ";
  }
  out << pairs << " pairs, " << mismatches << " mismatches";
  return {mismatches == 0, out.str()};
}

// AC-2: trees reachable with at most max_cost constructor nodes, built by the
// tree algebra alone.
std::set<std::string> reachable_trees(int N, int max_cost) {
  std::set<std::string> seen;
  std::vector<std::vector<DecoratedTree>> stratum(max_cost + 1);
  auto offer = [&](int c, DecoratedTree t) {
    if (seen.insert(to_string(t)).second) stratum[c].push_back(std::move(t));
  };
  for (int d = 0; d <= N; ++d) offer(1, tree_unit(d));
  for (int c = 2; c <= max_cost; ++c) {
    for (auto& t : stratum[c - 1]) {
      if (t.dim < N) offer(c, tree_id(t));
      for (int q = 0; q < t.dim; ++q) offer(c, tree_inv(q, t));
    }
    for (int a = 1; a <= c - 2; ++a) {
      int b = c - 1 - a;
      for (int p = 0; p < N; ++p) {
        std::unordered_map<std::string, std::vector<const DecoratedTree*>> by_bd;
        for (auto& r : stratum[b])
          if (r.dim > p) by_bd[to_string(tree_iterated_boundary(r, r.dim - p))].push_back(&r);
        std::vector<DecoratedTree> made;
        for (auto& l : stratum[a]) {
          if (l.dim <= p) continue;
          auto it = by_bd.find(to_string(tree_iterated_boundary(l, l.dim - p)));
          if (it == by_bd.end()) continue;
          for (auto r : it->second)
            if (r->dim == l.dim)
              if (auto t = tree_comp(p, l, *r)) made.push_back(std::move(*t));
        }
        for (auto& t : made) offer(c, std::move(t));
      }
    }
  }
  return seen;
}

Outcome ac2(const AcceptanceOptions&) {
  const int N = 3, nodes = 9; // 9 nodes admit at most 5 generator occurrences
  auto g = terminal_base(N);
  auto part = congruence_closure_oracle(*g, Mode::involutive, nodes);
  std::unordered_map<int, std::string> class_tree;
  std::unordered_map<std::string, int> tree_class;
  long not_constant = 0, not_injective = 0, invalid = 0, roundtrip = 0, over_gens = 0;
  for (size_t i = 0; i < part.terms.size(); ++i) {
    if (gen_count(part.terms[i]) > 5) ++over_gens;
    FreeCell c = make_cell(g, part.terms[i], Mode::involutive);
    DecoratedTree t = tree_encode(c);
    std::string key = to_string(t);
    auto [it, fresh] = class_tree.emplace(part.cls[i], key);
    if (!fresh && it->second != key) ++not_constant;
    if (fresh) {
      if (!validate_tree(t, Mode::involutive).empty()) ++invalid;
      if (!(tree_decode(t, Mode::involutive, N) == c)) ++roundtrip;
      auto [jt, new_tree] = tree_class.emplace(key, part.cls[i]);
      if (!new_tree && jt->second != part.cls[i]) ++not_injective;
    }
  }
  auto trees = reachable_trees(N, nodes);
  long missing = 0;
  for (auto& k : trees)
    if (!tree_class.count(k)) ++missing;
  std::ostringstream out;
  out << part.terms.size() << " terms, " << part.num_classes << " classes, " << trees.size()
      << " trees; non-constant " << not_constant << ", collisions " << not_injective << ", invalid " << invalid
      << ", round-trip " << roundtrip << ", unmatched trees " << missing << ", over 5 generators " << over_gens;
  bool pass = not_constant == 0 && not_injective == 0 && invalid == 0 && roundtrip == 0 && missing == 0 &&
              over_gens == 0 && static_cast<long>(trees.size()) == part.num_classes;
  return {pass, out.str()};
}

// AC-3

Outcome ac3(const AcceptanceOptions& opts) {
  std::ostringstream out;
  long failures = 0, checked = 0;
  std::vector<std::pair<std::string, GSetPtr>> sets = {{"terminal", terminal_base(2)}, {"theta", theta_set()}};
  for (auto& [name, q] : sets)
    for (Mode m : {Mode::strict, Mode::involutive}) {
      MonadCheckOptions o;
      o.samples = 200;
      o.seed = opts.seed;
      auto rep = check_monad_laws(q, m, o);
      failures += static_cast<long>(rep.failures.size());
      checked += rep.checked;
      if (!rep.failures.empty())
        out << name << "/" << to_string(m) << " " << rep.failures.front().law << " at " << rep.failures.front().term << "; ";
    }
  out << checked << " law instances over 800 staged cells, " << failures << " failures";
  return {failures == 0, out.str()};
}

// AC-4

Outcome ac4(const AcceptanceOptions& opts) {
  std::mt19937_64 rng(opts.seed);
  long failures = 0, checked = 0;
  int morphisms = 0;
  while (morphisms < 20) {
    auto q = random_globular(rng, 2, 4);
    auto r = random_globular(rng, 2, 4);
    auto phi = random_morphism(q, r, rng);
    if (!phi) continue;
    ++morphisms;
    Mode m = morphisms % 2 ? Mode::involutive : Mode::strict;
    CartesianOptions unit;
    unit.max_leaves = 3;
    auto a = check_cartesian(Square::unit, *phi, m, unit);
    CartesianOptions mult;
    mult.max_leaves = 2;
    mult.outer_leaves = 2;
    mult.max_dim = 1;
    auto b = check_cartesian(Square::mult, *phi, m, mult);
    failures += static_cast<long>(a.failures.size() + b.failures.size());
    checked += a.checked + b.checked;
  }
  std::ostringstream out;
  out << morphisms << " morphisms, " << checked << " competing spans, " << failures << " failures";
  return {failures == 0 && checked > 0, out.str()};
}

// AC-5

Outcome ac5(const AcceptanceOptions&) {
  ContractedOperad t = terminal_operad(2, 3);
  LawOptions o;
  o.bound = 3;
  auto laws = check_operad_laws(t, o);
  auto con = check_operadic_contraction(t, o);
  std::map<std::string, long> by_law;
  for (auto& f : con.failures) ++by_law[f.law];
  std::ostringstream out;
  out << laws.checked << " law instances, " << laws.failures.size() << " failures; " << con.checked
      << " contraction instances (" << con.skipped << " outside the bound), " << con.failures.size() << " failures";
  for (auto& [law, n] : by_law) out << "; " << law << " " << n;
  return {laws.failures.empty() && con.failures.empty() && laws.checked > 0 && con.checked > 0, out.str()};
}

// AC-6

Outcome ac6(const AcceptanceOptions&) {
  FreeOperad f = initial_operad(1, 2, 2);
  LawOptions o;
  o.max_stage = 1;
  auto laws = check_operad_laws(f.operad, o);
  auto oracle = oracle_operad_classes(f.free);
  auto classes = f.congruence.classes();
  long differing = 0, cells = 0;
  for (int n = 0; n <= 1; ++n) {
    cells += f.free.magma.coll.size(n);
    for (int i = 0; i < f.free.magma.coll.size(n); ++i)
      if (oracle[n][i] != classes[n][i]) ++differing;
  }
  std::ostringstream out;
  out << cells << " raw cells, " << f.operad.coll.size(0) << "+" << f.operad.coll.size(1) << " classes, "
      << laws.checked << " law instances (" << laws.skipped << " leave the bound), " << laws.failures.size() << " failures, " << differing
      << " cells classified differently by the oracle";
  if (!laws.failures.empty()) out << "; first: " << laws.failures.front().law << " at " << laws.failures.front().term;
  return {laws.failures.empty() && laws.checked > 0 && differing == 0 && oracle == classes, out.str()};
}

// AC-7

Outcome ac7(const AcceptanceOptions& opts) {
  std::mt19937_64 rng(opts.seed);
  const int N = 2, depth = 1, shape_bound = 1;
  ContractedOperad t = terminal_operad(N, N);
  int done = 0;
  long mismatches = 0, not_unique = 0, raw = 0;
  while (done < 50) {
    auto q = random_collection(rng, N, 3, shape_bound);
    if (!q) continue;
    ++done;
    FreeOperad f = free_contracted_operad(*q, depth, shape_bound);
    for (int n = 0; n <= N; ++n) raw += f.free.magma.coll.size(n);
    auto phi = projection_morphism(*q, t.coll);
    auto hat = universal_factorization(f, t, phi);
    if (compose_morphisms(hat, f.zeta).map != phi.map) ++mismatches;
    auto all = structure_morphisms(f, t, phi, 2);
    if (all.size() != 1 || all[0].map != hat.map) ++not_unique;
  }
  std::ostringstream out;
  out << done << " morphisms over " << raw << " raw cells; " << mismatches << " failed φ̂∘ζ = φ, " << not_unique
      << " not unique";
  return {mismatches == 0 && not_unique == 0, out.str()};
}

// AC-8

Outcome ac8(const AcceptanceOptions& opts) {
  long failures = 0, checks = 0;
  std::string first;
  auto expect = [&](const GlobularSet& g, const std::string& law, const Term& a, const Term& b) {
    ++checks;
    if (!term_equal(normalize(g, a, Mode::involutive), normalize(g, b, Mode::involutive))) {
      ++failures;
      if (first.empty()) first = law + " at " + to_string(a);
    }
  };
  std::vector<GSetPtr> sets = {terminal_base(3), theta_set()};
  int sampled = 0;
  for (size_t k = 0; k < sets.size(); ++k) {
    const GlobularSet& g = *sets[k];
    TermSampler s(g, Mode::involutive, opts.seed + k);
    int got = 0, composites = 0;
    while (got < 250) {
      Term t = s.sample_any();
      if (t->dim == 0) continue;
      ++got;
      int n = t->dim;
      for (int q = 0; q < n; ++q) {
        expect(g, "double-involution", inv(q, inv(q, t)), t);
        for (int p = 0; p < n; ++p) expect(g, "involution-commutativity", inv(p, inv(q, t)), inv(q, inv(p, t)));
      }
      for (int q = n; q <= n + 1; ++q) expect(g, "grounding", inv(q, t), t);
      if (n + 1 <= g.max_dim()) {
        for (int q = 0; q < n; ++q) expect(g, "identity-compatibility", inv(q, id_term(t)), id_term(inv(q, t)));
        expect(g, "identity-compatibility", inv(n, id_term(t)), id_term(t));
      }
      if (t->kind == TermKind::comp) {
        ++composites;
        int p = t->index;
        for (int q = 0; q < n; ++q) {
          if (q == p)
            expect(g, "contravariance", inv(q, t), comp(p, inv(q, t->b), inv(q, t->a)));
          else
            expect(g, "covariance", inv(q, t), comp(p, inv(q, t->a), inv(q, t->b)));
        }
      }
    }
    sampled += got;
    if (composites == 0) {
      ++failures;
      first = "no composite terms sampled";
    }
  }
  std::ostringstream out;
  out << sampled << " terms, " << checks << " equalities, " << failures << " failures";
  if (!first.empty()) out << "; first: " << first;
  return {failures == 0, out.str()};
}

// AC-9

Outcome ac9(const AcceptanceOptions&) {
  TCollection t = tree_collection(2, 2);
  auto l = left_unitor(t, 2);
  auto r = right_unitor(t, 2);
  auto p = pentagon_witness(t, t, t, t, 2);
  long failures = static_cast<long>(l.violations.size() + r.violations.size() + p.violations.size());
  std::ostringstream out;
  out << "unitors " << l.checked << "+" << r.checked << " cells, pentagon " << p.checked << " cells, " << failures
      << " failures";
  for (auto* v : {&l.violations, &r.violations, &p.violations})
    if (!v->empty()) {
      out << "; first: " << v->front().kind << " at " << v->front().where;
      break;
    }
  return {failures == 0 && l.checked > 0 && r.checked > 0 && p.checked > 0, out.str()};
}

struct Criterion {
  std::string id;
  std::string title;
  double limit;
  std::function<Outcome(const AcceptanceOptions&)> run;
};

const std::vector<Criterion>& criteria() {
  static const std::vector<Criterion> all = {
      {"AC-1", "normalizer completeness", 120, ac1},
      {"AC-2", "decorated-tree codec", 60, ac2},
      {"AC-3", "monad laws", 30, ac3},
      {"AC-4", "cartesian squares", 60, ac4},
      {"AC-5", "terminal operad", 30, ac5},
      {"AC-6", "free contracted operad", 120, ac6},
      {"AC-7", "universal factorization", 60, ac7},
      {"AC-8", "involution laws", 30, ac8},
      {"AC-9", "span bicategory", 30, ac9},
  };
  return all;
}

} // namespace

std::vector<std::string> acceptance_ids() {
  std::vector<std::string> ids;
  for (auto& c : criteria()) ids.push_back(c.id);
  return ids;
}

CriterionResult run_criterion(const std::string& id, const AcceptanceOptions& opts) {
  for (auto& c : criteria()) {
    if (c.id != id) continue;
    CriterionResult r{c.id, c.title, false, "", 0, c.limit};
    auto t0 = std::chrono::steady_clock::now();
    try {
      Outcome o = c.run(opts);
      r.pass = o.pass;
      r.detail = o.detail;
    } catch (const std::exception& e) {
      r.pass = false;
      r.detail = std::string("exception: ") + e.what();
    }
    r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    if (r.seconds > r.limit) {
      r.pass = false;
      r.detail += "; runtime over limit";
    }
    return r;
  }
  throw DomainError("unknown acceptance criterion " + id);
}

std::vector<CriterionResult> run_acceptance(const AcceptanceOptions& opts) {
  std::vector<CriterionResult> out;
  for (auto& c : criteria()) {
    if (!opts.only.empty() && std::find(opts.only.begin(), opts.only.end(), c.id) == opts.only.end()) continue;
    out.push_back(run_criterion(c.id, opts));
  }
  return out;
}

std::string format_result(const CriterionResult& r) {
  std::ostringstream out;
  out.setf(std::ios::fixed);
  out.precision(2);
  out << r.id << " " << (r.pass ? "PASS" : "FAIL") << " " << r.title << ": " << r.detail << " (" << r.seconds
      << " s, limit " << r.limit << " s)";
  return out.str();
}

} // namespace omega
