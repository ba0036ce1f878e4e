#include "omegacat/operads.hpp"

#include <algorithm>
#include <set>

#include "omegacat/normalizer.hpp"

namespace omega {

namespace {

FreeCell single(const GSetPtr& g, int dim, int i) { return make_cell(g, gen(dim, g->id(dim, i)), Mode::involutive); }

FreeCell cell_of(const GSetPtr& g, const Pasting& p) { return FreeCell{g, Mode::involutive, readback(*g, p)}; }

// T̂*(η)(y): the tree y with every leaf labelled by the unit of its depth.
std::optional<FreeCell> unit_inputs(const OperadicMagma& m, const DecoratedTree& y) {
  FreeCell t = tree_decode(y, Mode::involutive, m.max_dim());
  return relabel_cell(t, m.coll.carrier, [&](int d, int) -> std::optional<int> {
    if (m.eta[d] < 0) return std::nullopt;
    return m.eta[d];
  });
}

template <class F>
void for_each_leaf(const PNode& v, int depth, F&& f) {
  if (v.kids.empty()) {
    f(v.label, depth);
    return;
  }
  for (auto& w : v.kids) for_each_leaf(w, depth + 1, f);
}

void relabel_leaves(PNode& v, int depth, const std::function<int(int, int)>& f) {
  if (v.kids.empty()) {
    v.label.cell = f(depth, v.label.cell);
    return;
  }
  for (auto& w : v.kids) relabel_leaves(w, depth + 1, f);
}

// Σ of a pasting whose leaves are composite elements (q, σ): substitute each σ.
FreeCell flatten_second(const Composite& c, const FreeCell& psi, const GSetPtr& into) {
  Term t = substitute(psi.nf, [&](const CellRef& r) { return c.pairs[r.dim][c.coll.carrier->index(r)].second.nf; });
  return make_cell(into, t, Mode::involutive);
}

std::function<bool(int, int)> stage_filter(const OperadicMagma& m, int max_stage) {
  if (max_stage < 0) return {};
  return [&m, max_stage](int d, int i) { return m.stage_of(d, i) <= max_stage; };
}

void count_budget(long& used, long budget, const char* what) {
  if (++used > budget) throw ResourceError(std::string(what) + ": more than " + std::to_string(budget) + " configurations");
}

} // namespace

ContractedOperad terminal_operad(int N, int bound) {
  ContractedOperad p;
  p.coll = tree_collection(N, bound);
  p.shape_bound = bound;
  auto coll = std::make_shared<TCollection>(p.coll);
  for (int n = 0; n <= N; ++n) p.eta.push_back(coll->carrier->index(n, to_string(tree_unit(n))));
  p.mu = [coll](int n, int x, const FreeCell& tau) -> std::optional<int> {
    if (!(shape_tree(tau) == coll->pi(n, x))) return std::nullopt;
    int i = coll->carrier->index(n, to_string(graft(*coll, tau)));
    if (i < 0) return std::nullopt;
    return i;
  };
  p.kappa = [coll](const ParTriple& t) -> std::optional<int> {
    if (!is_par(*coll, t)) return std::nullopt;
    int i = coll->carrier->index(t.dim(), to_string(t.shape));
    if (i < 0) return std::nullopt;
    return i;
  };
  return p;
}

LawReport check_operad_laws(const OperadicMagma& m, const LawOptions& opts) {
  LawReport r;
  const GlobularSet& g = *m.coll.carrier;
  auto ok = stage_filter(m, opts.max_stage);
  long used = 0;
  for (int n = 0; n <= m.max_dim(); ++n)
    for (int p = 0; p < g.size(n); ++p) {
      if (ok && !ok(n, p)) continue;
      std::optional<int> l = m.eta[n] >= 0 ? m.mu(n, m.eta[n], single(m.coll.carrier, n, p)) : std::nullopt;
      if (!l) {
        ++r.skipped;
      } else {
        ++r.checked;
        if (*l != p) r.failures.push_back({"left-unit", g.id(n, p), "μ(η, [p]) = " + g.id(n, *l)});
      }
      auto units = unit_inputs(m, m.coll.pi(n, p));
      std::optional<int> rr = units ? m.mu(n, p, *units) : std::nullopt;
      if (!rr) {
        ++r.skipped;
      } else {
        ++r.checked;
        if (*rr != p) r.failures.push_back({"right-unit", g.id(n, p), "μ(p, T(η)π(p)) = " + g.id(n, *rr)});
      }
    }

  ComposeOptions co;
  co.bound = opts.bound;
  co.max_weight = opts.bound;
  co.left_allowed = ok;
  co.right_allowed = ok;
  Composite mm = compose_collections(m.coll, m.coll, co);
  for (int n = 0; n <= m.max_dim(); ++n)
    for (int p = 0; p < g.size(n); ++p) {
      if (ok && !ok(n, p)) continue;
      int wp = tree_size(m.coll.pi(n, p));
      if (wp > opts.bound) continue;
      for_each_cell_of_shape(
          mm.coll.carrier, Mode::involutive, m.coll.pi(n, p),
          [&](int d, int c) { return wp + mm.weight[d][c] <= opts.bound; },
          [&](const FreeCell& psi, const Pasting& pt) {
            int w = wp;
            for_each_leaf(pt.root, 0, [&](const Label& l, int d) { w += mm.weight[d][l.cell]; });
            if (w > opts.bound) return;
            count_budget(used, opts.budget, "check_operad_laws");
            auto inner = relabel_cell(psi, m.coll.carrier, [&](int d, int c) {
              return m.mu(d, mm.pairs[d][c].first, mm.pairs[d][c].second);
            });
            std::optional<int> lhs = inner ? m.mu(n, p, *inner) : std::nullopt;
            auto firsts =
                relabel_cell(psi, m.coll.carrier, [&](int d, int c) -> std::optional<int> { return mm.pairs[d][c].first; });
            std::optional<int> x = firsts ? m.mu(n, p, *firsts) : std::nullopt;
            std::optional<int> rhs = x ? m.mu(n, *x, flatten_second(mm, psi, m.coll.carrier)) : std::nullopt;
            if (!lhs || !rhs) {
              ++r.skipped;
              return;
            }
            ++r.checked;
            if (*lhs != *rhs)
              r.failures.push_back({"associativity", g.id(n, p) + " " + psi.key(),
                                    "μ(p, T(μ)Ψ) = " + g.id(n, *lhs) + ", μ(μ(p, T(pr₁)Ψ), ΣΨ) = " + g.id(n, *rhs)});
          });
    }
  return r;
}

namespace {

// T̂*(κ)(τ⁺, υ, τ⁻) on pastings: one contraction cell per top leaf of υ.
bool contract_leaves(const ContractedOperad& p, const TCollection& trees, const PNode& u, const PNode& plus,
                     const PNode& minus, int depth, int n, PNode& out) {
  if (u.kids.empty() && depth < n) {
    if (!(plus.label == minus.label)) return false;
    out.label = plus.label;
    return true;
  }
  if (depth == n - 1) {
    if (u.kids.size() != 1 || !u.kids[0].kids.empty()) return false;
    const Label& z = u.kids[0].label;
    unsigned top = 1u << (n - 1);
    int cp = plus.label.cell, cm = minus.label.cell;
    if (z.mask & top) std::swap(cp, cm);
    auto k = p.kappa(ParTriple{cp, trees.pi(n, z.cell), cm});
    if (!k) return false;
    out.kids.assign(1, PNode{});
    out.kids[0].label = {*k, z.mask};
    return true;
  }
  if (u.kids.size() != plus.kids.size() || u.kids.size() != minus.kids.size()) return false;
  out.kids.resize(u.kids.size());
  for (size_t i = 0; i < u.kids.size(); ++i)
    if (!contract_leaves(p, trees, u.kids[i], plus.kids[i], minus.kids[i], depth + 1, n, out.kids[i])) return false;
  return true;
}

} // namespace

LawReport check_operadic_contraction(const ContractedOperad& p, const LawOptions& opts) {
  LawReport r;
  const GSetPtr& gp = p.coll.carrier;
  const GlobularSet& g = *gp;
  int N = p.max_dim();
  for (auto& v : validate_contraction(p.coll, p.kappa, p.shape_bound))
    r.failures.push_back({"contraction", v.where, v.kind + ": " + v.detail});

  // d1: Par(π_•) is {(•, unit(n), •)}, sent to (η, unit(n), η).
  for (int n = 1; n <= N; ++n) {
    if (p.eta[n - 1] < 0 || p.eta[n] < 0) {
      ++r.skipped;
      continue;
    }
    ++r.checked;
    auto k = p.kappa({p.eta[n - 1], tree_unit(n), p.eta[n - 1]});
    if (!k || *k != p.eta[n])
      r.failures.push_back({"d1", std::to_string(n), "κ(η, unit, η) = " + (k ? g.id(n, *k) : std::string("undefined"))});
  }

  // d2
  auto ok = stage_filter(p, opts.max_stage);
  TCollection trees = tree_collection(N, opts.bound);
  // π-image of a pasting over P, as a pasting over the tree carrier
  auto project = [&](const Pasting& x) -> std::optional<Pasting> {
    Pasting y = x;
    bool fits = true;
    relabel_leaves(y.root, 0, [&](int d, int c) {
      int i = trees.carrier->index(d, to_string(p.coll.pi(d, c)));
      if (i < 0) fits = false;
      return i;
    });
    if (!fits) return std::nullopt;
    return y;
  };
  long used = 0;
  for (int n = 1; n <= N; ++n) {
    std::map<DecoratedTree, std::unordered_map<std::string, std::vector<std::pair<FreeCell, Pasting>>>> inputs;
    auto inputs_over = [&](const DecoratedTree& shape) -> auto& {
      auto it = inputs.find(shape);
      if (it != inputs.end()) return it->second;
      auto& bucket = inputs[shape];
      for_each_cell_of_shape(gp, Mode::involutive, shape, ok, [&](const FreeCell& tau, const Pasting& pt) {
        if (auto y = project(pt)) bucket[pasting_key(*y)].push_back({tau, pt});
      });
      return bucket;
    };
    for (auto& t : par_set(p.coll, n, opts.bound)) {
      if (ok && (!ok(n - 1, t.plus) || !ok(n - 1, t.minus))) continue;
      auto k = p.kappa(t);
      if (!k) {
        ++r.skipped;
        continue;
      }
      DecoratedTree bd = tree_boundary(t.shape);
      auto& bucket = inputs_over(bd);
      for_each_cell_of_shape(trees.carrier, Mode::involutive, t.shape, {}, [&](const FreeCell& ups, const Pasting& upt) {
        DecoratedTree flat = graft(trees, ups);
        if (tree_size(flat) > opts.bound) return;
        auto plus_it = bucket.find(pasting_key(pasting_boundary(*trees.carrier, upt, Side::target)));
        auto minus_it = bucket.find(pasting_key(pasting_boundary(*trees.carrier, upt, Side::source)));
        if (plus_it == bucket.end() || minus_it == bucket.end()) return;
        for (auto& [tp, pp] : plus_it->second)
          for (auto& [tm, pm] : minus_it->second) {
            if (n - 1 >= 1) {
              if (g.src(n - 1, t.plus) != g.src(n - 1, t.minus) || g.tgt(n - 1, t.plus) != g.tgt(n - 1, t.minus)) continue;
              if (!(pasting_boundary(g, pp, Side::source) == pasting_boundary(g, pm, Side::source)) ||
                  !(pasting_boundary(g, pp, Side::target) == pasting_boundary(g, pm, Side::target)))
                continue;
            }
            count_budget(used, opts.budget, "check_operadic_contraction");
            auto mp = p.mu(n - 1, t.plus, tp), mm = p.mu(n - 1, t.minus, tm);
            if (!mp || !mm) {
              ++r.skipped;
              continue;
            }
            std::string where = to_string(p.coll, t) + " " + ups.key();
            ParTriple top{*mp, flat, *mm};
            if (!is_par(p.coll, top)) {
              r.failures.push_back({"d2", where, "Par_μ does not land in Par"});
              continue;
            }
            auto lhs = p.kappa(top);
            Pasting kp;
            kp.dim = n;
            if (!lhs || !contract_leaves(p, trees, upt.root, pp.root, pm.root, 0, n, kp.root)) {
              ++r.skipped;
              continue;
            }
            FreeCell kc = cell_of(gp, kp);
            bool valid = true;
            try {
              valid = eval(g, kc.nf) == kp;
            } catch (const DomainError&) {
              valid = false;
            }
            auto rhs = valid ? p.mu(n, *k, kc) : std::nullopt;
            if (!rhs) {
              ++r.skipped;
              continue;
            }
            ++r.checked;
            if (*lhs != *rhs)
              r.failures.push_back({"d2", where, "κ∘Par_μ = " + g.id(n, *lhs) + ", μ∘(κ∘κ) = " + g.id(n, *rhs)});
          }
      });
    }
  }
  return r;
}

std::optional<int> FreeMagma::find_mu(int dim, int x, const FreeCell& tau) const {
  auto& m = index->mu[dim];
  auto it = m.find(std::to_string(x) + "|" + tau.key());
  if (it == m.end()) return std::nullopt;
  return it->second;
}

FreeMagma free_operadic_magma(const TCollection& q, int depth, int shape_bound, long budget) {
  int N = q.max_dim();
  FreeMagma f;
  f.depth = depth;
  f.index = std::make_shared<FreeMagma::Index>();
  f.index->mu.resize(N + 1);
  f.index->kappa.resize(N + 1);
  auto g = std::make_shared<GlobularSet>(N);
  TCollection& coll = f.magma.coll;
  coll.carrier = g;
  coll.proj.resize(N + 1);
  f.cells.resize(N + 1);
  f.magma.stage.resize(N + 1);
  f.magma.eta.assign(N + 1, -1);
  f.magma.shape_bound = shape_bound;
  f.xi = {q.carrier, g, std::vector<std::vector<int>>(N + 1)};
  long used = 0, visited = 0;
  auto add = [&](int n, FreeOperadCell c, const std::string& id, int s, int t, DecoratedTree arity) {
    if (++used > budget) throw ResourceError("free_operadic_magma: more than " + std::to_string(budget) + " cells");
    int i = n == 0 ? g->add(0, id) : g->add(n, id, s, t);
    coll.proj[n].push_back(std::move(arity));
    f.magma.stage[n].push_back(c.stage);
    f.cells[n].push_back(std::move(c));
    return i;
  };
  for (int n = 0; n <= N; ++n) {
    for (int i = 0; i < q.size(n); ++i) {
      FreeOperadCell c;
      c.kind = CellKind::gen;
      c.gen = i;
      int s = n ? f.xi.map[n - 1][q.carrier->src(n, i)] : -1, t = n ? f.xi.map[n - 1][q.carrier->tgt(n, i)] : -1;
      f.xi.map[n].push_back(add(n, c, "q:" + q.carrier->id(n, i), s, t, q.pi(n, i)));
    }
    FreeOperadCell e;
    e.kind = CellKind::eta;
    f.magma.eta[n] = add(n, e, "eta", n ? f.magma.eta[n - 1] : -1, n ? f.magma.eta[n - 1] : -1, tree_unit(n));
    if (n >= 1)
      for (auto& t : par_set(coll, n, shape_bound)) {
        FreeOperadCell c;
        c.kind = CellKind::kappa;
        c.triple = t;
        c.stage = std::max(f.magma.stage[n - 1][t.plus], f.magma.stage[n - 1][t.minus]);
        std::string id = "k[" + g->id(n - 1, t.plus) + "|" + to_string(t.shape) + "|" + g->id(n - 1, t.minus) + "]";
        f.index->kappa[n][t] = add(n, c, id, t.minus, t.plus, t.shape);
      }
    for (int k = 1; k <= depth; ++k) {
      struct Pending {
        FreeOperadCell cell;
        std::string key;
        int s, t;
        DecoratedTree arity;
      };
      std::vector<Pending> fresh;
      int existing = g->size(n);
      for (int x = 0; x < existing; ++x) {
        int rx = f.magma.stage[n][x];
        if (rx > k - 1) continue;
        for_each_cell_of_shape(
            g, Mode::involutive, coll.pi(n, x), [&](int d, int c) { return f.magma.stage[d][c] <= k - 1 - rx; },
            [&](const FreeCell& tau, const Pasting& pt) {
              if (++visited > budget)
                throw ResourceError("free_operadic_magma: more than " + std::to_string(budget) + " configurations");
              int top = 0;
              for_each_leaf(pt.root, 0, [&](const Label& l, int d) { top = std::max(top, f.magma.stage[d][l.cell]); });
              if (rx + top + 1 != k) return;
              DecoratedTree arity = graft(coll, tau);
              if (tree_size(arity) > shape_bound) return;
              int s = -1, t = -1;
              if (n >= 1) {
                auto a = f.find_mu(n - 1, g->src(n, x), cell_of(g, pasting_boundary(*g, pt, Side::source)));
                auto b = f.find_mu(n - 1, g->tgt(n, x), cell_of(g, pasting_boundary(*g, pt, Side::target)));
                if (!a || !b) throw DomainError("free_operadic_magma: missing boundary of a multiplication cell");
                s = *a;
                t = *b;
              }
              FreeOperadCell c;
              c.kind = CellKind::mu;
              c.x = x;
              c.tau = tau;
              c.stage = k;
              fresh.push_back({std::move(c), std::to_string(x) + "|" + tau.key(), s, t, std::move(arity)});
            });
      }
      for (auto& p : fresh) {
        std::string id = "m[" + g->id(n, p.cell.x) + "|" + p.cell.tau.key() + "]";
        f.index->mu[n][p.key] = add(n, std::move(p.cell), id, p.s, p.t, std::move(p.arity));
      }
    }
  }
  auto index = f.index;
  f.magma.mu = [index](int n, int x, const FreeCell& tau) -> std::optional<int> {
    auto it = index->mu[n].find(std::to_string(x) + "|" + tau.key());
    if (it == index->mu[n].end()) return std::nullopt;
    return it->second;
  };
  f.magma.kappa = [index](const ParTriple& t) -> std::optional<int> {
    if (t.dim() < 1 || t.dim() >= static_cast<int>(index->kappa.size())) return std::nullopt;
    auto it = index->kappa[t.dim()].find(t);
    if (it == index->kappa[t.dim()].end()) return std::nullopt;
    return it->second;
  };
  return f;
}

std::vector<GeneratingPair> generating_pairs(const FreeMagma& m) {
  std::vector<GeneratingPair> out;
  const GSetPtr& g = m.magma.coll.carrier;
  for (int n = 0; n <= m.magma.max_dim(); ++n)
    for (int x = 0; x < g->size(n); ++x) {
      if (auto l = m.find_mu(n, m.magma.eta[n], single(g, n, x))) out.push_back({"left-unit", n, x, *l});
      if (auto units = unit_inputs(m.magma, m.magma.coll.pi(n, x)))
        if (auto r = m.find_mu(n, x, *units)) out.push_back({"right-unit", n, x, *r});
    }
  for (int n = 0; n <= m.magma.max_dim(); ++n)
    for (int i = 0; i < g->size(n); ++i) {
      const FreeOperadCell& c = m.cells[n][i];
      if (c.kind != CellKind::mu) continue;
      Pasting pt = eval(*g, c.tau.nf);
      bool nested = true;
      for_each_leaf(pt.root, 0, [&](const Label& l, int d) { nested &= m.cells[d][l.cell].kind == CellKind::mu; });
      if (!nested) continue;
      auto firsts = relabel_cell(c.tau, g, [&](int d, int k) -> std::optional<int> { return m.cells[d][k].x; });
      if (!firsts) continue;
      auto inner = m.find_mu(n, c.x, *firsts);
      if (!inner) continue;
      Term flat = substitute(c.tau.nf, [&](const CellRef& r) { return m.cells[r.dim][g->index(r)].tau.nf; });
      if (auto outer = m.find_mu(n, *inner, make_cell(g, flat, Mode::involutive)))
        out.push_back({"associativity", n, i, *outer});
    }
  return out;
}

Congruence operad_congruence(const FreeMagma& m, const std::vector<GeneratingPair>& pairs, const ClosureOptions& opts) {
  const GlobularSet& g = *m.magma.coll.carrier;
  int N = g.max_dim();
  Congruence e(g);
  for (auto& p : pairs) e.merge(p.dim, p.a, p.b);
  std::vector<std::vector<std::pair<int, Pasting>>> mus(N + 1);
  for (int n = 0; n <= N; ++n)
    for (int i = 0; i < g.size(n); ++i)
      if (m.cells[n][i].kind == CellKind::mu) mus[n].push_back({i, eval(g, m.cells[n][i].tau.nf)});
  bool changed = true;
  while (changed) {
    changed = false;
    for (int n = N; n >= 1; --n)
      for (int i = 0; i < g.size(n); ++i) {
        int r = e.find(n, i);
        if (r == i) continue;
        changed |= e.merge(n - 1, g.src(n, i), g.src(n, r));
        changed |= e.merge(n - 1, g.tgt(n, i), g.tgt(n, r));
      }
    for (int n = 0; n <= N; ++n) {
      if (opts.close_contraction && n >= 1) {
        std::unordered_map<std::string, int> seen;
        for (auto& [t, i] : m.index->kappa[n]) {
          std::string key = std::to_string(e.find(n - 1, t.plus)) + "|" + to_string(t.shape) + "|" +
                            std::to_string(e.find(n - 1, t.minus));
          auto [it, fresh] = seen.emplace(key, i);
          if (!fresh) changed |= e.merge(n, it->second, i);
        }
      }
      std::unordered_map<std::string, int> seen;
      for (auto& [i, pt] : mus[n]) {
        Pasting rel = pt;
        relabel_leaves(rel.root, 0, [&](int d, int c) { return e.find(d, c); });
        std::string key = std::to_string(e.find(n, m.cells[n][i].x)) + "|" + pasting_key(rel);
        auto [it, fresh] = seen.emplace(key, i);
        if (!fresh) changed |= e.merge(n, it->second, i);
      }
    }
  }
  return e;
}

namespace {

std::string labelled_skeleton(const PNode& v, int depth, const std::vector<std::vector<int>>& comp) {
  if (v.kids.empty()) return std::to_string(comp[depth][v.label.cell]) + "^" + std::to_string(v.label.mask);
  std::string s = "(";
  for (auto& w : v.kids) s += labelled_skeleton(w, depth + 1, comp) + ",";
  return s + ")";
}

} // namespace

std::vector<std::vector<int>> oracle_operad_classes(const FreeMagma& m, const ClosureOptions& opts) {
  const GSetPtr& gp = m.magma.coll.carrier;
  const GlobularSet& g = *gp;
  int N = g.max_dim();
  std::vector<std::set<std::pair<int, int>>> edges(N + 1);
  auto relate = [&](int n, int a, int b) {
    if (a == b) return false;
    return edges[n].insert({std::min(a, b), std::max(a, b)}).second;
  };

  // Multiplication cells by (operation, pasting), independently of the construction index.
  std::vector<std::map<std::pair<int, std::string>, int>> raw(N + 1);
  std::vector<std::vector<Pasting>> pastings(N + 1);
  for (int n = 0; n <= N; ++n) {
    pastings[n].resize(g.size(n));
    for (int i = 0; i < g.size(n); ++i)
      if (m.cells[n][i].kind == CellKind::mu) {
        pastings[n][i] = eval(g, m.cells[n][i].tau.nf);
        raw[n][{m.cells[n][i].x, pasting_key(pastings[n][i])}] = i;
      }
  }
  auto raw_mu = [&](int n, int x, const Pasting& p) -> std::optional<int> {
    auto it = raw[n].find({x, pasting_key(p)});
    if (it == raw[n].end()) return std::nullopt;
    return it->second;
  };
  for (int n = 0; n <= N; ++n)
    for (int x = 0; x < g.size(n); ++x) {
      if (auto l = raw_mu(n, m.magma.eta[n], pasting_gen(g, n, x))) relate(n, x, *l);
      Pasting units = eval(*terminal_base(N), tree_decode(m.magma.coll.pi(n, x), Mode::involutive, N).nf);
      relabel_leaves(units.root, 0, [&](int d, int) { return m.magma.eta[d]; });
      if (auto r = raw_mu(n, x, units)) relate(n, x, *r);
    }
  // μ(p, T(μ)Ψ) ~ μ(μ(p, T(pr₁)Ψ), ΣΨ) for Ψ with multiplication-cell labels.
  for (int n = 0; n <= N; ++n)
    for (int p = 0; p < g.size(n); ++p)
      for_each_cell_of_shape(
          gp, Mode::involutive, m.magma.coll.pi(n, p),
          [&](int d, int c) {
            // μ(p, ·) exists only below the depth
            return m.cells[d][c].kind == CellKind::mu && m.cells[d][c].stage <= m.depth - 1 - m.cells[n][p].stage;
          },
          [&](const FreeCell& psi, const Pasting& pt) {
            auto lhs = raw_mu(n, p, pt);
            if (!lhs) return;
            Pasting firsts = pt;
            relabel_leaves(firsts.root, 0, [&](int d, int c) { return m.cells[d][c].x; });
            auto inner = raw_mu(n, p, firsts);
            if (!inner) return;
            StagedSet st = stage_of(gp, Mode::involutive, [&] {
              std::vector<FreeCell> v;
              for_each_leaf(pt.root, 0, [&](const Label& l, int d) { v.push_back(m.cells[d][l.cell].tau); });
              return v;
            }());
            Term outer = substitute(psi.nf, [&](const CellRef& r) {
              return gen(r.dim, m.cells[r.dim][g.index(r)].tau.key());
            });
            FreeCell flat = multiply_flatten(st, make_cell(st.set, outer, Mode::involutive));
            if (auto rhs = raw_mu(n, *inner, eval(g, flat.nf))) relate(n, *lhs, *rhs);
          });

  std::vector<std::vector<int>> comp(N + 1);
  auto components = [&] {
    for (int n = 0; n <= N; ++n) {
      std::vector<std::vector<int>> adj(g.size(n));
      for (auto& [a, b] : edges[n]) {
        adj[a].push_back(b);
        adj[b].push_back(a);
      }
      comp[n].assign(g.size(n), -1);
      for (int i = 0; i < g.size(n); ++i) {
        if (comp[n][i] >= 0) continue;
        std::vector<int> stack{i};
        comp[n][i] = i;
        while (!stack.empty()) {
          int v = stack.back();
          stack.pop_back();
          for (int w : adj[v])
            if (comp[n][w] < 0) {
              comp[n][w] = i;
              stack.push_back(w);
            }
        }
      }
    }
  };
  bool changed = true;
  while (changed) {
    changed = false;
    components();
    for (int n = 1; n <= N; ++n)
      for (int i = 0; i < g.size(n); ++i) {
        int r = comp[n][i];
        changed |= relate(n - 1, g.src(n, i), g.src(n, r));
        changed |= relate(n - 1, g.tgt(n, i), g.tgt(n, r));
      }
    // Cells whose defining data agree up to the current components.
    for (int n = 0; n <= N; ++n) {
      std::map<std::string, int> first;
      for (int i = 0; i < g.size(n); ++i) {
        const FreeOperadCell& c = m.cells[n][i];
        std::string key;
        if (c.kind == CellKind::kappa && opts.close_contraction)
          key = "k" + std::to_string(comp[n - 1][c.triple.plus]) + "|" + to_string(c.triple.shape) + "|" +
                std::to_string(comp[n - 1][c.triple.minus]);
        else if (c.kind == CellKind::mu)
          key = "m" + std::to_string(comp[n][c.x]) + "|" + labelled_skeleton(pastings[n][i].root, 0, comp);
        else
          continue;
        auto [it, fresh] = first.emplace(key, i);
        if (!fresh) changed |= relate(n, it->second, i);
      }
    }
  }
  components();
  std::vector<std::vector<int>> out(N + 1);
  for (int n = 0; n <= N; ++n) {
    std::unordered_map<int, int> dense;
    for (int i = 0; i < g.size(n); ++i)
      out[n].push_back(dense.emplace(comp[n][i], static_cast<int>(dense.size())).first->second);
  }
  return out;
}

FreeOperad free_contracted_operad(const TCollection& q, int depth, int shape_bound, const ClosureOptions& opts,
                                  long budget) {
  FreeOperad f;
  f.free = free_operadic_magma(q, depth, shape_bound, budget);
  auto pairs = generating_pairs(f.free);
  f.pairs = static_cast<long>(pairs.size());
  f.congruence = operad_congruence(f.free, pairs, opts);
  f.quotient = quotient_collection(f.free.magma.coll, f.congruence);
  const GlobularSet& g = *f.free.magma.coll.carrier;
  const auto& cls = f.quotient.map.map;
  int N = g.max_dim();

  struct Tables {
    std::vector<std::unordered_map<std::string, int>> mu;
    std::vector<std::map<ParTriple, int>> kappa;
    GSetPtr carrier;
  };
  auto tables = std::make_shared<Tables>();
  tables->mu.resize(N + 1);
  tables->kappa.resize(N + 1);
  tables->carrier = f.quotient.coll.carrier;
  ContractedOperad& p = f.operad;
  p.coll = f.quotient.coll;
  p.shape_bound = shape_bound;
  p.stage.resize(N + 1);
  for (int n = 0; n <= N; ++n) {
    p.eta.push_back(cls[n][f.free.magma.eta[n]]);
    p.stage[n].assign(p.coll.size(n), depth + 1);
    for (int i = 0; i < g.size(n); ++i) {
      int c = cls[n][i];
      p.stage[n][c] = std::min(p.stage[n][c], f.free.magma.stage[n][i]);
      const FreeOperadCell& cell = f.free.cells[n][i];
      if (cell.kind == CellKind::mu) {
        Pasting pt = eval(g, cell.tau.nf);
        relabel_leaves(pt.root, 0, [&](int d, int k) { return cls[d][k]; });
        tables->mu[n][std::to_string(cls[n][cell.x]) + "|" + pasting_key(pt)] = c;
      } else if (cell.kind == CellKind::kappa) {
        const ParTriple& t = cell.triple;
        tables->kappa[n][{cls[n - 1][t.plus], t.shape, cls[n - 1][t.minus]}] = c;
      }
    }
  }
  p.mu = [tables](int n, int x, const FreeCell& tau) -> std::optional<int> {
    Pasting pt;
    try {
      pt = eval(*tables->carrier, tau.nf);
    } catch (const DomainError&) {
      return std::nullopt;
    }
    auto it = tables->mu[n].find(std::to_string(x) + "|" + pasting_key(pt));
    if (it == tables->mu[n].end()) return std::nullopt;
    return it->second;
  };
  p.kappa = [tables](const ParTriple& t) -> std::optional<int> {
    if (t.dim() < 1 || t.dim() >= static_cast<int>(tables->kappa.size())) return std::nullopt;
    auto it = tables->kappa[t.dim()].find(t);
    if (it == tables->kappa[t.dim()].end()) return std::nullopt;
    return it->second;
  };
  f.zeta = compose_morphisms(f.quotient.map, f.free.xi);
  return f;
}

FreeOperad initial_operad(int N, int depth, int shape_bound) {
  return free_contracted_operad(empty_collection(N), depth, shape_bound);
}

namespace {

// φ̂ on the raw cells of 𝔐(Q).
std::vector<std::vector<int>> raw_factorization(const FreeOperad& f, const ContractedOperad& p,
                                                const GlobularMorphism& phi) {
  const FreeMagma& m = f.free;
  const GlobularSet& g = *m.magma.coll.carrier;
  int N = g.max_dim();
  if (p.max_dim() < N) throw DomainError("universal_factorization: target truncated below the source");
  std::vector<std::vector<int>> val(N + 1);
  for (int n = 0; n <= N; ++n)
    for (int i = 0; i < g.size(n); ++i) {
      const FreeOperadCell& c = m.cells[n][i];
      std::optional<int> v;
      switch (c.kind) {
        case CellKind::gen:
          v = phi.map[n][c.gen];
          break;
        case CellKind::eta:
          if (p.eta[n] >= 0) v = p.eta[n];
          break;
        case CellKind::kappa:
          v = p.kappa({val[n - 1][c.triple.plus], c.triple.shape, val[n - 1][c.triple.minus]});
          break;
        case CellKind::mu:
          if (auto tau = relabel_cell(c.tau, p.coll.carrier, [&](int d, int k) -> std::optional<int> { return val[d][k]; }))
            v = p.mu(n, val[n][c.x], *tau);
          break;
      }
      if (!v) throw DomainError("universal_factorization: target undefined at " + g.id(n, i));
      val[n].push_back(*v);
    }
  return val;
}

} // namespace

GlobularMorphism universal_factorization(const FreeOperad& f, const ContractedOperad& p, const GlobularMorphism& phi) {
  auto val = raw_factorization(f, p, phi);
  const auto& cls = f.quotient.map.map;
  GlobularMorphism out{f.operad.coll.carrier, p.coll.carrier, {}};
  for (size_t n = 0; n < val.size(); ++n) {
    out.map.emplace_back(f.operad.coll.size(static_cast<int>(n)), -1);
    for (size_t i = 0; i < val[n].size(); ++i) {
      int& slot = out.map[n][cls[n][i]];
      if (slot >= 0 && slot != val[n][i])
        throw DomainError("universal_factorization: not constant on the class of " +
                          f.free.magma.coll.carrier->id(static_cast<int>(n), static_cast<int>(i)));
      slot = val[n][i];
    }
  }
  return out;
}

std::vector<GlobularMorphism> structure_morphisms(const FreeOperad& f, const ContractedOperad& p,
                                                  const GlobularMorphism& phi, int limit) {
  const FreeMagma& m = f.free;
  const GlobularSet& g = *m.magma.coll.carrier;
  const GlobularSet& qg = *f.operad.coll.carrier;
  const GlobularSet& pg = *p.coll.carrier;
  const auto& cls = f.quotient.map.map;
  int N = g.max_dim();
  // Slots in assignment order: (dim, class).
  std::vector<int> offset(N + 2, 0);
  for (int n = 0; n <= N; ++n) offset[n + 1] = offset[n] + qg.size(n);
  auto slot = [&](int d, int c) { return offset[d] + c; };
  // Each raw cell gives one constraint, checked once every class it mentions is assigned.
  struct Constraint {
    int dim, cell;
  };
  std::vector<std::vector<Constraint>> at(offset[N + 1]);
  for (int n = 0; n <= N; ++n)
    for (int i = 0; i < g.size(n); ++i) {
      const FreeOperadCell& c = m.cells[n][i];
      int last = slot(n, cls[n][i]);
      if (c.kind == CellKind::mu) {
        last = std::max(last, slot(n, cls[n][c.x]));
        for_each_leaf(eval(g, c.tau.nf).root, 0, [&](const Label& l, int d) { last = std::max(last, slot(d, cls[d][l.cell])); });
      }
      at[last].push_back({n, i});
    }
  std::vector<std::vector<int>> val(N + 1);
  for (int n = 0; n <= N; ++n) val[n].assign(qg.size(n), -1);
  auto holds = [&](const Constraint& k) {
    const FreeOperadCell& c = m.cells[k.dim][k.cell];
    int n = k.dim;
    int v = val[n][cls[n][k.cell]];
    std::optional<int> want;
    switch (c.kind) {
      case CellKind::gen:
        want = phi.map[n][c.gen];
        break;
      case CellKind::eta:
        want = p.eta[n];
        break;
      case CellKind::kappa:
        want = p.kappa({val[n - 1][cls[n - 1][c.triple.plus]], c.triple.shape, val[n - 1][cls[n - 1][c.triple.minus]]});
        break;
      case CellKind::mu:
        if (auto tau = relabel_cell(c.tau, p.coll.carrier,
                                    [&](int d, int j) -> std::optional<int> { return val[d][cls[d][j]]; }))
          want = p.mu(n, val[n][cls[n][c.x]], *tau);
        break;
    }
    return want && *want == v;
  };
  std::vector<GlobularMorphism> out;
  std::function<void(int, int)> search = [&](int n, int c) {
    if (static_cast<int>(out.size()) >= limit) return;
    if (n > N) {
      out.push_back({f.operad.coll.carrier, p.coll.carrier, val});
      return;
    }
    if (c == qg.size(n)) {
      search(n + 1, 0);
      return;
    }
    for (int v = 0; v < pg.size(n); ++v) {
      if (!(p.coll.pi(n, v) == f.operad.coll.pi(n, c))) continue;
      if (n >= 1 && (pg.src(n, v) != val[n - 1][qg.src(n, c)] || pg.tgt(n, v) != val[n - 1][qg.tgt(n, c)])) continue;
      val[n][c] = v;
      bool good = true;
      for (auto& k : at[slot(n, c)])
        if (!holds(k)) {
          good = false;
          break;
        }
      if (good) search(n, c + 1);
      val[n][c] = -1;
    }
  };
  search(0, 0);
  return out;
}

TAlgebra terminal_algebra(int N, int bound) {
  auto coll = std::make_shared<TCollection>(tree_collection(N, bound));
  return {coll->carrier, [coll](int n, int, const FreeCell& x) -> std::optional<int> {
            int i = coll->carrier->index(n, to_string(graft(*coll, x)));
            if (i < 0) return std::nullopt;
            return i;
          }};
}

LawReport check_algebra(const ContractedOperad& p, const TAlgebra& a, const LawOptions& opts) {
  LawReport r;
  const GlobularSet& x = *a.carrier;
  int N = std::min(p.max_dim(), x.max_dim());
  for (int n = 0; n <= N; ++n)
    for (int i = 0; i < x.size(n); ++i) {
      auto v = p.eta[n] >= 0 ? a.act(n, p.eta[n], single(a.carrier, n, i)) : std::nullopt;
      if (!v) {
        ++r.skipped;
        continue;
      }
      ++r.checked;
      if (*v != i) r.failures.push_back({"unit", x.id(n, i), "θ(η, [x]) = " + x.id(n, *v)});
    }
  if (p.max_dim() != x.max_dim()) return r;

  auto ok = stage_filter(p, opts.max_stage);
  ComposeOptions co;
  co.bound = opts.bound;
  co.max_weight = opts.bound;
  co.left_allowed = ok;
  co.right_weight = [](int, int) { return 0; };
  Composite px = compose_collections(p.coll, identity_collection(a.carrier), co);
  const GlobularSet& pg = *p.coll.carrier;
  long used = 0;
  for (int n = 0; n <= N; ++n)
    for (int q = 0; q < pg.size(n); ++q) {
      if (ok && !ok(n, q)) continue;
      int wq = tree_size(p.coll.pi(n, q));
      if (wq > opts.bound) continue;
      for_each_cell_of_shape(
          px.coll.carrier, Mode::involutive, p.coll.pi(n, q), [&](int d, int c) { return wq + px.weight[d][c] <= opts.bound; },
          [&](const FreeCell& psi, const Pasting& pt) {
            int w = wq;
            for_each_leaf(pt.root, 0, [&](const Label& l, int d) { w += px.weight[d][l.cell]; });
            if (w > opts.bound) return;
            count_budget(used, opts.budget, "check_algebra");
            auto acted = relabel_cell(psi, a.carrier, [&](int d, int c) {
              return a.act(d, px.pairs[d][c].first, px.pairs[d][c].second);
            });
            std::optional<int> lhs = acted ? a.act(n, q, *acted) : std::nullopt;
            auto ops =
                relabel_cell(psi, p.coll.carrier, [&](int d, int c) -> std::optional<int> { return px.pairs[d][c].first; });
            std::optional<int> composite = ops ? p.mu(n, q, *ops) : std::nullopt;
            std::optional<int> rhs = composite ? a.act(n, *composite, flatten_second(px, psi, a.carrier)) : std::nullopt;
            if (!lhs || !rhs) {
              ++r.skipped;
              return;
            }
            ++r.checked;
            if (*lhs != *rhs)
              r.failures.push_back({"associativity", pg.id(n, q) + " " + psi.key(),
                                    "θ(p, T(θ)Ψ) = " + x.id(n, *lhs) + ", θ(μ(p, T(pr₁)Ψ), ΣΨ) = " + x.id(n, *rhs)});
          });
    }
  return r;
}

} // namespace omega
