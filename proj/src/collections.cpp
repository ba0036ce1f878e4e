#include "omegacat/collections.hpp"

#include <algorithm>
#include <map>
#include <set>

#include "omegacat/normalizer.hpp"

namespace omega {

namespace {

std::string where(const GlobularSet& g, int dim, int i) { return std::to_string(dim) + ":" + g.id(dim, i); }

} // namespace

std::vector<Violation> validate_collection(const TCollection& c) {
  std::vector<Violation> out;
  if (!c.carrier) return {{"carrier", "", "missing carrier"}};
  const GlobularSet& g = *c.carrier;
  if (static_cast<int>(c.proj.size()) != g.max_dim() + 1) {
    out.push_back({"projection", "", "projection table has the wrong number of dimensions"});
    return out;
  }
  for (int n = 0; n <= g.max_dim(); ++n) {
    if (static_cast<int>(c.proj[n].size()) != g.size(n)) {
      out.push_back({"projection", std::to_string(n), "projection table size differs from the carrier"});
      continue;
    }
    for (int i = 0; i < g.size(n); ++i) {
      const DecoratedTree& y = c.proj[n][i];
      if (y.dim != n) {
        out.push_back({"projection", where(g, n, i), "arity has dimension " + std::to_string(y.dim)});
        continue;
      }
      auto tv = validate_tree(y, Mode::involutive);
      if (!tv.empty()) {
        out.push_back({"projection", where(g, n, i), "invalid arity: " + tv.front().detail});
        continue;
      }
      if (n == 0) continue;
      DecoratedTree b = tree_boundary(y);
      if (!(c.proj[n - 1][g.src(n, i)] == b))
        out.push_back({"globular", where(g, n, i), "π(s x) differs from s π(x)"});
      if (!(c.proj[n - 1][g.tgt(n, i)] == b))
        out.push_back({"globular", where(g, n, i), "π(t x) differs from t π(x)"});
    }
  }
  return out;
}

TCollection make_collection(GSetPtr carrier, std::vector<std::vector<DecoratedTree>> proj) {
  TCollection c{std::move(carrier), std::move(proj)};
  auto v = validate_collection(c);
  if (!v.empty()) throw DomainError("collection: " + v.front().detail + " at " + v.front().where);
  return c;
}

TCollection empty_collection(int max_dim) {
  return {std::make_shared<GlobularSet>(max_dim), std::vector<std::vector<DecoratedTree>>(max_dim + 1)};
}

TCollection tree_collection(int N, int bound) {
  auto g = std::make_shared<GlobularSet>(N);
  std::vector<std::vector<DecoratedTree>> proj(N + 1);
  for (int n = 0; n <= N; ++n)
    for (auto& y : enumerate_trees(n, bound, Mode::involutive)) {
      if (n == 0) {
        g->add(0, to_string(y));
      } else {
        std::string b = to_string(tree_boundary(y));
        g->add(n, to_string(y), b, b);
      }
      proj[n].push_back(y);
    }
  return {g, std::move(proj)};
}

std::optional<TCollection> random_collection(std::mt19937_64& rng, int N, int max_cells, int bound) {
  auto g = random_globular(rng, N, max_cells);
  std::vector<std::vector<DecoratedTree>> proj(N + 1);
  for (int n = 0; n <= N; ++n) {
    auto trees = enumerate_trees(n, bound, Mode::involutive);
    for (int i = 0; i < g->size(n); ++i) {
      std::vector<const DecoratedTree*> fit;
      for (auto& y : trees)
        if (n == 0 || (tree_boundary(y) == proj[n - 1][g->src(n, i)] && tree_boundary(y) == proj[n - 1][g->tgt(n, i)]))
          fit.push_back(&y);
      if (fit.empty()) return std::nullopt;
      proj[n].push_back(*fit[rng() % fit.size()]);
    }
  }
  return TCollection{g, std::move(proj)};
}

TCollection identity_collection(const GSetPtr& e) {
  std::vector<std::vector<DecoratedTree>> proj(e->max_dim() + 1);
  for (int n = 0; n <= e->max_dim(); ++n) proj[n].assign(e->size(n), tree_unit(n));
  return {e, std::move(proj)};
}

GlobularMorphism projection_morphism(const TCollection& c, const TCollection& trees) {
  GlobularMorphism f{c.carrier, trees.carrier, std::vector<std::vector<int>>(c.max_dim() + 1)};
  for (int n = 0; n <= c.max_dim(); ++n)
    for (int i = 0; i < c.size(n); ++i) {
      int j = n <= trees.max_dim() ? trees.carrier->index(n, to_string(c.pi(n, i))) : -1;
      if (j < 0) throw DomainError("projection_morphism: arity of " + where(*c.carrier, n, i) + " is outside the bound");
      f.map[n].push_back(j);
    }
  return f;
}

std::vector<Violation> validate_collection_morphism(const TCollection& a, const TCollection& b,
                                                    const GlobularMorphism& f) {
  auto out = validate_morphism(f);
  if (!out.empty()) return out;
  for (int n = 0; n <= a.max_dim(); ++n)
    for (int i = 0; i < a.size(n); ++i)
      if (!(a.pi(n, i) == b.pi(n, f.map[n][i])))
        out.push_back({"projection", where(*a.carrier, n, i), "f does not preserve the arity"});
  return out;
}

bool is_par(const TCollection& c, const ParTriple& t) {
  int n = t.dim();
  if (n < 1 || n > c.max_dim()) return false;
  if (t.plus < 0 || t.plus >= c.size(n - 1) || t.minus < 0 || t.minus >= c.size(n - 1)) return false;
  if (n - 1 >= 1 && !parallel(*c.carrier, n - 1, t.plus, t.minus)) return false;
  DecoratedTree b = tree_boundary(t.shape);
  return c.pi(n - 1, t.plus) == b && c.pi(n - 1, t.minus) == b;
}

std::vector<ParTriple> par_set(const TCollection& c, int dim, int shape_bound) {
  if (dim < 1) throw DomainError("par_set: dimension must be at least 1");
  std::vector<ParTriple> out;
  if (dim > c.max_dim()) return out;
  std::map<DecoratedTree, std::vector<int>> by_proj;
  for (int i = 0; i < c.size(dim - 1); ++i) by_proj[c.pi(dim - 1, i)].push_back(i);
  for (auto& y : enumerate_trees(dim, shape_bound, Mode::involutive)) {
    auto it = by_proj.find(tree_boundary(y));
    if (it == by_proj.end()) continue;
    for (int plus : it->second)
      for (int minus : it->second)
        if (dim - 1 == 0 || parallel(*c.carrier, dim - 1, plus, minus)) out.push_back({plus, y, minus});
  }
  return out;
}

std::string to_string(const TCollection& c, const ParTriple& t) {
  const GlobularSet& g = *c.carrier;
  return "(" + g.id(t.dim() - 1, t.plus) + ", " + to_string(t.shape) + ", " + g.id(t.dim() - 1, t.minus) + ")";
}

std::vector<Violation> validate_contraction(const TCollection& c, const Contraction& kappa, int shape_bound) {
  std::vector<Violation> out;
  const GlobularSet& g = *c.carrier;
  for (int n = 1; n <= c.max_dim(); ++n)
    for (auto& t : par_set(c, n, shape_bound)) {
      std::string w = to_string(c, t);
      auto k = kappa ? kappa(t) : std::nullopt;
      if (!k || *k < 0 || *k >= c.size(n)) {
        out.push_back({"completeness", w, "no contraction cell"});
        continue;
      }
      if (g.src(n, *k) != t.minus) out.push_back({"source", w, "s(κ) = " + g.id(n - 1, g.src(n, *k))});
      if (g.tgt(n, *k) != t.plus) out.push_back({"target", w, "t(κ) = " + g.id(n - 1, g.tgt(n, *k))});
      if (!(c.pi(n, *k) == t.shape)) out.push_back({"projection", w, "π(κ) = " + to_string(c.pi(n, *k))});
    }
  return out;
}

std::vector<ParTriple> par_pushforward(const TCollection& a, const TCollection& b, const GlobularMorphism& f,
                                       const std::vector<ParTriple>& triples) {
  auto v = validate_collection_morphism(a, b, f);
  if (!v.empty()) throw DomainError("par_pushforward: " + v.front().detail + " at " + v.front().where);
  std::set<ParTriple> out;
  for (auto& t : triples) {
    if (!is_par(a, t)) throw DomainError("par_pushforward: not a parallel triple " + to_string(a, t));
    out.insert({f.map[t.dim() - 1][t.plus], t.shape, f.map[t.dim() - 1][t.minus]});
  }
  return {out.begin(), out.end()};
}

DecoratedTree graft(const TCollection& c, const FreeCell& tau) {
  const GSetPtr& base = terminal_base(c.max_dim());
  std::unordered_map<std::string, Term> memo;
  Term t = substitute(tau.nf, [&](const CellRef& x) {
    auto key = std::to_string(x.dim) + ":" + x.id;
    auto it = memo.find(key);
    if (it != memo.end()) return it->second;
    int i = c.carrier->index(x);
    if (i < 0) throw DomainError("graft: unknown cell " + x.id);
    Term s = tree_decode(c.pi(x.dim, i), Mode::involutive, c.max_dim()).nf;
    memo.emplace(key, s);
    return s;
  });
  return tree_encode(make_cell(base, t, Mode::involutive));
}

namespace {

bool relabel_node(PNode& v, int depth, const std::function<std::optional<int>(int, int)>& f) {
  if (v.kids.empty()) {
    auto c = f(depth, v.label.cell);
    if (!c) return false;
    v.label.cell = *c;
    return true;
  }
  for (auto& w : v.kids)
    if (!relabel_node(w, depth + 1, f)) return false;
  return true;
}

} // namespace

std::optional<FreeCell> relabel_cell(const FreeCell& tau, const GSetPtr& cod,
                                     const std::function<std::optional<int>(int, int)>& f) {
  Pasting p = eval(*tau.base, tau.nf);
  if (!relabel_node(p.root, 0, f)) return std::nullopt;
  Term t = readback(*cod, p);
  try {
    if (!(eval(*cod, t) == p)) return std::nullopt;
  } catch (const DomainError&) {
    return std::nullopt;
  }
  return FreeCell{cod, tau.mode, t};
}

std::optional<int> Composite::find(int dim, int p, const FreeCell& tau) const {
  if (dim < 0 || dim >= static_cast<int>(index.size())) return std::nullopt;
  auto it = index[dim].find(std::to_string(p) + "|" + tau.key());
  if (it == index[dim].end()) return std::nullopt;
  return it->second;
}

Composite compose_collections(const TCollection& p1, const TCollection& p2, const ComposeOptions& opts) {
  if (p1.max_dim() != p2.max_dim()) throw DomainError("compose_collections: truncations differ");
  int N = p1.max_dim();
  auto g = std::make_shared<GlobularSet>(N);
  Composite out;
  out.pairs.resize(N + 1);
  out.index.resize(N + 1);
  out.coll.proj.resize(N + 1);
  out.weight.resize(N + 1);
  long total = 0;
  auto lw = [&](int d, int i) { return opts.left_weight ? opts.left_weight(d, i) : tree_size(p1.pi(d, i)); };
  auto rw = [&](int d, int i) { return opts.right_weight ? opts.right_weight(d, i) : tree_size(p2.pi(d, i)); };
  const GlobularSet& g1 = *p1.carrier;
  const GlobularSet& g2 = *p2.carrier;
  for (int n = 0; n <= N; ++n)
    for (int p = 0; p < p1.size(n); ++p) {
      if (tree_size(p1.pi(n, p)) > opts.bound) continue;
      if (opts.left_allowed && !opts.left_allowed(n, p)) continue;
      int wp = lw(n, p);
      if (opts.max_weight >= 0 && wp > opts.max_weight) continue;
      std::function<bool(int, int)> allowed = opts.right_allowed;
      if (opts.max_weight >= 0)
        allowed = [&, wp](int d, int c) {
          return (!opts.right_allowed || opts.right_allowed(d, c)) && wp + rw(d, c) <= opts.max_weight;
        };
      for_each_cell_of_shape(p2.carrier, Mode::involutive, p1.pi(n, p), allowed,
                             [&](const FreeCell& tau, const Pasting& pt) {
                               int w = wp;
                               std::function<void(const PNode&, int)> walk = [&](const PNode& v, int d) {
                                 if (v.kids.empty()) w += rw(d, v.label.cell);
                                 for (auto& u : v.kids) walk(u, d + 1);
                               };
                               walk(pt.root, 0);
                               if (opts.max_weight >= 0 && w > opts.max_weight) return;
                               DecoratedTree arity = graft(p2, tau);
                               if (opts.max_result >= 0 && tree_size(arity) > opts.max_result) return;
                               int s = -1, t = -1;
                               if (n > 0) {
                                 FreeCell ts{p2.carrier, Mode::involutive,
                                             readback(g2, pasting_boundary(g2, pt, Side::source))};
                                 FreeCell tt{p2.carrier, Mode::involutive,
                                             readback(g2, pasting_boundary(g2, pt, Side::target))};
                                 auto a = out.find(n - 1, g1.src(n, p), ts);
                                 auto b = out.find(n - 1, g1.tgt(n, p), tt);
                                 if (!a || !b) return;
                                 s = *a;
                                 t = *b;
                               }
                               if (++total > opts.budget)
                                 throw ResourceError("compose_collections: more than " + std::to_string(opts.budget) +
                                                     " cells");
                               std::string id = "(" + g1.id(n, p) + " " + tau.key() + ")";
                               int k = n == 0 ? g->add(0, id) : g->add(n, id, s, t);
                               out.pairs[n].push_back({p, tau});
                               out.index[n].emplace(std::to_string(p) + "|" + tau.key(), k);
                               out.coll.proj[n].push_back(std::move(arity));
                               out.weight[n].push_back(w);
                             });
    }
  out.coll.carrier = g;
  return out;
}

Composite compose_collections(const TCollection& p1, const TCollection& p2, int bound) {
  ComposeOptions o;
  o.bound = bound;
  return compose_collections(p1, p2, o);
}

namespace {

BijectionReport unitor(const TCollection& p, const Composite& c, bool left, int bound) {
  BijectionReport r;
  int N = p.max_dim();
  r.map.resize(N + 1);
  std::vector<std::vector<int>> hits(N + 1);
  for (int n = 0; n <= N; ++n) hits[n].assign(p.size(n), 0);
  for (int n = 0; n <= N; ++n)
    for (size_t k = 0; k < c.pairs[n].size(); ++k) {
      ++r.checked;
      auto& [first, tau] = c.pairs[n][k];
      int image = first;
      if (left) {
        Pasting pt = eval(*tau.base, tau.nf);
        const PNode* v = &pt.root;
        while (!v->kids.empty()) v = &v->kids.front();
        image = v->label.cell;
      }
      r.map[n].push_back(image);
      ++hits[n][image];
      const std::string w = c.coll.carrier->id(n, static_cast<int>(k));
      if (!(c.coll.pi(n, static_cast<int>(k)) == p.pi(n, image)))
        r.violations.push_back({"projection", w, "unitor changes the arity"});
      if (n > 0) {
        const GlobularSet& cg = *c.coll.carrier;
        int ks = static_cast<int>(k);
        if (r.map[n - 1][cg.src(n, ks)] != p.carrier->src(n, image) ||
            r.map[n - 1][cg.tgt(n, ks)] != p.carrier->tgt(n, image))
          r.violations.push_back({"globular", w, "unitor does not commute with boundaries"});
      }
    }
  for (int n = 0; n <= N; ++n)
    for (int i = 0; i < p.size(n); ++i) {
      bool expected = left ? n <= bound : tree_size(p.pi(n, i)) <= bound;
      if (hits[n][i] > 1) r.violations.push_back({"injective", where(*p.carrier, n, i), "hit more than once"});
      if (expected && hits[n][i] == 0) r.violations.push_back({"surjective", where(*p.carrier, n, i), "not hit"});
    }
  return r;
}

// (x, Ψ) ∈ X∘(Y∘Z) ↦ ((x, T(pr₁)Ψ), μ(T(pr₂)Ψ)) ∈ (X∘Y)∘Z.
std::optional<int> repair(const Composite& x_yz, const Composite& yz, const Composite& xy, const Composite& xy_z,
                          const TCollection& y, const TCollection& z, int n, int k) {
  auto& [x, psi] = x_yz.pairs[n][k];
  auto tau = relabel_cell(psi, y.carrier, [&](int d, int c) -> std::optional<int> { return yz.pairs[d][c].first; });
  if (!tau) return std::nullopt;
  Term flat = substitute(psi.nf, [&](const CellRef& c) {
    return yz.pairs[c.dim][yz.coll.carrier->index(c)].second.nf;
  });
  FreeCell sigma = make_cell(z.carrier, flat, Mode::involutive);
  auto i = xy.find(n, x, *tau);
  if (!i) return std::nullopt;
  return xy_z.find(n, *i, sigma);
}

} // namespace

BijectionReport left_unitor(const TCollection& p, int bound) {
  TCollection id = identity_collection(terminal_base(p.max_dim()));
  return unitor(p, compose_collections(id, p, bound), true, bound);
}

BijectionReport right_unitor(const TCollection& p, int bound) {
  TCollection id = identity_collection(terminal_base(p.max_dim()));
  return unitor(p, compose_collections(p, id, bound), false, bound);
}

Associator associator_witness(const TCollection& p1, const TCollection& p2, const TCollection& p3, int bound) {
  Associator a;
  a.p12 = compose_collections(p1, p2, bound);
  a.left = compose_collections(a.p12.coll, p3, bound);
  a.p23 = compose_collections(p2, p3, bound);
  a.right = compose_collections(p1, a.p23.coll, bound);
  BijectionReport& r = a.repair;
  int N = p1.max_dim();
  r.map.resize(N + 1);
  std::vector<std::vector<int>> hits(N + 1);
  for (int n = 0; n <= N; ++n) hits[n].assign(a.left.coll.size(n), 0);
  for (int n = 0; n <= N; ++n)
    for (int k = 0; k < a.right.coll.size(n); ++k) {
      auto img = repair(a.right, a.p23, a.p12, a.left, p2, p3, n, k);
      r.map[n].push_back(img ? *img : -1);
      if (!img) continue;
      ++r.checked;
      ++hits[n][*img];
      const std::string w = a.right.coll.carrier->id(n, k);
      if (!(a.right.coll.pi(n, k) == a.left.coll.pi(n, *img)))
        r.violations.push_back({"projection", w, "re-pairing changes the arity"});
      if (n > 0) {
        const GlobularSet& rg = *a.right.coll.carrier;
        const GlobularSet& lg = *a.left.coll.carrier;
        int s = r.map[n - 1][rg.src(n, k)], t = r.map[n - 1][rg.tgt(n, k)];
        if (s != lg.src(n, *img) || t != lg.tgt(n, *img))
          r.violations.push_back({"globular", w, "re-pairing does not commute with boundaries"});
      }
    }
  // Every left element whose inner labels lie within the bound is hit.
  for (int n = 0; n <= N; ++n)
    for (int k = 0; k < a.left.coll.size(n); ++k) {
      const std::string w = a.left.coll.carrier->id(n, k);
      if (hits[n][k] > 1) r.violations.push_back({"injective", w, "hit more than once"});
      if (hits[n][k] > 0) continue;
      int inner = a.left.pairs[n][k].first;
      const FreeCell& tau = a.p12.pairs[n][inner].second;
      Pasting pt = eval(*tau.base, tau.nf);
      bool bounded = true;
      std::function<void(const PNode&, int)> walk = [&](const PNode& v, int d) {
        if (v.kids.empty()) {
          bounded &= tree_size(p2.pi(d, v.label.cell)) <= bound;
          return;
        }
        for (auto& u : v.kids) walk(u, d + 1);
      };
      walk(pt.root, 0);
      if (bounded) r.violations.push_back({"surjective", w, "not hit"});
    }
  return a;
}

BijectionReport pentagon_witness(const TCollection& p1, const TCollection& p2, const TCollection& p3,
                                 const TCollection& p4, int bound) {
  int N = p1.max_dim();
  using Factor = std::pair<const TCollection*, const Composite*>;
  auto compose = [&](Factor x, Factor y) {
    ComposeOptions o;
    o.bound = bound;
    o.max_weight = bound;
    if (x.second) o.left_weight = [c = x.second](int d, int i) { return c->weight[d][i]; };
    if (y.second) o.right_weight = [c = y.second](int d, int i) { return c->weight[d][i]; };
    return compose_collections(x.second ? x.second->coll : *x.first, y.second ? y.second->coll : *y.first, o);
  };
  auto base = [](const TCollection& c) { return Factor{&c, nullptr}; };
  auto comp = [](const Composite& c) { return Factor{nullptr, &c}; };
  Composite c34 = compose(base(p3), base(p4));
  Composite c2_34 = compose(base(p2), comp(c34));
  Composite start = compose(base(p1), comp(c2_34));
  Composite c12 = compose(base(p1), base(p2));
  Composite c12_34 = compose(comp(c12), comp(c34));
  Composite c12_3 = compose(comp(c12), base(p3));
  Composite end = compose(comp(c12_3), base(p4));
  Composite c23 = compose(base(p2), base(p3));
  Composite c23_4 = compose(comp(c23), base(p4));
  Composite b1 = compose(base(p1), comp(c23_4));
  Composite c1_23 = compose(base(p1), comp(c23));
  Composite b2 = compose(comp(c1_23), base(p4));

  // R_{2,3,4} and R_{1,2,3} as cell tables, for whiskering.
  std::vector<std::vector<std::optional<int>>> r234(N + 1), r123(N + 1);
  for (int n = 0; n <= N; ++n) {
    for (int k = 0; k < c2_34.coll.size(n); ++k) r234[n].push_back(repair(c2_34, c34, c23, c23_4, p3, p4, n, k));
    for (int k = 0; k < c1_23.coll.size(n); ++k) r123[n].push_back(repair(c1_23, c23, c12, c12_3, p2, p3, n, k));
  }

  BijectionReport r;
  r.map.resize(N + 1);
  long partial = 0;
  for (int n = 0; n <= N; ++n)
    for (int k = 0; k < start.coll.size(n); ++k) {
      std::optional<int> a, b;
      if (auto mid = repair(start, c2_34, c12, c12_34, p2, c34.coll, n, k))
        a = repair(c12_34, c34, c12_3, end, p3, p4, n, *mid);
      auto& [p, psi] = start.pairs[n][k];
      auto psi2 = relabel_cell(psi, c23_4.coll.carrier, [&](int d, int c) { return r234[d][c]; });
      if (psi2)
        if (auto x = b1.find(n, p, *psi2))
          if (auto y = repair(b1, c23_4, c1_23, b2, c23.coll, p4, n, *x)) {
            auto& [inner, sigma] = b2.pairs[n][*y];
            if (auto z = r123[n][inner]) b = end.find(n, *z, sigma);
          }
      r.map[n].push_back(a ? *a : -1);
      if (!a || !b) {
        if (a.has_value() != b.has_value()) ++partial;
        continue;
      }
      ++r.checked;
      if (*a != *b)
        r.violations.push_back({"pentagon", start.coll.carrier->id(n, k), "the two re-bracketings disagree"});
    }
  std::vector<std::vector<int>> hits(N + 1);
  for (int n = 0; n <= N; ++n) {
    hits[n].assign(end.coll.size(n), 0);
    for (int i : r.map[n])
      if (i >= 0) ++hits[n][i];
    for (int i = 0; i < end.coll.size(n); ++i) {
      if (hits[n][i] > 1) r.violations.push_back({"injective", end.coll.carrier->id(n, i), "hit more than once"});
      if (hits[n][i] == 0) r.violations.push_back({"surjective", end.coll.carrier->id(n, i), "not hit"});
    }
  }
  if (partial > 0)
    r.violations.push_back({"bound", "", std::to_string(partial) + " elements leave the bound on one route only"});
  return r;
}

Congruence::Congruence(const GlobularSet& g) : parent_(g.max_dim() + 1) {
  for (int n = 0; n <= g.max_dim(); ++n) {
    parent_[n].resize(g.size(n));
    for (int i = 0; i < g.size(n); ++i) parent_[n][i] = i;
  }
}

int Congruence::find(int dim, int x) const {
  auto& p = parent_[dim];
  int r = x;
  while (p[r] != r) r = p[r];
  while (p[x] != r) {
    int nx = p[x];
    p[x] = r;
    x = nx;
  }
  return r;
}

bool Congruence::merge(int dim, int x, int y) {
  int a = find(dim, x), b = find(dim, y);
  if (a == b) return false;
  if (b < a) std::swap(a, b);
  parent_[dim][b] = a;
  return true;
}

std::vector<std::vector<int>> Congruence::classes() const {
  std::vector<std::vector<int>> out(parent_.size());
  for (size_t n = 0; n < parent_.size(); ++n) {
    std::unordered_map<int, int> dense;
    for (size_t i = 0; i < parent_[n].size(); ++i) {
      int r = find(static_cast<int>(n), static_cast<int>(i));
      auto [it, fresh] = dense.emplace(r, static_cast<int>(dense.size()));
      out[n].push_back(it->second);
    }
  }
  return out;
}

int Congruence::num_classes(int dim) const {
  int k = 0;
  for (size_t i = 0; i < parent_[dim].size(); ++i) k += find(dim, static_cast<int>(i)) == static_cast<int>(i);
  return k;
}

void close_boundaries(const GlobularSet& g, Congruence& e) {
  for (int n = g.max_dim(); n >= 1; --n)
    for (int i = 0; i < g.size(n); ++i) {
      int r = e.find(n, i);
      if (r == i) continue;
      e.merge(n - 1, g.src(n, i), g.src(n, r));
      e.merge(n - 1, g.tgt(n, i), g.tgt(n, r));
    }
}

std::vector<Violation> check_congruence(const TCollection& c, const Congruence& e) {
  std::vector<Violation> out;
  const GlobularSet& g = *c.carrier;
  for (int n = 0; n <= g.max_dim(); ++n)
    for (int i = 0; i < g.size(n); ++i) {
      int r = e.find(n, i);
      if (r == i) continue;
      std::string w = where(g, n, i) + " ~ " + g.id(n, r);
      if (!(c.pi(n, i) == c.pi(n, r))) out.push_back({"projection", w, "related cells with different arities"});
      if (n > 0 && (!e.same(n - 1, g.src(n, i), g.src(n, r)) || !e.same(n - 1, g.tgt(n, i), g.tgt(n, r))))
        out.push_back({"c-st", w, "boundaries of related cells are not related"});
    }
  return out;
}

Quotient quotient_collection(const TCollection& c, const Congruence& e) {
  auto v = check_congruence(c, e);
  if (!v.empty()) throw DomainError("quotient_collection: clause " + v.front().kind + " fails at " + v.front().where);
  const GlobularSet& g = *c.carrier;
  int N = g.max_dim();
  auto cls = e.classes();
  auto q = std::make_shared<GlobularSet>(N);
  Quotient out;
  out.coll.proj.resize(N + 1);
  out.rep.resize(N + 1);
  for (int n = 0; n <= N; ++n)
    for (int i = 0; i < g.size(n); ++i) {
      if (cls[n][i] != static_cast<int>(out.rep[n].size())) continue;
      out.rep[n].push_back(i);
      if (n == 0)
        q->add(0, g.id(0, i));
      else
        q->add(n, g.id(n, i), cls[n - 1][g.src(n, i)], cls[n - 1][g.tgt(n, i)]);
      out.coll.proj[n].push_back(c.pi(n, i));
    }
  out.coll.carrier = q;
  out.map = {c.carrier, q, cls};
  return out;
}

Congruence induced_congruence(const GlobularSet& dom, const GlobularMorphism& f, const Congruence& e) {
  Congruence out(dom);
  for (int n = 0; n <= dom.max_dim(); ++n) {
    std::unordered_map<int, int> first;
    for (int i = 0; i < dom.size(n); ++i) {
      auto [it, fresh] = first.emplace(e.find(n, f.map[n][i]), i);
      if (!fresh) out.merge(n, it->second, i);
    }
  }
  return out;
}

} // namespace omega
