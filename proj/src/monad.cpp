#include "omegacat/monad.hpp"

#include <algorithm>
#include <map>
#include <mutex>

#include "omegacat/normalizer.hpp"

namespace omega {

FreeCell make_cell(const GSetPtr& base, const Term& t, Mode mode) {
  if (t->dim > base->max_dim()) throw ResourceError("cell of dimension " + std::to_string(t->dim) + " exceeds truncation");
  return {base, mode, normalize(*base, t, mode)};
}

FreeCell unit_embed(const GSetPtr& q, const CellRef& x, Mode mode) {
  if (!q->contains(x)) throw DomainError("unit_embed: unknown cell " + x.id);
  return {q, mode, gen(x)};
}

FreeCell functor_apply(const GlobularMorphism& phi, Mode mode, const FreeCell& c) {
  if (c.base != phi.dom && !(*c.base == *phi.dom)) throw DomainError("functor_apply: cell is not over the domain");
  return make_cell(phi.cod, relabel(c.nf, phi), mode);
}

const FreeCell& StagedSet::cell(const CellRef& r) const {
  int i = set->index(r);
  if (i < 0) throw DomainError("staged set: unknown cell " + r.id);
  return cells[r.dim][i];
}

StagedBuilder::StagedBuilder(GSetPtr under, Mode mode)
    : under_(std::move(under)), mode_(mode), set_(std::make_shared<GlobularSet>(under_->max_dim())),
      cells_(under_->max_dim() + 1) {}

int StagedBuilder::add(const FreeCell& c) {
  int d = c.dim();
  std::string k = c.key();
  if (int i = set_->index(d, k); i >= 0) return i;
  if (d == 0) {
    cells_[0].push_back(c);
    return set_->add(0, k);
  }
  int s = add(make_cell(under_, boundary_of_term(*under_, c.nf, Side::source), mode_));
  int t = add(make_cell(under_, boundary_of_term(*under_, c.nf, Side::target), mode_));
  cells_[d].push_back(c);
  return set_->add(d, k, s, t);
}

StagedSet StagedBuilder::finish() const {
  return {std::make_shared<GlobularSet>(*set_), under_, mode_, cells_};
}

StagedSet stage_of(const GSetPtr& under, Mode mode, const std::vector<FreeCell>& cs) {
  StagedBuilder b(under, mode);
  for (auto& c : cs) b.add(c);
  return b.finish();
}

FreeCell multiply_flatten(const StagedSet& stage, const FreeCell& outer) {
  if (outer.base != stage.set) throw DomainError("multiply_flatten: outer cell is not over the staged set");
  if (outer.dim() > stage.under->max_dim()) throw ResourceError("multiply_flatten: dimension overflow");
  Term t = substitute(outer.nf, [&](const CellRef& r) { return stage.cell(r).nf; });
  return make_cell(stage.under, t, stage.mode);
}

const GSetPtr& terminal_base(int max_dim) {
  static std::mutex mu;
  static std::map<int, GSetPtr> cache;
  std::lock_guard<std::mutex> lock(mu);
  auto& g = cache[max_dim];
  if (!g) g = terminal_set(max_dim);
  return g;
}

FreeCell shape_of(const FreeCell& c) {
  const GSetPtr& t = terminal_base(c.base->max_dim());
  if (c.base == t) return c;
  return functor_apply(terminal_morphism(c.base, t), c.mode, c);
}

// Decorated trees

namespace {

int node_height(const DNode& v) {
  int h = 0;
  for (auto& w : v.kids) h = std::max(h, 1 + node_height(w));
  return h;
}

int node_edges(const DNode& v) {
  int n = 0;
  for (auto& w : v.kids) n += 1 + node_edges(w);
  return n;
}

int node_leaves(const DNode& v) {
  if (v.kids.empty()) return 1;
  int n = 0;
  for (auto& w : v.kids) n += node_leaves(w);
  return n;
}

void write_node(const DNode& v, std::string& out) {
  out += '(';
  if (v.dec) {
    out += '{';
    bool first = true;
    for (int q = 0; q < 32; ++q)
      if (v.dec & (1u << q)) {
        if (!first) out += ',';
        out += std::to_string(q);
        first = false;
      }
    out += '}';
  }
  for (auto& w : v.kids) write_node(w, out);
  out += ')';
}

struct TreeReader {
  const std::string& s;
  size_t i = 0;

  [[noreturn]] void fail(const std::string& msg) const {
    throw ParseError("tree: " + msg, 1, static_cast<int>(i) + 1);
  }
  void skip() {
    while (i < s.size() && std::isspace(static_cast<unsigned char>(s[i]))) ++i;
  }
  int number() {
    skip();
    size_t j = i;
    while (i < s.size() && std::isdigit(static_cast<unsigned char>(s[i]))) ++i;
    if (j == i) fail("expected a number");
    return std::stoi(s.substr(j, i - j));
  }
  DNode node() {
    skip();
    if (i >= s.size() || s[i] != '(') fail("expected '('");
    ++i;
    DNode v;
    skip();
    if (i < s.size() && s[i] == '{') {
      ++i;
      skip();
      if (i < s.size() && s[i] == '}') {
        ++i;
      } else {
        for (;;) {
          int q = number();
          if (q < 0 || q >= 31) fail("decoration index out of range");
          v.dec |= 1u << q;
          skip();
          if (i < s.size() && s[i] == ',') {
            ++i;
            continue;
          }
          if (i < s.size() && s[i] == '}') {
            ++i;
            break;
          }
          fail("expected ',' or '}'");
        }
      }
    }
    for (;;) {
      skip();
      if (i >= s.size()) fail("unbalanced '('");
      if (s[i] == ')') {
        ++i;
        return v;
      }
      v.kids.push_back(node());
    }
  }
};

void validate_node(const DNode& v, int level, unsigned parent_dec, int parent_level, Mode mode, const std::string& path,
                   std::vector<Violation>& out) {
  unsigned below = level >= 32 ? ~0u : (1u << level) - 1;
  if (v.dec & ~below)
    out.push_back({"decoration", path, "decoration index not below node level " + std::to_string(level)});
  if (mode == Mode::strict && v.dec) out.push_back({"decoration", path, "decoration in strict mode"});
  if (level > 0) {
    unsigned inherited = (1u << parent_level) - 1;
    if ((v.dec & inherited) != parent_dec)
      out.push_back({"decoration", path, "decoration disagrees with parent below level " + std::to_string(parent_level)});
  }
  for (size_t k = 0; k < v.kids.size(); ++k)
    validate_node(v.kids[k], level + 1, v.dec, level, mode, path + "/" + std::to_string(k), out);
}

void inv_node(DNode& v, int level, int q) {
  if (level > q) v.dec ^= 1u << q;
  if (level == q) std::reverse(v.kids.begin(), v.kids.end());
  for (auto& w : v.kids) inv_node(w, level + 1, q);
}

void truncate_node(DNode& v, int level, int depth) {
  if (level == depth) {
    v.kids.clear();
    return;
  }
  for (auto& w : v.kids) truncate_node(w, level + 1, depth);
}

void merge_node(DNode& out, const DNode& l, const DNode& r, int level, int p) {
  out.dec = r.dec;
  if (level == p) {
    out.kids = r.kids;
    out.kids.insert(out.kids.end(), l.kids.begin(), l.kids.end());
    return;
  }
  out.kids.resize(r.kids.size());
  for (size_t k = 0; k < r.kids.size(); ++k) merge_node(out.kids[k], l.kids[k], r.kids[k], level + 1, p);
}

DNode from_pasting(const PNode& v, int depth) {
  DNode out;
  if (v.kids.empty()) {
    out.dec = v.label.mask;
    return out;
  }
  for (auto& w : v.kids) out.kids.push_back(from_pasting(w, depth + 1));
  // inherited decoration of an inner node: the lower bits of its first child
  out.dec = out.kids.front().dec & ((1u << depth) - 1);
  return out;
}

PNode to_pasting(const DNode& v) {
  PNode out;
  if (v.kids.empty()) {
    out.label = {0, v.dec};
    return out;
  }
  for (auto& w : v.kids) out.kids.push_back(to_pasting(w));
  return out;
}

bool is_terminal(const GlobularSet& g) {
  for (int n = 0; n <= g.max_dim(); ++n)
    if (g.size(n) != 1) return false;
  return true;
}

// Plane trees with exactly e edges whose root sits at `level`, height capped
// so that no node goes deeper than dim.
std::vector<DNode> trees_exact(int level, int dim, int e);

std::vector<std::vector<DNode>> forests_exact(int level, int dim, int e) {
  std::vector<std::vector<DNode>> out;
  if (e == 0) {
    out.emplace_back();
    return out;
  }
  for (int s = 0; s <= e - 1; ++s) {
    auto firsts = trees_exact(level, dim, s);
    if (firsts.empty()) continue;
    auto rests = forests_exact(level, dim, e - 1 - s);
    for (auto& f : firsts)
      for (auto& r : rests) {
        std::vector<DNode> forest;
        forest.reserve(r.size() + 1);
        forest.push_back(f);
        forest.insert(forest.end(), r.begin(), r.end());
        out.push_back(std::move(forest));
      }
  }
  return out;
}

std::vector<DNode> trees_exact(int level, int dim, int e) {
  std::vector<DNode> out;
  if (e == 0) {
    out.emplace_back();
    return out;
  }
  if (level >= dim) return out;
  for (auto& f : forests_exact(level + 1, dim, e)) {
    DNode v;
    v.kids = std::move(f);
    out.push_back(std::move(v));
  }
  return out;
}

void collect_nodes(DNode& v, std::vector<std::pair<DNode*, int>>& out, int level) {
  for (auto& w : v.kids) {
    out.push_back({&w, level + 1});
    collect_nodes(w, out, level + 1);
  }
}

void propagate(DNode& v, int level) {
  for (auto& w : v.kids) {
    unsigned own = w.dec & (1u << level);
    w.dec = v.dec | own;
    propagate(w, level + 1);
  }
}

} // namespace

int tree_height(const DecoratedTree& t) { return node_height(t.root); }
int tree_size(const DecoratedTree& t) { return node_edges(t.root); }
int tree_leaves(const DecoratedTree& t) { return node_leaves(t.root); }

std::string to_string(const DecoratedTree& t) {
  std::string out;
  write_node(t.root, out);
  if (t.dim != tree_height(t)) out += "^" + std::to_string(t.dim);
  return out;
}

DecoratedTree parse_tree(const std::string& text) {
  TreeReader r{text};
  DecoratedTree t;
  t.root = r.node();
  t.dim = tree_height(t);
  r.skip();
  if (r.i < text.size() && text[r.i] == '^') {
    ++r.i;
    t.dim = r.number();
    r.skip();
  }
  if (r.i != text.size()) r.fail("trailing input");
  auto v = validate_tree(t, Mode::involutive);
  if (!v.empty()) throw DomainError("invalid tree " + text + ": " + v.front().detail + " at " + v.front().where);
  return t;
}

std::vector<Violation> validate_tree(const DecoratedTree& t, Mode mode) {
  std::vector<Violation> out;
  if (tree_height(t) > t.dim)
    out.push_back({"height", "/", "height " + std::to_string(tree_height(t)) + " exceeds dimension " + std::to_string(t.dim)});
  validate_node(t.root, 0, 0, 0, mode, "", out);
  return out;
}

DecoratedTree tree_unit(int dim) {
  DecoratedTree t;
  t.dim = dim;
  DNode* v = &t.root;
  for (int d = 0; d < dim; ++d) {
    v->kids.emplace_back();
    v = &v->kids.back();
  }
  return t;
}

DecoratedTree tree_id(DecoratedTree t) {
  ++t.dim;
  return t;
}

DecoratedTree tree_inv(int q, DecoratedTree t) {
  if (q < 0) throw DomainError("tree_inv: negative index");
  if (q >= t.dim) return t;
  inv_node(t.root, 0, q);
  return t;
}

DecoratedTree tree_boundary(const DecoratedTree& t) {
  if (t.dim == 0) throw DomainError("boundary of a 0-dimensional tree");
  DecoratedTree b = t;
  --b.dim;
  truncate_node(b.root, 0, b.dim);
  return b;
}

DecoratedTree tree_iterated_boundary(const DecoratedTree& t, int k) {
  if (k < 0 || k > t.dim) throw DomainError("tree boundary: k out of range");
  DecoratedTree b = t;
  b.dim -= k;
  truncate_node(b.root, 0, b.dim);
  return b;
}

std::optional<DecoratedTree> tree_comp(int p, const DecoratedTree& l, const DecoratedTree& r) {
  if (l.dim != r.dim || p < 0 || p >= l.dim) return std::nullopt;
  if (!(tree_iterated_boundary(l, l.dim - p) == tree_iterated_boundary(r, r.dim - p))) return std::nullopt;
  DecoratedTree out;
  out.dim = l.dim;
  merge_node(out.root, l.root, r.root, 0, p);
  return out;
}

DecoratedTree tree_encode(const FreeCell& c) {
  if (!is_terminal(*c.base)) throw DomainError("tree_encode: base is not the terminal set");
  Pasting p = eval(*c.base, c.nf);
  return {p.dim, from_pasting(p.root, 0)};
}

FreeCell tree_decode(const DecoratedTree& t, Mode mode, int max_dim) {
  auto v = validate_tree(t, mode);
  if (!v.empty()) throw DomainError("tree_decode: " + v.front().detail + " at " + v.front().where);
  const GSetPtr& g = terminal_base(max_dim < 0 ? t.dim : max_dim);
  Pasting p{t.dim, to_pasting(t.root)};
  return {g, mode, readback(*g, p)};
}

std::vector<DecoratedTree> enumerate_trees(int dim, int max_edges, Mode mode) {
  std::vector<DecoratedTree> out;
  for (int e = 0; e <= max_edges; ++e)
    for (auto& shape : trees_exact(0, dim, e)) {
      if (mode == Mode::strict || e == 0) {
        out.push_back({dim, shape});
        continue;
      }
      // one free bit per non-root node: whether it adds index level−1
      DNode base = shape;
      std::vector<std::pair<DNode*, int>> nodes;
      collect_nodes(base, nodes, 0);
      for (uint64_t bits = 0; bits < (uint64_t{1} << nodes.size()); ++bits) {
        for (size_t k = 0; k < nodes.size(); ++k)
          nodes[k].first->dec = (bits >> k & 1) ? 1u << (nodes[k].second - 1) : 0u;
        DNode v = base;
        propagate(v, 0);
        out.push_back({dim, v});
      }
    }
  return out;
}

namespace {

void leaf_slots(PNode& v, int depth, std::vector<std::pair<PNode*, int>>& out) {
  if (v.kids.empty()) {
    out.push_back({&v, depth});
    return;
  }
  for (auto& w : v.kids) leaf_slots(w, depth + 1, out);
}

} // namespace

DecoratedTree pasting_shape(const Pasting& p) { return {p.dim, from_pasting(p.root, 0)}; }

DecoratedTree shape_tree(const FreeCell& c) { return pasting_shape(eval(*c.base, c.nf)); }

namespace {

struct Seam {
  const PNode* left;
  const PNode* right;
  int depth; // depth of the kids
};

// Each seam between consecutive kids is checked once the front leaf of the
// later kid is labelled.
void front_leaf_seams(const PNode& v, int depth, const std::vector<const PNode*>& leaves,
                      std::vector<std::vector<Seam>>& by_leaf) {
  if (v.kids.empty()) return;
  for (size_t i = 0; i < v.kids.size(); ++i) {
    const PNode* w = &v.kids[i];
    const PNode* front = w;
    while (!front->kids.empty()) front = &front->kids.front();
    size_t at = std::find(leaves.begin(), leaves.end(), front) - leaves.begin();
    if (i > 0) by_leaf[at].push_back({&v.kids[i - 1], w, depth + 1});
    front_leaf_seams(*w, depth + 1, leaves, by_leaf);
  }
}

void collect_leaves(const PNode& v, int depth, std::vector<const PNode*>& out, std::vector<int>& depths) {
  if (v.kids.empty()) {
    out.push_back(&v);
    depths.push_back(depth);
    return;
  }
  for (auto& w : v.kids) collect_leaves(w, depth + 1, out, depths);
}

} // namespace

void for_each_cell_of_shape(const GSetPtr& q, Mode mode, const DecoratedTree& shape,
                            const std::function<bool(int, int)>& allowed,
                            const std::function<void(const FreeCell&, const Pasting&)>& visit) {
  if (shape.dim > q->max_dim()) return;
  Pasting p{shape.dim, to_pasting(shape.root)};
  std::vector<const PNode*> leaves;
  std::vector<int> depths;
  collect_leaves(p.root, 0, leaves, depths);
  std::vector<std::vector<Seam>> seams(leaves.size());
  front_leaf_seams(p.root, 0, leaves, seams);
  std::vector<std::vector<int>> cand(leaves.size());
  for (size_t k = 0; k < leaves.size(); ++k)
    for (int c = 0; c < q->size(depths[k]); ++c)
      if (!allowed || allowed(depths[k], c)) cand[k].push_back(c);
  const GlobularSet& g = *q;
  std::function<void(size_t)> rec = [&](size_t k) {
    if (k == leaves.size()) {
      Term t = readback(g, p);
      bool valid = false;
      try {
        valid = eval(g, t) == p;
      } catch (const DomainError&) {
      }
      if (valid) visit({q, mode, t}, p);
      return;
    }
    PNode* leaf = const_cast<PNode*>(leaves[k]);
    for (int c : cand[k]) {
      leaf->label.cell = c;
      bool ok = true;
      for (auto& s : seams[k]) {
        Label a = label_boundary(g, s.depth, node_label(g, *s.left, s.depth, Side::target), Side::target);
        Label b = label_boundary(g, s.depth, node_label(g, *s.right, s.depth, Side::source), Side::source);
        if (!(a == b)) {
          ok = false;
          break;
        }
      }
      if (ok) rec(k + 1);
    }
  };
  rec(0);
}

std::vector<FreeCell> cells_of_shape(const GSetPtr& q, Mode mode, const DecoratedTree& shape) {
  std::vector<FreeCell> out;
  for_each_cell_of_shape(q, mode, shape, {}, [&](const FreeCell& c, const Pasting&) { out.push_back(c); });
  return out;
}

std::vector<FreeCell> enumerate_cells(const GSetPtr& q, Mode mode, int dim, int max_leaves) {
  std::vector<FreeCell> out;
  if (dim > q->max_dim()) return out;
  for (auto& tree : enumerate_trees(dim, max_leaves * std::max(dim, 1), mode)) {
    if (tree_leaves(tree) > max_leaves) continue;
    for_each_cell_of_shape(q, mode, tree, {}, [&](const FreeCell& c, const Pasting&) { out.push_back(c); });
  }
  return out;
}

// Sampling

TermSampler::TermSampler(const GlobularSet& g, Mode mode, uint64_t seed, int max_size)
    : g_(g), mode_(mode), rng_(seed), max_size_(max_size), pool_(g.max_dim() + 1) {
  for (int d = 0; d <= g.max_dim(); ++d)
    for (int i = 0; i < g.size(d); ++i) pool_[d].push_back({gen(g.ref(d, i)), pasting_gen(g, d, i)});
}

void TermSampler::grow() {
  int top = g_.max_dim();
  if (top == 0) return;
  std::uniform_int_distribution<int> dim_dist(1, top);
  int d = dim_dist(rng_);
  auto pick = [&](int dd) -> const std::pair<Term, Pasting>* {
    if (pool_[dd].empty()) return nullptr;
    std::uniform_int_distribution<size_t> u(0, pool_[dd].size() - 1);
    return &pool_[dd][u(rng_)];
  };
  std::uniform_int_distribution<int> op_dist(0, mode_ == Mode::involutive ? 4 : 3);
  int op = op_dist(rng_);
  std::optional<std::pair<Term, Pasting>> made;
  if (op == 0) {
    if (auto x = pick(d - 1)) made = {{id_term(x->first), pasting_id(x->second)}};
  } else if (op == 4) {
    if (auto x = pick(d)) {
      std::uniform_int_distribution<int> q_dist(0, d - 1);
      int q = q_dist(rng_);
      made = {{inv(q, x->first), pasting_inv(q, x->second)}};
    }
  } else if (auto l = pick(d)) {
    std::uniform_int_distribution<int> p_dist(0, d - 1);
    int p = p_dist(rng_);
    Pasting want = pasting_iterated_boundary(g_, l->second, d - p, Side::source);
    std::vector<const std::pair<Term, Pasting>*> rs;
    for (auto& r : pool_[d])
      if (pasting_iterated_boundary(g_, r.second, d - p, Side::target) == want) rs.push_back(&r);
    if (!rs.empty()) {
      std::uniform_int_distribution<size_t> u(0, rs.size() - 1);
      auto r = rs[u(rng_)];
      made = {{comp(p, l->first, r->first), pasting_comp(g_, p, l->second, r->second)}};
    }
  }
  if (!made || made->first->size > max_size_) return;
  if (pool_[d].size() < 256) {
    pool_[d].push_back(std::move(*made));
  } else {
    std::uniform_int_distribution<size_t> u(0, pool_[d].size() - 1);
    pool_[d][u(rng_)] = std::move(*made);
  }
}

std::optional<Term> TermSampler::sample(int dim) {
  if (dim < 0 || dim > g_.max_dim()) return std::nullopt;
  for (int k = 0; k < 6; ++k) grow();
  if (pool_[dim].empty()) return std::nullopt;
  std::uniform_int_distribution<size_t> u(0, pool_[dim].size() - 1);
  return pool_[dim][u(rng_)].first;
}

Term TermSampler::sample_any() {
  std::uniform_int_distribution<int> dim_dist(0, g_.max_dim());
  for (;;) {
    int d = dim_dist(rng_);
    if (auto t = sample(d)) return *t;
  }
}

// Monad laws

namespace {

using Flatten = std::function<FreeCell(const StagedSet&, const FreeCell&)>;

FreeCell corrupt_flatten(const StagedSet& stage, const FreeCell& outer) {
  Term t = substitute(outer.nf, [&](const CellRef& r) {
    const Term& x = stage.cell(r).nf;
    return x->dim == 0 ? x : id_term(boundary_of_term(*stage.under, x, Side::source));
  });
  return make_cell(stage.under, t, stage.mode);
}

std::vector<FreeCell> sample_cells(const GSetPtr& g, Mode mode, TermSampler& s, int n) {
  std::vector<FreeCell> out;
  for (int k = 0; k < n; ++k) out.push_back(make_cell(g, s.sample_any(), mode));
  return out;
}

} // namespace

LawReport check_monad_laws(const GSetPtr& q, Mode mode, const MonadCheckOptions& opts) {
  LawReport rep;
  Flatten flat = opts.corrupt_flatten ? Flatten(corrupt_flatten) : Flatten(multiply_flatten);
  TermSampler sampler(*q, mode, opts.seed);
  std::mt19937_64 rng(opts.seed ^ 0x9e3779b97f4a7c15ull);

  std::vector<FreeCell> gens;
  for (int d = 0; d <= q->max_dim(); ++d)
    for (int i = 0; i < q->size(d); ++i) gens.push_back(unit_embed(q, q->ref(d, i), mode));
  StagedSet unit_stage = stage_of(q, mode, gens);

  for (int k = 0; k < opts.samples; ++k) {
    FreeCell c = make_cell(q, sampler.sample_any(), mode);
    std::string where = c.key();

    // μ ∘ η_T = id
    StagedSet s1 = stage_of(q, mode, {c});
    FreeCell outer{s1.set, mode, gen(c.dim(), c.key())};
    FreeCell got = flat(s1, outer);
    ++rep.checked;
    if (!(got == c)) rep.failures.push_back({"left-unit", where, "got " + got.key()});

    // μ ∘ T(η) = id
    Term lifted = substitute(c.nf, [&](const CellRef& x) { return gen(x.dim, to_string(gen(x))); });
    FreeCell outer2 = make_cell(unit_stage.set, lifted, mode);
    got = flat(unit_stage, outer2);
    ++rep.checked;
    if (!(got == c)) rep.failures.push_back({"right-unit", where, "got " + got.key()});

    // μ ∘ T(μ) = μ ∘ μ_T on a three-level staged cell
    uint64_t sub = rng();
    auto level1 = sample_cells(q, mode, sampler, 3);
    level1.push_back(c);
    StagedSet st1 = stage_of(q, mode, level1);
    TermSampler samp1(*st1.set, mode, sub, 8);
    auto level2 = sample_cells(st1.set, mode, samp1, 3);
    StagedSet st2 = stage_of(st1.set, mode, level2);
    TermSampler samp2(*st2.set, mode, sub + 1, 8);
    FreeCell top = make_cell(st2.set, samp2.sample_any(), mode);

    std::vector<FreeCell> flattened;
    for (auto& row : st2.cells)
      for (auto& y : row) flattened.push_back(flat(st1, y));
    StagedSet st1b = stage_of(q, mode, flattened);
    Term relab = substitute(top.nf, [&](const CellRef& x) { return gen(x.dim, flat(st1, st2.cell(x)).key()); });
    FreeCell route_a = flat(st1b, make_cell(st1b.set, relab, mode));
    FreeCell route_b = flat(st1, flat(st2, top));
    ++rep.checked;
    if (!(route_a == route_b))
      rep.failures.push_back({"associativity", top.key(), "μ∘T(μ) gives " + route_a.key() + ", μ∘μ gives " + route_b.key()});
  }
  return rep;
}

// Cartesian squares

namespace {

std::vector<FreeCell> preimages(const GlobularMorphism& phi, Mode mode, const FreeCell& y) {
  const GlobularSet& q = *phi.dom;
  Pasting p = eval(*y.base, y.nf);
  std::vector<std::pair<PNode*, int>> slots;
  leaf_slots(p.root, 0, slots);
  std::vector<std::vector<int>> cand(slots.size());
  for (size_t k = 0; k < slots.size(); ++k) {
    int d = slots[k].second;
    for (int i = 0; i < q.size(d); ++i)
      if (phi.map[d][i] == slots[k].first->label.cell) cand[k].push_back(i);
    if (cand[k].empty()) return {};
  }
  std::vector<FreeCell> out;
  std::vector<size_t> choice(slots.size(), 0);
  for (;;) {
    for (size_t k = 0; k < slots.size(); ++k) slots[k].first->label.cell = cand[k][choice[k]];
    Term t = readback(q, p);
    try {
      if (eval(q, t) == p) out.push_back({phi.dom, mode, t});
    } catch (const DomainError&) {
    }
    size_t k = 0;
    while (k < slots.size() && ++choice[k] == cand[k].size()) choice[k++] = 0;
    if (k == slots.size()) break;
  }
  return out;
}

} // namespace

LawReport check_cartesian(Square sq, const GlobularMorphism& phi, Mode mode, const CartesianOptions& opts) {
  LawReport rep;
  const GSetPtr& Q = phi.dom;
  const GSetPtr& R = phi.cod;
  int top = opts.max_dim < 0 ? Q->max_dim() : std::min(opts.max_dim, Q->max_dim());
  int copies = opts.doubled_corner ? 2 : 1;
  long work = 0;
  auto spend = [&](long n) {
    work += n;
    if (work > opts.budget) throw ResourceError("check_cartesian: search budget exhausted");
  };

  if (sq == Square::unit) {
    // Competing spans (c, r) with Tφ(c) = η(r); the factorizing x must be unique.
    for (int d = 0; d <= top; ++d)
      for (auto& c : enumerate_cells(Q, mode, d, opts.max_leaves)) {
        FreeCell img = functor_apply(phi, mode, c);
        if (img.nf->kind != TermKind::gen) continue;
        int r = R->index(img.nf->cell);
        int found = 0;
        for (int copy = 0; copy < copies; ++copy)
          for (int x = 0; x < Q->size(d); ++x) {
            spend(1);
            if (phi.map[d][x] == r && c == unit_embed(Q, Q->ref(d, x), mode)) ++found;
          }
        ++rep.checked;
        if (found != 1)
          rep.failures.push_back({"unit-square", c.key(), std::to_string(found) + " factorizations"});
      }
    return rep;
  }

  // Competing spans (d, c) with d ∈ T²R, c ∈ TQ and Tφ(c) = μ_R(d); the
  // factorizing e ∈ T²Q with T²φ(e) = d and μ_Q(e) = c must be unique.
  for (int dim = 0; dim <= top; ++dim) {
    std::vector<FreeCell> inner;
    for (int k = 0; k <= dim; ++k) {
      auto cs = enumerate_cells(R, mode, k, opts.max_leaves);
      inner.insert(inner.end(), cs.begin(), cs.end());
    }
    StagedSet SR = stage_of(R, mode, inner);
    for (auto& d : enumerate_cells(SR.set, mode, dim, opts.outer_leaves)) {
      FreeCell mu_d = multiply_flatten(SR, d);
      auto cs = preimages(phi, mode, mu_d);
      Pasting pd = eval(*SR.set, d.nf);
      std::vector<std::pair<PNode*, int>> slots;
      leaf_slots(pd.root, 0, slots);
      std::vector<std::vector<FreeCell>> cand(slots.size());
      for (size_t k = 0; k < slots.size(); ++k)
        cand[k] = preimages(phi, mode, SR.cell(slots[k].second, slots[k].first->label.cell));
      for (auto& c : cs) {
        int found = 0;
        bool any = std::all_of(cand.begin(), cand.end(), [](auto& v) { return !v.empty(); });
        if (any) {
          std::vector<size_t> choice(slots.size(), 0);
          for (;;) {
            spend(1);
            std::vector<FreeCell> chosen;
            for (size_t k = 0; k < slots.size(); ++k) chosen.push_back(cand[k][choice[k]]);
            StagedSet SQ = stage_of(Q, mode, chosen);
            Pasting pe = pd;
            std::vector<std::pair<PNode*, int>> eslots;
            leaf_slots(pe.root, 0, eslots);
            for (size_t k = 0; k < eslots.size(); ++k)
              eslots[k].first->label.cell = SQ.set->index(eslots[k].second, chosen[k].key());
            Term et = readback(*SQ.set, pe);
            bool valid = false;
            try {
              valid = eval(*SQ.set, et) == pe;
            } catch (const DomainError&) {
            }
            if (valid) {
              FreeCell e{SQ.set, mode, et};
              if (multiply_flatten(SQ, e) == c) found += copies;
            }
            size_t k = 0;
            while (k < slots.size() && ++choice[k] == cand[k].size()) choice[k++] = 0;
            if (k == slots.size()) break;
          }
        }
        ++rep.checked;
        if (found != 1)
          rep.failures.push_back({"mult-square", d.key() + " / " + c.key(), std::to_string(found) + " factorizations"});
      }
    }
  }
  return rep;
}

GSetPtr theta_set() {
  auto g = std::make_shared<GlobularSet>(2);
  g->add(0, "a");
  g->add(0, "b");
  g->add(1, "f", "a", "b");
  g->add(1, "g", "a", "b");
  g->add(2, "alpha", "f", "g");
  return g;
}

} // namespace omega
