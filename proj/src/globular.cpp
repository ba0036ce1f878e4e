#include "omegacat/globular.hpp"

#include <algorithm>
#include <set>

namespace omega {

GlobularSet::GlobularSet(int max_dim) : max_dim_(max_dim) {
  if (max_dim < 0) throw DomainError("negative max_dim");
  ids_.resize(max_dim + 1);
  index_.resize(max_dim + 1);
  src_.resize(max_dim + 1);
  tgt_.resize(max_dim + 1);
}

int GlobularSet::size(int dim) const {
  if (dim < 0 || dim > max_dim_) return 0;
  return static_cast<int>(ids_[dim].size());
}

int GlobularSet::total_size() const {
  int n = 0;
  for (auto& v : ids_) n += static_cast<int>(v.size());
  return n;
}

int GlobularSet::index(int dim, const std::string& id) const {
  if (dim < 0 || dim > max_dim_) return -1;
  auto it = index_[dim].find(id);
  return it == index_[dim].end() ? -1 : it->second;
}

bool GlobularSet::contains(const CellRef& c) const { return index(c) >= 0; }

int GlobularSet::add(int dim, const std::string& id, const std::string& src, const std::string& tgt) {
  if (dim < 0 || dim > max_dim_) throw DomainError("cell " + id + ": dimension " + std::to_string(dim) + " out of range");
  if (dim == 0) return add(0, id, -1, -1);
  int s = index(dim - 1, src);
  int t = index(dim - 1, tgt);
  if (s < 0) throw DomainError("cell " + id + ": unknown source " + src);
  if (t < 0) throw DomainError("cell " + id + ": unknown target " + tgt);
  return add(dim, id, s, t);
}

int GlobularSet::add(int dim, const std::string& id, int s, int t) {
  if (dim < 0 || dim > max_dim_) throw DomainError("cell " + id + ": dimension out of range");
  if (index_[dim].count(id)) throw DomainError("duplicate cell id " + id + " in dimension " + std::to_string(dim));
  if (dim > 0) {
    if (s < 0 || s >= size(dim - 1) || t < 0 || t >= size(dim - 1))
      throw DomainError("cell " + id + ": boundary index out of range");
    if (dim >= 2) {
      if (src_[dim - 1][s] != src_[dim - 1][t])
        throw DomainError("cell " + id + ": src(src) != src(tgt)");
      if (tgt_[dim - 1][s] != tgt_[dim - 1][t])
        throw DomainError("cell " + id + ": tgt(src) != tgt(tgt)");
    }
  } else {
    s = t = -1;
  }
  int k = static_cast<int>(ids_[dim].size());
  ids_[dim].push_back(id);
  index_[dim].emplace(id, k);
  src_[dim].push_back(s);
  tgt_[dim].push_back(t);
  return k;
}

GlobularData GlobularSet::data() const {
  GlobularData d;
  d.max_dim = max_dim_;
  d.cells.resize(max_dim_ + 1);
  for (int n = 0; n <= max_dim_; ++n)
    for (int i = 0; i < size(n); ++i) {
      CellSpec c{ids_[n][i], {}, {}};
      if (n > 0) {
        c.src = ids_[n - 1][src_[n][i]];
        c.tgt = ids_[n - 1][tgt_[n][i]];
      }
      d.cells[n].push_back(c);
    }
  return d;
}

bool GlobularSet::operator==(const GlobularSet& o) const {
  return max_dim_ == o.max_dim_ && ids_ == o.ids_ && src_ == o.src_ && tgt_ == o.tgt_;
}

CellRef GlobularMorphism::operator()(const CellRef& c) const {
  int i = dom->index(c);
  if (i < 0) throw DomainError("cell " + c.id + " not in morphism domain");
  return cod->ref(c.dim, map[c.dim][i]);
}

bool GlobularMorphism::operator==(const GlobularMorphism& o) const {
  return map == o.map && (dom == o.dom || *dom == *o.dom) && (cod == o.cod || *cod == *o.cod);
}

std::vector<Violation> validate_globular(const GlobularData& data) {
  std::vector<Violation> out;
  if (data.max_dim < 0) {
    out.push_back({"structural", "", "negative max_dim"});
    return out;
  }
  if (static_cast<int>(data.cells.size()) > data.max_dim + 1)
    out.push_back({"structural", "", "cells listed above max_dim"});
  int top = std::min<int>(data.max_dim + 1, static_cast<int>(data.cells.size()));
  std::vector<std::unordered_map<std::string, const CellSpec*>> idx(top);
  for (int n = 0; n < top; ++n)
    for (auto& c : data.cells[n])
      if (!idx[n].emplace(c.id, &c).second)
        out.push_back({"structural", c.id, "duplicate id in dimension " + std::to_string(n)});
  auto look = [&](int n, const std::string& id) -> const CellSpec* {
    if (n < 0 || n >= top) return nullptr;
    auto it = idx[n].find(id);
    return it == idx[n].end() ? nullptr : it->second;
  };
  for (int n = 1; n < top; ++n) {
    for (auto& c : data.cells[n]) {
      const CellSpec* s = look(n - 1, c.src);
      const CellSpec* t = look(n - 1, c.tgt);
      if (!s) out.push_back({"structural", c.id, "unknown source " + c.src});
      if (!t) out.push_back({"structural", c.id, "unknown target " + c.tgt});
      if (!s || !t || n < 2) continue;
      if (!look(n - 2, s->src) || !look(n - 2, s->tgt) || !look(n - 2, t->src) || !look(n - 2, t->tgt))
        continue; // reported on the lower cell
      if (s->src != t->src)
        out.push_back({"globularity", c.id, "src∘src ≠ src∘tgt (" + s->src + " vs " + t->src + ")"});
      if (s->tgt != t->tgt)
        out.push_back({"globularity", c.id, "tgt∘src ≠ tgt∘tgt (" + s->tgt + " vs " + t->tgt + ")"});
    }
  }
  return out;
}

std::vector<Violation> validate_globular(const GlobularSet& g) { return validate_globular(g.data()); }

std::vector<Violation> validate_morphism(const GlobularMorphism& m) {
  std::vector<Violation> out;
  if (!m.dom || !m.cod) {
    out.push_back({"structural", "", "missing domain or codomain"});
    return out;
  }
  if (m.dom->max_dim() != m.cod->max_dim()) out.push_back({"structural", "", "max_dim mismatch"});
  int N = std::min(m.dom->max_dim(), m.cod->max_dim());
  if (static_cast<int>(m.map.size()) < N + 1) {
    out.push_back({"structural", "", "map missing dimensions"});
    return out;
  }
  for (int n = 0; n <= N; ++n) {
    if (static_cast<int>(m.map[n].size()) != m.dom->size(n)) {
      out.push_back({"structural", "dim " + std::to_string(n), "map not total"});
      continue;
    }
    for (int i = 0; i < m.dom->size(n); ++i) {
      int j = m.map[n][i];
      if (j < 0 || j >= m.cod->size(n)) {
        out.push_back({"structural", m.dom->id(n, i), "image out of range"});
        continue;
      }
      if (n == 0) continue;
      if (m.map[n - 1][m.dom->src(n, i)] != m.cod->src(n, j))
        out.push_back({"covariance", m.dom->id(n, i), "φ∘src ≠ src∘φ"});
      if (m.map[n - 1][m.dom->tgt(n, i)] != m.cod->tgt(n, j))
        out.push_back({"covariance", m.dom->id(n, i), "φ∘tgt ≠ tgt∘φ"});
    }
  }
  return out;
}

GSetPtr build_globular(const GlobularData& data) {
  auto g = std::make_shared<GlobularSet>(data.max_dim);
  for (int n = 0; n < static_cast<int>(data.cells.size()); ++n)
    for (auto& c : data.cells[n]) g->add(n, c.id, c.src, c.tgt);
  return g;
}

CellRef iterated_boundary(const GlobularSet& g, const CellRef& x, int k, Side side) {
  if (k < 0 || k > x.dim) throw DomainError("iterated_boundary: k exceeds dimension");
  int i = g.index(x);
  if (i < 0) throw DomainError("iterated_boundary: unknown cell " + x.id);
  int d = x.dim;
  for (int j = 0; j < k; ++j) i = g.boundary(d--, i, side);
  return g.ref(d, i);
}

bool parallel(const GlobularSet& g, int dim, int x, int y) {
  if (dim == 0) return true;
  return g.src(dim, x) == g.src(dim, y) && g.tgt(dim, x) == g.tgt(dim, y);
}

bool parallel(const GlobularSet& g, const CellRef& x, const CellRef& y) {
  if (x.dim != y.dim) throw DomainError("parallel: dimension mismatch");
  int a = g.index(x), b = g.index(y);
  if (a < 0 || b < 0) throw DomainError("parallel: unknown cell");
  return parallel(g, x.dim, a, b);
}

std::string terminal_id(int dim) { return "*" + std::to_string(dim); }

GSetPtr terminal_set(int max_dim) {
  auto g = std::make_shared<GlobularSet>(max_dim);
  for (int n = 0; n <= max_dim; ++n) g->add(n, terminal_id(n), 0, 0);
  return g;
}

GlobularMorphism identity_morphism(const GSetPtr& g) {
  GlobularMorphism m{g, g, {}};
  m.map.resize(g->max_dim() + 1);
  for (int n = 0; n <= g->max_dim(); ++n)
    for (int i = 0; i < g->size(n); ++i) m.map[n].push_back(i);
  return m;
}

GlobularMorphism terminal_morphism(const GSetPtr& g, const GSetPtr& terminal) {
  for (int n = 0; n <= terminal->max_dim(); ++n)
    if (terminal->size(n) != 1) throw DomainError("codomain is not terminal");
  if (terminal->max_dim() != g->max_dim()) throw DomainError("max_dim mismatch");
  GlobularMorphism m{g, terminal, {}};
  m.map.resize(g->max_dim() + 1);
  for (int n = 0; n <= g->max_dim(); ++n) m.map[n].assign(g->size(n), 0);
  return m;
}

GlobularMorphism terminal_morphism(const GSetPtr& g) { return terminal_morphism(g, terminal_set(g->max_dim())); }

GlobularMorphism compose_morphisms(const GlobularMorphism& f, const GlobularMorphism& g) {
  if (!(g.cod == f.dom || *g.cod == *f.dom)) throw DomainError("compose_morphisms: codomain/domain mismatch");
  GlobularMorphism m{g.dom, f.cod, {}};
  m.map.resize(g.map.size());
  for (size_t n = 0; n < g.map.size(); ++n)
    for (int j : g.map[n]) m.map[n].push_back(f.map[n][j]);
  return m;
}

Pullback pullback(const GlobularMorphism& f, const GlobularMorphism& g) {
  if (!(f.cod == g.cod || *f.cod == *g.cod)) throw DomainError("pullback: codomain mismatch");
  int N = f.cod->max_dim();
  if (f.dom->max_dim() != N || g.dom->max_dim() != N) throw DomainError("pullback: max_dim mismatch");
  auto set = std::make_shared<GlobularSet>(N);
  Pullback pb;
  pb.pairs.resize(N + 1);
  pb.p1 = {f.dom, f.dom, {}};
  pb.p2 = {g.dom, g.dom, {}};
  pb.p1.map.resize(N + 1);
  pb.p2.map.resize(N + 1);
  const GlobularSet& A = *f.dom;
  const GlobularSet& B = *g.dom;
  std::vector<std::unordered_map<long long, int>> where(N + 1);
  auto key = [](int a, int b) { return (static_cast<long long>(a) << 32) | static_cast<unsigned>(b); };
  for (int n = 0; n <= N; ++n) {
    for (int a = 0; a < A.size(n); ++a)
      for (int b = 0; b < B.size(n); ++b) {
        if (f.map[n][a] != g.map[n][b]) continue;
        std::string id = "(" + A.id(n, a) + "," + B.id(n, b) + ")";
        int k;
        if (n == 0) {
          k = set->add(0, id, -1, -1);
        } else {
          int s = where[n - 1].at(key(A.src(n, a), B.src(n, b)));
          int t = where[n - 1].at(key(A.tgt(n, a), B.tgt(n, b)));
          k = set->add(n, id, s, t);
        }
        where[n][key(a, b)] = k;
        pb.pairs[n].push_back({a, b});
        pb.p1.map[n].push_back(a);
        pb.p2.map[n].push_back(b);
      }
  }
  pb.set = set;
  pb.p1.dom = set;
  pb.p2.dom = set;
  return pb;
}

GSetPtr random_globular(std::mt19937_64& rng, int max_dim, int max_cells) {
  auto g = std::make_shared<GlobularSet>(max_dim);
  std::uniform_int_distribution<int> count(1, std::max(1, max_cells));
  for (int n = 0; n <= max_dim; ++n) {
    int want = count(rng);
    for (int k = 0, tries = 0; k < want && tries < 50; ++tries) {
      std::string id = std::string(1, static_cast<char>('a' + n)) + std::to_string(k);
      if (n == 0) {
        g->add(0, id);
        ++k;
        continue;
      }
      std::uniform_int_distribution<int> pick(0, g->size(n - 1) - 1);
      int s = pick(rng), t = pick(rng);
      if (n >= 2 && !parallel(*g, n - 1, s, t)) continue;
      g->add(n, id, s, t);
      ++k;
    }
  }
  return g;
}

namespace {

bool assign_rec(const GlobularSet& A, const GlobularSet& B, GlobularMorphism& m, int n, int i, std::mt19937_64* rng,
                const std::function<bool(const GlobularMorphism&)>& visit) {
  if (n > A.max_dim()) return visit(m);
  if (i == A.size(n)) return assign_rec(A, B, m, n + 1, 0, rng, visit);
  std::vector<int> cand;
  for (int j = 0; j < B.size(n); ++j) {
    if (n > 0 && (B.src(n, j) != m.map[n - 1][A.src(n, i)] || B.tgt(n, j) != m.map[n - 1][A.tgt(n, i)])) continue;
    cand.push_back(j);
  }
  if (rng) std::shuffle(cand.begin(), cand.end(), *rng);
  for (int j : cand) {
    m.map[n][i] = j;
    if (!assign_rec(A, B, m, n, i + 1, rng, visit)) return false;
  }
  return true;
}

} // namespace

std::optional<GlobularMorphism> random_morphism(const GSetPtr& dom, const GSetPtr& cod, std::mt19937_64& rng) {
  if (dom->max_dim() != cod->max_dim()) throw DomainError("random_morphism: max_dim mismatch");
  GlobularMorphism m{dom, cod, {}};
  for (int n = 0; n <= dom->max_dim(); ++n) m.map.emplace_back(dom->size(n), -1);
  std::optional<GlobularMorphism> found;
  assign_rec(*dom, *cod, m, 0, 0, &rng, [&](const GlobularMorphism& x) {
    found = x;
    return false;
  });
  return found;
}

void for_each_morphism(const GSetPtr& dom, const GSetPtr& cod, const std::function<bool(const GlobularMorphism&)>& visit) {
  if (dom->max_dim() != cod->max_dim()) throw DomainError("for_each_morphism: max_dim mismatch");
  GlobularMorphism m{dom, cod, {}};
  for (int n = 0; n <= dom->max_dim(); ++n) m.map.emplace_back(dom->size(n), -1);
  assign_rec(*dom, *cod, m, 0, 0, nullptr, visit);
}

} // namespace omega
