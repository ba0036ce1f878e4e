#include <array>
#include <unordered_map>

#include "omegacat/normalizer.hpp"

namespace omega {

namespace {

struct ONode {
  TermKind kind;
  int dim;
  int index;
  int cell;
  int a;
  int b;
  int size;
};

struct KeyHash {
  size_t operator()(const std::array<long long, 5>& k) const {
    size_t h = 0;
    for (long long v : k) h = h * 1000003u ^ static_cast<size_t>(v);
    return h;
  }
};

using Key = std::array<long long, 5>;

class Closure {
 public:
  Closure(const GlobularSet& g, Mode mode, int limit, long max_terms)
      : g_(g), mode_(mode), limit_(limit), max_terms_(max_terms) {}

  void run(int top_dim) {
    by_size_.assign(top_dim + 1, std::vector<std::vector<int>>(limit_ + 1));
    for (int d = 0; d <= top_dim; ++d) {
      generate(d);
      generating_pairs(d);
      congruence(d);
    }
  }

  int find(int x) {
    while (parent_[x] != x) x = parent_[x] = parent_[parent_[x]];
    return x;
  }

  const std::vector<ONode>& nodes() const { return nodes_; }
  const std::vector<std::vector<std::vector<int>>>& by_size() const { return by_size_; }

  Term to_term(int id) const {
    const ONode& n = nodes_[id];
    switch (n.kind) {
      case TermKind::gen:
        return gen(g_.ref(n.dim, n.cell));
      case TermKind::id:
        return id_term(to_term(n.a));
      case TermKind::comp:
        return comp(n.index, to_term(n.a), to_term(n.b));
      case TermKind::inv:
        return inv(n.index, to_term(n.a));
    }
    return nullptr;
  }

 private:
  const GlobularSet& g_;
  Mode mode_;
  int limit_;
  long max_terms_;
  std::vector<ONode> nodes_;
  std::vector<int> parent_;
  std::unordered_map<Key, int, KeyHash> table_;
  std::vector<std::vector<std::vector<int>>> by_size_; // [dim][size] -> ids
  std::unordered_map<long long, int> bd_memo_;

  static Key key(TermKind k, int index, int cell, int a, int b) {
    return {static_cast<long long>(k), index, cell, a, b};
  }

  int lookup(TermKind k, int index, int cell, int a, int b) const {
    auto it = table_.find(key(k, index, cell, a, b));
    return it == table_.end() ? -1 : it->second;
  }

  int add(TermKind k, int dim, int index, int cell, int a, int b) {
    int size = 1 + (a >= 0 ? nodes_[a].size : 0) + (b >= 0 ? nodes_[b].size : 0);
    int id = static_cast<int>(nodes_.size());
    if (static_cast<long>(id) >= max_terms_)
      throw ResourceError("oracle universe exceeds " + std::to_string(max_terms_) + " terms");
    nodes_.push_back({k, dim, index, cell, a, b, size});
    parent_.push_back(id);
    table_.emplace(key(k, index, cell, a, b), id);
    by_size_[dim][size].push_back(id);
    return id;
  }

  // Syntactic boundary, looked up in the universe. -1 if absent.
  int boundary(int x, Side side) {
    long long mk = static_cast<long long>(x) * 2 + (side == Side::target);
    if (auto it = bd_memo_.find(mk); it != bd_memo_.end()) return it->second;
    const ONode n = nodes_[x];
    int r = -1;
    switch (n.kind) {
      case TermKind::gen:
        r = lookup(TermKind::gen, n.dim - 1, g_.boundary(n.dim, n.cell, side), -1, -1);
        break;
      case TermKind::id:
        r = n.a;
        break;
      case TermKind::comp:
        if (n.index == n.dim - 1) {
          r = boundary(side == Side::source ? n.b : n.a, side);
        } else {
          int a = boundary(n.a, side), b = boundary(n.b, side);
          r = (a < 0 || b < 0) ? -1 : lookup(TermKind::comp, n.index, -1, a, b);
          if (r < 0 && a >= 0 && b >= 0) r = by_signature(TermKind::comp, n.index, a, b);
        }
        break;
      case TermKind::inv:
        if (n.index == n.dim - 1) {
          r = boundary(n.a, opposite(side));
        } else {
          int a = boundary(n.a, side);
          r = a < 0 ? -1 : lookup(TermKind::inv, n.index, -1, a, -1);
          if (r < 0 && a >= 0) r = by_signature(TermKind::inv, n.index, a, -1);
        }
        break;
    }
    bd_memo_[mk] = r;
    return r;
  }

  // A universe term congruent to the (absent) term kind(index, a, b).
  int by_signature(TermKind k, int index, int a, int b) {
    int ra = find(a), rb = b >= 0 ? find(b) : -1;
    int d = nodes_[a].dim;
    for (auto& bucket : by_size_[d])
      for (int id : bucket) {
        const ONode& n = nodes_[id];
        if (n.kind == k && n.index == index && find(n.a) == ra && (b < 0 || find(n.b) == rb)) return id;
      }
    return -1;
  }

  int boundary_class(int x, int p, Side side) {
    int y = x;
    for (int d = nodes_[x].dim; d > p && y >= 0; --d) y = boundary(y, side);
    return y < 0 ? -1 : find(y);
  }

  void generate(int d) {
    for (int s = 1; s <= limit_; ++s) {
      if (s == 1)
        for (int i = 0; i < g_.size(d); ++i) add(TermKind::gen, d, d, i, -1, -1);
      if (d >= 1 && s >= 2) {
        auto src = by_size_[d - 1][s - 1];
        for (int x : src) add(TermKind::id, d, 0, -1, x, -1);
      }
      if (mode_ == Mode::involutive && s >= 2)
        for (int q = 0; q < d; ++q) {
          auto src = by_size_[d][s - 1];
          for (int x : src) add(TermKind::inv, d, q, -1, x, -1);
        }
      if (s >= 3)
        for (int p = 0; p < d; ++p)
          for (int a = 1; a <= s - 2; ++a) {
            int b = s - 1 - a;
            std::unordered_map<int, std::vector<int>> by_tgt;
            for (int r : by_size_[d][b]) {
              int c = boundary_class(r, p, Side::target);
              if (c < 0) throw std::logic_error("oracle universe not closed under boundaries: " + to_string(to_term(r)));
              by_tgt[c].push_back(r);
            }
            auto lefts = by_size_[d][a];
            for (int l : lefts) {
              int c = boundary_class(l, p, Side::source);
              if (c < 0) throw std::logic_error("oracle universe not closed under boundaries: " + to_string(to_term(l)));
              auto it = by_tgt.find(c);
              if (it == by_tgt.end()) continue;
              for (int r : it->second) add(TermKind::comp, d, p, -1, l, r);
            }
          }
    }
  }

  void unite(int x, int y) {
    if (x < 0 || y < 0) return;
    x = find(x);
    y = find(y);
    if (x != y) parent_[std::max(x, y)] = std::min(x, y);
  }

  int id_depth(int x) const {
    int m = 0;
    while (nodes_[x].kind == TermKind::id) {
      x = nodes_[x].a;
      ++m;
    }
    return m;
  }

  int inv_of(int q, int x) const {
    if (q >= nodes_[x].dim) return x;
    return lookup(TermKind::inv, q, -1, x, -1);
  }

  int comp_of(int p, int l, int r) const {
    if (l < 0 || r < 0) return -1;
    return lookup(TermKind::comp, p, -1, l, r);
  }

  void generating_pairs(int d) {
    for (auto& bucket : by_size_[d])
      for (int t : bucket) {
        const ONode n = nodes_[t];
        if (n.kind == TermKind::inv) {
          const ONode& x = nodes_[n.a];
          int q = n.index;
          if (x.kind == TermKind::inv && x.index == q) unite(t, x.a);
          if (x.kind == TermKind::inv && x.index != q) {
            int inner = inv_of(q, x.a);
            if (inner >= 0) unite(t, inv_of(x.index, inner));
          }
          if (x.kind == TermKind::id) {
            int inner = inv_of(q, x.a);
            if (inner >= 0) unite(t, lookup(TermKind::id, 0, -1, inner, -1));
          }
          if (x.kind == TermKind::comp) {
            int il = inv_of(q, x.a), ir = inv_of(q, x.b);
            if (il >= 0 && ir >= 0)
              unite(t, x.index == q ? comp_of(x.index, ir, il) : comp_of(x.index, il, ir));
          }
        }
        if (n.kind == TermKind::comp) {
          int p = n.index;
          const ONode& l = nodes_[n.a];
          const ONode& r = nodes_[n.b];
          if (l.kind == TermKind::comp && l.index == p) unite(t, comp_of(p, l.a, comp_of(p, l.b, n.b)));
          if (id_depth(n.a) >= d - p) unite(t, n.b);
          if (id_depth(n.b) >= d - p) unite(t, n.a);
          if (p < d - 1 && l.kind == TermKind::id && r.kind == TermKind::id) {
            int inner = comp_of(p, l.a, r.a);
            if (inner >= 0) unite(t, lookup(TermKind::id, 0, -1, inner, -1));
          }
          if (l.kind == TermKind::comp && r.kind == TermKind::comp && l.index == r.index && l.index < p) {
            int q = l.index;
            unite(t, comp_of(q, comp_of(p, l.a, r.a), comp_of(p, l.b, r.b)));
          }
        }
      }
  }

  void congruence(int d) {
    bool changed = true;
    while (changed) {
      changed = false;
      std::unordered_map<Key, int, KeyHash> sig;
      for (auto& bucket : by_size_[d])
        for (int t : bucket) {
          const ONode& n = nodes_[t];
          if (n.kind == TermKind::gen) continue;
          Key k = key(n.kind, n.index, -1, find(n.a), n.b >= 0 ? find(n.b) : -1);
          auto [it, fresh] = sig.emplace(k, t);
          if (!fresh && find(it->second) != find(t)) {
            unite(it->second, t);
            changed = true;
          }
        }
    }
  }
};

} // namespace

OraclePartition congruence_closure_oracle(const GlobularSet& g, Mode mode, int max_nodes, const OracleOptions& opts) {
  OraclePartition out;
  if (max_nodes <= 0) return out;
  int top = opts.max_dim < 0 ? g.max_dim() : std::min(opts.max_dim, g.max_dim());
  Closure c(g, mode, max_nodes + opts.extra_nodes, opts.max_terms);
  c.run(top);
  out.universe_size = static_cast<long>(c.nodes().size());
  std::unordered_map<int, int> dense;
  for (int d = 0; d <= top; ++d)
    for (int s = 1; s <= max_nodes; ++s)
      for (int id : c.by_size()[d][s]) {
        int r = c.find(id);
        auto [it, fresh] = dense.emplace(r, out.num_classes);
        if (fresh) ++out.num_classes;
        out.terms.push_back(c.to_term(id));
        out.cls.push_back(it->second);
      }
  return out;
}

} // namespace omega
