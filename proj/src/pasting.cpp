#include "omegacat/pasting.hpp"

#include <algorithm>

namespace omega {

Label label_boundary(const GlobularSet& g, int dim, Label l, Side side) {
  if (dim <= 0) throw DomainError("boundary of a 0-cell label");
  unsigned top = 1u << (dim - 1);
  Side eff = (l.mask & top) ? opposite(side) : side;
  return {g.boundary(dim, l.cell, eff), l.mask & ~top};
}

Label node_label(const GlobularSet& g, const PNode& v, int depth, Side side) {
  if (v.kids.empty()) return v.label;
  const PNode& w = side == Side::source ? v.kids.front() : v.kids.back();
  return label_boundary(g, depth + 1, node_label(g, w, depth + 1, side), side);
}

Pasting pasting_gen(const GlobularSet& g, int dim, int cell) {
  if (cell < 0 || cell >= g.size(dim)) throw DomainError("pasting_gen: unknown cell");
  Pasting p;
  p.dim = dim;
  PNode* v = &p.root;
  for (int d = 0; d < dim; ++d) {
    v->kids.emplace_back();
    v = &v->kids.back();
  }
  v->label = {cell, 0};
  return p;
}

Pasting pasting_id(Pasting p) {
  ++p.dim;
  return p;
}

namespace {

void inv_rec(PNode& v, int depth, int q) {
  if (v.kids.empty()) {
    if (depth > q) v.label.mask ^= 1u << q;
    return;
  }
  if (depth == q) std::reverse(v.kids.begin(), v.kids.end());
  for (auto& w : v.kids) inv_rec(w, depth + 1, q);
}

void merge_rec(PNode& out, const PNode& l, const PNode& r, int depth, int p) {
  if (depth == p) {
    out.kids = r.kids;
    out.kids.insert(out.kids.end(), l.kids.begin(), l.kids.end());
    out.label = out.kids.empty() ? r.label : Label{};
    return;
  }
  if (l.kids.size() != r.kids.size()) throw DomainError("pasting_comp: shapes disagree below the gluing level");
  out.label = r.label;
  out.kids.resize(r.kids.size());
  for (size_t i = 0; i < r.kids.size(); ++i) merge_rec(out.kids[i], l.kids[i], r.kids[i], depth + 1, p);
}

void boundary_rec(const GlobularSet& g, PNode& out, const PNode& v, int depth, int n, Side side) {
  if (depth == n - 1) {
    out.kids.clear();
    out.label = v.kids.empty() ? v.label : node_label(g, v, depth, side);
    return;
  }
  out.label = v.label;
  out.kids.resize(v.kids.size());
  for (size_t i = 0; i < v.kids.size(); ++i) boundary_rec(g, out.kids[i], v.kids[i], depth + 1, n, side);
}

void key_rec(const PNode& v, std::string& out) {
  if (v.kids.empty()) {
    out += std::to_string(v.label.cell);
    if (v.label.mask) {
      out += '^';
      out += std::to_string(v.label.mask);
    }
    return;
  }
  out += '(';
  for (size_t i = 0; i < v.kids.size(); ++i) {
    if (i) out += ',';
    key_rec(v.kids[i], out);
  }
  out += ')';
}

int count_leaves(const PNode& v) {
  if (v.kids.empty()) return 1;
  int n = 0;
  for (auto& w : v.kids) n += count_leaves(w);
  return n;
}

int count_nodes(const PNode& v) {
  int n = 1;
  for (auto& w : v.kids) n += count_nodes(w);
  return n;
}

int node_height(const PNode& v) {
  int h = 0;
  for (auto& w : v.kids) h = std::max(h, 1 + node_height(w));
  return h;
}

Term readback_rec(const GlobularSet& g, const PNode& v, int depth, int n) {
  if (v.kids.empty()) {
    Term t = gen(g.ref(depth, v.label.cell));
    for (int q = 0; q < depth; ++q)
      if (v.label.mask & (1u << q)) t = inv(q, t);
    return id_term(t, n - depth);
  }
  Term acc = readback_rec(g, v.kids[0], depth + 1, n);
  for (size_t i = 1; i < v.kids.size(); ++i) acc = comp(depth, readback_rec(g, v.kids[i], depth + 1, n), acc);
  return acc;
}

} // namespace

Pasting pasting_inv(int q, Pasting p) {
  if (q < 0) throw DomainError("pasting_inv: negative index");
  if (q >= p.dim) return p;
  inv_rec(p.root, 0, q);
  return p;
}

Pasting pasting_boundary(const GlobularSet& g, const Pasting& x, Side side) {
  if (x.dim == 0) throw DomainError("boundary of a 0-dimensional pasting");
  Pasting out;
  out.dim = x.dim - 1;
  boundary_rec(g, out.root, x.root, 0, x.dim, side);
  return out;
}

Pasting pasting_iterated_boundary(const GlobularSet& g, const Pasting& x, int k, Side side) {
  if (k < 0 || k > x.dim) throw DomainError("iterated boundary: k out of range");
  Pasting r = x;
  for (int i = 0; i < k; ++i) r = pasting_boundary(g, r, side);
  return r;
}

Pasting pasting_comp(const GlobularSet& g, int p, const Pasting& l, const Pasting& r) {
  if (l.dim != r.dim) throw DomainError("pasting_comp: dimension mismatch");
  if (p < 0 || p >= l.dim) throw DomainError("pasting_comp: index out of range");
  int k = l.dim - p;
  if (!(pasting_iterated_boundary(g, r, k, Side::target) == pasting_iterated_boundary(g, l, k, Side::source)))
    throw DomainError("pasting_comp: boundaries do not match");
  Pasting out;
  out.dim = l.dim;
  merge_rec(out.root, l.root, r.root, 0, p);
  return out;
}

std::string pasting_key(const Pasting& p) {
  std::string out = std::to_string(p.dim) + ":";
  key_rec(p.root, out);
  return out;
}

int leaf_count(const Pasting& p) { return count_leaves(p.root); }
int node_count(const Pasting& p) { return count_nodes(p.root); }
int height(const Pasting& p) { return node_height(p.root); }

Pasting eval(const GlobularSet& g, const Term& t) {
  switch (t->kind) {
    case TermKind::gen: {
      int i = g.index(t->cell);
      if (i < 0) throw DomainError("eval: unknown cell " + t->cell.id);
      return pasting_gen(g, t->dim, i);
    }
    case TermKind::id:
      return pasting_id(eval(g, t->a));
    case TermKind::inv:
      return pasting_inv(t->index, eval(g, t->a));
    case TermKind::comp:
      return pasting_comp(g, t->index, eval(g, t->a), eval(g, t->b));
  }
  return {};
}

Term readback(const GlobularSet& g, const Pasting& p) { return readback_rec(g, p.root, 0, p.dim); }

} // namespace omega
