#include "omegacat/term.hpp"

#include <optional>
#include <unordered_map>

#include "omegacat/pasting.hpp"

namespace omega {

std::string to_string(Mode m) { return m == Mode::strict ? "strict" : "inv"; }

Mode parse_mode(const std::string& s) {
  if (s == "strict") return Mode::strict;
  if (s == "inv" || s == "involutive") return Mode::involutive;
  throw DomainError("unknown mode " + s);
}

namespace {

size_t mix(size_t h, size_t v) { return h ^ (v + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2)); }

Term make(TermKind k, int dim, int index, CellRef cell, Term a, Term b) {
  auto n = std::make_shared<TermNode>();
  n->kind = k;
  n->dim = dim;
  n->index = index;
  n->cell = std::move(cell);
  n->a = std::move(a);
  n->b = std::move(b);
  n->size = 1 + (n->a ? n->a->size : 0) + (n->b ? n->b->size : 0);
  n->gens = (k == TermKind::gen ? 1 : 0) + (n->a ? n->a->gens : 0) + (n->b ? n->b->gens : 0);
  size_t h = mix(static_cast<size_t>(k) + 1, static_cast<size_t>(index) * 31 + dim);
  if (k == TermKind::gen) h = mix(h, std::hash<std::string>()(n->cell.id));
  if (n->a) h = mix(h, n->a->hash);
  if (n->b) h = mix(h, n->b->hash);
  n->hash = h;
  return n;
}

} // namespace

Term gen(const CellRef& c) { return make(TermKind::gen, c.dim, 0, c, nullptr, nullptr); }
Term gen(int dim, const std::string& id) { return gen(CellRef{dim, id}); }

Term id_term(const Term& t) { return make(TermKind::id, t->dim + 1, 0, {}, t, nullptr); }

Term id_term(const Term& t, int times) {
  Term r = t;
  for (int i = 0; i < times; ++i) r = id_term(r);
  return r;
}

Term comp(int p, const Term& l, const Term& r) {
  if (l->dim != r->dim) throw DomainError("comp: operand dimensions differ");
  if (p < 0 || p >= l->dim) throw DomainError("comp: index out of range");
  return make(TermKind::comp, l->dim, p, {}, l, r);
}

Term inv(int q, const Term& t) {
  if (q < 0) throw DomainError("inv: negative index");
  if (q >= t->dim) return t;
  return make(TermKind::inv, t->dim, q, {}, t, nullptr);
}

bool term_equal(const Term& x, const Term& y) {
  if (x == y) return true;
  if (!x || !y) return false;
  if (x->hash != y->hash || x->kind != y->kind || x->dim != y->dim || x->index != y->index ||
      x->size != y->size)
    return false;
  if (x->kind == TermKind::gen) return x->cell == y->cell;
  if (!term_equal(x->a, y->a)) return false;
  return x->kind != TermKind::comp || term_equal(x->b, y->b);
}

int term_compare(const Term& x, const Term& y) {
  if (x == y) return 0;
  if (x->kind != y->kind) return static_cast<int>(x->kind) < static_cast<int>(y->kind) ? -1 : 1;
  if (x->dim != y->dim) return x->dim < y->dim ? -1 : 1;
  if (x->index != y->index) return x->index < y->index ? -1 : 1;
  if (x->kind == TermKind::gen) {
    if (x->cell == y->cell) return 0;
    return x->cell < y->cell ? -1 : 1;
  }
  int c = term_compare(x->a, y->a);
  if (c || x->kind != TermKind::comp) return c;
  return term_compare(x->b, y->b);
}

SExpr to_sexpr(const Term& t) {
  switch (t->kind) {
    case TermKind::gen:
      return list({atom("gen"), atom(t->cell.id)});
    case TermKind::id:
      return list({atom("id"), to_sexpr(t->a)});
    case TermKind::comp:
      return list({atom("comp"), atom(std::to_string(t->index)), to_sexpr(t->a), to_sexpr(t->b)});
    case TermKind::inv:
      return list({atom("inv"), atom(std::to_string(t->index)), to_sexpr(t->a)});
  }
  return {};
}

std::string to_string(const Term& t) { return to_string(to_sexpr(t)); }

Term parse_term(const SExpr& e, const GlobularSet& g) {
  if (!e.is_list || e.items.empty() || !e.items[0].is_atom()) e.fail("expected term");
  const std::string& h = e.items[0].atom;
  auto need = [&](size_t n) {
    if (e.items.size() != n) e.fail("'" + h + "' expects " + std::to_string(n - 1) + " arguments");
  };
  if (h == "gen") {
    if (e.items.size() != 2 && e.items.size() != 3) e.fail("'gen' expects a cell id and optional dimension");
    const std::string& id = e.items[1].as_atom();
    if (e.items.size() == 3) {
      int d = e.items[2].as_int();
      if (g.index(d, id) < 0) e.items[1].fail("unknown cell " + id + " in dimension " + std::to_string(d));
      return gen(d, id);
    }
    int found = -1;
    for (int d = 0; d <= g.max_dim(); ++d)
      if (g.index(d, id) >= 0) {
        if (found >= 0) e.items[1].fail("cell id " + id + " is ambiguous; give its dimension");
        found = d;
      }
    if (found < 0) e.items[1].fail("unknown cell " + id);
    return gen(found, id);
  }
  if (h == "id") {
    need(2);
    Term a = parse_term(e.items[1], g);
    if (a->dim + 1 > g.max_dim()) e.fail("identity exceeds max_dim");
    return id_term(a);
  }
  if (h == "comp") {
    need(4);
    int p = e.items[1].as_int();
    Term l = parse_term(e.items[2], g);
    Term r = parse_term(e.items[3], g);
    if (l->dim != r->dim) e.fail("comp operands have different dimensions");
    if (p < 0 || p >= l->dim) e.fail("comp index out of range");
    return comp(p, l, r);
  }
  if (h == "inv") {
    need(3);
    int q = e.items[1].as_int();
    if (q < 0) e.items[1].fail("negative involution index");
    return inv(q, parse_term(e.items[2], g));
  }
  e.fail("unknown term constructor '" + h + "'");
}

Term parse_term(const std::string& text, const GlobularSet& g) { return parse_term(parse_sexpr(text), g); }

Term boundary_of_term(const GlobularSet& g, const Term& t, Side side) {
  if (t->dim == 0) throw DomainError("boundary of a 0-dimensional term");
  switch (t->kind) {
    case TermKind::gen: {
      int i = g.index(t->cell);
      if (i < 0) throw DomainError("unknown cell " + t->cell.id);
      return gen(g.ref(t->dim - 1, g.boundary(t->dim, i, side)));
    }
    case TermKind::id:
      return t->a;
    case TermKind::comp:
      if (t->index == t->dim - 1) return boundary_of_term(g, side == Side::source ? t->b : t->a, side);
      return comp(t->index, boundary_of_term(g, t->a, side), boundary_of_term(g, t->b, side));
    case TermKind::inv:
      if (t->index == t->dim - 1) return boundary_of_term(g, t->a, opposite(side));
      return inv(t->index, boundary_of_term(g, t->a, side));
  }
  return t;
}

Term iterated_term_boundary(const GlobularSet& g, const Term& t, int k, Side side) {
  if (k < 0 || k > t->dim) throw DomainError("iterated boundary: k out of range");
  Term r = t;
  for (int i = 0; i < k; ++i) r = boundary_of_term(g, r, side);
  return r;
}

Term substitute(const Term& t, const std::function<Term(const CellRef&)>& f) {
  switch (t->kind) {
    case TermKind::gen: {
      Term r = f(t->cell);
      if (r->dim != t->dim) throw DomainError("substitute: dimension mismatch for " + t->cell.id);
      return r;
    }
    case TermKind::id:
      return id_term(substitute(t->a, f));
    case TermKind::comp:
      return comp(t->index, substitute(t->a, f), substitute(t->b, f));
    case TermKind::inv:
      return inv(t->index, substitute(t->a, f));
  }
  return t;
}

Term relabel(const Term& t, const GlobularMorphism& m) {
  return substitute(t, [&](const CellRef& c) { return gen(m(c)); });
}

bool contains_inv(const Term& t) {
  if (t->kind == TermKind::inv) return true;
  if (t->a && contains_inv(t->a)) return true;
  return t->b && contains_inv(t->b);
}

Term subterm(const Term& t, const std::vector<int>& path) {
  Term r = t;
  for (int i : path) r = i == 0 ? r->a : r->b;
  return r;
}

namespace {

Term rebuild(const Term& t, const Term& a, const Term& b) {
  switch (t->kind) {
    case TermKind::gen:
      return t;
    case TermKind::id:
      return id_term(a);
    case TermKind::comp:
      return comp(t->index, a, b);
    case TermKind::inv:
      return inv(t->index, a);
  }
  return t;
}

Term replace_rec(const Term& t, const std::vector<int>& path, size_t at, const Term& r) {
  if (at == path.size()) return r;
  if (path[at] == 0) return rebuild(t, replace_rec(t->a, path, at + 1, r), t->b);
  return rebuild(t, t->a, replace_rec(t->b, path, at + 1, r));
}

} // namespace

Term replace_at(const Term& t, const std::vector<int>& path, const Term& r) { return replace_rec(t, path, 0, r); }

std::string path_string(const std::vector<int>& path) {
  std::string s = "/";
  for (size_t i = 0; i < path.size(); ++i) {
    if (i) s += '/';
    s += std::to_string(path[i]);
  }
  return s;
}

namespace {

struct WfChecker {
  const GlobularSet& g;
  Mode mode;
  std::vector<Violation> out;
  std::vector<int> path;

  std::optional<Pasting> check(const Term& t) {
    switch (t->kind) {
      case TermKind::gen: {
        int i = g.index(t->cell);
        if (i < 0) {
          out.push_back({"unknown-cell", path_string(path), "cell " + t->cell.id + " of dimension " +
                                                                 std::to_string(t->cell.dim) + " not in Q"});
          return std::nullopt;
        }
        return pasting_gen(g, t->dim, i);
      }
      case TermKind::id: {
        if (t->dim > g.max_dim()) out.push_back({"dimension", path_string(path), "identity exceeds max_dim"});
        path.push_back(0);
        auto a = check(t->a);
        path.pop_back();
        if (!a) return std::nullopt;
        return pasting_id(*a);
      }
      case TermKind::inv: {
        if (mode == Mode::strict)
          out.push_back({"involution-in-strict-mode", path_string(path), "Inv node not admitted in strict mode"});
        path.push_back(0);
        auto a = check(t->a);
        path.pop_back();
        if (!a) return std::nullopt;
        return pasting_inv(t->index, *a);
      }
      case TermKind::comp: {
        path.push_back(0);
        auto a = check(t->a);
        path.back() = 1;
        auto b = check(t->b);
        path.pop_back();
        if (!a || !b) return std::nullopt;
        int k = t->dim - t->index;
        Pasting tb = pasting_iterated_boundary(g, *b, k, Side::target);
        Pasting sa = pasting_iterated_boundary(g, *a, k, Side::source);
        if (!(tb == sa)) {
          out.push_back({"composability", path_string(path),
                         "target^" + std::to_string(t->index) + " of right operand " + to_string(readback(g, tb)) +
                             " differs from source^" + std::to_string(t->index) + " of left operand " +
                             to_string(readback(g, sa))});
          return std::nullopt;
        }
        return pasting_comp(g, t->index, *a, *b);
      }
    }
    return std::nullopt;
  }
};

} // namespace

std::vector<Violation> well_formed(const Term& t, const GlobularSet& g, Mode mode) {
  WfChecker c{g, mode, {}, {}};
  if (t->dim > g.max_dim()) c.out.push_back({"dimension", "/", "term dimension exceeds max_dim"});
  c.check(t);
  return c.out;
}

namespace {

struct Entry {
  Term term;
  Pasting value;
  std::vector<std::string> src_key; // indexed by p
  std::vector<std::string> tgt_key;
};

} // namespace

void enumerate_terms(const GlobularSet& g, Mode mode, int max_nodes, int dim,
                     const std::function<void(const Term&)>& emit) {
  if (dim < 0 || dim > g.max_dim()) throw DomainError("enumerate_terms: dimension out of range");
  if (max_nodes <= 0) return;
  // table[d][s] = entries of dimension d with exactly s nodes
  std::vector<std::vector<std::vector<Entry>>> table(dim + 1, std::vector<std::vector<Entry>>(max_nodes + 1));
  auto finish = [&](Term t, Pasting v) {
    Entry e{std::move(t), std::move(v), {}, {}};
    int n = e.term->dim;
    e.src_key.resize(n);
    e.tgt_key.resize(n);
    Pasting s = e.value, tt = e.value;
    for (int p = n - 1; p >= 0; --p) {
      s = pasting_boundary(g, s, Side::source);
      tt = pasting_boundary(g, tt, Side::target);
      e.src_key[p] = pasting_key(s);
      e.tgt_key[p] = pasting_key(tt);
    }
    return e;
  };
  for (int s = 1; s <= max_nodes; ++s) {
    for (int d = 0; d <= dim; ++d) {
      auto& out = table[d][s];
      if (s == 1)
        for (int i = 0; i < g.size(d); ++i) out.push_back(finish(gen(g.ref(d, i)), pasting_gen(g, d, i)));
      if (d >= 1 && s >= 2)
        for (auto& x : table[d - 1][s - 1]) out.push_back(finish(id_term(x.term), pasting_id(x.value)));
      if (mode == Mode::involutive && s >= 2)
        for (int q = 0; q < d; ++q)
          for (auto& x : table[d][s - 1]) out.push_back(finish(inv(q, x.term), pasting_inv(q, x.value)));
      if (s >= 3)
        for (int p = 0; p < d; ++p)
          for (int a = 1; a <= s - 2; ++a) {
            int b = s - 1 - a;
            std::unordered_map<std::string, std::vector<const Entry*>> by_tgt;
            for (auto& r : table[d][b]) by_tgt[r.tgt_key[p]].push_back(&r);
            for (auto& l : table[d][a]) {
              auto it = by_tgt.find(l.src_key[p]);
              if (it == by_tgt.end()) continue;
              for (const Entry* r : it->second)
                out.push_back(finish(comp(p, l.term, r->term), pasting_comp(g, p, l.value, r->value)));
            }
          }
    }
    for (auto& e : table[dim][s]) emit(e.term);
  }
}

std::vector<Term> enumerate_terms(const GlobularSet& g, Mode mode, int max_nodes, int dim) {
  std::vector<Term> out;
  enumerate_terms(g, mode, max_nodes, dim, [&](const Term& t) { out.push_back(t); });
  return out;
}

} // namespace omega
