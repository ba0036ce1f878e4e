#include "omegacat/document.hpp"

#include <set>
#include <tuple>
#include <sstream>
#include <unordered_map>

#include "omegacat/normalizer.hpp"

namespace omega {

namespace {

struct Header {
  std::string name;
  std::map<std::string, const SExpr*> keys;
  std::vector<const SExpr*> body;
};

Header read_header(const SExpr& e) {
  Header h;
  h.name = e.items[0].atom;
  size_t i = 1;
  if (i < e.items.size() && e.items[i].is_atom() && (e.items[i].atom.empty() || e.items[i].atom[0] != ':'))
    h.name = e.items[i++].atom;
  for (; i < e.items.size(); ++i) {
    const SExpr& x = e.items[i];
    if (x.is_atom() && !x.atom.empty() && x.atom[0] == ':') {
      if (i + 1 >= e.items.size()) x.fail("keyword " + x.atom + " has no value");
      if (!h.keys.emplace(x.atom, &e.items[i + 1]).second) x.fail("repeated keyword " + x.atom);
      ++i;
    } else {
      h.body.push_back(&x);
    }
  }
  return h;
}

const SExpr* key(const Header& h, const std::string& k) {
  auto it = h.keys.find(k);
  return it == h.keys.end() ? nullptr : it->second;
}

int cell_at(const SExpr& e, const GlobularSet& g, int dim) {
  if (dim < 0 || dim > g.max_dim()) e.fail("dimension " + std::to_string(dim) + " out of range");
  int i = g.index(dim, e.as_atom());
  if (i < 0) e.fail("unknown cell " + e.atom + " in dimension " + std::to_string(dim));
  return i;
}

bool is_term_head(const SExpr& e) {
  return e.head_is("gen") || e.head_is("id") || e.head_is("comp") || e.head_is("inv");
}

class Parser {
 public:
  explicit Parser(std::vector<Violation>* collect) : collect_(collect) {}

  Document run(std::string_view text) {
    for (auto& e : parse_sexprs(text)) block(e);
    return std::move(d_);
  }

 private:
  Document d_;
  std::vector<Violation>* collect_;
  std::set<std::string> dropped_;

  // Semantic problems: collected in validation mode, fatal otherwise.
  void problem(const SExpr& at, const std::string& block, const std::vector<Violation>& vs) {
    if (vs.empty()) return;
    if (!collect_) at.fail(block + ": " + vs.front().kind + " at " + vs.front().where + ": " + vs.front().detail);
    for (auto& v : vs) collect_->push_back({v.kind, block + (v.where.empty() ? "" : "/" + v.where), v.detail});
  }

  void claim(const SExpr& e, const std::string& name) {
    for (auto& entry : d_.order)
      if (entry.second == name) e.fail("duplicate name " + name);
    if (dropped_.count(name)) e.fail("duplicate name " + name);
  }

  // Resolves a reference; false if it names a block dropped for violations.
  template <class M>
  bool resolve(const SExpr& at, const Header& h, const std::string& k, const M& blocks, const std::string& kind,
               std::string& out) {
    if (const SExpr* r = key(h, k)) {
      out = r->as_atom();
      if (blocks.count(out)) return true;
      if (dropped_.count(out)) return false;
      r->fail("unresolved reference " + out);
    }
    if (blocks.size() == 1) {
      out = blocks.begin()->first;
      return true;
    }
    at.fail(blocks.empty() ? "no " + kind + " block to refer to" : "ambiguous " + kind + ": name it with " + k);
  }

  void drop(const std::string& name) { dropped_.insert(name); }

  void block(const SExpr& e) {
    if (!e.is_list || e.items.empty() || !e.items[0].is_atom()) e.fail("expected a block");
    if (is_term_head(e)) {
      SExpr wrapped = list({atom("term"), e});
      wrapped.line = e.line;
      wrapped.col = e.col;
      return term(wrapped, read_header(wrapped));
    }
    const std::string& kind = e.items[0].atom;
    Header h = read_header(e);
    if (kind == "gset") return gset(e, h);
    if (kind == "term") return term(e, h);
    if (kind == "collection") return collection(e, h);
    if (kind == "operad") return operad(e, h);
    if (kind == "algebra") return algebra(e, h);
    e.items[0].fail("unknown block " + kind);
  }

  void gset(const SExpr& e, const Header& h) {
    claim(e, h.name);
    const SExpr* md = key(h, ":maxdim");
    if (!md) e.fail("gset needs :maxdim");
    GlobularData data;
    std::map<std::pair<int, std::string>, long> declared; // first position of each id
    std::vector<std::tuple<const SExpr*, int, std::string, std::string>> refs;
    data.max_dim = md->as_int();
    data.cells.resize(std::max(0, data.max_dim + 1));
    for (const SExpr* c : h.body) {
      if (!c->head_is("cells") || c->items.size() < 2) c->fail("expected (cells DIM ...)");
      int dim = c->items[1].as_int();
      if (dim < 0) c->items[1].fail("negative dimension");
      if (dim >= static_cast<int>(data.cells.size())) data.cells.resize(dim + 1);
      for (size_t i = 2; i < c->items.size(); ++i) {
        const SExpr& x = c->items[i];
        if (dim == 0) {
          data.cells[0].push_back({x.as_atom(), "", ""});
        } else {
          if (!x.is_list || x.items.size() != 3) x.fail("expected (id src tgt)");
          data.cells[dim].push_back({x.items[0].as_atom(), x.items[1].as_atom(), x.items[2].as_atom()});
          refs.emplace_back(&x, dim, x.items[1].as_atom(), x.items[2].as_atom());
        }
        declared.emplace(std::pair{dim, data.cells[dim].back().id}, x.line * 100000L + x.col);
      }
    }
    for (auto& [at, dim, src, tgt] : refs)
      for (const std::string* r : {&src, &tgt}) {
        auto later = declared.find({dim - 1, *r});
        if (later != declared.end() && later->second > at->line * 100000L + at->col)
          at->fail("forward reference to " + *r);
      }
    auto vs = validate_globular(data);
    problem(e, h.name, vs);
    if (!vs.empty()) return drop(h.name);
    d_.gsets[h.name] = build_globular(data);
    d_.order.push_back({"gset", h.name});
  }

  void term(const SExpr& e, const Header& h) {
    claim(e, h.name);
    if (h.body.size() != 1) e.fail("term block holds exactly one term");
    TermBlock b;
    if (!resolve(e, h, ":gset", d_.gsets, "gset", b.gset)) return drop(h.name);
    try {
      b.term = parse_term(*h.body[0], *d_.gsets[b.gset]);
    } catch (const DomainError& err) {
      h.body[0]->fail(err.what());
    }
    d_.terms[h.name] = std::move(b);
    d_.order.push_back({"term", h.name});
  }

  void collection(const SExpr& e, const Header& h) {
    claim(e, h.name);
    CollectionBlock b;
    if (const SExpr* t = key(h, ":trees")) {
      const SExpr* bd = key(h, ":bound");
      if (!bd) e.fail("collection :trees needs :bound");
      b.trees = t->as_int();
      b.bound = bd->as_int();
      if (b.trees < 0 || b.bound < 0) e.fail("negative size");
      b.coll = tree_collection(b.trees, b.bound);
    } else {
      if (!resolve(e, h, ":gset", d_.gsets, "gset", b.gset)) return drop(h.name);
      GSetPtr g = d_.gsets[b.gset];
      std::vector<std::vector<std::optional<DecoratedTree>>> set(g->max_dim() + 1);
      for (int n = 0; n <= g->max_dim(); ++n) set[n].resize(g->size(n));
      for (const SExpr* a : h.body) {
        if (!a->head_is("arity") || (a->items.size() != 3 && a->items.size() != 4)) a->fail("expected (arity [DIM] CELL TREE)");
        int dim = -1, i = -1;
        const SExpr& cell = a->items[a->items.size() - 2];
        if (a->items.size() == 4) {
          dim = a->items[1].as_int();
          i = cell_at(cell, *g, dim);
        } else {
          for (int n = 0; n <= g->max_dim(); ++n)
            if (int j = g->index(n, cell.as_atom()); j >= 0) {
              if (dim >= 0) cell.fail("cell " + cell.atom + " occurs in several dimensions; give DIM");
              dim = n;
              i = j;
            }
          if (dim < 0) cell.fail("unknown cell " + cell.atom);
        }
        if (set[dim][i]) a->fail("second arity for " + cell.atom);
        try {
          set[dim][i] = parse_tree(a->items.back().as_atom());
        } catch (const DomainError& err) {
          a->items.back().fail(err.what());
        }
      }
      b.coll.carrier = g;
      b.coll.proj.resize(g->max_dim() + 1);
      std::vector<Violation> missing;
      for (int n = 0; n <= g->max_dim(); ++n)
        for (int i = 0; i < g->size(n); ++i) {
          if (!set[n][i]) {
            missing.push_back({"projection", g->id(n, i), "no arity given"});
            continue;
          }
          b.coll.proj[n].push_back(*set[n][i]);
        }
      problem(e, h.name, missing);
      if (!missing.empty()) return drop(h.name);
    }
    auto vs = validate_collection(b.coll);
    problem(e, h.name, vs);
    if (!vs.empty()) return drop(h.name);
    d_.collections[h.name] = std::move(b);
    d_.order.push_back({"collection", h.name});
  }

  void operad(const SExpr& e, const Header& h) {
    claim(e, h.name);
    OperadBlock b;
    if (const SExpr* t = key(h, ":terminal")) {
      const SExpr* bd = key(h, ":bound");
      if (!bd) e.fail("operad :terminal needs :bound");
      b.terminal = t->as_int();
      b.bound = bd->as_int();
      if (b.terminal < 0 || b.bound < 0) e.fail("negative size");
    } else {
      if (!resolve(e, h, ":collection", d_.collections, "collection", b.collection)) return drop(h.name);
      const TCollection& c = d_.collections[b.collection].coll;
      const GlobularSet& g = *c.carrier;
      int N = g.max_dim();
      if (const SExpr* sb = key(h, ":shape-bound")) b.shape_bound = sb->as_int();
      b.eta.assign(N + 1, -1);
      for (const SExpr* x : h.body) {
        if (x->head_is("eta")) {
          if (static_cast<int>(x->items.size()) > N + 2) x->fail("more units than dimensions");
          for (size_t n = 1; n < x->items.size(); ++n)
            if (x->items[n].as_atom() != "-") b.eta[n - 1] = cell_at(x->items[n], g, static_cast<int>(n) - 1);
        } else if (x->head_is("mu")) {
          if (x->items.size() != 5) x->fail("expected (mu DIM X TERM CELL)");
          MuEntry m;
          m.dim = x->items[1].as_int();
          m.x = cell_at(x->items[2], g, m.dim);
          m.tau = cell_term(x->items[3], c.carrier, m.dim);
          m.result = cell_at(x->items[4], g, m.dim);
          b.mu.push_back(std::move(m));
        } else if (x->head_is("kappa")) {
          if (x->items.size() != 6) x->fail("expected (kappa DIM PLUS TREE MINUS CELL)");
          KappaEntry k;
          int dim = x->items[1].as_int();
          if (dim < 1) x->items[1].fail("contraction cells start in dimension 1");
          k.triple.plus = cell_at(x->items[2], g, dim - 1);
          try {
            k.triple.shape = parse_tree(x->items[3].as_atom());
          } catch (const DomainError& err) {
            x->items[3].fail(err.what());
          }
          if (k.triple.shape.dim != dim) x->items[3].fail("tree of the wrong dimension");
          k.triple.minus = cell_at(x->items[4], g, dim - 1);
          k.result = cell_at(x->items[5], g, dim);
          b.kappa.push_back(std::move(k));
        } else if (x->head_is("stage")) {
          if (x->items.size() != 4) x->fail("expected (stage DIM CELL K)");
          if (b.stage.empty()) {
            b.stage.resize(N + 1);
            for (int n = 0; n <= N; ++n) b.stage[n].assign(g.size(n), 0);
          }
          int dim = x->items[1].as_int();
          b.stage[dim][cell_at(x->items[2], g, dim)] = x->items[3].as_int();
        } else {
          x->fail("expected eta, mu, kappa or stage");
        }
      }
    }
    d_.operads[h.name] = std::move(b);
    d_.order.push_back({"operad", h.name});
  }

  void algebra(const SExpr& e, const Header& h) {
    claim(e, h.name);
    AlgebraBlock b;
    if (const SExpr* t = key(h, ":terminal")) {
      const SExpr* bd = key(h, ":bound");
      if (!bd) e.fail("algebra :terminal needs :bound");
      b.terminal = t->as_int();
      b.bound = bd->as_int();
      if (b.terminal < 0 || b.bound < 0) e.fail("negative size");
    } else {
      if (!resolve(e, h, ":gset", d_.gsets, "gset", b.gset)) return drop(h.name);
      GSetPtr g = d_.gsets[b.gset];
      for (const SExpr* x : h.body) {
        if (!x->head_is("act") || x->items.size() != 5) x->fail("expected (act DIM OP TERM CELL)");
        ActEntry a;
        a.dim = x->items[1].as_int();
        a.op = x->items[2].as_atom();
        a.x = cell_term(x->items[3], g, a.dim);
        a.result = cell_at(x->items[4], *g, a.dim);
        b.act.push_back(std::move(a));
      }
    }
    d_.algebras[h.name] = std::move(b);
    d_.order.push_back({"algebra", h.name});
  }

  static FreeCell cell_term(const SExpr& e, const GSetPtr& g, int dim) {
    try {
      FreeCell c = make_cell(g, parse_term(e, *g), Mode::involutive);
      if (c.dim() != dim) e.fail("term of dimension " + std::to_string(c.dim()) + ", expected " + std::to_string(dim));
      return c;
    } catch (const DomainError& err) {
      e.fail(err.what());
    }
  }
};

std::string quoted(const std::string& s) { return to_string(atom(s)); }

void print_gset(std::ostream& out, const std::string& name, const GlobularSet& g) {
  out << "(gset " << quoted(name) << " :maxdim " << g.max_dim();
  for (int n = 0; n <= g.max_dim(); ++n) {
    if (g.size(n) == 0) continue;
    out << "\n  (cells " << n;
    for (int i = 0; i < g.size(n); ++i) {
      if (n == 0)
        out << " " << quoted(g.id(0, i));
      else
        out << " (" << quoted(g.id(n, i)) << " " << quoted(g.id(n - 1, g.src(n, i))) << " "
            << quoted(g.id(n - 1, g.tgt(n, i))) << ")";
    }
    out << ")";
  }
  out << ")\n";
}

} // namespace

Document parse_document(std::string_view text) { return Parser(nullptr).run(text); }

std::vector<Violation> validate_document(std::string_view text) {
  std::vector<Violation> out;
  Parser(&out).run(text);
  return out;
}

std::string print_document(const Document& d) {
  std::ostringstream out;
  for (auto& [kind, name] : d.order) {
    if (kind == "gset") {
      print_gset(out, name, *d.gsets.at(name));
    } else if (kind == "term") {
      auto& t = d.terms.at(name);
      out << "(term " << quoted(name) << " :gset " << quoted(t.gset) << " " << to_string(t.term) << ")\n";
    } else if (kind == "collection") {
      auto& c = d.collections.at(name);
      out << "(collection " << quoted(name);
      if (c.trees >= 0) {
        out << " :trees " << c.trees << " :bound " << c.bound << ")\n";
        continue;
      }
      out << " :gset " << quoted(c.gset);
      const GlobularSet& g = *c.coll.carrier;
      for (int n = 0; n <= g.max_dim(); ++n)
        for (int i = 0; i < g.size(n); ++i)
          out << "\n  (arity " << n << " " << quoted(g.id(n, i)) << " " << quoted(to_string(c.coll.pi(n, i))) << ")";
      out << ")\n";
    } else if (kind == "operad") {
      auto& o = d.operads.at(name);
      out << "(operad " << quoted(name);
      if (o.terminal >= 0) {
        out << " :terminal " << o.terminal << " :bound " << o.bound << ")\n";
        continue;
      }
      const GlobularSet& g = *d.collections.at(o.collection).coll.carrier;
      out << " :collection " << quoted(o.collection) << " :shape-bound " << o.shape_bound;
      out << "\n  (eta";
      for (int n = 0; n < static_cast<int>(o.eta.size()); ++n) out << " " << (o.eta[n] < 0 ? "-" : quoted(g.id(n, o.eta[n])));
      out << ")";
      for (auto& m : o.mu)
        out << "\n  (mu " << m.dim << " " << quoted(g.id(m.dim, m.x)) << " " << m.tau.key() << " "
            << quoted(g.id(m.dim, m.result)) << ")";
      for (auto& k : o.kappa) {
        int n = k.triple.dim();
        out << "\n  (kappa " << n << " " << quoted(g.id(n - 1, k.triple.plus)) << " " << quoted(to_string(k.triple.shape))
            << " " << quoted(g.id(n - 1, k.triple.minus)) << " " << quoted(g.id(n, k.result)) << ")";
      }
      for (int n = 0; n < static_cast<int>(o.stage.size()); ++n)
        for (int i = 0; i < static_cast<int>(o.stage[n].size()); ++i)
          if (o.stage[n][i]) out << "\n  (stage " << n << " " << quoted(g.id(n, i)) << " " << o.stage[n][i] << ")";
      out << ")\n";
    } else if (kind == "algebra") {
      auto& a = d.algebras.at(name);
      out << "(algebra " << quoted(name);
      if (a.terminal >= 0) {
        out << " :terminal " << a.terminal << " :bound " << a.bound << ")\n";
        continue;
      }
      const GlobularSet& g = *d.gsets.at(a.gset);
      out << " :gset " << quoted(a.gset);
      for (auto& x : a.act)
        out << "\n  (act " << x.dim << " " << quoted(x.op) << " " << x.x.key() << " " << quoted(g.id(x.dim, x.result))
            << ")";
      out << ")\n";
    }
  }
  return out.str();
}

bool Document::operator==(const Document& o) const { return print_document(*this) == print_document(o); }

const std::string& pick(const Document& d, const std::string& kind, const std::string& name) {
  for (auto& [k, n] : d.order)
    if (k == kind && (name.empty() || n == name)) {
      if (!name.empty()) return n;
      for (auto& [k2, n2] : d.order)
        if (k2 == kind && &n2 != &n) throw DomainError("several " + kind + " blocks; choose one by name");
      return n;
    }
  throw DomainError(name.empty() ? "no " + kind + " block" : "no " + kind + " block named " + name);
}

ContractedOperad build_operad(const Document& d, const std::string& name) {
  const OperadBlock& b = d.operads.at(name);
  if (b.terminal >= 0) return terminal_operad(b.terminal, b.bound);
  struct Tables {
    std::unordered_map<std::string, int> mu;
    std::map<ParTriple, int> kappa;
  };
  auto t = std::make_shared<Tables>();
  for (auto& m : b.mu) {
    auto [it, fresh] = t->mu.emplace(std::to_string(m.dim) + "|" + std::to_string(m.x) + "|" + m.tau.key(), m.result);
    if (!fresh && it->second != m.result) throw DomainError("operad " + name + ": two values for one multiplication");
  }
  for (auto& k : b.kappa) {
    auto [it, fresh] = t->kappa.emplace(k.triple, k.result);
    if (!fresh && it->second != k.result) throw DomainError("operad " + name + ": two values for one contraction");
  }
  ContractedOperad p;
  p.coll = d.collections.at(b.collection).coll;
  p.eta = b.eta;
  p.shape_bound = b.shape_bound;
  p.stage = b.stage;
  p.mu = [t](int n, int x, const FreeCell& tau) -> std::optional<int> {
    auto it = t->mu.find(std::to_string(n) + "|" + std::to_string(x) + "|" + tau.key());
    if (it == t->mu.end()) return std::nullopt;
    return it->second;
  };
  p.kappa = [t](const ParTriple& k) -> std::optional<int> {
    auto it = t->kappa.find(k);
    if (it == t->kappa.end()) return std::nullopt;
    return it->second;
  };
  return p;
}

TAlgebra build_algebra(const Document& d, const std::string& name, const ContractedOperad& p) {
  const AlgebraBlock& b = d.algebras.at(name);
  if (b.terminal >= 0) return terminal_algebra(b.terminal, b.bound);
  auto table = std::make_shared<std::unordered_map<std::string, int>>();
  for (auto& a : b.act) {
    if (a.dim > p.max_dim()) throw DomainError("algebra " + name + ": action above the operad's dimension");
    int op = p.coll.carrier->index(a.dim, a.op);
    if (op < 0) throw DomainError("algebra " + name + ": unknown operation " + a.op);
    auto [it, fresh] = table->emplace(std::to_string(a.dim) + "|" + std::to_string(op) + "|" + a.x.key(), a.result);
    if (!fresh && it->second != a.result) throw DomainError("algebra " + name + ": two values for one action");
  }
  return {d.gsets.at(b.gset), [table](int n, int op, const FreeCell& x) -> std::optional<int> {
            auto it = table->find(std::to_string(n) + "|" + std::to_string(op) + "|" + x.key());
            if (it == table->end()) return std::nullopt;
            return it->second;
          }};
}

Document export_operad(const FreeOperad& f, const std::string& name) {
  const TCollection& q = f.operad.coll;
  const GlobularSet& src = *q.carrier;
  int N = src.max_dim();
  auto g = std::make_shared<GlobularSet>(N);
  for (int n = 0; n <= N; ++n)
    for (int i = 0; i < src.size(n); ++i) {
      std::string id = "c" + std::to_string(n) + "_" + std::to_string(i);
      if (n == 0)
        g->add(0, id);
      else
        g->add(n, id, src.src(n, i), src.tgt(n, i));
    }
  Document d;
  std::string gname = name + "-cells", cname = name + "-arity";
  d.gsets[gname] = g;
  d.order.push_back({"gset", gname});
  CollectionBlock c;
  c.gset = gname;
  c.coll = {g, q.proj};
  d.collections[cname] = c;
  d.order.push_back({"collection", cname});

  OperadBlock b;
  b.collection = cname;
  b.shape_bound = f.operad.shape_bound;
  b.eta = f.operad.eta;
  b.stage = f.operad.stage;
  const auto& cls = f.quotient.map.map;
  const FreeMagma& m = f.free;
  std::set<std::string> seen_mu;
  std::set<ParTriple> seen_kappa;
  for (int n = 0; n <= N; ++n)
    for (int i = 0; i < static_cast<int>(m.cells[n].size()); ++i) {
      const FreeOperadCell& cell = m.cells[n][i];
      if (cell.kind == CellKind::mu) {
        auto tau = relabel_cell(cell.tau, g, [&](int dd, int k) -> std::optional<int> { return cls[dd][k]; });
        if (!tau) throw DomainError("export_operad: inputs do not descend to the quotient");
        int x = cls[n][cell.x];
        if (seen_mu.insert(std::to_string(n) + "|" + std::to_string(x) + "|" + tau->key()).second)
          b.mu.push_back({n, x, *tau, cls[n][i]});
      } else if (cell.kind == CellKind::kappa) {
        ParTriple t{cls[n - 1][cell.triple.plus], cell.triple.shape, cls[n - 1][cell.triple.minus]};
        if (seen_kappa.insert(t).second) b.kappa.push_back({t, cls[n][i]});
      }
    }
  d.operads[name] = std::move(b);
  d.order.push_back({"operad", name});
  return d;
}

} // namespace omega
