#pragma once

#include <functional>
#include <memory>
#include <string>
#include <vector>

#include "omegacat/globular.hpp"
#include "omegacat/sexpr.hpp"

namespace omega {

enum class Mode { strict, involutive };

std::string to_string(Mode m);
Mode parse_mode(const std::string& s);

enum class TermKind { gen, id, comp, inv };

struct TermNode;
using Term = std::shared_ptr<const TermNode>;

// Gen(cell) | Id(a) | Comp(index, a, b) meaning a ∘_index b | Inv(index, a).
// In Comp the right operand b comes first: t^index(b) = s^index(a).
struct TermNode {
  TermKind kind;
  int dim;
  int index;
  CellRef cell;
  Term a;
  Term b;
  int size;
  int gens;
  size_t hash;
};

Term gen(const CellRef& c);
Term gen(int dim, const std::string& id);
Term id_term(const Term& t);
Term id_term(const Term& t, int times);
Term comp(int p, const Term& left, const Term& right);
// Returns t unchanged when q >= dim(t) (grounding).
Term inv(int q, const Term& t);

inline int dim_of(const Term& t) { return t->dim; }
inline int size_of(const Term& t) { return t->size; }
inline int gen_count(const Term& t) { return t->gens; }

bool term_equal(const Term& x, const Term& y);
// Total order: constructor tag, dimension, index, cell, then children.
int term_compare(const Term& x, const Term& y);

struct TermHash {
  size_t operator()(const Term& t) const { return t->hash; }
};
struct TermEq {
  bool operator()(const Term& x, const Term& y) const { return term_equal(x, y); }
};
struct TermLess {
  bool operator()(const Term& x, const Term& y) const { return term_compare(x, y) < 0; }
};

std::string to_string(const Term& t);
SExpr to_sexpr(const Term& t);
// Cell ids are resolved against g; `(gen f)` or `(gen f DIM)`.
Term parse_term(const SExpr& e, const GlobularSet& g);
Term parse_term(const std::string& text, const GlobularSet& g);

// Syntactic boundary per the structural rules.
Term boundary_of_term(const GlobularSet& g, const Term& t, Side side);
Term iterated_term_boundary(const GlobularSet& g, const Term& t, int k, Side side);

// Replace every generator by the given term (same dimension expected).
Term substitute(const Term& t, const std::function<Term(const CellRef&)>& f);
Term relabel(const Term& t, const GlobularMorphism& m);

bool contains_inv(const Term& t);

// Subterm at a path of child indices (0 = a, 1 = b) and rebuilding.
Term subterm(const Term& t, const std::vector<int>& path);
Term replace_at(const Term& t, const std::vector<int>& path, const Term& r);
std::string path_string(const std::vector<int>& path);

std::vector<Violation> well_formed(const Term& t, const GlobularSet& g, Mode mode);

// Every well-formed term of the given dimension with at most max_nodes
// constructor nodes, each once, ordered by size and then construction order.
std::vector<Term> enumerate_terms(const GlobularSet& g, Mode mode, int max_nodes, int dim);
void enumerate_terms(const GlobularSet& g, Mode mode, int max_nodes, int dim,
                     const std::function<void(const Term&)>& emit);

} // namespace omega
