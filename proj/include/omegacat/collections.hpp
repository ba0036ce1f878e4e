#pragma once

#include <functional>
#include <optional>
#include <random>
#include <string>
#include <unordered_map>
#include <vector>

#include "omegacat/globular.hpp"
#include "omegacat/monad.hpp"

namespace omega {

// A globular set over the bounded T̂*(•): every cell carries its arity tree.
struct TCollection {
  GSetPtr carrier;
  std::vector<std::vector<DecoratedTree>> proj; // proj[n][i]

  int max_dim() const { return carrier->max_dim(); }
  int size(int dim) const { return carrier->size(dim); }
  const DecoratedTree& pi(int dim, int i) const { return proj[dim][i]; }
};

std::vector<Violation> validate_collection(const TCollection& c);
// Throws DomainError on the first violation.
TCollection make_collection(GSetPtr carrier, std::vector<std::vector<DecoratedTree>> proj);
TCollection empty_collection(int max_dim);

// The bounded terminal collection: all involutive trees of dimension ≤ N
// with at most bound edges, projection the identity. Cell ids are tree texts.
TCollection tree_collection(int N, int bound);

// A random globular set with arities drawn among trees of at most bound
// edges that fit the boundaries; nullopt if some cell has no fitting tree.
std::optional<TCollection> random_collection(std::mt19937_64& rng, int N, int max_cells, int bound);

// Carrier e with every cell sent to the linear unit tree.
TCollection identity_collection(const GSetPtr& e);

// The morphism sending each cell to its arity in a tree collection.
GlobularMorphism projection_morphism(const TCollection& c, const TCollection& trees);

std::vector<Violation> validate_collection_morphism(const TCollection& a, const TCollection& b,
                                                    const GlobularMorphism& f);

// (x⁺, y, x⁻): x⁺ ∥ x⁻ of dimension n−1 and y of dimension n with
// π(x⁺) = t(y), s(y) = π(x⁻).
struct ParTriple {
  int plus = 0;
  DecoratedTree shape;
  int minus = 0;

  int dim() const { return shape.dim; }
  bool operator==(const ParTriple&) const = default;
  auto operator<=>(const ParTriple& o) const {
    if (auto c = shape <=> o.shape; c != 0) return c;
    if (auto c = plus <=> o.plus; c != 0) return c;
    return minus <=> o.minus;
  }
};

bool is_par(const TCollection& c, const ParTriple& t);
std::vector<ParTriple> par_set(const TCollection& c, int dim, int shape_bound);
std::string to_string(const TCollection& c, const ParTriple& t);

// A contraction, possibly partial on a bounded carrier (nullopt = no cell).
using Contraction = std::function<std::optional<int>(const ParTriple&)>;

// Checks s(κ) = x⁻, t(κ) = x⁺, π(κ) = y on every triple of dims 1..N with
// shape size ≤ shape_bound; a missing value is a completeness violation.
std::vector<Violation> validate_contraction(const TCollection& c, const Contraction& kappa, int shape_bound);

// (x⁺, y, x⁻) ↦ (f(x⁺), y, f(x⁻)); throws DomainError if f does not
// preserve projections.
std::vector<ParTriple> par_pushforward(const TCollection& a, const TCollection& b, const GlobularMorphism& f,
                                       const std::vector<ParTriple>& triples);

// flatten(T̂*(π)(τ)) for τ a cell of T̂*(carrier).
DecoratedTree graft(const TCollection& c, const FreeCell& tau);

// Leaf relabelling of τ along f, read back over f's codomain. Returns
// nullopt if some leaf has no image or the relabelled pasting is not valid.
std::optional<FreeCell> relabel_cell(const FreeCell& tau, const GSetPtr& cod,
                                     const std::function<std::optional<int>(int, int)>& f);

struct ComposeOptions {
  int bound = 3;            // bound on the first factor's arity size
  int max_result = -1;      // optional bound on the composite arity size
  long budget = 1000000;    // total cells
  std::function<bool(int, int)> left_allowed;  // filter on first-factor cells
  std::function<bool(int, int)> right_allowed; // filter on labels
  // Weight of a nested element: the total size of the arities it is built
  // from. Defaults to the arity size; max_weight < 0 means unbounded.
  std::function<int(int, int)> left_weight, right_weight;
  int max_weight = -1;
};

// P1 ∘ P2: pairs (p, τ) with τ ∈ T̂*(P2) of shape π₁(p); the arity is
// flatten(T̂*(π₂)(τ)).
struct Composite {
  TCollection coll;
  std::vector<std::vector<std::pair<int, FreeCell>>> pairs; // pairs[n][k]
  std::vector<std::unordered_map<std::string, int>> index;  // "p|key(τ)" → k
  std::vector<std::vector<int>> weight;                      // weight[n][k]

  std::optional<int> find(int dim, int p, const FreeCell& tau) const;
};

Composite compose_collections(const TCollection& p1, const TCollection& p2, const ComposeOptions& opts);
Composite compose_collections(const TCollection& p1, const TCollection& p2, int bound);

// A cell-level bijection between two bounded collections.
struct BijectionReport {
  long checked = 0;
  std::vector<Violation> violations;
  std::vector<std::vector<int>> map; // map[n][i] in the target, −1 if outside the bound
};

// λ: I∘P → P and ρ: P∘I → P with I = identity_collection(•).
BijectionReport left_unitor(const TCollection& p, int bound);
BijectionReport right_unitor(const TCollection& p, int bound);

// The re-pairing P1∘(P2∘P3) → (P1∘P2)∘P3, (p, Ψ) ↦ ((p, T(pr₁)Ψ), μ(T(pr₂)Ψ)),
// checked to be a projection-compatible bijection on the bounded carriers;
// its inverse is the associator.
struct Associator {
  Composite left;      // (P1∘P2)∘P3
  Composite right;     // P1∘(P2∘P3)
  Composite p12, p23;  // the inner composites
  BijectionReport repair; // right → left
};

Associator associator_witness(const TCollection& p1, const TCollection& p2, const TCollection& p3, int bound);

// Both re-bracketings ((P1P2)P3)P4 ← P1(P2(P3P4)) of the pentagon agree and
// give a bijection. Every composite is truncated to elements of weight ≤ bound;
// re-bracketing preserves weight.
BijectionReport pentagon_witness(const TCollection& p1, const TCollection& p2, const TCollection& p3,
                                 const TCollection& p4, int bound);

// Graded equivalence relation held as one union-find per dimension.
class Congruence {
 public:
  Congruence() = default;
  explicit Congruence(const GlobularSet& g);

  int find(int dim, int x) const;
  bool same(int dim, int x, int y) const { return find(dim, x) == find(dim, y); }
  bool merge(int dim, int x, int y);
  int max_dim() const { return static_cast<int>(parent_.size()) - 1; }
  int size(int dim) const { return static_cast<int>(parent_[dim].size()); }
  // Dense class ids per dimension, numbered by first member.
  std::vector<std::vector<int>> classes() const;
  int num_classes(int dim) const;

 private:
  mutable std::vector<std::vector<int>> parent_;
};

// Closes e under (c-st): related cells have related sources and targets.
void close_boundaries(const GlobularSet& g, Congruence& e);
// Clause violations: "c-st" and "projection".
std::vector<Violation> check_congruence(const TCollection& c, const Congruence& e);

struct Quotient {
  TCollection coll;
  GlobularMorphism map; // the quotient morphism ϖ
  std::vector<std::vector<int>> rep; // rep[n][class] = first member
};

// Throws DomainError naming the failing clause.
Quotient quotient_collection(const TCollection& c, const Congruence& e);

// {(x, y) | (f(x), f(y)) ∈ e}.
Congruence induced_congruence(const GlobularSet& dom, const GlobularMorphism& f, const Congruence& e);

} // namespace omega
