#pragma once

#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include "omegacat/collections.hpp"

namespace omega {

// A T̂*-collection over • with unit, multiplication and, optionally, a
// contraction. μ(p, τ) takes τ a cell of T̂*(carrier) of shape π(p) and is
// nullopt outside the bounded carrier.
struct OperadicMagma {
  TCollection coll;
  std::vector<int> eta; // eta[n], −1 if outside the bound
  std::function<std::optional<int>(int dim, int p, const FreeCell& tau)> mu;
  Contraction kappa;
  int shape_bound = 0;
  std::vector<std::vector<int>> stage; // empty = every cell at stage 0

  int stage_of(int dim, int i) const { return stage.empty() ? 0 : stage[dim][i]; }
  int max_dim() const { return coll.max_dim(); }
};

using ContractedOperad = OperadicMagma;

// Carrier = the bounded T̂*(•) (tree_collection), μ = grafting, η = unit
// trees, κ(y⁺, y, y⁻) = y.
ContractedOperad terminal_operad(int N, int bound);

struct LawOptions {
  int bound = 2;      // weight bound on associativity configurations
  int max_stage = -1; // only cells of stage ≤ max_stage as inputs; −1 = all
  long budget = 2000000;
};

// Laws "left-unit", "right-unit", "associativity"; configurations where some
// multiplication leaves the bounded carrier are counted in skipped.
LawReport check_operad_laws(const OperadicMagma& m, const LawOptions& opts);

// Diagrams "d1" (κ∘Par_η = η∘κ_•) and "d2" (κ∘Par_μ = μ∘(κ∘κ)) on bounded
// triples, plus the contraction's own validity ("contraction").
LawReport check_operadic_contraction(const ContractedOperad& p, const LawOptions& opts);

enum class CellKind { gen, eta, kappa, mu };

struct FreeOperadCell {
  CellKind kind = CellKind::gen;
  int gen = -1;         // gen: the generator in Q
  ParTriple triple;     // kappa: over the level below
  int x = -1;           // mu: the operation
  FreeCell tau;         // mu: its inputs, a cell of T̂*(carrier)
  int stage = 0;
};

// The free contracted operadic magma 𝔐(Q), truncated at Q's dimension:
// stage-0 cells are generators, units and contraction cells; a cell
// μ(x, τ) has stage stage(x) + max stage of τ's labels + 1 ≤ depth. Every
// cell other than a generator has arity of size ≤ shape_bound.
struct FreeMagma {
  OperadicMagma magma;
  std::vector<std::vector<FreeOperadCell>> cells; // cells[n][i], in construction order
  GlobularMorphism xi;                            // Q → 𝔐(Q)
  struct Index {
    std::vector<std::unordered_map<std::string, int>> mu; // "x|key(τ)"
    std::vector<std::map<ParTriple, int>> kappa;
  };
  std::shared_ptr<Index> index; // shared with magma.mu and magma.kappa
  int depth = 0;

  std::optional<int> find_mu(int dim, int x, const FreeCell& tau) const;
};

FreeMagma free_operadic_magma(const TCollection& q, int depth, int shape_bound, long budget = 2000000);

// The generating pairs 𝒳 (unit and associativity families).
struct GeneratingPair {
  std::string family; // "left-unit", "right-unit", "associativity"
  int dim = 0;
  int a = 0, b = 0;
};

std::vector<GeneratingPair> generating_pairs(const FreeMagma& m);

struct ClosureOptions {
  bool close_contraction = true; // apply cg-cont
};

// Smallest congruence containing the pairs, closed under c-st, cg-mu and
// (optionally) cg-cont.
Congruence operad_congruence(const FreeMagma& m, const std::vector<GeneratingPair>& pairs,
                             const ClosureOptions& opts = {});

// Independent closure: generating pairs are found by enumerating candidate
// inputs and matching pastings, and the congruence is held as explicit edge
// sets whose connected components are recomputed until no clause adds an edge.
std::vector<std::vector<int>> oracle_operad_classes(const FreeMagma& m, const ClosureOptions& opts = {});

struct FreeOperad {
  FreeMagma free;
  Congruence congruence;
  Quotient quotient;
  ContractedOperad operad; // 𝔓(Q)
  GlobularMorphism zeta;   // Q → 𝔓(Q)
  long pairs = 0;
};

FreeOperad free_contracted_operad(const TCollection& q, int depth, int shape_bound, const ClosureOptions& opts = {},
                                  long budget = 2000000);

// 𝔓(∅) with the given top dimension.
FreeOperad initial_operad(int N, int depth, int shape_bound);

// φ̂ on the classes of 𝔓(Q), defined by recursion over 𝔐(Q); throws
// DomainError if P is not defined or not constant on a class.
GlobularMorphism universal_factorization(const FreeOperad& f, const ContractedOperad& p, const GlobularMorphism& phi);

// Structure-preserving maps 𝔓(Q) → P extending φ, by exhaustive search;
// stops after limit maps.
std::vector<GlobularMorphism> structure_morphisms(const FreeOperad& f, const ContractedOperad& p,
                                                  const GlobularMorphism& phi, int limit = 2);

// act(p, x̂) for x̂ a cell of T̂*(X) of shape π(p).
struct TAlgebra {
  GSetPtr carrier;
  std::function<std::optional<int>(int dim, int p, const FreeCell& x)> act;
};

// X = cells of the bounded T̂*(•), act = composition of the pasting.
TAlgebra terminal_algebra(int N, int bound);

// Laws "unit" and "associativity" within the weight bound.
LawReport check_algebra(const ContractedOperad& p, const TAlgebra& a, const LawOptions& opts);

} // namespace omega
