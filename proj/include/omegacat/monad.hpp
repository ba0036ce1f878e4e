#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "omegacat/globular.hpp"
#include "omegacat/pasting.hpp"
#include "omegacat/term.hpp"

namespace omega {

// A cell of the free (involutive) strict ω-category on base, held by its
// canonical term.
struct FreeCell {
  GSetPtr base;
  Mode mode = Mode::strict;
  Term nf;

  int dim() const { return nf->dim; }
  std::string key() const { return to_string(nf); }
  bool operator==(const FreeCell& o) const { return base == o.base && term_equal(nf, o.nf); }
};

FreeCell make_cell(const GSetPtr& base, const Term& t, Mode mode);
FreeCell unit_embed(const GSetPtr& q, const CellRef& x, Mode mode);
FreeCell functor_apply(const GlobularMorphism& phi, Mode mode, const FreeCell& c);

// A globular set whose cells are free cells over an underlying base; the
// staged stand-in for T(Q) when it is used as a generating set. Cell ids are
// the canonical texts, and the set is closed under boundaries.
struct StagedSet {
  GSetPtr set;
  GSetPtr under;
  Mode mode = Mode::strict;
  std::vector<std::vector<FreeCell>> cells; // cells[n][i] is the cell with set index i

  const FreeCell& cell(int dim, int i) const { return cells[dim][i]; }
  const FreeCell& cell(const CellRef& r) const;
};

class StagedBuilder {
 public:
  StagedBuilder(GSetPtr under, Mode mode);
  // Adds c together with its iterated boundaries; returns the index at dim c.
  int add(const FreeCell& c);
  StagedSet finish() const;

 private:
  GSetPtr under_;
  Mode mode_;
  std::shared_ptr<GlobularSet> set_;
  std::vector<std::vector<FreeCell>> cells_;
};

StagedSet stage_of(const GSetPtr& under, Mode mode, const std::vector<FreeCell>& cs);

// μ: substitutes each staged generator by its underlying term, renormalizes.
// Throws ResourceError when the result would exceed the base truncation.
FreeCell multiply_flatten(const StagedSet& stage, const FreeCell& outer);

const GSetPtr& terminal_base(int max_dim);
FreeCell shape_of(const FreeCell& c);

// Node of a Batanin tree; dec holds involution indices below the node level
// (bit q = index q). A child's decoration restricted below the parent's
// level equals the parent's decoration.
struct DNode {
  std::vector<DNode> kids;
  unsigned dec = 0;
  bool operator==(const DNode&) const = default;
  auto operator<=>(const DNode& o) const {
    if (auto c = dec <=> o.dec; c != 0) return c;
    return kids <=> o.kids;
  }
};

struct DecoratedTree {
  int dim = 0;
  DNode root;
  bool operator==(const DecoratedTree&) const = default;
  auto operator<=>(const DecoratedTree& o) const {
    if (auto c = dim <=> o.dim; c != 0) return c;
    return root <=> o.root;
  }
};

int tree_height(const DecoratedTree& t);
int tree_size(const DecoratedTree& t); // number of edges
int tree_leaves(const DecoratedTree& t);
std::string to_string(const DecoratedTree& t);
DecoratedTree parse_tree(const std::string& text);
std::vector<Violation> validate_tree(const DecoratedTree& t, Mode mode);

// Tree operations computed directly on decorated trees.
DecoratedTree tree_unit(int dim);
DecoratedTree tree_id(DecoratedTree t);
DecoratedTree tree_inv(int q, DecoratedTree t);
DecoratedTree tree_boundary(const DecoratedTree& t);
DecoratedTree tree_iterated_boundary(const DecoratedTree& t, int k);
// l ∘_p r; nullopt unless the p-boundaries agree.
std::optional<DecoratedTree> tree_comp(int p, const DecoratedTree& l, const DecoratedTree& r);

DecoratedTree tree_encode(const FreeCell& c);
FreeCell tree_decode(const DecoratedTree& t, Mode mode, int max_dim = -1);

// All valid trees of dimension dim with at most max_edges edges, in a
// deterministic order.
std::vector<DecoratedTree> enumerate_trees(int dim, int max_edges, Mode mode);

// Shape of a labelled pasting: its tree with the leaf involution masks as
// decorations.
DecoratedTree pasting_shape(const Pasting& p);
DecoratedTree shape_tree(const FreeCell& c);

// Every cell of T(q) whose shape is the given tree, with leaf candidates
// optionally filtered by allowed(dim, cell).
void for_each_cell_of_shape(const GSetPtr& q, Mode mode, const DecoratedTree& shape,
                            const std::function<bool(int, int)>& allowed,
                            const std::function<void(const FreeCell&, const Pasting&)>& visit);
std::vector<FreeCell> cells_of_shape(const GSetPtr& q, Mode mode, const DecoratedTree& shape);

// Cells of the bounded T(Q): canonical cells of dimension dim whose pasting
// has at most max_leaves leaves.
std::vector<FreeCell> enumerate_cells(const GSetPtr& q, Mode mode, int dim, int max_leaves);

// Random well-formed terms over g, grown from a pool.
class TermSampler {
 public:
  TermSampler(const GlobularSet& g, Mode mode, uint64_t seed, int max_size = 12);
  std::optional<Term> sample(int dim);
  Term sample_any();

 private:
  const GlobularSet& g_;
  Mode mode_;
  std::mt19937_64 rng_;
  int max_size_;
  std::vector<std::vector<std::pair<Term, Pasting>>> pool_;
  void grow();
};

struct LawFailure {
  std::string law;
  std::string term;
  std::string detail;
};

struct LawReport {
  long checked = 0;
  long skipped = 0;
  std::vector<LawFailure> failures;
};

struct MonadCheckOptions {
  int samples = 200;
  uint64_t seed = 1;
  // Negative control: flatten replaces every generator by an identity.
  bool corrupt_flatten = false;
};

LawReport check_monad_laws(const GSetPtr& q, Mode mode, const MonadCheckOptions& opts);

enum class Square { unit, mult };

struct CartesianOptions {
  int max_leaves = 2; // bound on T(−) cells
  int outer_leaves = 2; // bound on T(T(−)) outer cells
  int max_dim = -1;
  long budget = 2000000;
  // Negative control: the corner object is taken twice (both copies mapped
  // by the same legs), so the square still commutes but factorizations are
  // no longer unique.
  bool doubled_corner = false;
};

LawReport check_cartesian(Square sq, const GlobularMorphism& phi, Mode mode, const CartesianOptions& opts);

// Standard fixture sets.
GSetPtr theta_set();

} // namespace omega
