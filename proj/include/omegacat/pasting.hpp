#pragma once

#include <string>
#include <vector>

#include "omegacat/globular.hpp"
#include "omegacat/term.hpp"

namespace omega {

// Leaf label: a cell of the leaf's depth together with a set of involution
// indices (bit q set = γ_q applied), each below the leaf depth.
struct Label {
  int cell = 0;
  unsigned mask = 0;
  bool operator==(const Label&) const = default;
};

// Plane tree of height <= dim. A node at depth k stands for the k-cells of the
// pasting between its children; only leaves carry labels, every other label
// is recovered from boundaries.
struct PNode {
  std::vector<PNode> kids;
  Label label;
  bool operator==(const PNode&) const = default;
};

struct Pasting {
  int dim = 0;
  PNode root;
  bool operator==(const Pasting&) const = default;
};

Label label_boundary(const GlobularSet& g, int dim, Label l, Side side);
// Label of the source-most (target-most) cell sitting at node v of depth d.
Label node_label(const GlobularSet& g, const PNode& v, int depth, Side side);

Pasting pasting_gen(const GlobularSet& g, int dim, int cell);
Pasting pasting_id(Pasting p);
Pasting pasting_inv(int q, Pasting p);
// l ∘_p r; throws DomainError unless t^p(r) = s^p(l).
Pasting pasting_comp(const GlobularSet& g, int p, const Pasting& l, const Pasting& r);
Pasting pasting_boundary(const GlobularSet& g, const Pasting& x, Side side);
Pasting pasting_iterated_boundary(const GlobularSet& g, const Pasting& x, int k, Side side);

std::string pasting_key(const Pasting& p);
int leaf_count(const Pasting& p);
int node_count(const Pasting& p);
int height(const Pasting& p);

Pasting eval(const GlobularSet& g, const Term& t);
Term readback(const GlobularSet& g, const Pasting& p);

} // namespace omega
