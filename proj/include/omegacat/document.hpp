#pragma once

#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "omegacat/operads.hpp"
#include "omegacat/sexpr.hpp"

namespace omega {

// Block forms (NAME is optional and defaults to the block kind):
//   (gset NAME :maxdim N (cells 0 a b) (cells 1 (f a b)) ...)
//   (term NAME :gset G T)                    ; T over G, or a bare T at top level
//   (collection NAME :gset G (arity CELL "TREE") ...)
//   (collection NAME :trees N :bound B)
//   (operad NAME :terminal N :bound B)
//   (operad NAME :collection C :shape-bound B
//     (eta CELL ...) (mu DIM X T CELL) (kappa DIM PLUS "TREE" MINUS CELL) (stage DIM CELL K))
//   (algebra NAME :terminal N :bound B)
//   (algebra NAME :gset G (act DIM OP T CELL))   ; OP names a cell of the operad
// Blocks refer only to blocks above them; :gset and :collection may be
// omitted when exactly one block of that kind precedes.

struct TermBlock {
  std::string gset;
  Term term;
};

struct CollectionBlock {
  std::string gset; // empty for :trees
  int trees = -1, bound = 0;
  TCollection coll;
};

struct MuEntry {
  int dim = 0;
  int x = 0;
  FreeCell tau;
  int result = 0;
};

struct KappaEntry {
  ParTriple triple;
  int result = 0;
};

struct OperadBlock {
  int terminal = -1, bound = 0; // terminal_operad(terminal, bound) when terminal ≥ 0
  std::string collection;
  int shape_bound = 0;
  std::vector<int> eta;
  std::vector<MuEntry> mu;
  std::vector<KappaEntry> kappa;
  std::vector<std::vector<int>> stage; // empty = all stage 0
};

struct ActEntry {
  int dim = 0;
  std::string op;
  FreeCell x;
  int result = 0;
};

struct AlgebraBlock {
  int terminal = -1, bound = 0;
  std::string gset;
  std::vector<ActEntry> act;
};

struct Document {
  std::map<std::string, GSetPtr> gsets;
  std::map<std::string, TermBlock> terms;
  std::map<std::string, CollectionBlock> collections;
  std::map<std::string, OperadBlock> operads;
  std::map<std::string, AlgebraBlock> algebras;
  std::vector<std::pair<std::string, std::string>> order; // (kind, name) as read

  bool operator==(const Document& o) const;
};

// Throws ParseError with the position of the offending form for syntax,
// unresolved references, duplicate names and invalid blocks.
Document parse_document(std::string_view text);
std::string print_document(const Document& d);
// Like parse_document, but invalid globular sets and collections are reported
// as violations (and dropped) instead of thrown.
std::vector<Violation> validate_document(std::string_view text);

// The unique block of a kind when name is empty; throws DomainError otherwise.
const std::string& pick(const Document& d, const std::string& kind, const std::string& name);

ContractedOperad build_operad(const Document& d, const std::string& name);
TAlgebra build_algebra(const Document& d, const std::string& name, const ContractedOperad& p);

// 𝔓(Q) as an extensional operad block over its class carrier, with cells
// renamed c<dim>_<index>.
Document export_operad(const FreeOperad& f, const std::string& name);

} // namespace omega
