#pragma once

#include <compare>
#include <functional>
#include <memory>
#include <optional>
#include <random>
#include <string>
#include <unordered_map>
#include <vector>

#include "omegacat/errors.hpp"

namespace omega {

enum class Side { source, target };

inline Side opposite(Side s) { return s == Side::source ? Side::target : Side::source; }

struct CellRef {
  int dim = 0;
  std::string id;
  auto operator<=>(const CellRef&) const = default;
};

// Raw, unchecked description of a candidate globular set. Used for validation
// of arbitrary input before a GlobularSet is built from it.
struct CellSpec {
  std::string id;
  std::string src;
  std::string tgt;
};

struct GlobularData {
  int max_dim = 0;
  std::vector<std::vector<CellSpec>> cells; // cells[n]
};

// Finite globular set truncated at max_dim. Cells are indexed per dimension in
// insertion order; src/tgt are stored as indices into the dimension below.
class GlobularSet {
 public:
  explicit GlobularSet(int max_dim);

  int max_dim() const { return max_dim_; }
  int size(int dim) const;
  int total_size() const;

  // Adds a cell; boundaries must already exist and satisfy globularity.
  int add(int dim, const std::string& id, const std::string& src = {}, const std::string& tgt = {});
  int add(int dim, const std::string& id, int src, int tgt);

  const std::string& id(int dim, int i) const { return ids_[dim][i]; }
  int index(int dim, const std::string& id) const;
  int index(const CellRef& c) const { return index(c.dim, c.id); }
  bool contains(const CellRef& c) const;
  CellRef ref(int dim, int i) const { return {dim, ids_[dim][i]}; }

  int src(int dim, int i) const { return src_[dim][i]; }
  int tgt(int dim, int i) const { return tgt_[dim][i]; }
  int boundary(int dim, int i, Side side) const {
    return side == Side::source ? src_[dim][i] : tgt_[dim][i];
  }

  GlobularData data() const;
  bool operator==(const GlobularSet& o) const;

 private:
  int max_dim_;
  std::vector<std::vector<std::string>> ids_;
  std::vector<std::unordered_map<std::string, int>> index_;
  std::vector<std::vector<int>> src_, tgt_;
};

using GSetPtr = std::shared_ptr<const GlobularSet>;

struct GlobularMorphism {
  GSetPtr dom;
  GSetPtr cod;
  std::vector<std::vector<int>> map; // map[n][i] = image index in cod

  int operator()(int dim, int i) const { return map[dim][i]; }
  CellRef operator()(const CellRef& c) const;
  bool operator==(const GlobularMorphism& o) const;
};

std::vector<Violation> validate_globular(const GlobularData& data);
std::vector<Violation> validate_globular(const GlobularSet& g);
std::vector<Violation> validate_morphism(const GlobularMorphism& m);

// Builds a GlobularSet from raw data; throws DomainError on the first problem.
GSetPtr build_globular(const GlobularData& data);

CellRef iterated_boundary(const GlobularSet& g, const CellRef& x, int k, Side side);
bool parallel(const GlobularSet& g, const CellRef& x, const CellRef& y);
bool parallel(const GlobularSet& g, int dim, int x, int y);

GSetPtr terminal_set(int max_dim);
std::string terminal_id(int dim);

GlobularMorphism identity_morphism(const GSetPtr& g);
GlobularMorphism terminal_morphism(const GSetPtr& g);
GlobularMorphism terminal_morphism(const GSetPtr& g, const GSetPtr& terminal);
// f after g
GlobularMorphism compose_morphisms(const GlobularMorphism& f, const GlobularMorphism& g);

struct Pullback {
  GSetPtr set;
  GlobularMorphism p1;
  GlobularMorphism p2;
  // pair[n][k] = (index in A, index in B) of the k-th cell of set
  std::vector<std::vector<std::pair<int, int>>> pairs;
};

Pullback pullback(const GlobularMorphism& f, const GlobularMorphism& g);

// Random globular set with 1..max_cells cells per dimension (ids a0, a1, ...
// at dim 0, then b0, ... at dim 1, and so on).
GSetPtr random_globular(std::mt19937_64& rng, int max_dim, int max_cells);
// A uniformly-ordered depth-first search for some morphism dom → cod.
std::optional<GlobularMorphism> random_morphism(const GSetPtr& dom, const GSetPtr& cod, std::mt19937_64& rng);
// Visits every morphism dom → cod; the visitor returns false to stop early.
void for_each_morphism(const GSetPtr& dom, const GSetPtr& cod, const std::function<bool(const GlobularMorphism&)>& visit);

} // namespace omega
