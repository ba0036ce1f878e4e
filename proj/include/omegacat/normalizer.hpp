#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "omegacat/globular.hpp"
#include "omegacat/term.hpp"

namespace omega {

// An oriented generating pair: apply returns the contractum when the node is
// a redex. Both sides always denote the same cell.
struct RewriteRule {
  std::string name;
  std::function<std::optional<Term>(const Term&)> apply;
};

const std::vector<RewriteRule>& rewrite_rules();

struct RewriteStep {
  std::string rule;
  std::string path;
  Term before;
  Term after;
};

struct NormalizeOptions {
  long budget = 100000;
  bool trace = false;
};

struct Normalized {
  Term nf;
  long steps = 0;
  std::vector<RewriteStep> trace;
};

// Rewrites innermost-leftmost with the oriented rules, then finishes with the
// canonical interchange ordering (reported as one "interchange-canonicalize"
// step when it changes the term).
Normalized normalize_traced(const GlobularSet& g, const Term& t, Mode mode, const NormalizeOptions& opts = {});
Term normalize(const GlobularSet& g, const Term& t, Mode mode);
bool equal_terms(const GlobularSet& g, const Term& t1, const Term& t2, Mode mode);
// Canonical form straight from the pasting evaluation, no rewriting phase.
Term canonical(const GlobularSet& g, const Term& t);

struct OracleOptions {
  // The closure runs on terms with up to max_nodes + extra_nodes nodes and
  // reports classes restricted to terms with at most max_nodes.
  int extra_nodes = 1;
  long max_terms = 4000000;
  // Dimension range of the universe; -1 = up to g.max_dim().
  int max_dim = -1;
};

struct OraclePartition {
  std::vector<Term> terms;
  std::vector<int> cls; // class id per term, dense from 0
  int num_classes = 0;
  long universe_size = 0;
};

// Bounded congruence closure of the generating pairs over the term universe.
// Independent of the pasting evaluator: composability is decided by the
// closure's own lower-dimensional classes.
OraclePartition congruence_closure_oracle(const GlobularSet& g, Mode mode, int max_nodes,
                                          const OracleOptions& opts = {});

} // namespace omega
