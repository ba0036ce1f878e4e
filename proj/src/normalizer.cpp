#include "omegacat/normalizer.hpp"

#include "omegacat/pasting.hpp"

namespace omega {

namespace {

int id_depth(const Term& t) {
  int m = 0;
  for (Term x = t; x->kind == TermKind::id; x = x->a) ++m;
  return m;
}

std::vector<RewriteRule> make_rules() {
  std::vector<RewriteRule> rules;
  rules.push_back({"involution-involutive", [](const Term& t) -> std::optional<Term> {
                     if (t->kind == TermKind::inv && t->a->kind == TermKind::inv && t->a->index == t->index)
                       return t->a->a;
                     return std::nullopt;
                   }});
  rules.push_back({"involution-commute", [](const Term& t) -> std::optional<Term> {
                     if (t->kind == TermKind::inv && t->a->kind == TermKind::inv && t->index < t->a->index)
                       return inv(t->a->index, inv(t->index, t->a->a));
                     return std::nullopt;
                   }});
  rules.push_back({"involution-identity", [](const Term& t) -> std::optional<Term> {
                     if (t->kind == TermKind::inv && t->a->kind == TermKind::id)
                       return id_term(inv(t->index, t->a->a));
                     return std::nullopt;
                   }});
  rules.push_back({"involution-distribute", [](const Term& t) -> std::optional<Term> {
                     if (t->kind == TermKind::inv && t->a->kind == TermKind::comp && t->a->index != t->index)
                       return comp(t->a->index, inv(t->index, t->a->a), inv(t->index, t->a->b));
                     return std::nullopt;
                   }});
  rules.push_back({"involution-reverse", [](const Term& t) -> std::optional<Term> {
                     if (t->kind == TermKind::inv && t->a->kind == TermKind::comp && t->a->index == t->index)
                       return comp(t->index, inv(t->index, t->a->b), inv(t->index, t->a->a));
                     return std::nullopt;
                   }});
  rules.push_back({"left-unit", [](const Term& t) -> std::optional<Term> {
                     if (t->kind == TermKind::comp && id_depth(t->a) >= t->dim - t->index) return t->b;
                     return std::nullopt;
                   }});
  rules.push_back({"right-unit", [](const Term& t) -> std::optional<Term> {
                     if (t->kind == TermKind::comp && id_depth(t->b) >= t->dim - t->index) return t->a;
                     return std::nullopt;
                   }});
  rules.push_back({"identity-functoriality", [](const Term& t) -> std::optional<Term> {
                     if (t->kind == TermKind::comp && t->index < t->dim - 1 && t->a->kind == TermKind::id &&
                         t->b->kind == TermKind::id)
                       return id_term(comp(t->index, t->a->a, t->b->a));
                     return std::nullopt;
                   }});
  rules.push_back({"associativity", [](const Term& t) -> std::optional<Term> {
                     if (t->kind == TermKind::comp && t->a->kind == TermKind::comp && t->a->index == t->index)
                       return comp(t->index, t->a->a, comp(t->index, t->a->b, t->b));
                     return std::nullopt;
                   }});
  return rules;
}

Term rebuild_with(const Term& t, const Term& a, const Term& b) {
  switch (t->kind) {
    case TermKind::id:
      return id_term(a);
    case TermKind::comp:
      return comp(t->index, a, b);
    case TermKind::inv:
      return inv(t->index, a);
    default:
      return t;
  }
}

// Finds and contracts the innermost-leftmost redex.
bool rewrite_once(const Term& t, std::vector<int>& path, Term& out, RewriteStep& step) {
  if (t->a) {
    path.push_back(0);
    Term r;
    if (rewrite_once(t->a, path, r, step)) {
      path.pop_back();
      out = rebuild_with(t, r, t->b);
      return true;
    }
    path.pop_back();
  }
  if (t->b) {
    path.push_back(1);
    Term r;
    if (rewrite_once(t->b, path, r, step)) {
      path.pop_back();
      out = rebuild_with(t, t->a, r);
      return true;
    }
    path.pop_back();
  }
  for (auto& rule : rewrite_rules()) {
    if (auto r = rule.apply(t)) {
      step.rule = rule.name;
      step.path = path_string(path);
      step.before = t;
      step.after = *r;
      out = *r;
      return true;
    }
  }
  return false;
}

} // namespace

const std::vector<RewriteRule>& rewrite_rules() {
  static const std::vector<RewriteRule> rules = make_rules();
  return rules;
}

Term canonical(const GlobularSet& g, const Term& t) { return readback(g, eval(g, t)); }

Normalized normalize_traced(const GlobularSet& g, const Term& t, Mode mode, const NormalizeOptions& opts) {
  if (mode == Mode::strict && contains_inv(t)) throw DomainError("normalize: involution in strict mode");
  Pasting value = eval(g, t); // also rejects ill-formed input
  Normalized res;
  Term cur = t;
  for (;;) {
    std::vector<int> path;
    RewriteStep step;
    Term next;
    if (!rewrite_once(cur, path, next, step)) break;
    if (++res.steps > opts.budget)
      throw ResourceError("rewrite budget of " + std::to_string(opts.budget) + " steps exceeded at " + to_string(cur));
    if (opts.trace) res.trace.push_back(step);
    cur = next;
  }
  Term nf = readback(g, value);
  if (!term_equal(nf, cur)) {
    ++res.steps;
    if (opts.trace) res.trace.push_back({"interchange-canonicalize", "/", cur, nf});
  }
  res.nf = nf;
  return res;
}

Term normalize(const GlobularSet& g, const Term& t, Mode mode) { return normalize_traced(g, t, mode).nf; }

bool equal_terms(const GlobularSet& g, const Term& t1, const Term& t2, Mode mode) {
  if (t1->dim != t2->dim) throw DomainError("equal_terms: dimension mismatch");
  if (mode == Mode::strict && (contains_inv(t1) || contains_inv(t2)))
    throw DomainError("equal_terms: involution in strict mode");
  return eval(g, t1) == eval(g, t2);
}

} // namespace omega
