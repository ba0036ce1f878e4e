#include "cli.hpp"

#include <cstdlib>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include "CLI11.hpp"
#include "json.hpp"
#include "omegacat/acceptance.hpp"
#include "omegacat/document.hpp"
#include "omegacat/normalizer.hpp"

namespace omega {

namespace {

using nlohmann::json;

struct Profile {
  int dim = 3;
  int depth = 2;
  int shape_bound = 3;
  long budget = 100000;
};

const std::map<std::string, Profile>& profiles() {
  static const std::map<std::string, Profile> all = {
      {"default", {3, 2, 3, 100000}},
      {"desk", {1, 2, 2, 100000}},
      {"tiny", {1, 1, 1, 100000}},
  };
  return all;
}

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw UsageError("cannot read " + path);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

void write_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw UsageError("cannot write " + path);
  out << text;
}

Document load(const std::string& path) {
  try {
    return parse_document(read_file(path));
  } catch (const ParseError& e) {
    throw UsageError(path + ": " + e.what());
  }
}

json violations_json(const std::vector<Violation>& vs) {
  json a = json::array();
  for (auto& v : vs) a.push_back({{"kind", v.kind}, {"where", v.where}, {"detail", v.detail}});
  return a;
}

json report_json(const LawReport& r) {
  json a = json::array();
  for (auto& f : r.failures) a.push_back({{"kind", f.law}, {"where", f.term}, {"detail", f.detail}});
  return {{"checked", r.checked}, {"skipped", r.skipped}, {"violations", a}};
}

json sizes(const TCollection& c) {
  json a = json::array();
  for (int n = 0; n <= c.max_dim(); ++n) a.push_back(c.size(n));
  return a;
}

int emit(std::ostream& out, const json& j) {
  out << j.dump() << "\n";
  return j.contains("violations") && !j["violations"].empty() ? 1 : 0;
}

// Entry-wise checks of an extensional operad block.
std::vector<Violation> check_operad_block(const Document& d, const std::string& name) {
  std::vector<Violation> out;
  const OperadBlock& b = d.operads.at(name);
  if (b.terminal >= 0) return out;
  const TCollection& c = d.collections.at(b.collection).coll;
  const GlobularSet& g = *c.carrier;
  for (int n = 0; n < static_cast<int>(b.eta.size()); ++n)
    if (b.eta[n] >= 0 && !(c.pi(n, b.eta[n]) == tree_unit(n)))
      out.push_back({"eta", name + "/" + g.id(n, b.eta[n]), "arity is not the unit tree"});
  for (int n = 1; n < static_cast<int>(b.eta.size()); ++n)
    if (b.eta[n] >= 0 && b.eta[n - 1] >= 0 && (g.src(n, b.eta[n]) != b.eta[n - 1] || g.tgt(n, b.eta[n]) != b.eta[n - 1]))
      out.push_back({"eta", name + "/" + g.id(n, b.eta[n]), "boundaries are not the unit below"});
  for (auto& m : b.mu) {
    std::string where = name + "/mu " + g.id(m.dim, m.x) + " " + m.tau.key();
    if (!(shape_tree(m.tau) == c.pi(m.dim, m.x))) {
      out.push_back({"mu-shape", where, "inputs do not have the operation's arity"});
      continue;
    }
    if (!(graft(c, m.tau) == c.pi(m.dim, m.result)))
      out.push_back({"mu-arity", where, "result arity " + to_string(c.pi(m.dim, m.result)) + " ≠ grafted inputs"});
  }
  for (auto& k : b.kappa) {
    std::string where = name + "/" + to_string(c, k.triple);
    int n = k.triple.dim();
    if (!is_par(c, k.triple)) out.push_back({"kappa-par", where, "not a parallel triple"});
    if (g.src(n, k.result) != k.triple.minus || g.tgt(n, k.result) != k.triple.plus)
      out.push_back({"kappa-boundary", where, "boundaries are not (x⁻, x⁺)"});
    if (!(c.pi(n, k.result) == k.triple.shape)) out.push_back({"kappa-arity", where, "arity is not y"});
  }
  return out;
}

Mode mode_of(const std::string& s) {
  try {
    return parse_mode(s);
  } catch (const DomainError& e) {
    throw UsageError(e.what());
  }
}

std::string named(const Document& d, const std::string& kind, const std::string& name) {
  try {
    return pick(d, kind, name);
  } catch (const DomainError& e) {
    throw UsageError(e.what());
  }
}

} // namespace

int run_command(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Bounded computations with free involutive strict ω-categories and globular operads", "omegacat"};
  app.require_subcommand(1);
  app.fallthrough();
  std::string profile_name;
  int dim = -1, depth = -1, shape_bound = -1;
  long budget = -1;
  uint64_t seed = AcceptanceOptions{}.seed;
  app.add_option("--profile", profile_name, "default, desk or tiny (else OMEGACAT_PROFILE)");
  app.add_option("--budget", budget, "rewrite budget per normalization");

  auto* validate = app.add_subcommand("validate", "validate every block of a document");
  std::string file;
  validate->add_option("file", file)->required();

  auto* normalize_cmd = app.add_subcommand("normalize", "canonical form of a term");
  std::string mode_text = "inv", term_name;
  bool trace = false;
  normalize_cmd->add_option("file", file)->required();
  normalize_cmd->add_option("--mode", mode_text, "strict or inv");
  normalize_cmd->add_option("--term", term_name, "term block name");
  normalize_cmd->add_flag("--trace", trace, "emit the rewrite trace as JSON lines first");

  auto* eq = app.add_subcommand("eq", "decide equality of two terms");
  std::vector<std::string> files;
  eq->add_option("files", files, "one document with two terms, or two documents")->required()->expected(1, 2);
  eq->add_option("--mode", mode_text, "strict or inv");

  auto* enum_terms = app.add_subcommand("enumerate-terms", "bounded term census");
  std::string gset_file;
  int max_nodes = 4, term_dim = 0;
  bool list = false;
  enum_terms->add_option("--gset", gset_file, "document holding the globular set (default: terminal)");
  enum_terms->add_option("--dim", term_dim)->required();
  enum_terms->add_option("--max-nodes", max_nodes);
  enum_terms->add_option("--mode", mode_text, "strict or inv");
  enum_terms->add_flag("--list", list, "include the terms");

  auto* enum_pasting = app.add_subcommand("enumerate-pasting", "decorated tree census");
  int max_size = 2;
  enum_pasting->add_option("--dim", term_dim)->required();
  enum_pasting->add_option("--max-size", max_size);
  enum_pasting->add_option("--mode", mode_text, "strict or inv");

  auto* compose = app.add_subcommand("compose", "composite P1∘P2 of two collections");
  std::string left, right;
  int bound = -1, max_result = -1;
  compose->add_option("file", file)->required();
  compose->add_option("--left", left, "collection block");
  compose->add_option("--right", right, "collection block");
  compose->add_option("--bound", bound, "bound on the first factor's arity");
  compose->add_option("--max-result", max_result, "bound on the composite arity");
  compose->add_flag("--list", list, "include the elements");

  auto* operad = app.add_subcommand("operad", "operad constructions and checks");
  operad->require_subcommand(1);
  auto* op_free = operad->add_subcommand("free", "free contracted operad on a collection");
  std::string collection_file, out_file, name, block_name = "P";
  bool no_contraction = false;
  op_free->add_option("--collection", collection_file)->required();
  op_free->add_option("--name", name, "collection block");
  op_free->add_option("--depth", depth);
  op_free->add_option("--shape-bound", shape_bound);
  op_free->add_option("--out", out_file, "write the operad document here");
  op_free->add_option("--block", block_name, "name of the written operad block");
  op_free->add_flag("--no-contraction-closure", no_contraction);

  int max_stage = -1;
  auto* op_laws = operad->add_subcommand("check-laws", "unit and associativity laws");
  op_laws->add_option("file", file)->required();
  op_laws->add_option("--name", name, "operad block");
  op_laws->add_option("--bound", bound, "weight bound on associativity configurations");
  op_laws->add_option("--max-stage", max_stage, "only inputs of stage ≤ this");
  auto* op_con = operad->add_subcommand("check-contraction", "contraction and diagrams d1, d2");
  op_con->add_option("file", file)->required();
  op_con->add_option("--name", name, "operad block");
  op_con->add_option("--bound", bound, "bound on tree sizes");
  op_con->add_option("--max-stage", max_stage, "only inputs of stage ≤ this");
  auto* op_initial = operad->add_subcommand("initial", "the free contracted operad on nothing");
  bool oracle = false;
  op_initial->add_option("--dim", dim);
  op_initial->add_option("--depth", depth);
  op_initial->add_option("--shape-bound", shape_bound);
  op_initial->add_option("--out", out_file, "write the operad document here");
  op_initial->add_flag("--oracle", oracle, "compare with the independent congruence closure");

  auto* algebra = app.add_subcommand("algebra", "algebras for an operad");
  algebra->require_subcommand(1);
  auto* alg_check = algebra->add_subcommand("check", "unit and associativity of an action");
  std::string operad_file, algebra_file, algebra_name;
  alg_check->add_option("--operad", operad_file)->required();
  alg_check->add_option("--algebra", algebra_file)->required();
  alg_check->add_option("--name", name, "operad block");
  alg_check->add_option("--algebra-name", algebra_name, "algebra block");
  alg_check->add_option("--bound", bound, "weight bound");

  auto* selftest = app.add_subcommand("selftest", "run the acceptance suite");
  std::vector<std::string> only;
  selftest->add_option("--seed", seed);
  selftest->add_option("--only", only, "criterion ids such as AC-3");

  std::vector<std::string> argv_store = {"omegacat"};
  argv_store.insert(argv_store.end(), args.begin(), args.end());
  std::vector<char*> argv;
  for (auto& a : argv_store) argv.push_back(a.data());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return 0;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return 0;
  } catch (const CLI::ParseError& e) {
    err << "omegacat: " << e.what() << "\n";
    return 2;
  }

  try {
    if (profile_name.empty())
      if (const char* env = std::getenv("OMEGACAT_PROFILE")) profile_name = env;
    if (profile_name.empty()) profile_name = "default";
    auto pit = profiles().find(profile_name);
    if (pit == profiles().end()) throw UsageError("unknown profile " + profile_name);
    const Profile& prof = pit->second;
    if (dim < 0) dim = prof.dim;
    if (depth < 0) depth = prof.depth;
    if (shape_bound < 0) shape_bound = prof.shape_bound;
    if (budget < 0) budget = prof.budget;

    if (*validate) {
      std::string text = read_file(file);
      std::vector<Violation> vs;
      try {
        vs = validate_document(text);
      } catch (const ParseError& e) {
        throw UsageError(file + ": " + e.what());
      }
      if (vs.empty()) {
        Document d = parse_document(text);
        for (auto& [n, b] : d.operads) {
          auto more = check_operad_block(d, n);
          vs.insert(vs.end(), more.begin(), more.end());
        }
        json blocks = json::object();
        for (auto& [k, n] : d.order) blocks[k] = blocks.value(k, 0) + 1;
        return emit(out, {{"blocks", blocks}, {"violations", violations_json(vs)}});
      }
      return emit(out, {{"violations", violations_json(vs)}});
    }

    if (*normalize_cmd) {
      Document d = load(file);
      std::string t = named(d, "term", term_name);
      const TermBlock& b = d.terms.at(t);
      NormalizeOptions o;
      o.budget = budget;
      o.trace = trace;
      Mode m = mode_of(mode_text);
      Normalized r = normalize_traced(*d.gsets.at(b.gset), b.term, m, o);
      for (auto& s : r.trace)
        out << json{{"rule", s.rule}, {"path", s.path}, {"before", to_string(s.before)}, {"after", to_string(s.after)}}.dump()
            << "\n";
      return emit(out, {{"term", t},
                        {"mode", to_string(m)},
                        {"input", to_string(b.term)},
                        {"normal_form", to_string(r.nf)},
                        {"steps", r.steps}});
    }

    if (*eq) {
      std::vector<std::pair<GSetPtr, Term>> terms;
      if (files.size() == 1) {
        Document d = load(files[0]);
        if (d.terms.size() != 2) throw UsageError(files[0] + ": expected exactly two terms");
        for (auto& [k, n] : d.order)
          if (k == "term") terms.push_back({d.gsets.at(d.terms.at(n).gset), d.terms.at(n).term});
      } else {
        for (auto& f : files) {
          Document d = load(f);
          const TermBlock& b = d.terms.at(named(d, "term", ""));
          terms.push_back({d.gsets.at(b.gset), b.term});
        }
      }
      if (!(*terms[0].first == *terms[1].first)) throw UsageError("the terms live over different globular sets");
      bool same = equal_terms(*terms[0].first, terms[0].second, terms[1].second, mode_of(mode_text));
      out << json{{"equal", same}}.dump() << "\n";
      return same ? 0 : 1;
    }

    if (*enum_terms) {
      GSetPtr g;
      if (gset_file.empty()) {
        g = terminal_set(std::max(dim, term_dim));
      } else {
        Document d = load(gset_file);
        g = d.gsets.at(named(d, "gset", ""));
      }
      if (term_dim < 0 || term_dim > g->max_dim()) throw UsageError("--dim out of range");
      Mode m = mode_of(mode_text);
      std::set<std::string> classes;
      json listed = json::array();
      long count = 0;
      enumerate_terms(*g, m, max_nodes, term_dim, [&](const Term& t) {
        ++count;
        classes.insert(to_string(normalize(*g, t, m)));
        if (list) listed.push_back(to_string(t));
      });
      json j = {{"mode", to_string(m)}, {"dim", term_dim}, {"max_nodes", max_nodes}, {"count", count},
                {"classes", classes.size()}};
      if (list) j["terms"] = listed;
      return emit(out, j);
    }

    if (*enum_pasting) {
      Mode m = mode_of(mode_text);
      if (term_dim < 0 || max_size < 0) throw UsageError("--dim and --max-size must be non-negative");
      auto trees = enumerate_trees(term_dim, max_size, m);
      json by_size = json::array(), listed = json::array();
      std::vector<long> counts(max_size + 1, 0);
      for (auto& t : trees) {
        ++counts[tree_size(t)];
        listed.push_back(to_string(t));
      }
      for (long c : counts) by_size.push_back(c);
      return emit(out, {{"mode", to_string(m)},
                        {"dim", term_dim},
                        {"max_size", max_size},
                        {"count", trees.size()},
                        {"by_size", by_size},
                        {"trees", listed}});
    }

    if (*compose) {
      Document d = load(file);
      std::string l = named(d, "collection", left), r = named(d, "collection", right.empty() ? left : right);
      ComposeOptions o;
      o.bound = bound >= 0 ? bound : shape_bound;
      o.max_result = max_result;
      Composite c = compose_collections(d.collections.at(l).coll, d.collections.at(r).coll, o);
      json j = {{"left", l}, {"right", r}, {"bound", o.bound}, {"cells", sizes(c.coll)},
                {"violations", violations_json(validate_collection(c.coll))}};
      if (list) {
        json el = json::array();
        const GlobularSet& lg = *d.collections.at(l).coll.carrier;
        for (int n = 0; n <= c.coll.max_dim(); ++n)
          for (int k = 0; k < c.coll.size(n); ++k)
            el.push_back({{"dim", n},
                          {"operation", lg.id(n, c.pairs[n][k].first)},
                          {"inputs", c.pairs[n][k].second.key()},
                          {"arity", to_string(c.coll.pi(n, k))}});
        j["elements"] = el;
      }
      return emit(out, j);
    }

    if (*op_free || *op_initial) {
      FreeOperad f;
      ClosureOptions co;
      co.close_contraction = !no_contraction;
      if (*op_free) {
        Document d = load(collection_file);
        f = free_contracted_operad(d.collections.at(named(d, "collection", name)).coll, depth, shape_bound, co);
      } else {
        f = free_contracted_operad(empty_collection(dim), depth, shape_bound, co);
      }
      if (!out_file.empty()) write_file(out_file, print_document(export_operad(f, block_name)));
      auto vs = check_congruence(f.free.magma.coll, f.congruence);
      json j = {{"depth", depth},
                {"shape_bound", shape_bound},
                {"raw_cells", sizes(f.free.magma.coll)},
                {"classes", sizes(f.operad.coll)},
                {"generating_pairs", f.pairs}};
      if (*op_initial) {
        LawOptions lo;
        lo.max_stage = depth - 1;
        auto laws = check_operad_laws(f.operad, lo);
        j["law_instances"] = laws.checked;
        for (auto& fl : laws.failures) vs.push_back({fl.law, fl.term, fl.detail});
        if (oracle) {
          bool match = oracle_operad_classes(f.free, co) == f.congruence.classes();
          j["oracle_match"] = match;
          if (!match) vs.push_back({"oracle", "", "the independent closure gives other classes"});
        }
      }
      j["violations"] = violations_json(vs);
      return emit(out, j);
    }

    if (*op_laws || *op_con) {
      Document d = load(file);
      ContractedOperad p = build_operad(d, named(d, "operad", name));
      LawOptions lo;
      if (bound >= 0)
        lo.bound = bound;
      else if (*op_con && p.shape_bound > 0)
        lo.bound = p.shape_bound;
      else
        lo.bound = std::max(p.shape_bound, lo.bound);
      lo.max_stage = max_stage;
      return emit(out, report_json(*op_laws ? check_operad_laws(p, lo) : check_operadic_contraction(p, lo)));
    }

    if (*alg_check) {
      Document od = load(operad_file);
      Document ad = load(algebra_file);
      ContractedOperad p = build_operad(od, named(od, "operad", name));
      TAlgebra a = build_algebra(ad, named(ad, "algebra", algebra_name), p);
      LawOptions lo;
      lo.bound = bound >= 0 ? bound : std::max(p.shape_bound, lo.bound);
      return emit(out, report_json(check_algebra(p, a, lo)));
    }

    if (*selftest) {
      AcceptanceOptions o;
      o.seed = seed;
      o.only = only;
      for (auto& id : only) {
        auto ids = acceptance_ids();
        if (std::find(ids.begin(), ids.end(), id) == ids.end()) throw UsageError("unknown criterion " + id);
      }
      json criteria = json::array(), failed = json::array();
      for (auto& r : run_acceptance(o)) {
        err << format_result(r) << "\n";
        criteria.push_back({{"id", r.id}, {"title", r.title}, {"pass", r.pass}, {"limit_seconds", r.limit}});
        if (!r.pass) failed.push_back({{"kind", "acceptance"}, {"where", r.id}, {"detail", r.detail}});
      }
      return emit(out, {{"profile", profile_name}, {"seed", seed}, {"criteria", criteria}, {"violations", failed}});
    }
  } catch (const UsageError& e) {
    err << "omegacat: " << e.what() << "\n";
    return 2;
  } catch (const ParseError& e) {
    err << "omegacat: " << e.what() << "\n";
    return 2;
  } catch (const DomainError& e) {
    err << "omegacat: " << e.what() << "\n";
    return 2;
  } catch (const ResourceError& e) {
    err << "omegacat: " << e.what() << "\n";
    return 3;
  }
  return 2;
}

} // namespace omega
