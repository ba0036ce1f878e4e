#include "doctest.h"

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "cli.hpp"
#include "json.hpp"

using namespace omega;

namespace {

struct Run {
  int code;
  std::string out, err;
};

Run run(std::vector<std::string> args) {
  std::ostringstream out, err;
  int code = run_command(args, out, err);
  return {code, out.str(), err.str()};
}

std::string data(const std::string& name) { return std::string(OMEGACAT_DATA_DIR) + "/" + name; }

std::string temp_file(const std::string& name, const std::string& text = "") {
  auto p = std::filesystem::temp_directory_path() / name;
  if (!text.empty()) std::ofstream(p) << text;
  return p.string();
}

nlohmann::json last_json(const std::string& out) {
  std::istringstream in(out);
  std::string line, last;
  while (std::getline(in, line))
    if (!line.empty()) last = line;
  return nlohmann::json::parse(last);
}

} // namespace

TEST_CASE("eq on the double-involution pair") {
  auto r = run({"eq", "--mode", "inv", data("double_inv_left.sexp"), data("double_inv_right.sexp")});
  CHECK(r.code == 0);
  CHECK(r.out == "{\"equal\":true}\n");
  auto s = run({"eq", "--mode", "strict", data("double_inv_left.sexp"), data("double_inv_right.sexp")});
  CHECK(s.code == 2); // Inv is not a strict term
  auto i = run({"eq", data("interchange.sexp")});
  CHECK(i.code == 0);
}

TEST_CASE("usage and parse errors exit 2") {
  CHECK(run({"validate", "--bogus", data("theta.sexp")}).code == 2);
  CHECK(run({}).code == 2);
  CHECK(run({"validate", "/nonexistent/file.sexp"}).code == 2);
  std::string bad = temp_file("omegacat_unbalanced.sexp", "(gset :maxdim 1\n (cells 0 a b)\n");
  auto r = run({"normalize", bad});
  CHECK(r.code == 2);
  CHECK(r.err.find("line 1, column 1") != std::string::npos);
  CHECK(run({"--profile", "nonsense", "enumerate-pasting", "--dim", "1"}).code == 2);
  CHECK(run({"--help"}).code == 0);
}

TEST_CASE("validate reports violations with exit 1") {
  auto ok = run({"validate", data("theta_collection.sexp")});
  CHECK(ok.code == 0);
  CHECK(last_json(ok.out)["blocks"]["collection"] == 2);
  auto bad = run({"validate", data("bad_gset.sexp")});
  CHECK(bad.code == 1);
  CHECK(last_json(bad.out)["violations"][0]["kind"] == "globularity");
}

TEST_CASE("normalize with trace") {
  auto r = run({"normalize", "--trace", data("double_inv_left.sexp")});
  CHECK(r.code == 0);
  auto first = nlohmann::json::parse(r.out.substr(0, r.out.find('\n')));
  CHECK(first["rule"] == "involution-involutive");
  CHECK(last_json(r.out)["normal_form"] == "(gen alpha)");
  CHECK(run({"--budget", "0", "normalize", data("double_inv_left.sexp")}).code == 3);
}

TEST_CASE("census commands are deterministic") {
  auto a = run({"enumerate-pasting", "--dim", "1", "--max-size", "2", "--mode", "inv"});
  auto b = run({"enumerate-pasting", "--dim", "1", "--max-size", "2", "--mode", "inv"});
  CHECK(a.code == 0);
  CHECK(a.out == b.out);
  auto j = last_json(a.out);
  CHECK(j["count"] == 7);
  CHECK(j["by_size"] == nlohmann::json::array({1, 2, 4}));
  auto s = last_json(run({"enumerate-pasting", "--dim", "1", "--max-size", "2", "--mode", "strict"}).out);
  CHECK(s["count"] == 3);
  auto t = run({"enumerate-terms", "--gset", data("theta.sexp"), "--dim", "1", "--max-nodes", "3", "--mode", "strict"});
  CHECK(t.code == 0);
  // f, g, id a, id b, and nothing composable at three nodes
  CHECK(last_json(t.out)["count"] == 4);
}

TEST_CASE("compose") {
  auto r = run({"compose", data("theta_collection.sexp"), "--left", "T", "--right", "Q", "--bound", "2", "--list"});
  CHECK(r.code == 0);
  auto j = last_json(r.out);
  CHECK(j["cells"][0] == 2);
  CHECK(j["elements"].size() == j["cells"][0].get<int>() + j["cells"][1].get<int>() + j["cells"][2].get<int>());
}

TEST_CASE("operad commands") {
  auto laws = run({"operad", "check-laws", data("terminal.sexp")});
  CHECK(laws.code == 0);
  CHECK(last_json(laws.out)["checked"].get<long>() > 0);
  CHECK(run({"operad", "check-contraction", data("terminal.sexp")}).code == 0);
  CHECK(run({"algebra", "check", "--operad", data("terminal.sexp"), "--algebra", data("terminal.sexp")}).code == 0);

  std::string out = temp_file("omegacat_free.sexp");
  auto f = run({"operad", "free", "--collection", data("theta_collection.sexp"), "--name", "Q", "--depth", "1",
                "--shape-bound", "1", "--out", out});
  CHECK(f.code == 0);
  CHECK(last_json(f.out)["classes"][0] == 7);
  CHECK(run({"validate", out}).code == 0);
  CHECK(run({"operad", "check-laws", out, "--max-stage", "0"}).code == 0);

  auto init = run({"--profile", "tiny", "operad", "initial", "--oracle"});
  CHECK(init.code == 0);
  auto j = last_json(init.out);
  CHECK(j["oracle_match"] == true);
  CHECK(j["classes"][0] == 1);
}

TEST_CASE("profile from the environment, flags first") {
  setenv("OMEGACAT_PROFILE", "tiny", 1);
  auto a = last_json(run({"operad", "initial"}).out);
  CHECK(a["depth"] == 1);
  CHECK(a["shape_bound"] == 1);
  auto b = last_json(run({"operad", "initial", "--shape-bound", "2"}).out);
  CHECK(b["shape_bound"] == 2);
  unsetenv("OMEGACAT_PROFILE");
}

TEST_CASE("selftest embeds the seed") {
  auto r = run({"selftest", "--profile", "desk", "--seed", "7", "--only", "AC-8"});
  CHECK(r.code == 0);
  auto j = last_json(r.out);
  CHECK(j["seed"] == 7);
  CHECK(j["criteria"].size() == 1);
  CHECK(j["violations"].empty());
  CHECK(run({"selftest", "--only", "AC-99"}).code == 2);
}
