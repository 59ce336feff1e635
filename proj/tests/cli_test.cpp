#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <nlohmann/json.hpp>
#include <sstream>

#include "cli.hpp"
#include "shuffle_levels/closure.hpp"

using namespace shuffle_levels;
using nlohmann::json;

namespace {

struct Run {
  int code;
  std::string out;
  std::string err;
};

Run run(std::vector<std::string> args) {
  args.insert(args.begin(), "shuffle-levels");
  std::ostringstream out, err;
  const int code = cli::run(args, out, err);
  return {code, out.str(), err.str()};
}

std::vector<std::string> lines_of(const std::string& text) {
  std::vector<std::string> v;
  std::istringstream in(text);
  for (std::string line; std::getline(in, line);) v.push_back(line);
  return v;
}

// Rebuilds a witness from its JSON form using only the recorded outcome sets.
PermSet replay_json(const json& witness, int n) {
  Witness w;
  for (const auto& step : witness) {
    w.push_back(AtomicOp{AtomKind::kDet, std::nullopt, {}, {}, {},
                         parse_set(step.at("outcomes").get<std::string>(), DeckSize(n))});
  }
  return witness_replay(w, DeckSize(n));
}

std::filesystem::path temp_file(const std::string& name, const std::string& body) {
  const auto p = std::filesystem::temp_directory_path() / name;
  std::ofstream(p, std::ios::binary) << body;
  return p;
}

}  // namespace

TEST_CASE("exit codes") {
  CHECK(run({}).code == 2);
  CHECK(run({"--help"}).code == 0);
  CHECK(run({"bogus"}).code == 2);
  CHECK(run({"table1"}).code == 2);
  CHECK(run({"table1", "--max-n", "x"}).code == 2);
  CHECK(run({"table1", "--max-n", "5"}).code == 1);
  CHECK(run({"classify", "--n", "3", "--set", "{id,(1 4)}"}).code == 1);
  CHECK(run({"classify", "--n", "6", "--set", "{id}"}).code == 1);
  CHECK(run({"enumerate", "--n", "3", "--level", "7"}).code == 1);
  CHECK(run({"enumerate", "--n", "3", "--level", "1", "--mode", "sideways"}).code == 2);
  CHECK(run({"verify", "--n", "3"}).code == 2);
  CHECK(run({"complexity", "eval", "--n", "3", "--corpus", "/nonexistent/file"}).code == 1);
}

TEST_CASE("errors go to the diagnostic stream only") {
  const auto r = run({"classify", "--n", "3", "--set", "{id,(1 4)}", "--json"});
  CHECK(r.code == 1);
  CHECK(r.out.empty());
  CHECK(r.err.rfind("error: ", 0) == 0);
  const auto u = run({"table1", "--json"});
  CHECK(u.code == 2);
  CHECK(u.out.empty());
  CHECK_FALSE(u.err.empty());
}

TEST_CASE("table1") {
  const auto r = run({"table1", "--max-n", "3"});
  REQUIRE(r.code == 0);
  const auto ls = lines_of(r.out);
  REQUIRE(ls.size() == 4);
  const auto cells = [](const std::string& line) {
    std::istringstream in(line);
    std::vector<long long> v;
    for (long long x; in >> x;) v.push_back(x);
    return v;
  };
  CHECK(cells(ls[1]) == std::vector<long long>{1, 1, 1, 1, 1, 1, 1});
  CHECK(cells(ls[2]) == std::vector<long long>{2, 2, 3, 3, 3, 3, 3});
  CHECK(cells(ls[3]) == std::vector<long long>{3, 6, 25, 27, 27, 33, 63});

  const auto j = run({"table1", "--max-n", "3", "--json"});
  REQUIRE(j.code == 0);
  CHECK(j.out ==
        R"j({"rows":[{"levels":[1,1,1,1,1],"n":1,"total":1},{"levels":[2,3,3,3,3],"n":2,"total":3},)j"
        R"j({"levels":[6,25,27,27,33],"n":3,"total":63}]})j"
        "\n");
  CHECK(run({"table1", "--max-n", "3", "--json", "--threads", "4"}).out == j.out);
}

TEST_CASE("classify") {
  const auto r = run({"classify", "--n", "4", "--set", "{id,(1 2)(3 4)}"});
  REQUIRE(r.code == 0);
  const auto ls = lines_of(r.out);
  REQUIRE(ls.size() >= 2);
  CHECK(ls[0] == "level 3");
  CHECK(ls[1].find("→") != std::string::npos);

  const auto trivial = run({"classify", "--n", "3", "--set", "{id}"});
  CHECK(trivial.out == "level 0\n  (empty sequence)\n");
  CHECK(run({"classify", "--n", "3", "--set", "{id,(1 2),(1 3)}"}).out == "beyond level 4\n");

  const auto j = run({"classify", "--n", "3", "--set", "{id,(1 2 3)}", "--json"});
  const auto parsed = json::parse(j.out);
  CHECK(parsed.at("level") == 4);
  CHECK(parsed.at("category") == "UNEQUAL");
  CHECK(replay_json(parsed.at("witness"), 3) == parse_set("{id,(1 2 3)}", DeckSize(3)));
}

TEST_CASE("realize output replays") {
  const std::vector<std::tuple<int, int, std::string>> queries{
      {3, 2, "{id,(1 2 3),(1 3 2)}"}, {3, 2, "{(1 2),(1 3),(2 3)}"}, {3, 1, "{id,(1 2)}"},
      {4, 3, "{id,(1 2)(3 4)}"},      {3, 4, "{id,(1 3 2)}"},       {4, 1, "{id,(1 2),(3 4),(1 2)(3 4)}"},
      {2, 0, "{(1 2)}"},
  };
  for (const auto& [n, level, set] : queries) {
    CAPTURE(set);
    const auto r = run({"realize", "--n", std::to_string(n), "--level", std::to_string(level), "--set",
                        set, "--json"});
    REQUIRE(r.code == 0);
    const auto j = json::parse(r.out);
    REQUIRE(j.at("realizable") == true);
    CHECK(replay_json(j.at("witness"), n) == parse_set(set, DeckSize(n)));
  }
  const auto no = run({"realize", "--n", "4", "--level", "2", "--set", "{id,(1 2)(3 4)}"});
  CHECK(no.code == 0);
  CHECK(no.out == "not realizable at level 2\n");
  const auto yes = run({"realize", "--n", "3", "--level", "2", "--set", "{id,(1 2 3),(1 3 2)}"});
  CHECK(yes.out.rfind("realizable at level 2 in 1 step\n", 0) == 0);
}

TEST_CASE("enumerate") {
  const auto r = run({"enumerate", "--n", "3", "--level", "2"});
  REQUIRE(r.code == 0);
  const auto ls = lines_of(r.out);
  REQUIRE(ls.size() == 28);
  CHECK(ls[0] == "n=3 level=2 mode=uniform count=27 complete=true");
  CHECK(ls[1] == "{id}");

  const auto wit = std::filesystem::temp_directory_path() / "shuffle_levels_witnesses.jsonl";
  const auto j = run({"enumerate", "--n", "3", "--level", "4", "--json", "--witnesses", wit.string()});
  REQUIRE(j.code == 0);
  const auto jl = lines_of(j.out);
  REQUIRE(jl.size() == 34);
  CHECK(jl[0] == R"j({"complete":true,"count":33,"level":4,"mode":"uniform","n":3})j");
  std::ifstream in(wit);
  std::ostringstream file;
  file << in.rdbuf();
  auto fl = lines_of(file.str());
  CHECK(fl == std::vector<std::string>(jl.begin() + 1, jl.end()));
  for (const auto& line : fl) {
    const auto rec = json::parse(line);
    CHECK(replay_json(rec.at("witness"), 3) == parse_set(rec.at("set").get<std::string>(), DeckSize(3)));
  }
  std::filesystem::remove(wit);

  const auto d = run({"enumerate", "--n", "3", "--level", "1", "--mode", "distribution", "--max-depth", "3"});
  REQUIRE(d.code == 0);
  CHECK(lines_of(d.out)[0].rfind("n=3 level=1 mode=distribution", 0) == 0);
  CHECK(lines_of(d.out)[0].find("complete=false") != std::string::npos);
}

TEST_CASE("verify") {
  const auto r3 = run({"verify", "--n", "3", "--theorems"});
  CHECK(r3.code == 0);
  CHECK(r3.out.find("[FAIL]") == std::string::npos);
  CHECK(lines_of(r3.out)[0].rfind("[PASS] ", 0) == 0);
  const auto r4 = run({"verify", "--n", "4", "--theorems", "--json"});
  CHECK(r4.code == 0);
  CHECK(json::parse(r4.out).at("passed") == true);
  CHECK(run({"verify", "--n", "2", "--theorems"}).code == 1);
}

TEST_CASE("complexity eval") {
  const auto r = run({"complexity", "eval", "--n", "9"});
  REQUIRE(r.code == 0);
  const auto ls = lines_of(r.out);
  REQUIRE(ls.size() == 12);
  CHECK(ls[8] == "2n-card equality | Ruangwises-Itoh, 2021 | (0,0,n-1,0,0) | (0,0,8,0,0)");
  CHECK(run({"complexity", "eval", "--n", "9", "--corpus", CORPUS_FILE}).out == r.out);

  const auto j = json::parse(run({"complexity", "eval", "--n", "9", "--json"}).out);
  CHECK(j.at("protocols").size() == 12);
  CHECK(run({"complexity", "eval", "--n", "1", "--corpus",
             temp_file("sl_bad.corpus", "[protocol]\nname = \"x\"\n").string()})
            .code == 1);
}

TEST_CASE("complexity classify-trace") {
  const auto p = temp_file("sl_trace.txt", "n = 3\n{id,(1 2 3),(1 3 2)}\n{id,(1 2 3)}\n{id,(1 2)}\n");
  const auto r = run({"complexity", "classify-trace", "--file", p.string()});
  CHECK(r.code == 0);
  CHECK(r.out == "(1,1,0,1,0)\n");
  const auto j = json::parse(run({"complexity", "classify-trace", "--file", p.string(), "--json"}).out);
  CHECK(j.at("tuple") == json::array({1, 1, 0, 1, 0}));
  std::filesystem::remove(p);
  CHECK(run({"complexity", "classify-trace", "--file", "/nonexistent/trace"}).code == 1);
}

TEST_CASE("dump-atoms") {
  const auto r = run({"dump-atoms", "--n", "2", "--level", "1"});
  CHECK(r.out ==
        R"j({"kind":"Det","outcomes":"{id}","params":{"perm":"id"}})j"
        "\n"
        R"j({"kind":"Det","outcomes":"{(1 2)}","params":{"perm":"(1 2)"}})j"
        "\n"
        R"j({"kind":"SS","outcomes":"{id,(1 2)}","params":{"positions":[1,2]}})j"
        "\n");
}

TEST_CASE("identical invocations give identical bytes") {
  const std::vector<std::vector<std::string>> cmds{
      {"table1", "--max-n", "3", "--json"},
      {"enumerate", "--n", "3", "--level", "4", "--json"},
      {"classify", "--n", "4", "--set", "{id,(1 2)(3 4)}", "--json"},
      {"realize", "--n", "3", "--level", "4", "--set", "{id,(1 2 3)}"},
      {"verify", "--n", "3", "--theorems", "--json"},
      {"complexity", "eval", "--n", "4", "--json"},
      {"dump-atoms", "--n", "3", "--level", "4"},
  };
  for (const auto& c : cmds) {
    const auto a = run(c);
    const auto b = run(c);
    CHECK(a.code == 0);
    CHECK(a.out == b.out);
    // Key-sorted JSON: re-dumping a parsed line changes nothing.
    for (const auto& line : lines_of(a.out)) {
      if (!line.empty() && line.front() == '{') CHECK(json::parse(line).dump() == line);
    }
  }
}
