#include "cli.hpp"

#include <fstream>
#include <iomanip>
#include <ostream>
#include <sstream>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "shuffle_levels/atoms.hpp"
#include "shuffle_levels/closure.hpp"
#include "shuffle_levels/complexity.hpp"

namespace shuffle_levels::cli {
namespace {

using nlohmann::json;

constexpr const char* kArrow = "  →  ";

json witness_json(const Witness& w) {
  json arr = json::array();
  for (const auto& op : w) arr.push_back(op.to_json());
  return arr;
}

void print_witness(std::ostream& out, const Witness& w) {
  if (w.empty()) {
    out << "  (empty sequence)\n";
    return;
  }
  for (const auto& op : w) {
    out << "  " << op.describe() << kArrow << canonical_set_string(op.outcomes) << '\n';
  }
}

std::string read_text(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

struct Options {
  int n = 0;
  int max_n = 0;
  int level = 0;
  int threads = 1;
  bool json = false;
  bool theorems = false;
  std::string mode = "uniform";
  int max_depth = 0;
  std::size_t max_states = 1'000'000;
  std::string witnesses;
  std::string set;
  std::string corpus;
  std::string file;
  long long param_n = 0;
};

int cmd_table1(const Options& o, std::ostream& out) {
  ClosureCache cache(o.threads);
  const auto rows = realizable_counts(cache, o.max_n);
  if (o.json) {
    json arr = json::array();
    for (const auto& r : rows) {
      arr.push_back({{"n", r.n}, {"levels", r.levels}, {"total", r.total}});
    }
    out << json{{"rows", arr}}.dump() << '\n';
    return 0;
  }
  out << std::setw(2) << "n" << std::setw(9) << "Level 0" << std::setw(9) << "Level 1"
      << std::setw(9) << "Level 2" << std::setw(9) << "Level 3" << std::setw(9) << "Level 4"
      << std::setw(12) << "nonempty" << '\n';
  for (const auto& r : rows) {
    out << std::setw(2) << r.n;
    for (auto c : r.levels) out << std::setw(9) << c;
    out << std::setw(12) << r.total << '\n';
  }
  return 0;
}

int cmd_enumerate(const Options& o, std::ostream& out) {
  SearchConfig cfg;
  cfg.threads = o.threads;
  if (o.mode == "distribution") {
    cfg.mode = SearchMode::kDistribution;
    cfg.max_depth = o.max_depth > 0 ? o.max_depth : 4;
    cfg.max_states = o.max_states;
  }
  const DeckSize n(o.n);
  const auto res = closure(n, level_from_int(o.level), cfg);

  std::ofstream wit;
  if (!o.witnesses.empty()) {
    wit.open(o.witnesses, std::ios::binary);
    if (!wit) throw std::runtime_error("cannot write " + o.witnesses);
  }
  auto record = [&](const PermSet& s) {
    return json{{"set", canonical_set_string(s)}, {"witness", witness_json(*res.witness(s))}};
  };

  if (o.json) {
    out << json{{"n", res.n},
                {"level", to_int(res.level)},
                {"mode", std::string(mode_name(res.mode))},
                {"count", res.size()},
                {"complete", res.complete}}
               .dump()
        << '\n';
  } else {
    out << "n=" << res.n << " level=" << to_int(res.level) << " mode=" << mode_name(res.mode)
        << " count=" << res.size() << " complete=" << (res.complete ? "true" : "false") << '\n';
  }
  for (const auto& s : res.family()) {
    if (o.json) {
      out << record(s).dump() << '\n';
    } else {
      out << canonical_set_string(s) << '\n';
    }
    if (wit.is_open()) wit << record(s).dump() << '\n';
  }
  return 0;
}

int cmd_classify(const Options& o, std::ostream& out) {
  const DeckSize n(o.n);
  const PermSet s = parse_set(o.set, n);
  ClosureCache cache(o.threads);
  const auto level = min_level(cache, n, s);
  std::optional<Witness> w;
  if (level) w = membership(cache, n, *level, s);
  if (o.json) {
    json j{{"set", canonical_set_string(s)},
           {"category", std::string(category_name(classify_atomic(s)))}};
    j["level"] = level ? json(to_int(*level)) : json(nullptr);
    j["witness"] = w ? witness_json(*w) : json(nullptr);
    out << j.dump() << '\n';
    return 0;
  }
  if (!level) {
    out << "beyond level 4\n";
    return 0;
  }
  out << "level " << to_int(*level) << '\n';
  print_witness(out, *w);
  return 0;
}

int cmd_realize(const Options& o, std::ostream& out) {
  const DeckSize n(o.n);
  const Level level = level_from_int(o.level);
  const PermSet s = parse_set(o.set, n);
  ClosureCache cache(o.threads);
  const auto w = membership(cache, n, level, s);
  if (o.json) {
    json j{{"set", canonical_set_string(s)}, {"level", to_int(level)}, {"realizable", w.has_value()}};
    j["witness"] = w ? witness_json(*w) : json(nullptr);
    out << j.dump() << '\n';
    return 0;
  }
  if (!w) {
    out << "not realizable at level " << to_int(level) << '\n';
    return 0;
  }
  out << "realizable at level " << to_int(level) << " in " << w->size() << " step"
      << (w->size() == 1 ? "" : "s") << '\n';
  print_witness(out, *w);
  return 0;
}

int cmd_verify(const Options& o, std::ostream& out, std::ostream& err) {
  if (!o.theorems) {
    err << "verify: nothing to do (pass --theorems)\n";
    return 2;
  }
  ClosureCache cache(o.threads);
  const auto report = verify_separations(cache, DeckSize(o.n));
  if (o.json) {
    json checks = json::array();
    for (const auto& c : report.checks) {
      checks.push_back({{"name", c.name},
                        {"set", canonical_set_string(c.target)},
                        {"lower_level", to_int(c.lower)},
                        {"absent_at_lower", c.absent_at_lower},
                        {"higher_level", to_int(c.higher)},
                        {"witness", c.witness ? witness_json(*c.witness) : json(nullptr)},
                        {"replay_ok", c.replay_ok},
                        {"passed", c.passed()}});
    }
    out << json{{"n", report.n}, {"checks", checks}, {"passed", report.passed()}}.dump() << '\n';
  } else {
    for (const auto& c : report.checks) {
      out << (c.passed() ? "[PASS] " : "[FAIL] ") << c.name << ": "
          << canonical_set_string(c.target) << " is "
          << (c.absent_at_lower ? "absent" : "PRESENT") << " at level " << to_int(c.lower)
          << ", " << (c.witness ? "realizable" : "NOT realizable") << " at level "
          << to_int(c.higher) << '\n';
      if (c.witness) {
        print_witness(out, *c.witness);
        out << "  replay " << (c.replay_ok ? "ok" : "MISMATCH") << '\n';
      }
    }
  }
  return report.passed() ? 0 : 1;
}

int cmd_complexity_eval(const Options& o, std::ostream& out) {
  const auto records =
      o.corpus.empty() ? bundled_corpus() : load_corpus(read_text(o.corpus));
  if (o.json) {
    json arr = json::array();
    for (const auto& r : records) {
      json symbolic = json::array();
      for (const auto& c : r.tuple) symbolic.push_back(c.to_string());
      arr.push_back({{"name", r.name},
                     {"reference", r.reference},
                     {"tuple", symbolic},
                     {"parameterized", r.parameterized},
                     {"value", evaluate_tuple(r.tuple, o.param_n)}});
    }
    out << json{{"n", o.param_n}, {"protocols", arr}}.dump() << '\n';
    return 0;
  }
  for (const auto& r : records) {
    out << r.name << " | " << r.reference << " | " << format_tuple(r.tuple) << " | "
        << format_tuple(evaluate_tuple(r.tuple, o.param_n)) << '\n';
  }
  return 0;
}

int cmd_classify_trace(const Options& o, std::ostream& out) {
  const auto trace = parse_trace(read_text(o.file));
  ClosureCache cache(o.threads);
  const auto tuple = tuple_of_trace(trace, cache);
  if (o.json) {
    json steps = json::array();
    for (const auto& s : trace.steps) {
      steps.push_back({{"set", canonical_set_string(s)},
                       {"category", std::string(category_name(classify_atomic(s)))}});
    }
    out << json{{"n", trace.n}, {"steps", steps}, {"tuple", evaluate_tuple(tuple, 1)}}.dump()
        << '\n';
    return 0;
  }
  out << format_tuple(tuple) << '\n';
  return 0;
}

int cmd_dump_atoms(const Options& o, std::ostream& out) {
  for (const auto& op : generate_atoms(DeckSize(o.n), level_from_int(o.level))) {
    out << op.to_json().dump() << '\n';
  }
  return 0;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  Options o;
  CLI::App app{"Shuffle-level hierarchy: realizable permutation sets and protocol complexity"};
  app.require_subcommand(1);

  auto add_threads = [&o](CLI::App* cmd) {
    cmd->add_option("--threads", o.threads, "Worker threads for closure search")
        ->check(CLI::Range(1, 256));
  };

  auto* table1 = app.add_subcommand("table1", "Count realizable sets per deck size and level");
  table1->add_option("--max-n", o.max_n, "Largest deck size")->required();
  table1->add_flag("--json", o.json, "JSON output");
  add_threads(table1);

  auto* enumerate = app.add_subcommand("enumerate", "List the realizable sets of one level");
  enumerate->add_option("--n", o.n, "Deck size")->required();
  enumerate->add_option("--level", o.level, "Level 0-4")->required();
  enumerate->add_option("--mode", o.mode, "Search mode")
      ->check(CLI::IsMember({"uniform", "distribution"}));
  enumerate->add_option("--max-depth", o.max_depth, "Depth bound (distribution mode)")
      ->check(CLI::PositiveNumber);
  enumerate->add_option("--max-states", o.max_states, "State bound (distribution mode)");
  enumerate->add_flag("--json", o.json, "JSON lines output");
  enumerate->add_option("--witnesses", o.witnesses, "Write JSON-lines witnesses to this file");
  add_threads(enumerate);

  auto* classify = app.add_subcommand("classify", "Minimal level of a set, with a witness");
  classify->add_option("--n", o.n, "Deck size")->required();
  classify->add_option("--set", o.set, "Set such as \"{id,(1 2)}\"")->required();
  classify->add_flag("--json", o.json, "JSON output");
  add_threads(classify);

  auto* realize = app.add_subcommand("realize", "Witness for a set at a given level");
  realize->add_option("--n", o.n, "Deck size")->required();
  realize->add_option("--level", o.level, "Level 0-4")->required();
  realize->add_option("--set", o.set, "Set such as \"{id,(1 2)}\"")->required();
  realize->add_flag("--json", o.json, "JSON output");
  add_threads(realize);

  auto* verify = app.add_subcommand("verify", "Check the level separations");
  verify->add_option("--n", o.n, "Deck size (3 or 4)")->required();
  verify->add_flag("--theorems", o.theorems, "Run the separation checks");
  verify->add_flag("--json", o.json, "JSON output");
  add_threads(verify);

  auto* complexity = app.add_subcommand("complexity", "Protocol shuffle complexity");
  complexity->require_subcommand(1);
  auto* eval = complexity->add_subcommand("eval", "Evaluate corpus tuples at n");
  eval->add_option("--corpus", o.corpus, "Corpus file (default: bundled table)");
  eval->add_option("--n", o.param_n, "Protocol parameter")->required();
  eval->add_flag("--json", o.json, "JSON output");
  auto* trace = complexity->add_subcommand("classify-trace", "Tuple of a shuffle trace");
  trace->add_option("--file", o.file, "Trace file")->required();
  trace->add_flag("--json", o.json, "JSON output");

  auto* dump = app.add_subcommand("dump-atoms", "Atoms of a level as JSON lines");
  dump->add_option("--n", o.n, "Deck size")->required();
  dump->add_option("--level", o.level, "Level 0-4")->required();

  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? 0 : 2;
  }

  try {
    if (*table1) return cmd_table1(o, out);
    if (*enumerate) return cmd_enumerate(o, out);
    if (*classify) return cmd_classify(o, out);
    if (*realize) return cmd_realize(o, out);
    if (*verify) return cmd_verify(o, out, err);
    if (*eval) return cmd_complexity_eval(o, out);
    if (*trace) return cmd_classify_trace(o, out);
    if (*dump) return cmd_dump_atoms(o, out);
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return 1;
  }
  return 2;
}

}  // namespace shuffle_levels::cli
