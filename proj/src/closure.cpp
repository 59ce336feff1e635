#include "shuffle_levels/closure.hpp"

#include <algorithm>
#include <deque>
#include <thread>
#include <unordered_set>

namespace shuffle_levels {

std::string_view mode_name(SearchMode mode) {
  return mode == SearchMode::kUniformIntermediate ? "uniform" : "distribution";
}

bool ClosureResult::add(const PermSet& s, std::vector<std::uint32_t> atom_chain) {
  if (!index_.emplace(s, family_.size()).second) return false;
  family_.push_back(s);
  chains_.push_back(std::move(atom_chain));
  return true;
}

std::optional<Witness> ClosureResult::witness(const PermSet& s) const {
  auto it = index_.find(s);
  if (it == index_.end()) return std::nullopt;
  Witness w;
  for (auto a : chains_[it->second]) w.push_back(atoms[a]);
  return w;
}

namespace {

void check_closure_deck(DeckSize n) {
  if (n.get() > kMaxClosureDeck) {
    throw std::out_of_range("closure supports decks of at most " +
                            std::to_string(kMaxClosureDeck) + " cards");
  }
}

struct Candidate {
  PermSet set;
  std::uint32_t atom;
};

// Products of one frontier set with every atom that are uniform and not yet
// known at the start of the round.
std::vector<Candidate> expand(const ClosureResult& res, const PermSet& from) {
  std::vector<Candidate> out;
  for (std::uint32_t a = 0; a < res.atoms.size(); ++a) {
    auto prod = product_if_uniform(from, res.atoms[a].outcomes);
    if (prod && !res.contains(*prod)) out.push_back({*prod, a});
  }
  return out;
}

void uniform_search(ClosureResult& res, int threads) {
  const DeckSize n(res.n);
  res.add(PermSet::singleton(identity(n)), {});
  std::vector<std::size_t> frontier{0};
  threads = std::max(1, threads);

  while (!frontier.empty()) {
    std::vector<std::vector<Candidate>> found(frontier.size());
    auto work = [&](std::size_t first, std::size_t stride) {
      for (std::size_t i = first; i < frontier.size(); i += stride) {
        found[i] = expand(res, res.family()[frontier[i]]);
      }
    };
    if (threads == 1 || frontier.size() < 64) {
      work(0, 1);
    } else {
      std::vector<std::jthread> pool;
      for (int t = 0; t < threads; ++t) {
        pool.emplace_back(work, static_cast<std::size_t>(t), static_cast<std::size_t>(threads));
      }
    }
    // Merge in frontier order, then atom order, so the result does not
    // depend on the thread count.
    std::vector<std::size_t> next;
    for (std::size_t i = 0; i < frontier.size(); ++i) {
      for (auto& c : found[i]) {
        auto chain = res.chain(frontier[i]);
        chain.push_back(c.atom);
        if (res.add(c.set, std::move(chain))) next.push_back(res.size() - 1);
      }
    }
    frontier = std::move(next);
  }
  res.complete = true;
}

bool denominators_within(const Distribution& d, std::int64_t cap) {
  for (const auto& e : d.entries()) {
    if (e.second.denominator() > cap) return false;
  }
  return true;
}

void distribution_search(ClosureResult& res, const SearchConfig& cfg) {
  const DeckSize n(res.n);
  struct State {
    Distribution dist;
    std::vector<std::uint32_t> chain;
  };
  std::vector<Shuffle> atom_shuffles;
  for (const auto& a : res.atoms) atom_shuffles.push_back(uniform_over(a.outcomes));

  std::unordered_set<Distribution, DistributionHash> visited;
  std::vector<State> frontier;
  const auto start = Distribution::point(n, 0);
  visited.insert(start);
  frontier.push_back({start, {}});
  res.add(PermSet::singleton(identity(n)), {});

  bool bounded = false;
  for (int depth = 0; !frontier.empty(); ++depth) {
    const bool probing = depth >= *cfg.max_depth;
    std::vector<State> next;
    for (const auto& st : frontier) {
      for (std::uint32_t a = 0; a < atom_shuffles.size(); ++a) {
        auto d = convolve(atom_shuffles[a].distribution(), st.dist);
        if (visited.contains(d)) continue;
        if (probing) {
          bounded = true;
          break;
        }
        if (!denominators_within(d, cfg.denominator_cap) || visited.size() >= cfg.max_states) {
          bounded = true;
          continue;
        }
        visited.insert(d);
        auto chain = st.chain;
        chain.push_back(a);
        if (auto s = as_uniform_set(d)) res.add(*s, chain);
        next.push_back({std::move(d), std::move(chain)});
      }
      if (probing && bounded) break;
    }
    if (probing) break;
    frontier = std::move(next);
  }
  res.complete = !bounded;
}

}  // namespace

ClosureResult closure(DeckSize n, Level level, const SearchConfig& cfg) {
  check_closure_deck(n);
  ClosureResult res;
  res.n = n.get();
  res.level = level;
  res.mode = cfg.mode;
  res.atoms = generate_atoms(n, level);
  if (cfg.mode == SearchMode::kUniformIntermediate) {
    uniform_search(res, cfg.threads);
  } else {
    if (!cfg.max_depth || *cfg.max_depth < 1) {
      throw std::invalid_argument("distribution mode needs a positive max depth");
    }
    distribution_search(res, cfg);
  }
  return res;
}

PermSet witness_replay(const Witness& w, DeckSize n) {
  Distribution d = Distribution::point(n, 0);
  for (const auto& op : w) {
    if (op.outcomes.deck() != n.get()) throw std::invalid_argument("witness deck size mismatch");
    d = convolve(uniform_over(op.outcomes).distribution(), d);
  }
  auto s = as_uniform_set(d);
  if (!s) throw std::logic_error("witness replay produced a non-uniform distribution");
  return *s;
}

const ClosureResult& ClosureCache::get(DeckSize n, Level level) {
  std::lock_guard lock(mu_);
  auto& slot = results_[{n.get(), to_int(level)}];
  if (!slot) {
    SearchConfig cfg;
    cfg.threads = threads_;
    slot = std::make_unique<ClosureResult>(closure(n, level, cfg));
  }
  return *slot;
}

std::optional<Witness> membership(ClosureCache& cache, DeckSize n, Level level,
                                  const PermSet& s) {
  if (s.deck() != n.get()) throw std::invalid_argument("set deck size differs from n");
  if (s.empty()) throw std::invalid_argument("membership of an empty set");
  return cache.get(n, level).witness(s);
}

std::optional<Level> min_level(ClosureCache& cache, DeckSize n, const PermSet& s) {
  for (int l = 0; l < kLevelCount; ++l) {
    if (membership(cache, n, level_from_int(l), s)) return level_from_int(l);
  }
  return std::nullopt;
}

std::vector<CountsRow> realizable_counts(ClosureCache& cache, int max_n) {
  if (max_n < 1 || max_n > kMaxClosureDeck) {
    throw std::out_of_range("max n must be within 1.." + std::to_string(kMaxClosureDeck));
  }
  std::vector<CountsRow> rows;
  for (int n = 1; n <= max_n; ++n) {
    CountsRow row;
    row.n = n;
    for (int l = 0; l < kLevelCount; ++l) {
      row.levels[static_cast<std::size_t>(l)] = cache.get(DeckSize(n), level_from_int(l)).size();
    }
    row.total = (std::uint64_t{1} << factorial(n)) - 1;
    rows.push_back(row);
  }
  return rows;
}

bool SeparationReport::passed() const {
  return !checks.empty() &&
         std::all_of(checks.begin(), checks.end(), [](const auto& c) { return c.passed(); });
}

SeparationReport verify_separations(ClosureCache& cache, DeckSize n) {
  struct Claim {
    const char* name;
    const char* set;
    Level lower;
    Level higher;
  };
  std::vector<Claim> claims;
  if (n.get() == 3) {
    claims = {{"random cut beyond scramble", "{id,(1 2 3),(1 3 2)}", Level::k1, Level::k2},
              {"unequal cut beyond pile cut", "{id,(1 2 3)}", Level::k3, Level::k4}};
  } else if (n.get() == 4) {
    claims = {{"pile cut beyond random cut", "{id,(1 2)(3 4)}", Level::k2, Level::k3}};
  } else {
    throw std::invalid_argument("separation checks exist for n = 3 and n = 4 only");
  }
  SeparationReport report;
  report.n = n.get();
  for (const auto& c : claims) {
    SeparationCheck check{c.name, parse_set(c.set, n), c.lower, false, c.higher, std::nullopt,
                          false};
    check.absent_at_lower = !membership(cache, n, c.lower, check.target).has_value();
    check.witness = membership(cache, n, c.higher, check.target);
    if (check.witness) check.replay_ok = witness_replay(*check.witness, n) == check.target;
    report.checks.push_back(std::move(check));
  }
  return report;
}

// Deliberately a separate path: permutations composed directly rather than
// through rank tables, probabilities held in an ordered map, no state dedup.
OracleResult oracle_search(DeckSize n, Level level, const SearchConfig& cfg) {
  check_closure_deck(n);
  if (!cfg.max_depth || *cfg.max_depth < 0) {
    throw std::invalid_argument("oracle search needs a max depth");
  }
  using Law = std::map<Permutation, Probability>;
  struct Step {
    std::vector<Permutation> outcomes;
    Probability weight;
  };
  std::vector<Step> steps;
  for (const auto& a : generate_atoms(n, level)) {
    steps.push_back({a.outcomes.elements(), Probability(1, a.outcomes.size())});
  }

  OracleResult out;
  std::set<PermSet> found;
  auto record = [&](const Law& law) {
    const Probability first = law.begin()->second;
    for (const auto& [p, q] : law) {
      if (q != first) return;
    }
    PermSet s(n);
    for (const auto& [p, q] : law) s.insert(p);
    found.insert(s);
  };

  // Depth-first over sequences; stack holds (law, depth).
  std::vector<std::pair<Law, int>> stack;
  stack.push_back({Law{{identity(n), Probability(1)}}, 0});
  while (!stack.empty()) {
    auto [law, depth] = std::move(stack.back());
    stack.pop_back();
    record(law);
    ++out.sequences;
    if (depth == *cfg.max_depth) continue;
    if (out.sequences >= cfg.max_states) {
      out.partial = true;
      break;
    }
    for (auto it = steps.rbegin(); it != steps.rend(); ++it) {
      Law next;
      for (const auto& [a, pa] : law) {
        for (const auto& b : it->outcomes) next[compose(b, a)] += pa * it->weight;
      }
      stack.push_back({std::move(next), depth + 1});
    }
  }
  out.family.assign(found.begin(), found.end());
  return out;
}

}  // namespace shuffle_levels
