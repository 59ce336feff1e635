#pragma once

// Realizable-set enumeration for each level of the shuffle hierarchy.
//
// Uniform mode runs a breadth-first search over uniform permutation sets,
// starting from {id} and multiplying on the left by every atom of the level.
// A product is kept only when it is again uniform, so every prefix of a
// witness is itself a uniform shuffle. The search is finite and runs to a
// fixpoint.
//
// Distribution mode searches over exact distributions instead and is bounded
// by depth, state count and denominator size. It is the cross-check for sets
// reachable only through non-uniform intermediate states.

#include <array>
#include <cstdint>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <set>
#include <string>
#include <unordered_map>
#include <vector>

#include "shuffle_levels/atoms.hpp"
#include "shuffle_levels/shuffle.hpp"

namespace shuffle_levels {

enum class SearchMode : std::uint8_t { kUniformIntermediate, kDistribution };

std::string_view mode_name(SearchMode mode);

struct SearchConfig {
  SearchMode mode = SearchMode::kUniformIntermediate;
  // Ignored in uniform mode. Required (finite) in distribution mode.
  std::optional<int> max_depth;
  std::size_t max_states = 1'000'000;
  std::int64_t denominator_cap = std::int64_t{1} << 40;
  // Worker threads for frontier expansion; output does not depend on it.
  int threads = 1;
};

using Witness = std::vector<AtomicOp>;

class ClosureResult {
 public:
  int n = 0;
  Level level = Level::k0;
  SearchMode mode = SearchMode::kUniformIntermediate;
  bool complete = false;
  std::vector<AtomicOp> atoms;

  // Realizable sets in discovery order.
  const std::vector<PermSet>& family() const noexcept { return family_; }
  std::size_t size() const noexcept { return family_.size(); }
  bool contains(const PermSet& s) const { return index_.contains(s); }
  std::optional<Witness> witness(const PermSet& s) const;

  // Indices into atoms, in application order.
  const std::vector<std::uint32_t>& chain(std::size_t i) const { return chains_[i]; }

  // Returns false if the set is already present.
  bool add(const PermSet& s, std::vector<std::uint32_t> atom_chain);

 private:
  std::vector<PermSet> family_;
  std::vector<std::vector<std::uint32_t>> chains_;
  std::unordered_map<PermSet, std::size_t, PermSetHash> index_;
};

// Throws std::out_of_range for n above 4, std::invalid_argument for a
// distribution-mode config without a depth bound.
ClosureResult closure(DeckSize n, Level level, const SearchConfig& cfg = {});

// Applies the atoms' uniform shuffles in order with exact arithmetic and
// returns the support. Throws std::logic_error if the result is not uniform.
PermSet witness_replay(const Witness& w, DeckSize n);

// Caches uniform-mode closures per (n, level). Thread-safe.
class ClosureCache {
 public:
  explicit ClosureCache(int threads = 1) : threads_(threads) {}

  const ClosureResult& get(DeckSize n, Level level);

 private:
  int threads_;
  std::mutex mu_;
  std::map<std::pair<int, int>, std::unique_ptr<ClosureResult>> results_;
};

std::optional<Witness> membership(ClosureCache& cache, DeckSize n, Level level, const PermSet& s);
// nullopt means the set lies beyond level 4.
std::optional<Level> min_level(ClosureCache& cache, DeckSize n, const PermSet& s);

struct CountsRow {
  int n = 0;
  std::array<std::size_t, kLevelCount> levels{};
  std::uint64_t total = 0;  // 2^(n!) - 1 nonempty subsets
};

std::vector<CountsRow> realizable_counts(ClosureCache& cache, int max_n);

struct SeparationCheck {
  std::string name;
  PermSet target;
  Level lower;
  bool absent_at_lower = false;
  Level higher;
  std::optional<Witness> witness;
  bool replay_ok = false;

  bool passed() const { return absent_at_lower && witness.has_value() && replay_ok; }
};

struct SeparationReport {
  int n = 0;
  std::vector<SeparationCheck> checks;

  bool passed() const;
};

// n = 3: the 3-cycle group needs random cuts and {id,(1 2 3)} needs the
// unequal cut. n = 4: {id,(1 2)(3 4)} needs a pile cut.
SeparationReport verify_separations(ClosureCache& cache, DeckSize n);

struct OracleResult {
  std::vector<PermSet> family;  // sorted by mask
  bool partial = false;
  std::size_t sequences = 0;
};

// Brute force over every atom sequence up to cfg.max_depth, convolving
// exactly with no uniformity requirement on intermediates. Shares no search
// code with closure(). cfg.max_states caps the number of sequences.
OracleResult oracle_search(DeckSize n, Level level, const SearchConfig& cfg);

}  // namespace shuffle_levels
