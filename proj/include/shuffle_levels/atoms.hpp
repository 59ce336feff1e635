#pragma once

// Atomic shuffle operations available at each level of the hierarchy.
//
//   Level 0  deterministic permutations
//   Level 1  + scramble shuffle on any position subset
//   Level 2  Level 0 + random cut on any ordered position cycle
//   Level 3  Level 2 + random pile cut over equal-size piles
//   Level 4  Level 3 + cut restricted to a chosen set of offsets
//            (a cut over piles of unequal sizes)

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "shuffle_levels/perm.hpp"
#include "shuffle_levels/shuffle.hpp"

namespace shuffle_levels {

enum class Level : std::uint8_t { k0 = 0, k1 = 1, k2 = 2, k3 = 3, k4 = 4 };

inline constexpr int kLevelCount = 5;

Level level_from_int(int value);
inline int to_int(Level l) { return static_cast<int>(l); }

enum class AtomKind : std::uint8_t { kDet, kSS, kRC, kRPC, kCutSubset };

std::string_view kind_name(AtomKind kind);

struct AtomicOp {
  AtomKind kind;
  // kDet: the permutation itself.
  std::optional<Permutation> perm;
  // kSS: the scrambled positions. kRC, kCutSubset: the cycle, in order.
  // All 0-based.
  std::vector<int> positions;
  // kRPC: piles in cut order; pile i moves onto pile i+1.
  std::vector<std::vector<int>> piles;
  // kCutSubset: the allowed nonzero powers of the cycle.
  std::vector<int> offsets;
  PermSet outcomes;

  // Human-readable form, e.g. "RC(1 2 3)" or "RPC([1,3],[2,4])".
  std::string describe() const;
  // {"kind", "params", "outcomes"}.
  nlohmann::json to_json() const;
};

AtomicOp det_atom(const Permutation& p);
AtomicOp ss_atom(DeckSize n, std::vector<int> positions);
AtomicOp rc_atom(DeckSize n, std::vector<int> cycle);
AtomicOp rpc_atom(DeckSize n, std::vector<std::vector<int>> piles);
AtomicOp cut_subset_atom(DeckSize n, std::vector<int> cycle, std::vector<int> offsets);

// All atoms of a level, deduplicated by outcome set; the first generated
// atom for an outcome set is kept. Order: Det by rank, then SS, RC, RPC and
// CutSubset families.
std::vector<AtomicOp> generate_atoms(DeckSize n, Level level);

enum class ShuffleCategory : std::uint8_t {
  kDeterministic,
  kSS,
  kRC,
  kPssRpc,
  kUnequal,
  kOther,
};

std::string_view category_name(ShuffleCategory c);

// First match in the order SS, RC, PSS/RPC, UNEQUAL, OTHER. Singletons are
// deterministic permutations rather than shuffles and get their own tag.
ShuffleCategory classify_atomic(const PermSet& s);

}  // namespace shuffle_levels
