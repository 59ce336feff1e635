#pragma once

// Permutation sets, exact probability distributions over S_n, and uniform
// shuffles built from them.

#include <array>
#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include <boost/rational.hpp>

#include "shuffle_levels/perm.hpp"

namespace shuffle_levels {

using Probability = boost::rational<std::int64_t>;

// Multiplication table of S_n indexed by lexicographic rank. Built once per
// deck size and shared read-only.
class CompositionTable {
 public:
  explicit CompositionTable(DeckSize n);

  int deck() const noexcept { return n_; }
  int order() const noexcept { return order_; }
  // Rank of later o earlier.
  int compose(int later, int earlier) const noexcept {
    return table_[static_cast<std::size_t>(later * order_ + earlier)];
  }
  int inverse(int r) const noexcept { return inverse_[static_cast<std::size_t>(r)]; }
  int identity() const noexcept { return 0; }
  Parity parity(int r) const noexcept { return parity_[static_cast<std::size_t>(r)]; }
  const Permutation& perm(int r) const { return perms_[static_cast<std::size_t>(r)]; }

 private:
  int n_;
  int order_;
  std::vector<std::uint8_t> table_;
  std::vector<std::uint8_t> inverse_;
  std::vector<Parity> parity_;
  std::vector<Permutation> perms_;
};

const CompositionTable& composition_table(DeckSize n);

// A subset of S_n stored as a bitmask over lexicographic ranks.
class PermSet {
 public:
  using Mask = std::array<std::uint64_t, 2>;

  explicit PermSet(DeckSize n) : n_(static_cast<std::uint8_t>(n.get())) {}
  PermSet(DeckSize n, std::span<const Permutation> elements);

  static PermSet singleton(const Permutation& p);
  static PermSet full(DeckSize n);
  static PermSet from_ranks(DeckSize n, std::span<const int> ranks);

  int deck() const noexcept { return n_; }
  int universe() const noexcept { return factorial(n_); }

  bool contains(int rank) const noexcept {
    return (mask_[static_cast<std::size_t>(rank >> 6)] >> (rank & 63)) & 1U;
  }
  bool contains(const Permutation& p) const;
  void insert(int rank);
  void insert(const Permutation& p);

  int size() const noexcept;
  bool empty() const noexcept { return mask_[0] == 0 && mask_[1] == 0; }
  std::vector<int> ranks() const;
  std::vector<Permutation> elements() const;
  const Mask& mask() const noexcept { return mask_; }

  // Left and right translation and conjugation by a single permutation.
  PermSet left_translate(int rank) const;
  PermSet right_translate(int rank) const;
  PermSet conjugate(int rank) const;
  bool is_subset_of(const PermSet& other) const noexcept;

  friend bool operator==(const PermSet&, const PermSet&) = default;
  friend auto operator<=>(const PermSet&, const PermSet&) = default;

 private:
  std::uint8_t n_;
  Mask mask_{};
};

struct PermSetHash {
  std::size_t operator()(const PermSet& s) const noexcept {
    const auto& m = s.mask();
    std::uint64_t h = m[0] * 0x9E3779B97F4A7C15ULL;
    h ^= (m[1] + 0x632BE59BD9B4E019ULL + (h << 6) + (h >> 2));
    h ^= static_cast<std::uint64_t>(s.deck()) << 58;
    return static_cast<std::size_t>(h);
  }
};

// Exact probability distribution over S_n. Entries are kept sorted by rank
// with zero entries removed, so equal distributions compare equal.
class Distribution {
 public:
  using Entry = std::pair<int, Probability>;

  // Point mass.
  static Distribution point(DeckSize n, int rank);
  // Throws unless all probabilities are in (0, 1] and sum to exactly 1.
  static Distribution from_entries(DeckSize n, std::vector<Entry> entries);

  int deck() const noexcept { return n_; }
  std::span<const Entry> entries() const noexcept { return entries_; }
  Probability probability(int rank) const;
  PermSet support() const;

  friend bool operator==(const Distribution&, const Distribution&) = default;

 private:
  Distribution(int n, std::vector<Entry> entries) : n_(n), entries_(std::move(entries)) {}

  int n_;
  std::vector<Entry> entries_;
};

struct DistributionHash {
  std::size_t operator()(const Distribution& d) const noexcept;
};

// A shuffle (outcome set, distribution over it).
class Shuffle {
 public:
  explicit Shuffle(Distribution dist) : support_(dist.support()), dist_(std::move(dist)) {}

  const PermSet& support() const noexcept { return support_; }
  const Distribution& distribution() const noexcept { return dist_; }

 private:
  PermSet support_;
  Distribution dist_;
};

// Throws std::invalid_argument on an empty set.
Shuffle uniform_over(const PermSet& s);

// Law of b o a with b ~ later and a ~ earlier drawn independently.
Distribution convolve(const Distribution& later, const Distribution& earlier);
Distribution convolve(const Shuffle& later, const Shuffle& earlier);

std::optional<PermSet> as_uniform_set(const Distribution& d);

// {b o a : a in earlier, b in later} when the product of the two uniform
// shuffles is again uniform, i.e. every element has the same number of
// factorizations; nullopt otherwise.
std::optional<PermSet> product_if_uniform(const PermSet& earlier, const PermSet& later);

std::string canonical_set_string(const PermSet& s);
PermSet parse_set(std::string_view text, DeckSize n);

}  // namespace shuffle_levels

template <>
struct std::hash<shuffle_levels::PermSet> : shuffle_levels::PermSetHash {};
