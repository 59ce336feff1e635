#pragma once

// Permutations of a small deck (at most five positions).
//
// Positions are 1-based in every textual form and 0-based inside the
// one-line array. Composition follows (p o q)(i) = p(q(i)): q acts first.

#include <array>
#include <compare>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace shuffle_levels {

inline constexpr int kMaxDeck = 5;
inline constexpr int kMaxClosureDeck = 4;

class ParseError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class DeckSize {
 public:
  explicit DeckSize(int n);

  int get() const noexcept { return n_; }
  auto operator<=>(const DeckSize&) const = default;

 private:
  int n_;
};

// n! for the supported deck sizes.
int factorial(int n);

enum class Parity : std::uint8_t { kEven, kOdd };

class Permutation {
 public:
  // Identity on n positions.
  explicit Permutation(DeckSize n);

  // From a 0-based one-line image array; throws unless it is a bijection.
  static Permutation from_images(std::vector<int> images);

  int size() const noexcept { return n_; }
  // 0-based image of 0-based position i.
  int operator[](int i) const { return map_[static_cast<std::size_t>(i)]; }
  std::vector<int> images() const;

  bool is_identity() const noexcept;

  friend bool operator==(const Permutation&, const Permutation&) = default;
  friend auto operator<=>(const Permutation&, const Permutation&) = default;

 private:
  Permutation() = default;

  std::uint8_t n_ = 0;
  std::array<std::uint8_t, kMaxDeck> map_{};
};

Permutation identity(DeckSize n);
// p after q.
Permutation compose(const Permutation& p, const Permutation& q);
Permutation inverse(const Permutation& p);
Permutation power(const Permutation& p, int e);
Parity parity(const Permutation& p);
// Lengths of the nontrivial cycles, ascending.
std::vector<int> cycle_type(const Permutation& p);
// Disjoint cycles as 0-based position lists, each starting at its smallest
// element, sorted by that element. Fixed points are omitted.
std::vector<std::vector<int>> cycles(const Permutation& p);
// Permutation that sends positions[i] to positions[i+1] cyclically.
Permutation cycle_of(DeckSize n, const std::vector<int>& positions);

Permutation parse_perm(std::string_view text, DeckSize n);
std::string format_perm(const Permutation& p);

// Lexicographic index of the one-line form within S_n.
int lex_rank(const Permutation& p);
Permutation unrank(DeckSize n, int rank);

}  // namespace shuffle_levels
