#pragma once

// Shuffle-complexity tuples (a1..a5) for card-based protocols: counts of
// scramble shuffles, random cuts, pile shuffles / pile cuts, unequal cuts and
// anything else, each an affine expression in the protocol parameter n.

#include <array>
#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "shuffle_levels/closure.hpp"
#include "shuffle_levels/shuffle.hpp"

namespace shuffle_levels {

// coeff * n + constant, coeff >= 0.
struct AffineCount {
  std::int64_t coeff = 0;
  std::int64_t constant = 0;

  std::int64_t at(std::int64_t n) const { return coeff * n + constant; }
  bool parameterized() const { return coeff != 0; }
  std::string to_string() const;

  friend bool operator==(const AffineCount&, const AffineCount&) = default;
};

// expr := term (("+" | "-") term)* ; term := int | [int] "n"
// Spaces between tokens are ignored. Throws ParseError.
AffineCount parse_count_expr(std::string_view text);

inline constexpr int kTupleSlots = 5;
using ComplexityTuple = std::array<AffineCount, kTupleSlots>;
using EvaluatedTuple = std::array<std::int64_t, kTupleSlots>;

std::string format_tuple(const ComplexityTuple& t);
std::string format_tuple(const EvaluatedTuple& t);

// Throws std::domain_error when n < 1 or any slot is negative at n.
EvaluatedTuple evaluate_tuple(const ComplexityTuple& t, std::int64_t n);

struct ProtocolRecord {
  std::string name;
  std::string reference;
  ComplexityTuple tuple;
  bool parameterized = false;

  friend bool operator==(const ProtocolRecord&, const ProtocolRecord&) = default;
};

// Block format:
//   [protocol]
//   name = "Five-card trick"
//   reference = "den Boer, 1990"
//   tuple = ["0","1","0","0","0"]
// '#' starts a comment outside quotes. Throws ParseError with a line number.
std::vector<ProtocolRecord> load_corpus(std::string_view text);
std::vector<ProtocolRecord> load_corpus_file(const std::filesystem::path& path);
std::string serialize_corpus(const std::vector<ProtocolRecord>& records);

// The twelve protocols of the published comparison table.
std::string_view bundled_corpus_text();
std::vector<ProtocolRecord> bundled_corpus();

struct ShuffleTrace {
  int n = 0;
  std::vector<PermSet> steps;
};

// Header line "n = N" (or "n N"), then one set per line.
ShuffleTrace parse_trace(std::string_view text);

// Counts each step in the slot of its shuffle kind. Deterministic steps are
// not shuffles and are not counted. A step that is not itself an atomic kind
// is counted at the slot of its minimal level (beyond level 4 goes to a5);
// that fallback needs n <= 4.
ComplexityTuple tuple_of_trace(const ShuffleTrace& trace, ClosureCache& cache);

enum class Dominance { kDominates, kDominated, kEqual, kIncomparable };

std::string_view dominance_name(Dominance d);

// Componentwise comparison at n; fewer operations dominates.
Dominance compare_tuples(const ComplexityTuple& lhs, const ComplexityTuple& rhs, std::int64_t n);

}  // namespace shuffle_levels
