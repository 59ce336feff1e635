#include "shuffle_levels/shuffle.hpp"

#include <algorithm>
#include <bit>
#include <map>
#include <memory>
#include <mutex>

namespace shuffle_levels {

namespace {

// boost::rational's mixed comparisons against int recurse under C++20
// rewritten operators; compare against rationals only.
const Probability kZero(0);
const Probability kOne(1);

}  // namespace

CompositionTable::CompositionTable(DeckSize n) : n_(n.get()), order_(factorial(n.get())) {
  perms_.reserve(static_cast<std::size_t>(order_));
  for (int r = 0; r < order_; ++r) perms_.push_back(unrank(n, r));
  table_.resize(static_cast<std::size_t>(order_ * order_));
  inverse_.resize(static_cast<std::size_t>(order_));
  parity_.resize(static_cast<std::size_t>(order_));
  for (int b = 0; b < order_; ++b) {
    for (int a = 0; a < order_; ++a) {
      table_[static_cast<std::size_t>(b * order_ + a)] =
          static_cast<std::uint8_t>(lex_rank(shuffle_levels::compose(perms_[b], perms_[a])));
    }
    inverse_[b] = static_cast<std::uint8_t>(lex_rank(shuffle_levels::inverse(perms_[b])));
    parity_[b] = shuffle_levels::parity(perms_[b]);
  }
}

const CompositionTable& composition_table(DeckSize n) {
  static std::array<std::unique_ptr<CompositionTable>, kMaxDeck + 1> tables;
  static std::array<std::once_flag, kMaxDeck + 1> once;
  const auto i = static_cast<std::size_t>(n.get());
  std::call_once(once[i], [&] { tables[i] = std::make_unique<CompositionTable>(n); });
  return *tables[i];
}

// ---------------------------------------------------------------- PermSet

PermSet::PermSet(DeckSize n, std::span<const Permutation> elements) : PermSet(n) {
  for (const auto& p : elements) insert(p);
}

PermSet PermSet::singleton(const Permutation& p) {
  PermSet s{DeckSize(p.size())};
  s.insert(p);
  return s;
}

PermSet PermSet::full(DeckSize n) {
  PermSet s(n);
  for (int r = 0; r < factorial(n.get()); ++r) s.insert(r);
  return s;
}

PermSet PermSet::from_ranks(DeckSize n, std::span<const int> ranks) {
  PermSet s(n);
  for (int r : ranks) s.insert(r);
  return s;
}

bool PermSet::contains(const Permutation& p) const {
  return p.size() == n_ && contains(lex_rank(p));
}

void PermSet::insert(int rank) {
  if (rank < 0 || rank >= universe()) throw std::out_of_range("rank outside S_n");
  mask_[static_cast<std::size_t>(rank >> 6)] |= std::uint64_t{1} << (rank & 63);
}

void PermSet::insert(const Permutation& p) {
  if (p.size() != n_) throw std::invalid_argument("permutation deck size differs from set");
  insert(lex_rank(p));
}

int PermSet::size() const noexcept {
  return std::popcount(mask_[0]) + std::popcount(mask_[1]);
}

std::vector<int> PermSet::ranks() const {
  std::vector<int> out;
  out.reserve(static_cast<std::size_t>(size()));
  for (int w = 0; w < 2; ++w) {
    for (std::uint64_t m = mask_[w]; m != 0; m &= m - 1) {
      out.push_back(w * 64 + std::countr_zero(m));
    }
  }
  return out;
}

std::vector<Permutation> PermSet::elements() const {
  const auto& t = composition_table(DeckSize(n_));
  std::vector<Permutation> out;
  for (int r : ranks()) out.push_back(t.perm(r));
  return out;
}

PermSet PermSet::left_translate(int rank) const {
  const auto& t = composition_table(DeckSize(n_));
  PermSet out{DeckSize(n_)};
  for (int r : ranks()) out.insert(t.compose(rank, r));
  return out;
}

PermSet PermSet::right_translate(int rank) const {
  const auto& t = composition_table(DeckSize(n_));
  PermSet out{DeckSize(n_)};
  for (int r : ranks()) out.insert(t.compose(r, rank));
  return out;
}

PermSet PermSet::conjugate(int rank) const {
  const auto& t = composition_table(DeckSize(n_));
  return left_translate(rank).right_translate(t.inverse(rank));
}

bool PermSet::is_subset_of(const PermSet& other) const noexcept {
  return n_ == other.n_ && (mask_[0] & ~other.mask_[0]) == 0 &&
         (mask_[1] & ~other.mask_[1]) == 0;
}

// ----------------------------------------------------------- Distribution

Distribution Distribution::point(DeckSize n, int rank) {
  if (rank < 0 || rank >= factorial(n.get())) throw std::out_of_range("rank outside S_n");
  return Distribution(n.get(), {{rank, Probability(1)}});
}

Distribution Distribution::from_entries(DeckSize n, std::vector<Entry> entries) {
  std::map<int, Probability> merged;
  for (const auto& [rank, p] : entries) {
    if (rank < 0 || rank >= factorial(n.get())) throw std::out_of_range("rank outside S_n");
    if (p < kZero) throw std::invalid_argument("negative probability");
    merged[rank] += p;
  }
  std::vector<Entry> canon;
  Probability total(0);
  for (const auto& [rank, p] : merged) {
    if (p == kZero) continue;
    if (p > kOne) throw std::invalid_argument("probability exceeds 1");
    canon.emplace_back(rank, p);
    total += p;
  }
  if (total != kOne) throw std::invalid_argument("probabilities do not sum to 1");
  return Distribution(n.get(), std::move(canon));
}

Probability Distribution::probability(int rank) const {
  auto it = std::lower_bound(entries_.begin(), entries_.end(), rank,
                             [](const Entry& e, int r) { return e.first < r; });
  return it != entries_.end() && it->first == rank ? it->second : Probability(0);
}

PermSet Distribution::support() const {
  PermSet s{DeckSize(n_)};
  for (const auto& e : entries_) s.insert(e.first);
  return s;
}

std::size_t DistributionHash::operator()(const Distribution& d) const noexcept {
  std::uint64_t h = 0xcbf29ce484222325ULL ^ static_cast<std::uint64_t>(d.deck());
  auto mix = [&h](std::uint64_t v) {
    h ^= v + 0x9E3779B97F4A7C15ULL + (h << 6) + (h >> 2);
  };
  for (const auto& [rank, p] : d.entries()) {
    mix(static_cast<std::uint64_t>(rank));
    mix(static_cast<std::uint64_t>(p.numerator()));
    mix(static_cast<std::uint64_t>(p.denominator()));
  }
  return static_cast<std::size_t>(h);
}

// ---------------------------------------------------------------- shuffles

Shuffle uniform_over(const PermSet& s) {
  if (s.empty()) throw std::invalid_argument("uniform shuffle over an empty set");
  const Probability each(1, s.size());
  std::vector<Distribution::Entry> entries;
  for (int r : s.ranks()) entries.emplace_back(r, each);
  return Shuffle(Distribution::from_entries(DeckSize(s.deck()), std::move(entries)));
}

Distribution convolve(const Distribution& later, const Distribution& earlier) {
  if (later.deck() != earlier.deck()) {
    throw std::invalid_argument("convolve: deck sizes differ");
  }
  const DeckSize n(later.deck());
  const auto& t = composition_table(n);
  std::vector<Probability> acc(static_cast<std::size_t>(t.order()), Probability(0));
  for (const auto& [b, pb] : later.entries()) {
    for (const auto& [a, pa] : earlier.entries()) {
      acc[static_cast<std::size_t>(t.compose(b, a))] += pb * pa;
    }
  }
  std::vector<Distribution::Entry> entries;
  for (int r = 0; r < t.order(); ++r) {
    if (acc[r] != kZero) entries.emplace_back(r, acc[r]);
  }
  return Distribution::from_entries(n, std::move(entries));
}

Distribution convolve(const Shuffle& later, const Shuffle& earlier) {
  return convolve(later.distribution(), earlier.distribution());
}

std::optional<PermSet> as_uniform_set(const Distribution& d) {
  const auto entries = d.entries();
  for (const auto& e : entries) {
    if (e.second != entries.front().second) return std::nullopt;
  }
  return d.support();
}

std::optional<PermSet> product_if_uniform(const PermSet& earlier, const PermSet& later) {
  if (earlier.deck() != later.deck()) {
    throw std::invalid_argument("product: deck sizes differ");
  }
  const auto& t = composition_table(DeckSize(earlier.deck()));
  std::array<std::uint16_t, 120> count{};
  PermSet out{DeckSize(earlier.deck())};
  const auto as = earlier.ranks();
  const auto bs = later.ranks();
  for (int b : bs) {
    for (int a : as) {
      const int r = t.compose(b, a);
      if (count[static_cast<std::size_t>(r)]++ == 0) out.insert(r);
    }
  }
  const int total = static_cast<int>(as.size() * bs.size());
  const int distinct = out.size();
  if (distinct == 0 || total % distinct != 0) return std::nullopt;
  const int each = total / distinct;
  for (int r : out.ranks()) {
    if (count[static_cast<std::size_t>(r)] != each) return std::nullopt;
  }
  return out;
}

std::string canonical_set_string(const PermSet& s) {
  const auto& t = composition_table(DeckSize(s.deck()));
  std::string out = "{";
  bool first = true;
  for (int r : s.ranks()) {
    if (!first) out += ',';
    first = false;
    out += format_perm(t.perm(r));
  }
  out += '}';
  return out;
}

PermSet parse_set(std::string_view text, DeckSize n) {
  auto trim = [](std::string_view v) {
    const auto b = v.find_first_not_of(" \t");
    if (b == std::string_view::npos) return std::string_view{};
    const auto e = v.find_last_not_of(" \t");
    return v.substr(b, e - b + 1);
  };
  const std::string_view body = trim(text);
  if (body.size() < 2 || body.front() != '{' || body.back() != '}') {
    throw ParseError("set must be written as {perm,...}: \"" + std::string(text) + "\"");
  }
  const std::string_view inner = body.substr(1, body.size() - 2);
  if (trim(inner).empty()) {
    throw ParseError("empty permutation set: \"" + std::string(text) + "\"");
  }
  PermSet out(n);
  std::size_t start = 0;
  while (true) {
    const auto comma = inner.find(',', start);
    const auto piece = trim(inner.substr(start, comma == std::string_view::npos
                                                    ? std::string_view::npos
                                                    : comma - start));
    if (piece.empty()) throw ParseError("empty element in set: \"" + std::string(text) + "\"");
    out.insert(parse_perm(piece, n));
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return out;
}

}  // namespace shuffle_levels
