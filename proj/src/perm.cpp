#include "shuffle_levels/perm.hpp"

#include <algorithm>
#include <cctype>
#include <numeric>

namespace shuffle_levels {

DeckSize::DeckSize(int n) : n_(n) {
  if (n < 1 || n > kMaxDeck) {
    throw std::out_of_range("deck size " + std::to_string(n) +
                            " outside supported range 1.." +
                            std::to_string(kMaxDeck));
  }
}

int factorial(int n) {
  int f = 1;
  for (int i = 2; i <= n; ++i) f *= i;
  return f;
}

Permutation::Permutation(DeckSize n) : n_(static_cast<std::uint8_t>(n.get())) {
  for (int i = 0; i < n_; ++i) map_[i] = static_cast<std::uint8_t>(i);
}

Permutation Permutation::from_images(std::vector<int> images) {
  DeckSize n(static_cast<int>(images.size()));
  Permutation p;
  p.n_ = static_cast<std::uint8_t>(n.get());
  std::array<bool, kMaxDeck> seen{};
  for (std::size_t i = 0; i < images.size(); ++i) {
    const int v = images[i];
    if (v < 0 || v >= n.get() || seen[v]) {
      throw std::invalid_argument("image array is not a bijection");
    }
    seen[v] = true;
    p.map_[i] = static_cast<std::uint8_t>(v);
  }
  return p;
}

std::vector<int> Permutation::images() const {
  return {map_.begin(), map_.begin() + n_};
}

bool Permutation::is_identity() const noexcept {
  for (int i = 0; i < n_; ++i) {
    if (map_[i] != i) return false;
  }
  return true;
}

Permutation identity(DeckSize n) { return Permutation(n); }

Permutation compose(const Permutation& p, const Permutation& q) {
  if (p.size() != q.size()) {
    throw std::invalid_argument("compose: deck sizes differ");
  }
  std::vector<int> out(static_cast<std::size_t>(p.size()));
  for (int i = 0; i < p.size(); ++i) out[i] = p[q[i]];
  return Permutation::from_images(std::move(out));
}

Permutation inverse(const Permutation& p) {
  std::vector<int> out(static_cast<std::size_t>(p.size()));
  for (int i = 0; i < p.size(); ++i) out[p[i]] = i;
  return Permutation::from_images(std::move(out));
}

Permutation power(const Permutation& p, int e) {
  Permutation r = identity(DeckSize(p.size()));
  for (int i = 0; i < e; ++i) r = compose(p, r);
  return r;
}

std::vector<std::vector<int>> cycles(const Permutation& p) {
  std::vector<std::vector<int>> out;
  std::array<bool, kMaxDeck> seen{};
  for (int i = 0; i < p.size(); ++i) {
    if (seen[i] || p[i] == i) continue;
    std::vector<int> c;
    for (int j = i; !seen[j]; j = p[j]) {
      seen[j] = true;
      c.push_back(j);
    }
    out.push_back(std::move(c));
  }
  return out;
}

Parity parity(const Permutation& p) {
  // A k-cycle is a product of k-1 transpositions.
  int transpositions = 0;
  for (const auto& c : cycles(p)) transpositions += static_cast<int>(c.size()) - 1;
  return transpositions % 2 == 0 ? Parity::kEven : Parity::kOdd;
}

std::vector<int> cycle_type(const Permutation& p) {
  std::vector<int> lengths;
  for (const auto& c : cycles(p)) lengths.push_back(static_cast<int>(c.size()));
  std::sort(lengths.begin(), lengths.end());
  return lengths;
}

Permutation cycle_of(DeckSize n, const std::vector<int>& positions) {
  std::vector<int> img(static_cast<std::size_t>(n.get()));
  std::iota(img.begin(), img.end(), 0);
  for (std::size_t i = 0; i < positions.size(); ++i) {
    const int from = positions[i];
    if (from < 0 || from >= n.get()) {
      throw std::out_of_range("cycle position out of range");
    }
    img[from] = positions[(i + 1) % positions.size()];
  }
  return Permutation::from_images(std::move(img));
}

namespace {

class CycleParser {
 public:
  CycleParser(std::string_view text, int n) : text_(text), n_(n) {}

  Permutation parse() {
    skip_spaces();
    if (text_.substr(pos_, 2) == "id") {
      pos_ += 2;
      skip_spaces();
      if (!at_end()) fail("trailing text after \"id\"");
      return identity(DeckSize(n_));
    }
    std::vector<int> img(static_cast<std::size_t>(n_));
    std::iota(img.begin(), img.end(), 0);
    std::array<bool, kMaxDeck> used{};
    int count = 0;
    while (true) {
      skip_spaces();
      if (at_end()) break;
      auto c = parse_cycle();
      for (int v : c) {
        if (used[v]) fail("position " + std::to_string(v + 1) + " repeated");
        used[v] = true;
      }
      for (std::size_t i = 0; i < c.size(); ++i) img[c[i]] = c[(i + 1) % c.size()];
      ++count;
    }
    if (count == 0) fail("empty permutation");
    return Permutation::from_images(std::move(img));
  }

 private:
  std::vector<int> parse_cycle() {
    expect('(');
    std::vector<int> c{parse_position()};
    while (peek() == ' ') {
      skip_spaces();
      c.push_back(parse_position());
    }
    expect(')');
    if (c.size() < 2) fail("cycle needs at least two positions");
    return c;
  }

  int parse_position() {
    if (at_end() || !std::isdigit(static_cast<unsigned char>(text_[pos_]))) {
      fail("expected a position");
    }
    long v = 0;
    while (!at_end() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) {
      v = v * 10 + (text_[pos_] - '0');
      if (v > 1000) fail("position too large");
      ++pos_;
    }
    if (v < 1 || v > n_) {
      fail("position " + std::to_string(v) + " outside 1.." + std::to_string(n_));
    }
    return static_cast<int>(v) - 1;
  }

  void expect(char c) {
    if (peek() != c) fail(std::string("expected '") + c + "'");
    ++pos_;
  }
  char peek() const { return at_end() ? '\0' : text_[pos_]; }
  bool at_end() const { return pos_ >= text_.size(); }
  void skip_spaces() {
    while (peek() == ' ') ++pos_;
  }
  [[noreturn]] void fail(const std::string& what) const {
    throw ParseError("cannot parse permutation \"" + std::string(text_) +
                     "\" at offset " + std::to_string(pos_) + ": " + what);
  }

  std::string_view text_;
  int n_;
  std::size_t pos_ = 0;
};

}  // namespace

Permutation parse_perm(std::string_view text, DeckSize n) {
  return CycleParser(text, n.get()).parse();
}

std::string format_perm(const Permutation& p) {
  const auto cs = cycles(p);
  if (cs.empty()) return "id";
  std::string out;
  for (const auto& c : cs) {
    out += '(';
    for (std::size_t i = 0; i < c.size(); ++i) {
      if (i) out += ' ';
      out += std::to_string(c[i] + 1);
    }
    out += ')';
  }
  return out;
}

int lex_rank(const Permutation& p) {
  const int n = p.size();
  int rank = 0;
  for (int i = 0; i < n; ++i) {
    int smaller_later = 0;
    for (int j = i + 1; j < n; ++j) {
      if (p[j] < p[i]) ++smaller_later;
    }
    rank += smaller_later * factorial(n - 1 - i);
  }
  return rank;
}

Permutation unrank(DeckSize n, int rank) {
  const int total = factorial(n.get());
  if (rank < 0 || rank >= total) {
    throw std::out_of_range("rank " + std::to_string(rank) + " outside 0.." +
                            std::to_string(total - 1));
  }
  std::vector<int> pool(static_cast<std::size_t>(n.get()));
  std::iota(pool.begin(), pool.end(), 0);
  std::vector<int> img;
  for (int i = n.get() - 1; i >= 0; --i) {
    const int f = factorial(i);
    const int digit = rank / f;
    rank %= f;
    img.push_back(pool[digit]);
    pool.erase(pool.begin() + digit);
  }
  return Permutation::from_images(std::move(img));
}

}  // namespace shuffle_levels
