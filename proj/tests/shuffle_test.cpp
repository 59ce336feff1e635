#include <doctest.h>

#include <numeric>
#include <random>

#include "oracles.hpp"
#include "shuffle_levels/closure.hpp"
#include "shuffle_levels/shuffle.hpp"

using namespace shuffle_levels;

namespace {

PermSet S(const char* text, int n) { return parse_set(text, DeckSize(n)); }

std::vector<oracle::OneLine> lines(const PermSet& s) {
  std::vector<oracle::OneLine> out;
  for (const auto& p : s.elements()) out.push_back(p.images());
  return out;
}

Probability total(const Distribution& d) {
  Probability t(0);
  for (const auto& e : d.entries()) t += e.second;
  return t;
}

}  // namespace

TEST_CASE("PermSet basics") {
  auto s = S("{id,(1 2)(3 4)}", 4);
  CHECK(s.size() == 2);
  CHECK(s.universe() == 24);
  CHECK(s.contains(0));
  CHECK(s.contains(parse_perm("(1 2)(3 4)", DeckSize(4))));
  CHECK_FALSE(s.contains(parse_perm("(1 2)", DeckSize(4))));
  CHECK(PermSet::full(DeckSize(5)).size() == 120);
  CHECK(PermSet::full(DeckSize(5)).contains(119));
  CHECK(PermSet(DeckSize(3)).empty());
  CHECK_THROWS_AS(s.insert(24), std::out_of_range);
}

TEST_CASE("uniform_over") {
  const auto det = uniform_over(S("{id}", 3));
  CHECK(det.distribution().entries().size() == 1);
  CHECK(det.distribution().probability(0) == Probability(1));

  const auto full = uniform_over(PermSet::full(DeckSize(3)));
  CHECK(full.distribution().entries().size() == 6);
  for (const auto& e : full.distribution().entries()) CHECK(e.second == Probability(1, 6));

  const auto c3 = uniform_over(S("{id,(1 2 3),(1 3 2)}", 3));
  for (const auto& e : c3.distribution().entries()) CHECK(e.second == Probability(1, 3));
  CHECK(c3.support() == S("{id,(1 2 3),(1 3 2)}", 3));

  CHECK_THROWS_AS(uniform_over(PermSet(DeckSize(3))), std::invalid_argument);
}

TEST_CASE("Distribution validation") {
  const DeckSize n(3);
  CHECK_THROWS_AS(Distribution::from_entries(n, {{0, Probability(1, 2)}}), std::invalid_argument);
  CHECK_THROWS_AS(Distribution::from_entries(n, {{0, Probability(3, 2)}, {1, Probability(-1, 2)}}),
                  std::invalid_argument);
  CHECK_THROWS_AS(Distribution::from_entries(n, {{6, Probability(1)}}), std::out_of_range);
  // Zero entries are dropped and duplicates merged.
  const auto d = Distribution::from_entries(
      n, {{2, Probability(1, 4)}, {0, Probability(0)}, {2, Probability(1, 4)}, {1, Probability(1, 2)}});
  CHECK(d.entries().size() == 2);
  CHECK(d.probability(2) == Probability(1, 2));
  CHECK(d == Distribution::from_entries(n, {{1, Probability(1, 2)}, {2, Probability(1, 2)}}));
}

TEST_CASE("convolve") {
  SUBCASE("cut after a transposition gives S_3") {
    const auto d = convolve(uniform_over(S("{id,(1 2 3),(1 3 2)}", 3)),
                            uniform_over(S("{id,(1 2)}", 3)));
    CHECK(as_uniform_set(d) == PermSet::full(DeckSize(3)));
  }
  SUBCASE("deterministic later step translates the support") {
    const auto pi = parse_perm("(1 3)", DeckSize(3));
    const auto earlier = Distribution::from_entries(
        DeckSize(3), {{0, Probability(1, 2)}, {1, Probability(1, 4)}, {3, Probability(1, 4)}});
    const auto d = convolve(uniform_over(PermSet::singleton(pi)).distribution(), earlier);
    const auto& t = composition_table(DeckSize(3));
    const int r = lex_rank(pi);
    for (const auto& [rank, p] : earlier.entries()) CHECK(d.probability(t.compose(r, rank)) == p);
  }
  SUBCASE("transposition twice: multiplicities 2 and 2") {
    // Products: id.id = id, id.(1 2) = (1 2), (1 2).id = (1 2), (1 2).(1 2) = id.
    const auto t2 = uniform_over(S("{id,(1 2)}", 3));
    const auto d = convolve(t2, t2);
    CHECK(d.entries().size() == 2);
    CHECK(d.probability(0) == Probability(1, 2));
    CHECK(as_uniform_set(d) == S("{id,(1 2)}", 3));
  }
  CHECK_THROWS_AS(convolve(uniform_over(S("{id}", 3)), uniform_over(S("{id}", 4))),
                  std::invalid_argument);
}

TEST_CASE("as_uniform_set") {
  const auto uneven = Distribution::from_entries(
      DeckSize(3), {{0, Probability(1, 2)}, {1, Probability(1, 4)}, {2, Probability(1, 4)}});
  CHECK_FALSE(as_uniform_set(uneven).has_value());
  CHECK(as_uniform_set(uniform_over(PermSet::full(DeckSize(4))).distribution()) ==
        PermSet::full(DeckSize(4)));

  SUBCASE("2-card scrambles never give a 3-element uniform set") {
    // After r transposition shuffles every probability is m / 2^r.
    std::vector<PermSet> twos;
    for (const char* t : {"{id,(1 2)}", "{id,(1 3)}", "{id,(2 3)}"}) twos.push_back(S(t, 3));
    std::vector<Distribution> layer{Distribution::point(DeckSize(3), 0)};
    for (int r = 1; r <= 5; ++r) {
      std::vector<Distribution> next;
      for (const auto& d : layer) {
        for (const auto& t : twos) {
          auto c = convolve(uniform_over(t).distribution(), d);
          for (const auto& e : c.entries()) CHECK((std::int64_t{1} << r) % e.second.denominator() == 0);
          if (auto u = as_uniform_set(c)) CHECK(u->size() != 3);
          next.push_back(std::move(c));
        }
      }
      layer = std::move(next);
    }
  }
}

TEST_CASE("product_if_uniform") {
  CHECK(product_if_uniform(S("{id,(1 2)}", 3), S("{id,(1 2 3),(1 3 2)}", 3)) ==
        PermSet::full(DeckSize(3)));

  SUBCASE("singleton later step is a translation") {
    std::mt19937 rng(5);
    for (int i = 0; i < 50; ++i) {
      const auto a = oracle::random_set(4, rng, 10);
      const auto pi = oracle::random_perm(4, rng);
      const auto prod = product_if_uniform(a, PermSet::singleton(pi));
      REQUIRE(prod.has_value());
      CHECK(*prod == a.left_translate(lex_rank(pi)));
    }
  }

  SUBCASE("two transpositions sharing a point") {
    const auto a = S("{id,(1 2)}", 3);
    const auto b = S("{id,(1 3)}", 3);
    const auto counts = oracle::product_counts(lines(a), lines(b));
    CHECK(counts.size() == 4);
    for (const auto& [p, c] : counts) CHECK(c == 1);
    const auto prod = product_if_uniform(a, b);
    REQUIRE(prod.has_value());
    CHECK(*prod == S("{id,(1 2),(1 3),(1 2 3)}", 3));
  }

  SUBCASE("uneven multiplicities are rejected") {
    // {id,(1 2 3)} after {id,(1 2)}: {id,(1 2),(1 2 3),(1 3)}, all distinct.
    CHECK(product_if_uniform(S("{id,(1 2)}", 3), S("{id,(1 2 3)}", 3)).has_value());
    // {id,(1 2)} then {id,(1 2),(1 3)}: id and (1 2) twice, the rest once.
    CHECK_FALSE(product_if_uniform(S("{id,(1 2)}", 3), S("{id,(1 2),(1 3)}", 3)).has_value());
  }
}

TEST_CASE("product_if_uniform agrees with convolution on random pairs") {
  std::mt19937 rng(2024);
  for (int i = 0; i < 1000; ++i) {
    const int n = 2 + i % 3;
    const auto a = oracle::random_set(n, rng, 6);
    const auto b = oracle::random_set(n, rng, 6);
    const auto conv = convolve(uniform_over(b), uniform_over(a));
    CHECK(total(conv) == Probability(1));
    CHECK(conv.support() == [&] {
      PermSet s{DeckSize(n)};
      for (const auto& [p, c] : oracle::product_counts(lines(a), lines(b))) {
        s.insert(Permutation::from_images(p));
      }
      return s;
    }());
    CHECK(product_if_uniform(a, b) == as_uniform_set(conv));
  }
}

TEST_CASE("convolution invariants on random chains") {
  std::mt19937 rng(99);
  for (int trial = 0; trial < 200; ++trial) {
    const int n = 3 + trial % 2;
    auto d = Distribution::point(DeckSize(n), 0);
    std::int64_t size_product = 1;
    bool mixed = false;
    const auto& t = composition_table(DeckSize(n));
    for (int step = 0; step < 4; ++step) {
      const auto s = oracle::random_set(n, rng, 4);
      size_product *= s.size();
      d = convolve(uniform_over(s).distribution(), d);
      CHECK(total(d) == Probability(1));
      for (const auto& e : d.entries()) CHECK(size_product % e.second.denominator() == 0);
      bool even = false, odd = false;
      for (const auto& e : d.entries()) {
        (t.parity(e.first) == Parity::kEven ? even : odd) = true;
      }
      if (mixed) CHECK((even && odd));
      mixed = even && odd;
    }
  }
}

TEST_CASE("canonical set strings") {
  CHECK(canonical_set_string(S("{(1 2)(3 4), id}", 4)) == "{id,(1 2)(3 4)}");
  CHECK(canonical_set_string(S("{(1 3 2)}", 3)) == "{(1 3 2)}");
  CHECK(canonical_set_string(PermSet::full(DeckSize(3))) ==
        "{id,(2 3),(1 2),(1 2 3),(1 3 2),(1 3)}");
  CHECK(S("{ id , (1 2) }", 3) == S("{id,(1 2)}", 3));
  CHECK_THROWS_AS(S("{}", 3), ParseError);
  CHECK_THROWS_AS(S("id,(1 2)", 3), ParseError);
  CHECK_THROWS_AS(S("{id,,(1 2)}", 3), ParseError);
  CHECK_THROWS_AS(S("{id,(1 4)}", 3), ParseError);

  SUBCASE("round-trip over the n = 3 level-4 family") {
    ClosureCache cache;
    const auto& fam = cache.get(DeckSize(3), Level::k4).family();
    CHECK(fam.size() == 33);
    for (const auto& s : fam) CHECK(parse_set(canonical_set_string(s), DeckSize(3)) == s);
  }
}

TEST_CASE("translation and conjugation helpers") {
  const auto s = S("{id,(1 2)}", 3);
  const int c = lex_rank(parse_perm("(1 2 3)", DeckSize(3)));
  // (1 2 3)(1 2)(1 3 2) = (2 3).
  CHECK(s.conjugate(c) == S("{id,(2 3)}", 3));
  CHECK(s.left_translate(c) == S("{(1 2 3),(1 3)}", 3));
  CHECK(s.right_translate(c) == S("{(1 2 3),(2 3)}", 3));
  CHECK(s.is_subset_of(PermSet::full(DeckSize(3))));
  CHECK_FALSE(PermSet::full(DeckSize(3)).is_subset_of(s));
}
