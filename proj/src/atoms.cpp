#include "shuffle_levels/atoms.hpp"

#include <algorithm>
#include <array>
#include <memory>
#include <mutex>
#include <numeric>
#include <unordered_map>
#include <unordered_set>

namespace shuffle_levels {

Level level_from_int(int value) {
  if (value < 0 || value >= kLevelCount) {
    throw std::out_of_range("level " + std::to_string(value) + " outside 0..4");
  }
  return static_cast<Level>(value);
}

std::string_view kind_name(AtomKind kind) {
  switch (kind) {
    case AtomKind::kDet: return "Det";
    case AtomKind::kSS: return "SS";
    case AtomKind::kRC: return "RC";
    case AtomKind::kRPC: return "RPC";
    case AtomKind::kCutSubset: return "CutSubset";
  }
  return "?";
}

std::string_view category_name(ShuffleCategory c) {
  switch (c) {
    case ShuffleCategory::kDeterministic: return "DET";
    case ShuffleCategory::kSS: return "SS";
    case ShuffleCategory::kRC: return "RC";
    case ShuffleCategory::kPssRpc: return "PSS_RPC";
    case ShuffleCategory::kUnequal: return "UNEQUAL";
    case ShuffleCategory::kOther: return "OTHER";
  }
  return "?";
}

namespace {

std::vector<int> one_based(const std::vector<int>& v) {
  std::vector<int> out(v);
  for (int& x : out) ++x;
  return out;
}

std::string join(const std::vector<int>& v, char sep) {
  std::string out;
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (i) out += sep;
    out += std::to_string(v[i] + 1);
  }
  return out;
}

PermSet cyclic_group(const Permutation& g) {
  PermSet s{DeckSize(g.size())};
  Permutation x = identity(DeckSize(g.size()));
  do {
    s.insert(x);
    x = compose(g, x);
  } while (!x.is_identity());
  return s;
}

Permutation pile_shift(DeckSize n, const std::vector<std::vector<int>>& piles) {
  std::vector<int> img(static_cast<std::size_t>(n.get()));
  std::iota(img.begin(), img.end(), 0);
  for (std::size_t i = 0; i < piles.size(); ++i) {
    const auto& from = piles[i];
    const auto& to = piles[(i + 1) % piles.size()];
    for (std::size_t j = 0; j < from.size(); ++j) img[from[j]] = to[j];
  }
  return Permutation::from_images(std::move(img));
}

void check_positions(DeckSize n, const std::vector<int>& positions) {
  std::vector<bool> seen(static_cast<std::size_t>(n.get()));
  for (int p : positions) {
    if (p < 0 || p >= n.get()) throw std::out_of_range("atom position out of range");
    if (seen[p]) throw std::invalid_argument("atom position repeated");
    seen[p] = true;
  }
}

}  // namespace

std::string AtomicOp::describe() const {
  switch (kind) {
    case AtomKind::kDet:
      return "Det(" + format_perm(*perm) + ")";
    case AtomKind::kSS:
      return "SS(" + join(positions, ',') + ")";
    case AtomKind::kRC:
      return "RC(" + join(positions, ' ') + ")";
    case AtomKind::kRPC: {
      std::string out = "RPC(";
      for (std::size_t i = 0; i < piles.size(); ++i) {
        if (i) out += ',';
        out += "[" + join(piles[i], ',') + "]";
      }
      return out + ")";
    }
    case AtomKind::kCutSubset: {
      std::string out = "CutSubset(" + join(positions, ' ') + "; {";
      for (std::size_t i = 0; i < offsets.size(); ++i) {
        if (i) out += ',';
        out += std::to_string(offsets[i]);
      }
      return out + "})";
    }
  }
  return "?";
}

nlohmann::json AtomicOp::to_json() const {
  nlohmann::json params = nlohmann::json::object();
  switch (kind) {
    case AtomKind::kDet:
      params["perm"] = format_perm(*perm);
      break;
    case AtomKind::kSS:
      params["positions"] = one_based(positions);
      break;
    case AtomKind::kRC:
      params["cycle"] = one_based(positions);
      break;
    case AtomKind::kRPC: {
      auto arr = nlohmann::json::array();
      for (const auto& p : piles) arr.push_back(one_based(p));
      params["piles"] = std::move(arr);
      break;
    }
    case AtomKind::kCutSubset:
      params["cycle"] = one_based(positions);
      params["offsets"] = offsets;
      break;
  }
  return {{"kind", std::string(kind_name(kind))},
          {"params", std::move(params)},
          {"outcomes", canonical_set_string(outcomes)}};
}

AtomicOp det_atom(const Permutation& p) {
  return AtomicOp{AtomKind::kDet, p, {}, {}, {}, PermSet::singleton(p)};
}

AtomicOp ss_atom(DeckSize n, std::vector<int> positions) {
  check_positions(n, positions);
  std::sort(positions.begin(), positions.end());
  const auto& t = composition_table(n);
  std::vector<bool> moving(static_cast<std::size_t>(n.get()));
  for (int p : positions) moving[p] = true;
  PermSet out(n);
  for (int r = 0; r < t.order(); ++r) {
    const auto& perm = t.perm(r);
    bool fixes_rest = true;
    for (int i = 0; i < n.get(); ++i) {
      if (!moving[i] && perm[i] != i) fixes_rest = false;
    }
    if (fixes_rest) out.insert(r);
  }
  return AtomicOp{AtomKind::kSS, std::nullopt, std::move(positions), {}, {}, out};
}

AtomicOp rc_atom(DeckSize n, std::vector<int> cycle) {
  check_positions(n, cycle);
  if (cycle.size() < 2) throw std::invalid_argument("random cut needs two or more positions");
  PermSet out = cyclic_group(cycle_of(n, cycle));
  return AtomicOp{AtomKind::kRC, std::nullopt, std::move(cycle), {}, {}, out};
}

AtomicOp rpc_atom(DeckSize n, std::vector<std::vector<int>> piles) {
  if (piles.size() < 2) throw std::invalid_argument("pile cut needs two or more piles");
  std::vector<int> all;
  for (const auto& p : piles) {
    if (p.empty() || p.size() != piles.front().size()) {
      throw std::invalid_argument("pile cut needs nonempty piles of equal size");
    }
    all.insert(all.end(), p.begin(), p.end());
  }
  check_positions(n, all);
  PermSet out = cyclic_group(pile_shift(n, piles));
  return AtomicOp{AtomKind::kRPC, std::nullopt, {}, std::move(piles), {}, out};
}

AtomicOp cut_subset_atom(DeckSize n, std::vector<int> cycle, std::vector<int> offsets) {
  check_positions(n, cycle);
  const int k = static_cast<int>(cycle.size());
  if (k < 2) throw std::invalid_argument("cut needs two or more positions");
  if (offsets.empty()) throw std::invalid_argument("cut needs a nonempty offset set");
  std::sort(offsets.begin(), offsets.end());
  offsets.erase(std::unique(offsets.begin(), offsets.end()), offsets.end());
  const Permutation c = cycle_of(n, cycle);
  PermSet out(n);
  out.insert(identity(n));
  for (int a : offsets) {
    if (a < 1 || a >= k) throw std::out_of_range("cut offset outside 1..k-1");
    out.insert(power(c, a));
  }
  return AtomicOp{AtomKind::kCutSubset, std::nullopt, std::move(cycle), {}, std::move(offsets),
                  out};
}

std::vector<AtomicOp> generate_atoms(DeckSize n, Level level) {
  const auto& t = composition_table(n);
  std::vector<AtomicOp> out;
  std::unordered_set<PermSet, PermSetHash> seen;
  auto add = [&](AtomicOp op) {
    if (seen.insert(op.outcomes).second) out.push_back(std::move(op));
  };

  for (int r = 0; r < t.order(); ++r) add(det_atom(t.perm(r)));

  if (level == Level::k1) {
    for (int size = 2; size <= n.get(); ++size) {
      // Subsets of this size in lexicographic order.
      std::vector<bool> pick(static_cast<std::size_t>(n.get()), false);
      std::fill(pick.begin(), pick.begin() + size, true);
      do {
        std::vector<int> positions;
        for (int i = 0; i < n.get(); ++i) {
          if (pick[i]) positions.push_back(i);
        }
        add(ss_atom(n, std::move(positions)));
      } while (std::prev_permutation(pick.begin(), pick.end()));
    }
  }

  if (to_int(level) >= 2) {
    for (int r = 0; r < t.order(); ++r) {
      const auto cs = cycles(t.perm(r));
      if (cs.size() == 1) add(rc_atom(n, cs.front()));
    }
  }

  if (to_int(level) >= 3) {
    for (int r = 0; r < t.order(); ++r) {
      const auto cs = cycles(t.perm(r));
      if (cs.size() < 2) continue;
      const bool uniform = std::all_of(cs.begin(), cs.end(), [&](const auto& c) {
        return c.size() == cs.front().size();
      });
      if (!uniform) continue;
      // m disjoint k-cycles: k piles of m cards, pile j holds the j-th entry
      // of every cycle.
      const std::size_t k = cs.front().size();
      std::vector<std::vector<int>> piles(k);
      for (std::size_t j = 0; j < k; ++j) {
        for (const auto& c : cs) piles[j].push_back(c[j]);
      }
      add(rpc_atom(n, std::move(piles)));
    }
  }

  if (level == Level::k4) {
    for (int r = 0; r < t.order(); ++r) {
      const auto cs = cycles(t.perm(r));
      if (cs.size() != 1) continue;
      const int k = static_cast<int>(cs.front().size());
      for (unsigned bits = 1; bits < (1U << (k - 1)); ++bits) {
        std::vector<int> offsets;
        for (int a = 1; a < k; ++a) {
          if (bits & (1U << (a - 1))) offsets.push_back(a);
        }
        add(cut_subset_atom(n, cs.front(), std::move(offsets)));
      }
    }
  }
  return out;
}

namespace {

using Catalogue = std::unordered_map<PermSet, ShuffleCategory, PermSetHash>;

Catalogue build_catalogue(DeckSize n) {
  Catalogue cat;
  auto put = [&cat](const PermSet& s, ShuffleCategory c) { cat.emplace(s, c); };
  const auto& t = composition_table(n);
  const int size = n.get();

  for (const auto& op : generate_atoms(n, Level::k1)) {
    if (op.kind == AtomKind::kSS) put(op.outcomes, ShuffleCategory::kSS);
  }
  for (int r = 0; r < t.order(); ++r) {
    const auto cs = cycles(t.perm(r));
    if (cs.size() == 1) put(rc_atom(n, cs.front()).outcomes, ShuffleCategory::kRC);
  }
  for (const auto& op : generate_atoms(n, Level::k3)) {
    if (op.kind == AtomKind::kRPC) put(op.outcomes, ShuffleCategory::kPssRpc);
  }
  // Pile-scramble groups: k >= 2 piles of m >= 2 cards on any positions.
  for (int piles = 2; piles <= size; ++piles) {
    for (int m = 2; piles * m <= size; ++m) {
      std::vector<int> order(static_cast<std::size_t>(size));
      std::iota(order.begin(), order.end(), 0);
      do {
        std::vector<std::vector<int>> pile_pos(static_cast<std::size_t>(piles));
        for (int i = 0; i < piles; ++i) {
          pile_pos[i].assign(order.begin() + i * m, order.begin() + (i + 1) * m);
        }
        std::vector<int> tau(static_cast<std::size_t>(piles));
        std::iota(tau.begin(), tau.end(), 0);
        PermSet group(n);
        do {
          std::vector<int> img(static_cast<std::size_t>(size));
          std::iota(img.begin(), img.end(), 0);
          for (int i = 0; i < piles; ++i) {
            for (int j = 0; j < m; ++j) img[pile_pos[i][j]] = pile_pos[tau[i]][j];
          }
          group.insert(Permutation::from_images(std::move(img)));
        } while (std::next_permutation(tau.begin(), tau.end()));
        put(group, ShuffleCategory::kPssRpc);
        // Positions past piles * m do not matter; skip their orderings.
        std::reverse(order.begin() + piles * m, order.end());
      } while (std::next_permutation(order.begin(), order.end()));
    }
  }
  for (const auto& op : generate_atoms(n, Level::k4)) {
    if (op.kind == AtomKind::kCutSubset) put(op.outcomes, ShuffleCategory::kUnequal);
  }
  return cat;
}

const Catalogue& catalogue(DeckSize n) {
  static std::array<std::unique_ptr<Catalogue>, kMaxDeck + 1> cats;
  static std::array<std::once_flag, kMaxDeck + 1> once;
  const auto i = static_cast<std::size_t>(n.get());
  std::call_once(once[i], [&] { cats[i] = std::make_unique<Catalogue>(build_catalogue(n)); });
  return *cats[i];
}

}  // namespace

ShuffleCategory classify_atomic(const PermSet& s) {
  if (s.empty()) throw std::invalid_argument("classify: empty set");
  if (s.size() == 1) return ShuffleCategory::kDeterministic;
  const auto& cat = catalogue(DeckSize(s.deck()));
  auto it = cat.find(s);
  return it == cat.end() ? ShuffleCategory::kOther : it->second;
}

}  // namespace shuffle_levels
