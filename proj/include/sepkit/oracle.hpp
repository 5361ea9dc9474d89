#pragma once

#include <algorithm>
#include <cstdint>
#include <numeric>
#include <optional>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

#include "sepkit/groundset.hpp"
#include "sepkit/preference.hpp"

namespace sepkit {

/// The family of separable subsets of a preference vector.  Always contains
/// the empty set and the full set; closed under intersection.
struct Character {
  int n = 1;
  std::vector<Subset> sets;  // sorted by rank

  bool contains(Subset s) const {
    return std::find(sets.begin(), sets.end(), s) != sets.end();
  }
  friend bool operator==(const Character&, const Character&) = default;
};

/// Evidence that a set S is nonseparable: two partial outcomes on S whose
/// comparison flips between the contexts u and v on the complement.
struct Witness {
  Subset set;
  PartialOutcome x_s;
  PartialOutcome y_s;
  PartialOutcome u;
  PartialOutcome v;
};

/// Order-isomorphic integer utilities for one preference vector: outcomes
/// in the same indifference class share a level, higher level = preferred.
/// Built once with exact dyadic comparisons; afterwards every sign query
/// the oracle makes is a machine-integer compare.
struct LevelMap {
  int n = 1;
  std::vector<std::uint32_t> level;
};

inline LevelMap level_map(const PreferenceVector& p) {
  std::vector<std::uint32_t> idx(p.entries.size());
  std::iota(idx.begin(), idx.end(), 0);
  std::sort(idx.begin(), idx.end(), [&](std::uint32_t a, std::uint32_t b) {
    return p.entries[a] < p.entries[b];
  });
  LevelMap lm{p.n, std::vector<std::uint32_t>(p.entries.size(), 0)};
  std::uint32_t current = 0;
  for (std::size_t i = 0; i < idx.size(); ++i) {
    if (i > 0 && p.entries[idx[i]] != p.entries[idx[i - 1]]) ++current;
    lm.level[idx[i]] = current;
  }
  return lm;
}

namespace detail {

inline int sign3(std::uint32_t a, std::uint32_t b) {
  return a < b ? -1 : (a > b ? 1 : 0);
}

inline void check_set(Subset s, GroundSize g, const char* op) {
  if ((s.mask & ~g.full_mask()) != 0) {
    throw std::domain_error(std::string(op) + ": set has elements outside 1.." +
                            std::to_string(g.n));
  }
}

/// Ascending enumeration of the submasks of `mask` (including 0 and mask).
inline void submasks(Word mask, std::vector<Word>& out) {
  out.clear();
  Word v = 0;
  while (true) {
    out.push_back(v);
    if (v == mask) break;
    v = (v - mask) & mask;
  }
}

/// Core scan: fixes the all-zero context as baseline, records the sign of
/// each pair of partial outcomes on S, and looks for any other context that
/// changes it.  Pairs are scanned with x below y in word order (the sign is
/// antisymmetric, so this halves the work), contexts ascending, so the first
/// witness found is deterministic.  Worst case 2^(2|S|) * 2^(n-|S|) sign
/// evaluations; exits on the first flip.
inline std::optional<Witness> scan_for_witness(const LevelMap& lm, Subset s) {
  const GroundSize g(lm.n);
  check_set(s, g, "is_separable");
  const Word comp = g.full_mask() ^ s.mask;
  std::vector<Word> on_s;
  std::vector<Word> contexts;
  submasks(s.mask, on_s);
  submasks(comp, contexts);
  for (std::size_t xi = 0; xi < on_s.size(); ++xi) {
    for (std::size_t yi = xi + 1; yi < on_s.size(); ++yi) {
      const Word x = on_s[xi];
      const Word y = on_s[yi];
      const int base = sign3(lm.level[x], lm.level[y]);
      for (std::size_t ui = 1; ui < contexts.size(); ++ui) {
        const Word u = contexts[ui];
        if (sign3(lm.level[x | u], lm.level[y | u]) != base) {
          return Witness{s,
                         PartialOutcome{s.mask, x},
                         PartialOutcome{s.mask, y},
                         PartialOutcome{comp, 0},
                         PartialOutcome{comp, u}};
        }
      }
    }
  }
  return std::nullopt;
}

}  // namespace detail

inline bool is_separable(const LevelMap& lm, Subset s) {
  return !detail::scan_for_witness(lm, s).has_value();
}

inline bool is_separable(const PreferenceVector& p, Subset s) {
  return is_separable(level_map(p), s);
}

/// First nonseparability witness in scan order, or nothing when S is
/// separable.
inline std::optional<Witness> nonsep_witness(const LevelMap& lm, Subset s) {
  return detail::scan_for_witness(lm, s);
}

inline std::optional<Witness> nonsep_witness(const PreferenceVector& p, Subset s) {
  return detail::scan_for_witness(level_map(p), s);
}

/// True when all outcomes agreeing outside S are indifferent, i.e. the
/// entries do not depend on S at all.
inline bool is_trivially_separable(const LevelMap& lm, Subset s) {
  const GroundSize g(lm.n);
  detail::check_set(s, g, "is_trivially_separable");
  const Word comp = g.full_mask() ^ s.mask;
  std::vector<Word> on_s;
  std::vector<Word> contexts;
  detail::submasks(s.mask, on_s);
  detail::submasks(comp, contexts);
  for (const Word u : contexts) {
    const std::uint32_t reference = lm.level[u];
    for (const Word x : on_s) {
      if (lm.level[x | u] != reference) return false;
    }
  }
  return true;
}

inline bool is_trivially_separable(const PreferenceVector& p, Subset s) {
  return is_trivially_separable(level_map(p), s);
}

/// Checks oracle verdicts for every subset and collects the separable ones,
/// sorted by rank.  The empty set and the full set are vacuously separable
/// and are not scanned; no other cross-subset pruning is sound, so none is
/// attempted.  With jobs > 1 the independent subset scans run on worker
/// threads; the merge is deterministic.
inline Character character(const LevelMap& lm, int jobs = 1) {
  const GroundSize g(lm.n);
  const Word full = g.full_mask();
  std::vector<std::uint8_t> separable(g.outcome_count(), 0);
  separable[0] = 1;
  separable[full] = 1;
  const auto scan_range = [&](Word begin, Word end) {
    for (Word s = begin; s < end; ++s) {
      if (s == 0 || s == full) continue;
      separable[s] = is_separable(lm, Subset{s}) ? 1 : 0;
    }
  };
  const Word total = static_cast<Word>(g.outcome_count());
  if (jobs <= 1 || total < 16) {
    scan_range(0, total);
  } else {
    const int workers = std::min<int>(jobs, 64);
    std::vector<std::thread> pool;
    const Word chunk = (total + workers - 1) / workers;
    for (int w = 0; w < workers; ++w) {
      const Word begin = std::min<Word>(total, static_cast<Word>(w) * chunk);
      const Word end = std::min<Word>(total, begin + chunk);
      if (begin < end) pool.emplace_back(scan_range, begin, end);
    }
    for (auto& t : pool) t.join();
  }
  Character ch{lm.n, {}};
  for (Word s = 0; s < total; ++s) {
    if (separable[s]) ch.sets.push_back(Subset{s});
  }
  std::sort(ch.sets.begin(), ch.sets.end(), [&](Subset a, Subset b) {
    return rank(a, g) < rank(b, g);
  });
  return ch;
}

inline Character character(const PreferenceVector& p, int jobs = 1) {
  return character(level_map(p), jobs);
}

/// Re-evaluates a witness against the vector it came from; used to audit
/// oracle output.
inline bool witness_holds(const PreferenceVector& p, const Witness& w) {
  const auto entry = [&](Word on_s, Word context) -> const Dyadic& {
    return p.entries[on_s | context];
  };
  const auto sign_of = [](const Dyadic& a, const Dyadic& b) {
    const auto c = a <=> b;
    return c == std::strong_ordering::less ? -1 : (c == std::strong_ordering::greater ? 1 : 0);
  };
  const int at_u = sign_of(entry(w.x_s.bits, w.u.bits), entry(w.y_s.bits, w.u.bits));
  const int at_v = sign_of(entry(w.x_s.bits, w.v.bits), entry(w.y_s.bits, w.v.bits));
  return at_u != at_v;
}

}  // namespace sepkit
