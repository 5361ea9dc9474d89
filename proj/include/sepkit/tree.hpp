#pragma once

#include <algorithm>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "sepkit/dyadic.hpp"
#include "sepkit/errors.hpp"
#include "sepkit/groundset.hpp"
#include "sepkit/oracle.hpp"
#include "sepkit/preference.hpp"

namespace sepkit {

/// A validated laminar character whose inclusion diagram (without the empty
/// set) is a tree rooted at the full set, enriched with parents,
/// generations, ghost children, and sibling links.
///
/// Nonempty member sets are stored sorted by rank, so the root is last.
/// The empty set is a member of the abstract character but is tracked
/// implicitly.
struct TreeCharacter {
  GroundSize ground;
  std::vector<Subset> sets;                // nonempty members, rank order
  std::vector<int> parent;                 // index into sets; -1 at the root
  std::vector<std::vector<int>> children;  // indices into sets
  std::vector<int> generation;             // distance from the root
  std::vector<Word> ghost;                 // leftover elements under a node, 0 if none
  std::vector<Subset> siblinks;            // pairwise unions of siblings, rank order

  int root_index() const { return static_cast<int>(sets.size()) - 1; }

  int index_of(Subset s) const {
    const auto it = std::find(sets.begin(), sets.end(), s);
    return it == sets.end() ? -1 : static_cast<int>(it - sets.begin());
  }

  /// The abstract character: the members plus the implicit empty set.
  Character as_character() const {
    Character ch{ground.n, {Subset{0}}};
    ch.sets.insert(ch.sets.end(), sets.begin(), sets.end());
    return ch;
  }
};

/// Checks laminarity and tree structure, then derives the enrichment.
/// The empty set may be present or absent in the input; it is normalized
/// away.  The full set must be present.  Throws invalid_character naming
/// the first offending pair in rank order.
inline TreeCharacter validate_tree_character(const std::vector<Subset>& family, GroundSize g) {
  std::vector<Subset> sets;
  for (const Subset s : family) {
    if ((s.mask & ~g.full_mask()) != 0) {
      throw invalid_character("set " + to_text(s) + " has elements outside 1.." +
                              std::to_string(g.n));
    }
    if (s.mask != 0) sets.push_back(s);
  }
  std::sort(sets.begin(), sets.end(),
            [&](Subset a, Subset b) { return rank(a, g) < rank(b, g); });
  sets.erase(std::unique(sets.begin(), sets.end()), sets.end());
  if (sets.empty() || sets.back().mask != g.full_mask()) {
    throw invalid_character("character must contain the full set " +
                            to_text(Subset{g.full_mask()}));
  }
  // Laminarity: with sets in rank order, the earlier of any pair is never
  // the strict superset, so each pair must nest upward or be disjoint.
  for (std::size_t i = 0; i < sets.size(); ++i) {
    for (std::size_t j = i + 1; j < sets.size(); ++j) {
      const Word meet = sets[i].mask & sets[j].mask;
      if (meet != 0 && meet != sets[i].mask) {
        throw invalid_character("sets " + to_text(sets[i]) + " and " + to_text(sets[j]) +
                                " overlap without nesting");
      }
    }
  }

  TreeCharacter tc{g, std::move(sets), {}, {}, {}, {}, {}};
  const int count = static_cast<int>(tc.sets.size());
  tc.parent.assign(count, -1);
  tc.children.assign(count, {});
  tc.generation.assign(count, 0);
  tc.ghost.assign(count, 0);

  // The strict supersets of a member form a chain, so the one of least rank
  // is the unique cover.  Rank order makes it the first superset found.
  for (int i = 0; i + 1 < count; ++i) {
    for (int j = i + 1; j < count; ++j) {
      if (tc.sets[i].mask != tc.sets[j].mask && is_subset(tc.sets[i], tc.sets[j])) {
        tc.parent[i] = j;
        tc.children[j].push_back(i);
        break;
      }
    }
  }
  // Generations, walking down from the root (children have smaller rank,
  // hence smaller index, so a reverse index sweep sees parents first).
  for (int i = count - 2; i >= 0; --i) {
    tc.generation[i] = tc.generation[tc.parent[i]] + 1;
  }

  std::vector<Subset> links;
  for (int i = 0; i < count; ++i) {
    if (tc.children[i].empty()) continue;
    Word covered = 0;
    std::vector<Word> blocks;
    for (const int c : tc.children[i]) {
      covered |= tc.sets[c].mask;
      blocks.push_back(tc.sets[c].mask);
    }
    if (covered != tc.sets[i].mask) {
      tc.ghost[i] = tc.sets[i].mask ^ covered;
      blocks.push_back(tc.ghost[i]);
    }
    for (std::size_t a = 0; a < blocks.size(); ++a) {
      for (std::size_t b = a + 1; b < blocks.size(); ++b) {
        links.push_back(Subset{blocks[a] | blocks[b]});
      }
    }
  }
  std::sort(links.begin(), links.end(),
            [&](Subset a, Subset b) { return rank(a, g) < rank(b, g); });
  links.erase(std::unique(links.begin(), links.end()), links.end());
  tc.siblinks = std::move(links);
  return tc;
}

/// Nodes that have leftover elements under them, with their ghost child.
/// Childless nodes have no ghost.
inline std::vector<std::pair<Subset, Subset>> ghost_children(const TreeCharacter& tc) {
  std::vector<std::pair<Subset, Subset>> out;
  for (std::size_t i = 0; i < tc.sets.size(); ++i) {
    if (tc.ghost[i] != 0) out.emplace_back(tc.sets[i], Subset{tc.ghost[i]});
  }
  return out;
}

/// All pairwise unions of siblings (ghost included), across the tree.
inline const std::vector<Subset>& siblinks(const TreeCharacter& tc) { return tc.siblinks; }

/// Members not expressible as a union of other members.  For a tree
/// character these are exactly the leaves plus the internal nodes whose
/// children do not cover them.
inline std::vector<Subset> unbreakable_sets(const TreeCharacter& tc) {
  std::vector<Subset> out;
  for (std::size_t i = 0; i < tc.sets.size(); ++i) {
    if (tc.children[i].empty() || tc.ghost[i] != 0) out.push_back(tc.sets[i]);
  }
  return out;
}

/// The construct of B: the union of the maximal unbreakable member sets
/// inside B (pairwise disjoint by laminarity).  B is constructible when
/// that union gives B back.
struct ConstructResult {
  Subset construct_set;
  std::vector<Subset> maximal_parts;  // rank order
  bool constructible = false;
};

inline ConstructResult construct(Subset b, const TreeCharacter& tc) {
  if ((b.mask & ~tc.ground.full_mask()) != 0) {
    throw std::domain_error("construct: set has elements outside 1.." +
                            std::to_string(tc.ground.n));
  }
  const std::vector<Subset> unbreakable = unbreakable_sets(tc);
  std::vector<Subset> inside;
  for (const Subset u : unbreakable) {
    if (is_subset(u, b)) inside.push_back(u);
  }
  std::vector<Subset> maximal;
  for (const Subset u : inside) {
    bool dominated = false;
    for (const Subset other : inside) {
      if (other.mask != u.mask && is_subset(u, other)) {
        dominated = true;
        break;
      }
    }
    if (!dominated) maximal.push_back(u);
  }
  std::sort(maximal.begin(), maximal.end(),
            [&](Subset x, Subset y) { return rank(x, tc.ground) < rank(y, tc.ground); });
  Word join = 0;
  for (const Subset u : maximal) join |= u.mask;
  return ConstructResult{Subset{join}, std::move(maximal), join == b.mask};
}

/// The exact coefficients used to assemble a tree character's preference
/// vector: c-coefficients on member sets, d-coefficients on siblinks.
/// A set in both families carries the sum.  d_shift records any extra
/// uniform scaling applied to the siblink coefficients (see
/// build_preference); it is 0 whenever the baseline scale is already safe.
struct CoefficientLedger {
  GroundSize ground;
  std::vector<std::pair<Subset, Dyadic>> c;  // rank order
  std::vector<std::pair<Subset, Dyadic>> d;  // rank order
  int d_shift = 0;

  Dyadic coefficient(Subset s) const {
    Dyadic total = Dyadic::zero();
    for (const auto& [set, value] : c) {
      if (set == s) total += value;
    }
    for (const auto& [set, value] : d) {
      if (set == s) total += value;
    }
    return total;
  }
};

namespace detail {

inline long long floor_log2(const Dyadic& d) {
  const BigInt magnitude = d.sign() < 0 ? BigInt(-d.mantissa()) : d.mantissa();
  return d.exponent() + static_cast<long long>(boost::multiprecision::msb(magnitude));
}

/// The siblink coefficients are tie-breakers: they must never overturn a
/// comparison the member coefficients already decide.  The baseline scale
/// 2^(rank - 2^n - 1) honors that for the classic worked characters, but it
/// can collide with the smallest member-sum gaps on other trees (n = 2
/// already exhibits this).  This scans every outcome pair exactly and
/// returns the extra uniform shift, if any, needed so that
/// |d-part difference| < |c-part difference| whenever the latter is
/// nonzero.  Shifting all d's together preserves their relative order, so
/// tie-breaking behavior is unchanged.
inline int taming_shift(const PreferenceVector& c_part, const PreferenceVector& d_part) {
  int shift = 0;
  const std::size_t size = c_part.entries.size();
  for (std::size_t a = 0; a < size; ++a) {
    for (std::size_t b = a + 1; b < size; ++b) {
      const Dyadic dc = c_part.entries[a] - c_part.entries[b];
      if (dc.is_zero()) continue;
      const Dyadic dd = d_part.entries[a] - d_part.entries[b];
      if (dd.is_zero()) continue;
      const Dyadic abs_dc = dc.sign() < 0 ? -dc : dc;
      const Dyadic abs_dd = dd.sign() < 0 ? -dd : dd;
      if (abs_dd < abs_dc) continue;
      // One floor-log2 step past the ratio guarantees a strict drop below.
      const long long needed = floor_log2(abs_dd) - floor_log2(abs_dc) + 1;
      if (needed > shift) shift = static_cast<int>(needed);
    }
  }
  return shift;
}

}  // namespace detail

/// Assembles the preference vector of a tree character: alpha^generation on
/// every nonempty member, a distinct tiny power of two on every siblink.
/// The member part fixes which sets are separable; the siblink part breaks
/// the remaining unwanted symmetries.  Exact throughout.
inline std::pair<PreferenceVector, CoefficientLedger> build_preference(const TreeCharacter& tc) {
  const GroundSize g = tc.ground;
  const Dyadic base = alpha(g);

  std::vector<std::pair<Subset, Dyadic>> c_terms;
  c_terms.reserve(tc.sets.size());
  for (std::size_t i = 0; i < tc.sets.size(); ++i) {
    c_terms.emplace_back(tc.sets[i], base.pow(static_cast<unsigned>(tc.generation[i])));
  }

  const long long d_offset = static_cast<long long>(g.outcome_count()) + 1;
  std::vector<std::pair<Subset, Dyadic>> d_terms;
  d_terms.reserve(tc.siblinks.size());
  for (const Subset b : tc.siblinks) {
    d_terms.emplace_back(b, Dyadic::pow2(static_cast<long long>(rank(b, g)) - d_offset));
  }

  PreferenceVector c_part = combine_basis(g, c_terms);
  PreferenceVector vector = c_part;
  CoefficientLedger ledger{g, std::move(c_terms), {}, 0};

  if (!d_terms.empty()) {
    PreferenceVector d_part = combine_basis(g, d_terms);
    // Pair scans cost 4^n dyadic operations; past desk scale the oracle is
    // unusable anyway, so the guard stops where certification does.
    if (g.n <= 12) {
      ledger.d_shift = detail::taming_shift(c_part, d_part);
    }
    if (ledger.d_shift > 0) {
      const Dyadic scale = Dyadic::pow2(-ledger.d_shift);
      for (auto& [set, value] : d_terms) value *= scale;
      for (Dyadic& entry : d_part.entries) entry *= scale;
    }
    for (std::size_t x = 0; x < vector.entries.size(); ++x) {
      vector.entries[x] += d_part.entries[x];
    }
    Dyadic d_sum = Dyadic::zero();
    for (const auto& [set, value] : d_terms) d_sum += value;
    if (!(d_sum < Dyadic::one())) {
      throw std::logic_error("siblink coefficient sum must stay below 1");
    }
    ledger.d = std::move(d_terms);
  }
  return {std::move(vector), std::move(ledger)};
}

/// An outcome whose parity inside each set of a strictly nested chain is
/// prescribed: even exactly on the chain positions listed in `even_at`
/// (1-based).  Built by fixing one fresh element per chain step, lowest
/// element first, so the result is deterministic.
inline Outcome nesting_witness(const std::vector<Subset>& chain,
                               const std::vector<int>& even_at, GroundSize g) {
  const int r = static_cast<int>(chain.size());
  Word prev = 0;
  for (int i = 0; i < r; ++i) {
    if ((chain[i].mask & ~g.full_mask()) != 0) {
      throw std::domain_error("nesting_witness: chain set outside the ground set");
    }
    if (chain[i].mask == prev || (prev & ~chain[i].mask) != 0) {
      throw std::invalid_argument("nesting_witness: chain must be strictly nested");
    }
    if (i == 0 && chain[i].mask == 0) {
      throw std::invalid_argument("nesting_witness: chain sets must be nonempty");
    }
    prev = chain[i].mask;
  }
  std::vector<bool> want_even(static_cast<std::size_t>(r), false);
  for (const int i : even_at) {
    if (i < 1 || i > r) {
      throw std::invalid_argument("nesting_witness: index " + std::to_string(i) +
                                  " outside 1.." + std::to_string(r));
    }
    want_even[static_cast<std::size_t>(i - 1)] = true;
  }
  Word w = 0;
  prev = 0;
  for (int i = 0; i < r; ++i) {
    const Word fresh = chain[i].mask & ~prev;
    const Word pick = fresh & (~fresh + 1);  // lowest fresh element
    const bool even_now = (popcount(w & chain[i].mask) & 1) == 0;
    if (even_now != want_even[static_cast<std::size_t>(i)]) w |= pick;
    prev = chain[i].mask;
  }
  return Outcome{w};
}

/// Outcome of running the separability oracle against the character a tree
/// build was supposed to realize.  `missing` lists member sets the oracle
/// found nonseparable (each with its witness); `spurious` lists separable
/// sets outside the character.
struct CertifyReport {
  bool match = false;
  Character expected;
  Character actual;
  std::vector<std::pair<Subset, Witness>> missing;
  std::vector<Subset> spurious;
};

inline CertifyReport certify(const TreeCharacter& tc, int jobs = 1) {
  const auto [vector, ledger] = build_preference(tc);
  const LevelMap lm = level_map(vector);
  CertifyReport report;
  report.expected = tc.as_character();
  report.actual = character(lm, jobs);
  report.match = report.expected == report.actual;
  if (!report.match) {
    for (const Subset s : report.expected.sets) {
      if (!report.actual.contains(s)) {
        auto w = nonsep_witness(lm, s);
        if (w.has_value()) report.missing.emplace_back(s, *w);
      }
    }
    for (const Subset s : report.actual.sets) {
      if (!report.expected.contains(s)) report.spurious.push_back(s);
    }
  }
  return report;
}

}  // namespace sepkit
