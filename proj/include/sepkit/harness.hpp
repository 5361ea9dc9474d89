#pragma once

#include <algorithm>
#include <cstdint>
#include <numeric>
#include <random>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

#include "sepkit/dyadic.hpp"
#include "sepkit/errors.hpp"
#include "sepkit/groundset.hpp"
#include "sepkit/oracle.hpp"
#include "sepkit/preference.hpp"
#include "sepkit/tree.hpp"

namespace sepkit {

// ---------------------------------------------------------------------------
// Family keys: a family of subsets of [n] packed into one word, one bit per
// subset mask.  Only used at census scale (n <= 3, so at most 8 subsets).
// ---------------------------------------------------------------------------

using FamilyKey = std::uint32_t;

inline Character family_from_key(FamilyKey key, GroundSize g) {
  Character ch{g.n, {}};
  for (Word s = 0; s < g.outcome_count(); ++s) {
    if ((key >> s) & 1u) ch.sets.push_back(Subset{s});
  }
  std::sort(ch.sets.begin(), ch.sets.end(),
            [&](Subset a, Subset b) { return rank(a, g) < rank(b, g); });
  return ch;
}

/// Exhaustive admissibility census: which families arise as the character of
/// some strict total order on the 2^n outcomes, versus all
/// intersection-closed families containing the empty and full sets.
struct CensusResult {
  int n = 1;
  std::uint64_t order_count = 0;
  std::vector<FamilyKey> admissible;        // sorted
  std::vector<FamilyKey> candidates;        // sorted
  std::vector<FamilyKey> admissible_only;   // admissible - candidates
  std::vector<FamilyKey> candidates_only;   // candidates - admissible

  bool match() const { return admissible_only.empty() && candidates_only.empty(); }
};

namespace detail {

inline FamilyKey character_key(const LevelMap& lm) {
  const GroundSize g(lm.n);
  const Word full = g.full_mask();
  FamilyKey key = (FamilyKey{1} << 0) | (FamilyKey{1} << full);
  for (Word s = 1; s < full; ++s) {
    if (is_separable(lm, Subset{s})) key |= FamilyKey{1} << s;
  }
  return key;
}

inline FamilyKey intersection_closure(FamilyKey key, GroundSize g) {
  const Word full = g.full_mask();
  key |= (FamilyKey{1} << 0) | (FamilyKey{1} << full);
  bool changed = true;
  while (changed) {
    changed = false;
    for (Word a = 0; a <= full; ++a) {
      if (((key >> a) & 1u) == 0) continue;
      for (Word b = a + 1; b <= full; ++b) {
        if (((key >> b) & 1u) == 0) continue;
        const Word meet = a & b;
        if (((key >> meet) & 1u) == 0) {
          key |= FamilyKey{1} << meet;
          changed = true;
        }
      }
    }
  }
  return key;
}

}  // namespace detail

/// Runs the census at n <= 3.  Orders are enumerated as permutations of the
/// outcome set (8! = 40320 at n = 3); n = 4 would need 16! orders and is
/// rejected as out of reach by enumeration.  Candidate families are
/// enumerated as intersection closures of every generator family, with
/// deduplication.
inline CensusResult census(GroundSize g, int jobs = 1) {
  if (g.n > 3) {
    throw unsupported_error("census is enumerative and supports n <= 3 only (n = " +
                            std::to_string(g.n) + " would need (2^n)! orders)");
  }
  const std::size_t size = g.outcome_count();
  CensusResult result;
  result.n = g.n;
  result.order_count = 1;
  for (std::size_t i = 2; i <= size; ++i) result.order_count *= i;

  // Characters over all strict total orders.  Work is split by the level
  // assigned to outcome 0; each worker permutes the remaining positions.
  const int workers = std::max(1, std::min<int>(jobs, static_cast<int>(size)));
  std::vector<std::set<FamilyKey>> found(static_cast<std::size_t>(workers));
  const auto run_block = [&](int worker) {
    for (std::uint32_t first = worker; first < size; first += workers) {
      std::vector<std::uint32_t> levels(size);
      levels[0] = first;
      std::uint32_t next = 0;
      for (std::size_t i = 1; i < size; ++i) {
        if (next == first) ++next;
        levels[i] = next++;
      }
      LevelMap lm{g.n, levels};
      do {
        found[static_cast<std::size_t>(worker)].insert(detail::character_key(lm));
      } while (std::next_permutation(lm.level.begin() + 1, lm.level.end()));
    }
  };
  if (workers == 1) {
    run_block(0);
  } else {
    std::vector<std::thread> pool;
    for (int w = 0; w < workers; ++w) pool.emplace_back(run_block, w);
    for (auto& t : pool) t.join();
  }
  std::set<FamilyKey> admissible;
  for (const auto& part : found) admissible.insert(part.begin(), part.end());
  result.admissible.assign(admissible.begin(), admissible.end());

  // Intersection-closed candidate families containing both trivial members.
  const Word full = g.full_mask();
  std::set<FamilyKey> candidates;
  const int proper = static_cast<int>(size) - 2;  // proper nonempty subsets
  for (std::uint32_t gen = 0; gen < (std::uint32_t{1} << proper); ++gen) {
    FamilyKey key = 0;
    for (int bit = 0; bit < proper; ++bit) {
      if ((gen >> bit) & 1u) key |= FamilyKey{1} << (bit + 1);
    }
    candidates.insert(detail::intersection_closure(key, g));
  }
  (void)full;
  result.candidates.assign(candidates.begin(), candidates.end());

  std::set_difference(result.admissible.begin(), result.admissible.end(),
                      result.candidates.begin(), result.candidates.end(),
                      std::back_inserter(result.admissible_only));
  std::set_difference(result.candidates.begin(), result.candidates.end(),
                      result.admissible.begin(), result.admissible.end(),
                      std::back_inserter(result.candidates_only));
  return result;
}

// ---------------------------------------------------------------------------
// Seeded random structures.  All draws go through explicit rejection
// sampling on the raw mt19937_64 stream, so identical specs give identical
// results on every platform.
// ---------------------------------------------------------------------------

struct RandomTreeSpec {
  int n = 4;
  std::uint64_t seed = 0;
  int max_depth = 3;
  int max_branch = 3;
};

namespace detail {

inline std::uint64_t draw_below(std::mt19937_64& eng, std::uint64_t k) {
  const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max();
  const std::uint64_t bound = limit - limit % k;
  std::uint64_t v = eng();
  while (v >= bound) v = eng();
  return v % k;
}

}  // namespace detail

/// Deterministically generates a laminar family containing [n]: each node's
/// elements are split into random blocks, each block is kept as a child
/// with a per-node probability, and kept blocks recurse until the depth
/// budget runs out.  The output always validates.
inline TreeCharacter random_tree_character(const RandomTreeSpec& spec) {
  const GroundSize g(spec.n);
  if (spec.max_depth < 0 || spec.max_branch < 1) {
    throw std::invalid_argument("random_tree_character: bad depth or branch bound");
  }
  std::mt19937_64 eng(spec.seed);
  std::vector<Subset> sets{Subset{g.full_mask()}};

  const auto split = [&](Word node, int depth, const auto& self) -> void {
    const int size = popcount(node);
    if (depth >= spec.max_depth || size <= 1) return;
    const int branch_cap = std::min(spec.max_branch, size);
    const int blocks = 1 + static_cast<int>(detail::draw_below(eng, branch_cap));
    if (blocks < 2) return;
    std::vector<int> elems = elements(Subset{node});
    for (std::size_t i = elems.size(); i > 1; --i) {
      std::swap(elems[i - 1], elems[detail::draw_below(eng, i)]);
    }
    std::vector<Word> block_mask(static_cast<std::size_t>(blocks), 0);
    for (std::size_t i = 0; i < elems.size(); ++i) {
      const std::size_t slot =
          i < static_cast<std::size_t>(blocks)
              ? i
              : static_cast<std::size_t>(detail::draw_below(eng, blocks));
      block_mask[slot] |= Word{1} << (elems[i] - 1);
    }
    const std::uint64_t keep_percent = 40 + detail::draw_below(eng, 51);
    for (const Word block : block_mask) {
      if (detail::draw_below(eng, 100) < keep_percent) {
        sets.push_back(Subset{block});
        self(block, depth + 1, self);
      }
    }
  };
  split(g.full_mask(), 0, split);
  return validate_tree_character(sets, g);
}

/// A seeded preference vector with random dyadic entries; used by the
/// property suites.
inline PreferenceVector random_vector(GroundSize g, std::mt19937_64& eng) {
  PreferenceVector p{g.n, std::vector<Dyadic>(g.outcome_count())};
  for (auto& entry : p.entries) {
    const long long mantissa =
        static_cast<long long>(detail::draw_below(eng, 1u << 21)) - (1 << 20);
    const long long exponent = static_cast<long long>(detail::draw_below(eng, 17)) - 8;
    entry = Dyadic::from_parts(BigInt(mantissa), exponent);
  }
  return p;
}

// ---------------------------------------------------------------------------
// Named verification suites: every structural claim the library depends on,
// expressed as an executable check with counterexample payloads.
// ---------------------------------------------------------------------------

struct CheckResult {
  std::string name;
  bool ok = false;
  std::string detail;
};

struct SuiteReport {
  std::string suite;
  std::vector<CheckResult> checks;

  bool ok() const {
    return std::all_of(checks.begin(), checks.end(),
                       [](const CheckResult& c) { return c.ok; });
  }
  int passed() const {
    return static_cast<int>(std::count_if(checks.begin(), checks.end(),
                                          [](const CheckResult& c) { return c.ok; }));
  }
  int failed() const { return static_cast<int>(checks.size()) - passed(); }
};

namespace suites {

inline Character expected_basis_character(Subset a, GroundSize g) {
  Character ch{g.n, {}};
  for (Word s = 0; s < g.outcome_count(); ++s) {
    if (is_subset(a, Subset{s}) || (a.mask & s) == 0) ch.sets.push_back(Subset{s});
  }
  std::sort(ch.sets.begin(), ch.sets.end(),
            [&](Subset x, Subset y) { return rank(x, g) < rank(y, g); });
  return ch;
}

/// Every voter basis vector separates exactly the supersets of its index
/// set and the sets disjoint from it.
inline SuiteReport theorem2b(int jobs) {
  SuiteReport report{"theorem2b", {}};
  for (int n = 1; n <= 6; ++n) {
    const GroundSize g(n);
    int failures = 0;
    std::string first;
    for (Word a = 0; a < g.outcome_count(); ++a) {
      const Character got = character(voter_basis_vector(Subset{a}, g), jobs);
      if (got != expected_basis_character(Subset{a}, g)) {
        ++failures;
        if (first.empty()) first = "A=" + to_text(Subset{a});
      }
    }
    report.checks.push_back({"n=" + std::to_string(n), failures == 0,
                             failures == 0 ? "all basis vectors match"
                                           : std::to_string(failures) + " mismatches, first " + first});
  }
  return report;
}

/// w has pairwise distinct entries and character {empty, full}.
inline SuiteReport w_nonseparable(int jobs) {
  SuiteReport report{"w-nonseparable", {}};
  for (int n = 2; n <= 8; ++n) {
    const GroundSize g(n);
    const PreferenceVector w = build_w(g);
    bool distinct = true;
    std::vector<Dyadic> sorted = w.entries;
    std::sort(sorted.begin(), sorted.end());
    for (std::size_t i = 1; i < sorted.size(); ++i) {
      if (sorted[i] == sorted[i - 1]) distinct = false;
    }
    const Character ch = character(w, jobs);
    const bool completely_nonseparable =
        ch.sets.size() == 2 && ch.sets[0].mask == 0 && ch.sets[1].mask == g.full_mask();
    report.checks.push_back({"n=" + std::to_string(n), distinct && completely_nonseparable,
                             distinct ? (completely_nonseparable ? "ok" : "extra separable sets")
                                      : "entries collide"});
  }
  return report;
}

/// For 1 <= r < s <= n-1: the alpha-power partial sums bracket alpha^s
/// strictly on both sides.
inline SuiteReport lemma_basesum(int) {
  SuiteReport report{"lemma-basesum", {}};
  const int cap = max_ground_size() >= 16 ? 16 : max_ground_size();
  for (int n = 3; n <= cap; ++n) {
    const Dyadic a = alpha(GroundSize(n));
    bool ok = true;
    std::string detail;
    for (int r = 1; r <= n - 1 && ok; ++r) {
      Dyadic partial = Dyadic::zero();  // sum_{i=r}^{s-1} alpha^i
      for (int s = r + 1; s <= n - 1 && ok; ++s) {
        partial += a.pow(static_cast<unsigned>(s - 1));
        const Dyadic power = a.pow(static_cast<unsigned>(s));
        if (!(partial < power && power < a.pow(static_cast<unsigned>(r)) + partial)) {
          ok = false;
          detail = "violated at r=" + std::to_string(r) + " s=" + std::to_string(s);
        }
      }
    }
    report.checks.push_back({"n=" + std::to_string(n), ok, ok ? "strict on both sides" : detail});
  }
  return report;
}

/// Characters of random vectors contain the trivial members and are closed
/// under intersection.
inline SuiteReport intersect_closure(int jobs) {
  SuiteReport report{"intersect-closure", {}};
  std::mt19937_64 eng(0x5eb1a51c0f2a01ull);
  int bad = 0;
  std::string first;
  for (int trial = 0; trial < 200; ++trial) {
    const GroundSize g(1 + trial % 6);
    const Character ch = character(random_vector(g, eng), jobs);
    bool ok = ch.contains(Subset{0}) && ch.contains(Subset{g.full_mask()});
    for (std::size_t i = 0; i < ch.sets.size() && ok; ++i) {
      for (std::size_t j = i + 1; j < ch.sets.size() && ok; ++j) {
        ok = ch.contains(Subset{ch.sets[i].mask & ch.sets[j].mask});
      }
    }
    if (!ok) {
      ++bad;
      if (first.empty()) first = "trial " + std::to_string(trial);
    }
  }
  report.checks.push_back({"200 random vectors, n<=6", bad == 0,
                           bad == 0 ? "all characters intersection-closed"
                                    : std::to_string(bad) + " failures, first " + first});
  return report;
}

/// Trivial separability of S implies separability of S and of its
/// complement.
inline SuiteReport trivial_comp(int) {
  SuiteReport report{"trivial-comp", {}};
  std::mt19937_64 engine(0x9d2c5680ull);
  int checked = 0;
  int bad = 0;
  for (int trial = 0; trial < 120; ++trial) {
    const GroundSize g(1 + trial % 5);
    // Mix random vectors with basis vectors, which are rich in trivially
    // separable sets.
    const PreferenceVector p =
        (trial % 3 == 0)
            ? voter_basis_vector(Subset{static_cast<Word>(detail::draw_below(
                                     engine, g.outcome_count()))},
                                 g)
            : random_vector(g, engine);
    const LevelMap lm = level_map(p);
    for (Word s = 0; s < g.outcome_count(); ++s) {
      if (is_trivially_separable(lm, Subset{s})) {
        ++checked;
        if (!is_separable(lm, Subset{s}) ||
            !is_separable(lm, Subset{g.full_mask() ^ s})) {
          ++bad;
        }
      }
    }
  }
  report.checks.push_back({"trivially separable sets imply complement separability",
                           bad == 0,
                           std::to_string(checked) + " trivially separable sets checked, " +
                               std::to_string(bad) + " violations"});
  return report;
}

/// nesting_witness reproduces any requested parity pattern on random
/// strictly nested chains.
inline SuiteReport nesting(int) {
  SuiteReport report{"nesting", {}};
  std::mt19937_64 eng(0x6e57ull);
  int bad = 0;
  std::string first;
  for (int trial = 0; trial < 1000; ++trial) {
    const GroundSize g(1 + trial % 10);
    std::vector<int> order(static_cast<std::size_t>(g.n));
    std::iota(order.begin(), order.end(), 1);
    for (std::size_t i = order.size(); i > 1; --i) {
      std::swap(order[i - 1], order[detail::draw_below(eng, i)]);
    }
    const int r = 1 + static_cast<int>(detail::draw_below(eng, g.n));
    // Strictly increasing prefix sizes give a strictly nested chain.
    std::vector<int> sizes;
    {
      std::vector<int> pool(static_cast<std::size_t>(g.n));
      std::iota(pool.begin(), pool.end(), 1);
      for (int i = 0; i < r; ++i) {
        const std::size_t pick = detail::draw_below(eng, pool.size());
        sizes.push_back(pool[pick]);
        pool.erase(pool.begin() + static_cast<std::ptrdiff_t>(pick));
      }
      std::sort(sizes.begin(), sizes.end());
    }
    std::vector<Subset> chain;
    for (const int size : sizes) {
      Word mask = 0;
      for (int i = 0; i < size; ++i) mask |= Word{1} << (order[static_cast<std::size_t>(i)] - 1);
      chain.push_back(Subset{mask});
    }
    std::vector<int> even_at;
    for (int i = 1; i <= r; ++i) {
      if (detail::draw_below(eng, 2) == 0) even_at.push_back(i);
    }
    const Outcome w = nesting_witness(chain, even_at, g);
    for (int i = 1; i <= r; ++i) {
      const bool want = std::find(even_at.begin(), even_at.end(), i) != even_at.end();
      const bool got =
          (popcount(w.bits & chain[static_cast<std::size_t>(i - 1)].mask) & 1) == 0;
      if (want != got) {
        ++bad;
        if (first.empty()) first = "trial " + std::to_string(trial);
      }
    }
  }
  report.checks.push_back({"1000 random chains, n<=10", bad == 0,
                           bad == 0 ? "all parity patterns reproduced"
                                    : std::to_string(bad) + " mismatches, first " + first});
  return report;
}

/// 200 seeded random tree characters across n in 4..9 all certify exactly.
inline SuiteReport random_trees(int jobs) {
  SuiteReport report{"random-trees", {}};
  int bad = 0;
  std::string first;
  for (int i = 0; i < 200; ++i) {
    const int n = 4 + i % 6;
    const RandomTreeSpec spec{n, 0xc0ffee00ull + static_cast<std::uint64_t>(i),
                              1 + i % (n - 1), 2 + i % 4};
    const TreeCharacter tc = random_tree_character(spec);
    const CertifyReport rep = certify(tc, jobs);
    if (!rep.match) {
      ++bad;
      if (first.empty()) {
        first = "seed " + std::to_string(spec.seed) + " n=" + std::to_string(n);
      }
    }
  }
  report.checks.push_back({"200 seeded tree characters, n in 4..9", bad == 0,
                           bad == 0 ? "every character realized exactly"
                                    : std::to_string(bad) + " failures, first " + first});
  return report;
}

/// Decompose/reconstruct is the exact identity on random vectors, and
/// recovers the coefficient ledger of built tree vectors.
inline SuiteReport decompose_roundtrip(int) {
  SuiteReport report{"decompose-roundtrip", {}};
  std::mt19937_64 eng(0xdecull);
  int bad = 0;
  for (int trial = 0; trial < 500; ++trial) {
    const GroundSize g(1 + trial % 8);
    const PreferenceVector p = random_vector(g, eng);
    const PreferenceVector back = reconstruct(voter_decompose(p));
    if (back.entries != p.entries) ++bad;
  }
  report.checks.push_back({"500 random vectors, n<=8", bad == 0,
                           bad == 0 ? "bit-exact reconstruction"
                                    : std::to_string(bad) + " reconstruction failures"});
  int ledger_bad = 0;
  for (int i = 0; i < 40; ++i) {
    const int n = 4 + i % 4;
    const TreeCharacter tc =
        random_tree_character({n, 0xab5eedull + static_cast<std::uint64_t>(i), n - 1, 3});
    const auto [vector, ledger] = build_preference(tc);
    const VoterCoordinates coords = voter_decompose(vector);
    for (Word s = 0; s < GroundSize(n).outcome_count(); ++s) {
      if (coords.coeffs[s] != ledger.coefficient(Subset{s})) ++ledger_bad;
    }
  }
  report.checks.push_back({"ledger recovery on 40 built tree vectors", ledger_bad == 0,
                           ledger_bad == 0 ? "coordinates equal c+d ledger"
                                           : std::to_string(ledger_bad) + " coefficients off"});
  return report;
}

/// The census agrees with the closure condition at every feasible n.
inline SuiteReport census_n3(int jobs) {
  SuiteReport report{"census-n3", {}};
  for (int n = 1; n <= 3; ++n) {
    const CensusResult res = census(GroundSize(n), jobs);
    report.checks.push_back(
        {"n=" + std::to_string(n), res.match(),
         std::to_string(res.admissible.size()) + " admissible vs " +
             std::to_string(res.candidates.size()) + " intersection-closed families"});
  }
  return report;
}

}  // namespace suites

inline std::vector<std::string> suite_names() {
  return {"theorem2b",      "w-nonseparable", "lemma-basesum",       "intersect-closure",
          "trivial-comp",   "nesting",        "random-trees",        "decompose-roundtrip",
          "census-n3"};
}

inline SuiteReport run_suite(const std::string& name, int jobs = 1) {
  if (name == "theorem2b") return suites::theorem2b(jobs);
  if (name == "w-nonseparable") return suites::w_nonseparable(jobs);
  if (name == "lemma-basesum") return suites::lemma_basesum(jobs);
  if (name == "intersect-closure") return suites::intersect_closure(jobs);
  if (name == "trivial-comp") return suites::trivial_comp(jobs);
  if (name == "nesting") return suites::nesting(jobs);
  if (name == "random-trees") return suites::random_trees(jobs);
  if (name == "decompose-roundtrip") return suites::decompose_roundtrip(jobs);
  if (name == "census-n3") return suites::census_n3(jobs);
  std::string known;
  for (const auto& s : suite_names()) known += (known.empty() ? "" : ", ") + s;
  throw unsupported_error("unknown suite \"" + name + "\" (known: " + known + ")");
}

}  // namespace sepkit
