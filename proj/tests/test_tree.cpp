#include <catch2/catch_amalgamated.hpp>

#include <random>

#include "sepkit/harness.hpp"
#include "sepkit/tree.hpp"

using namespace sepkit;

namespace {

std::vector<Subset> family(const std::vector<std::vector<int>>& sets, GroundSize g) {
  std::vector<Subset> out;
  for (const auto& elems : sets) out.push_back(subset_of(elems, g));
  return out;
}

/// {empty, {1}, {2}, [3]} — the small worked character on three criteria.
TreeCharacter small_tree() {
  const GroundSize g(3);
  return validate_tree_character(family({{}, {1}, {2}, {1, 2, 3}}, g), g);
}

/// The nine-element worked character.  `with_pair` includes {3,4} as a
/// member (making it a leaf); otherwise {3,4} is a ghost child.  Both are
/// valid tree characters with identical sibling linkages.
TreeCharacter nine_tree(bool with_pair) {
  const GroundSize g(9);
  std::vector<std::vector<int>> sets = {{},           {1},    {2},         {7},
                                        {8},          {5, 6}, {7, 8, 9},   {1, 2, 3, 4},
                                        {5, 6, 7, 8, 9}, {1, 2, 3, 4, 5, 6, 7, 8, 9}};
  if (with_pair) sets.push_back({3, 4});
  return validate_tree_character(family(sets, g), g);
}

/// Deep eight-element family: [8] over {1,2} and {3,4,5}, with {4} below
/// {4,5}.
TreeCharacter deep_tree() {
  const GroundSize g(8);
  return validate_tree_character(
      family({{}, {1}, {2}, {3}, {4}, {1, 2}, {4, 5}, {3, 4, 5}, {1, 2, 3, 4, 5, 6, 7, 8}}, g),
      g);
}

std::vector<Subset> sorted_by_rank(std::vector<Subset> sets, GroundSize g) {
  std::sort(sets.begin(), sets.end(),
            [&](Subset a, Subset b) { return rank(a, g) < rank(b, g); });
  return sets;
}

}  // namespace

TEST_CASE("validation accepts laminar trees and derives generations", "[tree]") {
  const TreeCharacter tc = deep_tree();
  const GroundSize g = tc.ground;
  CHECK(tc.generation[tc.index_of(subset_of({1, 2}, g))] == 1);
  CHECK(tc.generation[tc.index_of(subset_of({4, 5}, g))] == 2);
  CHECK(tc.generation[tc.index_of(subset_of({4}, g))] == 3);
  CHECK(tc.generation[tc.root_index()] == 0);
  CHECK(tc.parent[tc.index_of(subset_of({4}, g))] == tc.index_of(subset_of({4, 5}, g)));
  for (std::size_t i = 0; i < tc.sets.size(); ++i) {
    CHECK(tc.generation[i] <= g.n - 1);
  }
}

TEST_CASE("validation rejects overlapping covers and missing roots", "[tree]") {
  const GroundSize g(3);
  CHECK_THROWS_MATCHES(
      validate_tree_character(family({{}, {1}, {1, 2}, {1, 3}, {1, 2, 3}}, g), g),
      invalid_character,
      Catch::Matchers::MessageMatches(
          Catch::Matchers::ContainsSubstring("[1,2]") &&
          Catch::Matchers::ContainsSubstring("[1,3]")));
  CHECK_THROWS_AS(validate_tree_character(family({{}, {1}, {2}}, g), g),
                  invalid_character);
  CHECK_THROWS_AS(
      validate_tree_character({Subset{0b1000u}, Subset{g.full_mask()}}, g),
      invalid_character);
}

TEST_CASE("the trivial family is a valid tree with no structure", "[tree]") {
  const GroundSize g(5);
  const TreeCharacter tc =
      validate_tree_character({Subset{0}, Subset{g.full_mask()}}, g);
  CHECK(tc.sets.size() == 1);
  CHECK(tc.siblinks.empty());
  CHECK(ghost_children(tc).empty());
  CHECK(unbreakable_sets(tc) == std::vector<Subset>{Subset{g.full_mask()}});
}

TEST_CASE("ghost children are the uncovered leftovers", "[tree]") {
  const TreeCharacter tc = deep_tree();
  const GroundSize g = tc.ground;
  const auto ghosts = ghost_children(tc);
  REQUIRE(ghosts.size() == 2);
  CHECK(ghosts[0].first == subset_of({4, 5}, g));
  CHECK(ghosts[0].second == subset_of({5}, g));
  CHECK(ghosts[1].first == Subset{g.full_mask()});
  CHECK(ghosts[1].second == subset_of({6, 7, 8}, g));
  // {1,2} is fully covered by its children; leaves have no ghost.
  CHECK(tc.ghost[tc.index_of(subset_of({1, 2}, g))] == 0);
  CHECK(tc.ghost[tc.index_of(subset_of({1}, g))] == 0);
}

TEST_CASE("ghosts plus real children partition every internal node", "[tree]") {
  for (int i = 0; i < 50; ++i) {
    const TreeCharacter tc =
        random_tree_character({4 + i % 6, 0x9e3779b9ull + static_cast<std::uint64_t>(i),
                               3, 4});
    for (std::size_t node = 0; node < tc.sets.size(); ++node) {
      if (tc.children[node].empty()) continue;
      Word covered = tc.ghost[node];
      int total = popcount(tc.ghost[node]);
      for (const int child : tc.children[node]) {
        covered |= tc.sets[child].mask;
        total += size_of(tc.sets[child]);
      }
      CHECK(covered == tc.sets[node].mask);
      CHECK(total == size_of(tc.sets[node]));
    }
  }
}

TEST_CASE("sibling linkages collect pairwise unions including ghosts", "[tree]") {
  const GroundSize g9(9);
  const TreeCharacter c4 = nine_tree(false);
  const std::vector<Subset> expected = sorted_by_rank(
      family({{1, 2},
              {7, 8},
              {7, 9},
              {8, 9},
              {1, 3, 4},
              {2, 3, 4},
              {5, 6, 7, 8, 9},
              {1, 2, 3, 4, 5, 6, 7, 8, 9}},
             g9),
      g9);
  CHECK(siblinks(c4) == expected);
  CHECK(siblinks(nine_tree(true)) == expected);

  const TreeCharacter deep = deep_tree();
  const GroundSize g8 = deep.ground;
  const std::vector<Subset> deep_expected = sorted_by_rank(
      family({{1, 2},
              {4, 5},
              {3, 4, 5},
              {1, 2, 3, 4, 5},
              {1, 2, 6, 7, 8},
              {3, 4, 5, 6, 7, 8}},
             g8),
      g8);
  CHECK(siblinks(deep) == deep_expected);

  // Leaves contribute no pairs.
  CHECK(siblinks(small_tree()).size() == 3);
}

TEST_CASE("unbreakable sets are leaves plus ghosted internals", "[tree]") {
  const GroundSize g9(9);
  const TreeCharacter c4 = nine_tree(false);
  CHECK(unbreakable_sets(c4) ==
        sorted_by_rank(family({{1}, {2}, {7}, {8}, {5, 6}, {7, 8, 9}, {1, 2, 3, 4}}, g9),
                       g9));

  const TreeCharacter deep = deep_tree();
  const GroundSize g8 = deep.ground;
  CHECK(unbreakable_sets(deep) ==
        sorted_by_rank(
            family({{1}, {2}, {3}, {4}, {4, 5}, {1, 2, 3, 4, 5, 6, 7, 8}}, g8), g8));
}

TEST_CASE("unbreakable sets match the definitional brute force", "[tree]") {
  // A member is breakable iff some subfamily of the others unions to it.
  const auto brute = [](const TreeCharacter& tc) {
    std::vector<Subset> out;
    const std::size_t count = tc.sets.size();
    for (std::size_t target = 0; target < count; ++target) {
      bool breakable = false;
      for (std::uint32_t pick = 0; pick < (1u << count) && !breakable; ++pick) {
        if ((pick >> target) & 1u) continue;
        Word join = 0;
        for (std::size_t i = 0; i < count; ++i) {
          if ((pick >> i) & 1u) join |= tc.sets[i].mask;
        }
        breakable = join == tc.sets[target].mask;
      }
      if (!breakable) out.push_back(tc.sets[target]);
    }
    return out;
  };
  for (int i = 0; i < 40; ++i) {
    const TreeCharacter tc =
        random_tree_character({2 + i % 4, 0x51ull + static_cast<std::uint64_t>(i), 3, 3});
    CHECK(unbreakable_sets(tc) == brute(tc));
  }
}

TEST_CASE("constructs on the nine-element character", "[tree]") {
  const GroundSize g(9);
  for (const bool with_pair : {false, true}) {
    const TreeCharacter c4 = nine_tree(with_pair);

    const ConstructResult yes1 = construct(subset_of({2, 5, 6, 8}, g), c4);
    CHECK(yes1.constructible);
    CHECK(yes1.maximal_parts == family({{2}, {8}, {5, 6}}, g));  // rank order

    const ConstructResult yes2 = construct(subset_of({5, 6, 7, 8, 9}, g), c4);
    CHECK(yes2.constructible);
    CHECK(yes2.maximal_parts == family({{5, 6}, {7, 8, 9}}, g));

    CHECK(construct(subset_of({1, 2}, g), c4).constructible);
    CHECK(construct(subset_of({1, 2, 3, 4, 7}, g), c4).constructible);
    CHECK(construct(subset_of({1, 2, 7, 8}, g), c4).constructible);

    const ConstructResult no1 = construct(subset_of({1, 2, 4}, g), c4);
    CHECK_FALSE(no1.constructible);
    CHECK(no1.construct_set == subset_of({1, 2}, g));

    CHECK_FALSE(construct(subset_of({2, 6}, g), c4).constructible);
    CHECK_FALSE(construct(subset_of({1, 2, 7, 9}, g), c4).constructible);

    if (with_pair) {
      CHECK(construct(subset_of({1, 2, 4}, g), c4).constructible == false);
      CHECK(construct(subset_of({3, 4}, g), c4).constructible);
    } else {
      const ConstructResult none = construct(subset_of({5}, g), c4);
      CHECK_FALSE(none.constructible);
      CHECK(none.construct_set == Subset{0});
      CHECK(none.maximal_parts.empty());
    }

    // Every member is constructible from itself or its parts.
    for (const Subset member : c4.sets) {
      CHECK(construct(member, c4).constructible);
    }
  }
}

TEST_CASE("the three-criteria build matches its worked entries exactly", "[tree]") {
  const TreeCharacter tc = small_tree();
  const GroundSize g = tc.ground;
  const auto [vector, ledger] = build_preference(tc);

  // Entries scaled by 16 across outcomes 111,110,101,100,011,010,001,000.
  const std::vector<long long> scaled = {7, 17, 46, 32, 48, 30, 57, 79};
  const std::vector<Outcome> order = display_order(g);
  const Dyadic sixteen = Dyadic::pow2(4);
  for (std::size_t i = 0; i < order.size(); ++i) {
    CHECK(sixteen * vector.at(order[i]) == Dyadic::from_int(scaled[i]));
  }

  // Coefficients: 1 on the root, alpha on {1} and {2}; siblink weights
  // 1/16, 1/8, 1/4 on {1,2}, {1,3}, {2,3}.  No taming shift is needed.
  CHECK(ledger.d_shift == 0);
  REQUIRE(ledger.c.size() == 3);
  CHECK(ledger.c[0] == std::pair(subset_of({1}, g), alpha(g)));
  CHECK(ledger.c[1] == std::pair(subset_of({2}, g), alpha(g)));
  CHECK(ledger.c[2] == std::pair(Subset{g.full_mask()}, Dyadic::one()));
  REQUIRE(ledger.d.size() == 3);
  CHECK(ledger.d[0] == std::pair(subset_of({1, 2}, g), Dyadic::pow2(-4)));
  CHECK(ledger.d[1] == std::pair(subset_of({1, 3}, g), Dyadic::pow2(-3)));
  CHECK(ledger.d[2] == std::pair(subset_of({2, 3}, g), Dyadic::pow2(-2)));

  // The induced order is the strict chain 000 > 001 > 011 > 101 > 100 >
  // 010 > 110 > 111.
  const WeakOrder induced = induced_order(vector);
  REQUIRE(induced.classes.size() == 8);
  const std::vector<std::string> best_first = {"000", "001", "011", "101",
                                               "100", "010", "110", "111"};
  for (std::size_t i = 0; i < best_first.size(); ++i) {
    REQUIRE(induced.classes[i].size() == 1);
    CHECK(to_bitstring(induced.classes[i][0], g) == best_first[i]);
  }

  // Decompose recovers exactly the c+d ledger.
  const VoterCoordinates coords = voter_decompose(vector);
  for (Word s = 0; s < g.outcome_count(); ++s) {
    CHECK(coords.coeffs[s] == ledger.coefficient(Subset{s}));
  }
}

TEST_CASE("nine-element ledgers carry the expected coefficient shapes", "[tree]") {
  const GroundSize g(9);
  const Dyadic a = alpha(g);
  const long long offset = 513;  // 2^9 + 1

  const auto check_common = [&](const CoefficientLedger& ledger) {
    CHECK(ledger.d_shift == 0);
    REQUIRE(ledger.d.size() == 8);
    for (const auto& [set, value] : ledger.d) {
      CHECK(value == Dyadic::pow2(static_cast<long long>(rank(set, g)) - offset));
    }
    Dyadic sum = Dyadic::zero();
    for (const auto& [set, value] : ledger.d) sum += value;
    CHECK(sum < Dyadic::one());
  };

  SECTION("ghost reading: nine member coefficients") {
    const auto [vector, ledger] = build_preference(nine_tree(false));
    check_common(ledger);
    REQUIRE(ledger.c.size() == 9);
    int by_generation[4] = {0, 0, 0, 0};
    for (const auto& [set, value] : ledger.c) {
      for (int gen = 0; gen <= 3; ++gen) {
        if (value == a.pow(static_cast<unsigned>(gen))) ++by_generation[gen];
      }
      CHECK(value >= Dyadic::one());
    }
    CHECK(by_generation[0] == 1);
    CHECK(by_generation[1] == 2);
    CHECK(by_generation[2] == 4);
    CHECK(by_generation[3] == 2);
  }

  SECTION("member reading: {3,4} gains a second-generation coefficient") {
    const auto [vector, ledger] = build_preference(nine_tree(true));
    check_common(ledger);
    REQUIRE(ledger.c.size() == 10);
    const auto it = std::find_if(ledger.c.begin(), ledger.c.end(), [&](const auto& term) {
      return term.first == subset_of({3, 4}, g);
    });
    REQUIRE(it != ledger.c.end());
    CHECK(it->second == a.pow(2));
  }
}

TEST_CASE("single-node characters realize the even-over-odd split", "[tree]") {
  const GroundSize g(4);
  const TreeCharacter tc = validate_tree_character({Subset{g.full_mask()}}, g);
  const auto [vector, ledger] = build_preference(tc);
  CHECK(ledger.d.empty());
  const WeakOrder order = induced_order(vector);
  REQUIRE(order.classes.size() == 2);
  for (const Outcome x : order.classes[0]) CHECK(parity_even(outset(x)));
  for (const Outcome x : order.classes[1]) CHECK_FALSE(parity_even(outset(x)));
  const CertifyReport report = certify(tc);
  CHECK(report.match);
}

TEST_CASE("certify validates the three-criteria character end to end", "[tree]") {
  const CertifyReport report = certify(small_tree());
  CHECK(report.match);
  REQUIRE(report.actual.sets.size() == 4);
  const GroundSize g(3);
  CHECK(report.actual.sets ==
        std::vector<Subset>{Subset{0}, subset_of({1}, g), subset_of({2}, g),
                            Subset{g.full_mask()}});
}

TEST_CASE("tiny ground sets need and get the siblink taming shift", "[tree]") {
  // At n=2 the baseline siblink weight 1/2 exactly cancels the smallest
  // member-sum gap, which would corrupt the character; build_preference
  // rescales and certification stays exact.
  const GroundSize g(2);
  for (const auto& sets : std::vector<std::vector<std::vector<int>>>{
           {{1}}, {{2}}, {{1}, {2}}}) {
    std::vector<Subset> fam{Subset{g.full_mask()}};
    for (const auto& elems : sets) fam.push_back(subset_of(elems, g));
    const TreeCharacter tc = validate_tree_character(fam, g);
    const auto [vector, ledger] = build_preference(tc);
    CHECK(ledger.d_shift >= 1);
    CHECK(certify(tc).match);
  }
  for (int n = 1; n <= 2; ++n) {
    const GroundSize gn(n);
    CHECK(certify(validate_tree_character({Subset{gn.full_mask()}}, gn)).match);
  }
}

TEST_CASE("certify reports witnesses for misrealized members", "[tree]") {
  // Force a failure by certifying against a doctored expectation: reuse the
  // report plumbing through a non-tree-realizable family is not possible by
  // construction, so check the report fields on a match instead.
  const CertifyReport report = certify(small_tree());
  CHECK(report.match);
  CHECK(report.missing.empty());
  CHECK(report.spurious.empty());
}

TEST_CASE("nesting witnesses realize requested parity patterns", "[tree]") {
  const GroundSize g(8);
  const std::vector<Subset> chain = family(
      {{1, 2}, {1, 2, 3}, {1, 2, 3, 4, 5, 6}, {1, 2, 3, 4, 5, 6, 7, 8}}, g);

  const Outcome w = nesting_witness(chain, {1, 3}, g);
  // Fixing the lowest fresh element per step gives 00110010: even on the
  // first and third sets, odd on the others.
  CHECK(to_bitstring(w, g) == "00110010");
  for (int i = 1; i <= 4; ++i) {
    const bool want_even = (i == 1 || i == 3);
    CHECK(parity_even(Subset{w.bits & chain[static_cast<std::size_t>(i - 1)].mask}) ==
          want_even);
  }

  // Every index even: the all-zero outcome works and is chosen.
  CHECK(nesting_witness(chain, {1, 2, 3, 4}, g) == Outcome{0});

  // Single-set chain, nothing even: the lowest element of the set.
  const Outcome odd = nesting_witness({subset_of({3, 5}, g)}, {}, g);
  CHECK(odd == Outcome{0b100u});

  CHECK_THROWS_AS(
      nesting_witness(family({{1, 2}, {1, 3}}, g), {}, g), std::invalid_argument);
  CHECK_THROWS_AS(nesting_witness(chain, {5}, g), std::invalid_argument);
}

TEST_CASE("chains and two-child splits always certify", "[tree]") {
  // Nested chains only ever leave non-constructible outsiders, and
  // two-part sibling unions are broken by their own pairwise link; both
  // classes are fully covered by the construction.
  for (int n = 2; n <= 7; ++n) {
    const GroundSize g(n);
    std::vector<Subset> chain;
    Word mask = g.full_mask();
    for (int depth = 0; depth < n && mask != 0; ++depth) {
      chain.push_back(Subset{mask});
      mask &= mask - 1;  // drop the lowest element each level
    }
    INFO("chain n=" << n);
    CHECK(certify(validate_tree_character(chain, g)).match);
  }
  for (int n = 4; n <= 8; ++n) {
    const GroundSize g(n);
    const Word low = g.full_mask() >> (n / 2);
    std::vector<Subset> split = {Subset{g.full_mask()}, Subset{low},
                                 Subset{g.full_mask() ^ low}};
    INFO("two-way split n=" << n);
    CHECK(certify(validate_tree_character(split, g)).match);
  }
}

TEST_CASE("the linkage construction cannot realize every tree character", "[tree]") {
  // Known gap: two fully split internal siblings whose leaves can be
  // recombined across branches.  The built vector is exact and its ledger
  // is sound, but the oracle finds extra separable sets; no injective
  // power-of-two siblink assignment avoids this (the two cross unions need
  // opposite orderings of the same pair of weights).  certify() reports
  // the mismatch precisely.
  const GroundSize g(4);
  const TreeCharacter tc = validate_tree_character(
      family({{1}, {2}, {3}, {4}, {1, 2}, {3, 4}, {1, 2, 3, 4}}, g), g);
  const CertifyReport report = certify(tc);
  CHECK_FALSE(report.match);
  CHECK(report.missing.empty());
  CHECK(report.spurious ==
        std::vector<Subset>{subset_of({1, 3, 4}, g), subset_of({2, 3, 4}, g)});
  // Report integrity: the spurious sets really are separable for the built
  // vector, and everything expected-and-found agrees with the oracle.
  const auto [vector, ledger] = build_preference(tc);
  for (const Subset s : report.spurious) {
    CHECK(is_separable(vector, s));
    CHECK_FALSE(report.expected.contains(s));
  }
  CHECK(report.actual == character(vector));
}
