#pragma once

#include <bit>
#include <cstdint>
#include <initializer_list>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "sepkit/errors.hpp"

namespace sepkit {

/// Bitmask over the ground set {1,..,n}.  Element i lives at bit i-1,
/// so rendered bitstrings read x_1 x_2 ... x_n left to right.
using Word = std::uint32_t;

namespace detail {
inline int& max_ground_size_ref() {
  static int cap = 16;
  return cap;
}
}  // namespace detail

/// Current cap on the ground-set size.  Defaults to 16: the separability
/// oracle costs Theta(6^n) sign evaluations, so larger n must be an
/// explicit, informed choice.
inline int max_ground_size() { return detail::max_ground_size_ref(); }

/// Raise or lower the cap (absolute ceiling 24, the widest universe the
/// 32-bit word layout and the census encodings support comfortably).
inline void set_max_ground_size(int n) {
  if (n < 1 || n > 24) {
    throw std::domain_error("ground-size cap must be in 1..24, got " + std::to_string(n));
  }
  detail::max_ground_size_ref() = n;
}

/// Size of the ground set [n] = {1,..,n}.
struct GroundSize {
  int n = 1;

  explicit GroundSize(int count) : n(count) {
    if (count < 1 || count > max_ground_size()) {
      throw std::domain_error("ground size must be in 1.." +
                              std::to_string(max_ground_size()) + ", got " +
                              std::to_string(count));
    }
  }

  Word full_mask() const { return (Word{1} << n) - 1; }
  std::size_t outcome_count() const { return std::size_t{1} << n; }

  friend bool operator==(GroundSize, GroundSize) = default;
};

/// A subset of [n].
struct Subset {
  Word mask = 0;
  friend auto operator<=>(Subset, Subset) = default;
};

/// One vertex of the hypercube Z_2^n: a yes/no assignment to all n criteria.
struct Outcome {
  Word bits = 0;
  friend auto operator<=>(Outcome, Outcome) = default;
};

/// An assignment of {0,1} to every element of `support` and nothing else.
struct PartialOutcome {
  Word support = 0;
  Word bits = 0;
  friend auto operator<=>(PartialOutcome, PartialOutcome) = default;
};

inline int popcount(Word w) { return std::popcount(w); }

inline int size_of(Subset s) { return std::popcount(s.mask); }

/// 1 iff |S| is even.
inline bool parity_even(Subset s) { return (std::popcount(s.mask) & 1) == 0; }

/// The set of criteria an outcome answers "yes" to.  With the shared bit
/// layout this is the identity on the underlying word.
inline Subset outset(Outcome x) { return Subset{x.bits}; }

/// Inverse of outset.
inline Outcome bitstring_of(Subset s) { return Outcome{s.mask}; }

inline bool contains(Subset s, int element) {
  return element >= 1 && element <= 32 && ((s.mask >> (element - 1)) & 1u) != 0;
}

inline bool is_subset(Subset a, Subset b) { return (a.mask & ~b.mask) == 0; }

/// Build a subset from 1-based elements, validating them against [n].
inline Subset subset_of(const std::vector<int>& elements, GroundSize g) {
  Word mask = 0;
  for (int e : elements) {
    if (e < 1 || e > g.n) {
      throw std::domain_error("element " + std::to_string(e) + " outside 1.." +
                              std::to_string(g.n));
    }
    mask |= Word{1} << (e - 1);
  }
  return Subset{mask};
}

inline Subset subset_of(std::initializer_list<int> elements, GroundSize g) {
  return subset_of(std::vector<int>(elements), g);
}

/// Sorted 1-based element list.
inline std::vector<int> elements(Subset s) {
  std::vector<int> out;
  for (Word rest = s.mask; rest != 0; rest &= rest - 1) {
    out.push_back(std::countr_zero(rest) + 1);
  }
  return out;
}

namespace detail {
inline std::uint64_t binomial(int n, int k) {
  if (k < 0 || k > n) return 0;
  std::uint64_t r = 1;
  for (int i = 1; i <= k; ++i) {
    r = r * static_cast<std::uint64_t>(n - k + i) / static_cast<std::uint64_t>(i);
  }
  return r;
}
}  // namespace detail

/// 1-based position of A in the subset order keyed by size, then
/// lexicographically on the sorted element list.  Strictly monotone under
/// strict inclusion, since a proper superset is strictly larger.
inline std::uint64_t rank(Subset a, GroundSize g) {
  if ((a.mask & ~g.full_mask()) != 0) {
    throw std::domain_error("subset has elements outside 1.." + std::to_string(g.n));
  }
  const int k = size_of(a);
  std::uint64_t pos = 1;
  for (int j = 0; j < k; ++j) pos += detail::binomial(g.n, j);
  // Lexicographic offset within the size class.
  int prev = 0;
  int i = 0;
  for (int e : elements(a)) {
    ++i;
    for (int j = prev + 1; j < e; ++j) pos += detail::binomial(g.n - j, k - i);
    prev = e;
  }
  return pos;
}

/// Concatenation of two partial outcomes with disjoint supports.
inline PartialOutcome compose(PartialOutcome x, PartialOutcome u) {
  if ((x.support & u.support) != 0) {
    throw std::invalid_argument("compose: supports overlap");
  }
  return PartialOutcome{x.support | u.support, x.bits | u.bits};
}

/// Partial outcome on S equal to 1 on `ones` and 0 on the rest of S.
inline PartialOutcome indicator(Subset s, Subset ones, GroundSize g) {
  if ((s.mask & ~g.full_mask()) != 0 || (ones.mask & ~g.full_mask()) != 0) {
    throw std::domain_error("indicator: elements outside 1.." + std::to_string(g.n));
  }
  if (!is_subset(ones, s)) {
    throw std::invalid_argument("indicator: ones must lie inside the support");
  }
  return PartialOutcome{s.mask, ones.mask};
}

/// A partial outcome with full support is a complete outcome.
inline Outcome as_outcome(PartialOutcome p, GroundSize g) {
  if (p.support != g.full_mask()) {
    throw std::invalid_argument("partial outcome does not cover the ground set");
  }
  return Outcome{p.bits};
}

/// Renders x_1 x_2 ... x_n, leftmost character first.
inline std::string to_bitstring(Outcome x, GroundSize g) {
  std::string s(static_cast<std::size_t>(g.n), '0');
  for (int i = 0; i < g.n; ++i) {
    if ((x.bits >> i) & 1u) s[static_cast<std::size_t>(i)] = '1';
  }
  return s;
}

/// Bits of a partial outcome over its support elements in ascending order.
inline std::string to_bitstring(PartialOutcome p) {
  std::string s;
  for (int e : elements(Subset{p.support})) {
    s.push_back(((p.bits >> (e - 1)) & 1u) ? '1' : '0');
  }
  return s;
}

inline Outcome parse_outcome(std::string_view text, GroundSize g) {
  if (static_cast<int>(text.size()) != g.n) {
    throw parse_error("outcome bitstring must have exactly " + std::to_string(g.n) +
                      " digits, got \"" + std::string(text) + "\"");
  }
  Word bits = 0;
  for (int i = 0; i < g.n; ++i) {
    const char c = text[static_cast<std::size_t>(i)];
    if (c == '1') {
      bits |= Word{1} << i;
    } else if (c != '0') {
      throw parse_error("outcome bitstring may contain only 0 and 1, got \"" +
                        std::string(text) + "\"");
    }
  }
  return Outcome{bits};
}

inline Word reverse_bits(Word v, int n) {
  Word r = 0;
  for (int i = 0; i < n; ++i) {
    r = (r << 1) | ((v >> i) & 1u);
  }
  return r;
}

/// Outcomes in the display convention: bitstrings in reverse-lexicographic
/// order, 11..1 first, 00..0 last.  Applied only at I/O boundaries; internal
/// storage is indexed by the plain word value.
inline std::vector<Outcome> display_order(GroundSize g) {
  std::vector<Outcome> out;
  out.reserve(g.outcome_count());
  for (std::size_t k = g.outcome_count(); k-- > 0;) {
    out.push_back(Outcome{reverse_bits(static_cast<Word>(k), g.n)});
  }
  return out;
}

/// Renders a subset as "[1,3,4]".
inline std::string to_text(Subset s) {
  std::string out = "[";
  bool first = true;
  for (int e : elements(s)) {
    if (!first) out += ",";
    out += std::to_string(e);
    first = false;
  }
  out += "]";
  return out;
}

}  // namespace sepkit
