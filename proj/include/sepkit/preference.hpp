#pragma once

#include <algorithm>
#include <cstdint>
#include <numeric>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "sepkit/dyadic.hpp"
#include "sepkit/groundset.hpp"

namespace sepkit {

/// A utility function on all 2^n outcomes; a point of the preference space.
/// Entries are stored densely, indexed by the outcome word.  Treat as
/// immutable after construction.
struct PreferenceVector {
  int n = 1;
  std::vector<Dyadic> entries;

  const Dyadic& at(Outcome x) const { return entries[x.bits]; }
  GroundSize ground() const { return GroundSize(n); }
};

/// A total preorder on outcomes: indifference classes listed most preferred
/// first.  Classes are nonempty, disjoint, and cover all 2^n outcomes.
struct WeakOrder {
  int n = 1;
  std::vector<std::vector<Outcome>> classes;
};

/// Coordinates of a vector in the voter basis: coefficient of v_A for
/// every A, indexed by the subset word.
struct VoterCoordinates {
  int n = 1;
  std::vector<Dyadic> coeffs;
};

/// The voter basis vector v_A: entry 1 at outcomes even in A, else 0.
/// For nonempty A this splits the hypercube into equal preferred and
/// unpreferred halves.
inline PreferenceVector voter_basis_vector(Subset a, GroundSize g) {
  if ((a.mask & ~g.full_mask()) != 0) {
    throw std::domain_error("voter_basis_vector: set has elements outside 1.." +
                            std::to_string(g.n));
  }
  PreferenceVector v{g.n, std::vector<Dyadic>(g.outcome_count())};
  const Dyadic one = Dyadic::one();
  for (std::size_t x = 0; x < v.entries.size(); ++x) {
    if ((popcount(static_cast<Word>(x) & a.mask) & 1) == 0) v.entries[x] = one;
  }
  return v;
}

/// The +-1 sibling w_A of v_A: entry (-1)^|outset(x) /\ A|.  Satisfies
/// w_A = 2 v_A - v_empty entrywise.
inline PreferenceVector walsh_vector(Subset a, GroundSize g) {
  if ((a.mask & ~g.full_mask()) != 0) {
    throw std::domain_error("walsh_vector: set has elements outside 1.." +
                            std::to_string(g.n));
  }
  PreferenceVector v{g.n, std::vector<Dyadic>(g.outcome_count())};
  const Dyadic plus = Dyadic::one();
  const Dyadic minus = -plus;
  for (std::size_t x = 0; x < v.entries.size(); ++x) {
    v.entries[x] = ((popcount(static_cast<Word>(x) & a.mask) & 1) == 0) ? plus : minus;
  }
  return v;
}

/// Exact linear combination sum coeff_A * v_A over the given terms.
inline PreferenceVector combine_basis(GroundSize g,
                                      std::span<const std::pair<Subset, Dyadic>> terms) {
  PreferenceVector v{g.n, std::vector<Dyadic>(g.outcome_count())};
  for (const auto& [set, coeff] : terms) {
    if ((set.mask & ~g.full_mask()) != 0) {
      throw std::domain_error("combine_basis: set has elements outside 1.." +
                              std::to_string(g.n));
    }
    if (coeff.is_zero()) continue;
    for (std::size_t x = 0; x < v.entries.size(); ++x) {
      if ((popcount(static_cast<Word>(x) & set.mask) & 1) == 0) v.entries[x] += coeff;
    }
  }
  return v;
}

inline PreferenceVector combine_basis(GroundSize g,
                                      const std::vector<std::pair<Subset, Dyadic>>& terms) {
  return combine_basis(g, std::span<const std::pair<Subset, Dyadic>>(terms));
}

/// The completely nonseparable vector w = sum over A of 2^rank(A) v_A.
/// Its entries are sums of distinct powers of two, hence pairwise distinct,
/// so w induces a total order.
inline PreferenceVector build_w(GroundSize g) {
  std::vector<std::pair<Subset, Dyadic>> terms;
  terms.reserve(g.outcome_count());
  for (Word a = 0; a < g.outcome_count(); ++a) {
    const Subset s{a};
    terms.emplace_back(s, Dyadic::pow2(static_cast<long long>(rank(s, g))));
  }
  return combine_basis(g, terms);
}

/// Groups outcomes into indifference classes by exact entry comparison,
/// best class first.  Outcomes within a class are listed in display order.
inline WeakOrder induced_order(const PreferenceVector& p) {
  const GroundSize g(p.n);
  std::vector<Outcome> by_value = display_order(g);
  std::stable_sort(by_value.begin(), by_value.end(), [&](Outcome a, Outcome b) {
    return p.at(a) > p.at(b);
  });
  WeakOrder order{p.n, {}};
  for (const Outcome x : by_value) {
    if (order.classes.empty() || p.at(order.classes.back().front()) != p.at(x)) {
      order.classes.emplace_back();
    }
    order.classes.back().push_back(x);
  }
  return order;
}

/// Integer utilities from a weak order: the bottom class gets 0, each class
/// above one more.  Any strictly increasing assignment induces the same
/// order; this one keeps entries small.
inline PreferenceVector vector_from_order(const WeakOrder& order) {
  const GroundSize g(order.n);
  std::vector<bool> seen(g.outcome_count(), false);
  std::size_t covered = 0;
  for (const auto& cls : order.classes) {
    if (cls.empty()) throw std::invalid_argument("weak order has an empty class");
    for (const Outcome x : cls) {
      if (x.bits >= g.outcome_count() || seen[x.bits]) {
        throw std::invalid_argument("weak order classes must partition the outcomes");
      }
      seen[x.bits] = true;
      ++covered;
    }
  }
  if (covered != g.outcome_count()) {
    throw std::invalid_argument("weak order does not cover all outcomes");
  }
  PreferenceVector p{order.n, std::vector<Dyadic>(g.outcome_count())};
  long long level = static_cast<long long>(order.classes.size()) - 1;
  for (const auto& cls : order.classes) {
    const Dyadic value = Dyadic::from_int(level--);
    for (const Outcome x : cls) p.entries[x.bits] = value;
  }
  return p;
}

/// In-place Walsh butterfly: replaces `data` with W_n * data in
/// O(n 2^n) exact dyadic operations.  Applying it twice multiplies the
/// input by 2^n.
inline void walsh_transform(std::vector<Dyadic>& data) {
  const std::size_t size = data.size();
  if (size == 0 || (size & (size - 1)) != 0) {
    throw std::invalid_argument("walsh_transform: length must be a power of two");
  }
  for (std::size_t half = 1; half < size; half <<= 1) {
    for (std::size_t block = 0; block < size; block += half << 1) {
      for (std::size_t i = block; i < block + half; ++i) {
        Dyadic sum = data[i] + data[i + half];
        Dyadic diff = data[i] - data[i + half];
        data[i] = std::move(sum);
        data[i + half] = std::move(diff);
      }
    }
  }
}

/// Exact change of basis into voter coordinates.  Computes
/// b = 2^-n W_n p by the butterfly, then a_S = 2 b_S for nonempty S and
/// a_empty = b_empty - sum of the other b_S.
inline VoterCoordinates voter_decompose(const PreferenceVector& p) {
  std::vector<Dyadic> b = p.entries;
  walsh_transform(b);
  const Dyadic scale = Dyadic::pow2(-p.n);
  Dyadic rest = Dyadic::zero();
  for (std::size_t s = 1; s < b.size(); ++s) {
    b[s] *= scale;
    rest += b[s];
  }
  b[0] = b[0] * scale - rest;
  const Dyadic two = Dyadic::from_int(2);
  for (std::size_t s = 1; s < b.size(); ++s) b[s] *= two;
  return VoterCoordinates{p.n, std::move(b)};
}

/// Rebuilds sum a_A v_A from voter coordinates, exactly.
inline PreferenceVector reconstruct(const VoterCoordinates& coords) {
  const GroundSize g(coords.n);
  if (coords.coeffs.size() != g.outcome_count()) {
    throw std::invalid_argument("voter coordinates have the wrong length");
  }
  std::vector<std::pair<Subset, Dyadic>> terms;
  for (Word a = 0; a < coords.coeffs.size(); ++a) {
    if (!coords.coeffs[a].is_zero()) terms.emplace_back(Subset{a}, coords.coeffs[a]);
  }
  return combine_basis(g, terms);
}

/// Exact determinant of the 2^n x 2^n sign matrix W_n(S,T) = (-1)^|S/\T|
/// by fraction-free (Bareiss) elimination over the integers.  Supported for
/// n <= 4; larger n is checked structurally through the transform
/// involution instead.
inline Dyadic walsh_det(GroundSize g) {
  if (g.n > 4) {
    throw unsupported_error("walsh_det supports n in 1..4, got " + std::to_string(g.n));
  }
  const std::size_t size = g.outcome_count();
  std::vector<std::vector<BigInt>> m(size, std::vector<BigInt>(size));
  for (std::size_t r = 0; r < size; ++r) {
    for (std::size_t c = 0; c < size; ++c) {
      m[r][c] = (popcount(static_cast<Word>(r) & static_cast<Word>(c)) & 1) ? -1 : 1;
    }
  }
  BigInt prev = 1;
  int sign = 1;
  for (std::size_t k = 0; k + 1 < size; ++k) {
    if (m[k][k].is_zero()) {
      std::size_t swap_row = k + 1;
      while (swap_row < size && m[swap_row][k].is_zero()) ++swap_row;
      if (swap_row == size) return Dyadic::zero();
      std::swap(m[k], m[swap_row]);
      sign = -sign;
    }
    for (std::size_t i = k + 1; i < size; ++i) {
      for (std::size_t j = k + 1; j < size; ++j) {
        m[i][j] = (m[k][k] * m[i][j] - m[i][k] * m[k][j]) / prev;
      }
      m[i][k] = 0;
    }
    prev = m[k][k];
  }
  BigInt det = m[size - 1][size - 1];
  if (sign < 0) det = -det;
  return Dyadic::from_parts(std::move(det), 0);
}

}  // namespace sepkit
