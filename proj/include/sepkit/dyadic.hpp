#pragma once

#include <boost/multiprecision/cpp_int.hpp>

#include <compare>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <string_view>

#include "sepkit/errors.hpp"
#include "sepkit/groundset.hpp"

namespace sepkit {

using BigInt = boost::multiprecision::cpp_int;

/// Exact dyadic rational m * 2^e.  Canonical form: m is odd, or m = 0 and
/// e = 0.  The mantissa is arbitrary precision; the exponent is a machine
/// integer, which is ample because every exponent in this domain is bounded
/// by the subset rank 2^n plus small slack.
///
/// There is deliberately no floating-point path: the constructions
/// separate utilities by margins as small as 2^(-2^n), and every
/// comparison must be exact.
class Dyadic {
 public:
  Dyadic() = default;

  static Dyadic from_int(long long v) { return Dyadic(BigInt(v), 0); }

  static Dyadic from_parts(BigInt mantissa, long long exponent) {
    return Dyadic(std::move(mantissa), exponent);
  }

  /// 2^k for any machine-sized k (k may be negative).
  static Dyadic pow2(long long k) { return Dyadic(BigInt(1), k); }

  static Dyadic zero() { return Dyadic(); }
  static Dyadic one() { return from_int(1); }

  const BigInt& mantissa() const { return m_; }
  int exponent() const { return e_; }

  bool is_zero() const { return m_.is_zero(); }
  int sign() const { return m_.sign(); }

  friend Dyadic operator-(const Dyadic& a) { return Dyadic(-a.m_, a.e_); }

  friend Dyadic operator+(const Dyadic& a, const Dyadic& b) {
    if (a.is_zero()) return b;
    if (b.is_zero()) return a;
    const int e = a.e_ < b.e_ ? a.e_ : b.e_;
    BigInt m = (a.m_ << (a.e_ - e)) + (b.m_ << (b.e_ - e));
    return Dyadic(std::move(m), e);
  }

  friend Dyadic operator-(const Dyadic& a, const Dyadic& b) { return a + (-b); }

  friend Dyadic operator*(const Dyadic& a, const Dyadic& b) {
    if (a.is_zero() || b.is_zero()) return Dyadic();
    // Product of odd mantissas is odd; no renormalization needed.
    return Dyadic(a.m_ * b.m_, static_cast<long long>(a.e_) + b.e_, already_canonical{});
  }

  Dyadic& operator+=(const Dyadic& rhs) { return *this = *this + rhs; }
  Dyadic& operator-=(const Dyadic& rhs) { return *this = *this - rhs; }
  Dyadic& operator*=(const Dyadic& rhs) { return *this = *this * rhs; }

  /// Exact k-fold product; x^0 = 1.
  Dyadic pow(unsigned k) const {
    Dyadic result = one();
    Dyadic base = *this;
    while (k > 0) {
      if (k & 1u) result *= base;
      if ((k >>= 1) != 0) base *= base;
    }
    return result;
  }

  friend bool operator==(const Dyadic& a, const Dyadic& b) {
    return a.e_ == b.e_ && a.m_ == b.m_;
  }

  /// Total order agreeing with the real numbers the values denote.
  friend std::strong_ordering operator<=>(const Dyadic& a, const Dyadic& b) {
    const int sa = a.sign();
    const int sb = b.sign();
    if (sa != sb) return sa <=> sb;
    if (sa == 0) return std::strong_ordering::equal;
    // Same nonzero sign: compare floor(log2 |value|) first, then fall back
    // to an exact subtraction when the leading bit positions coincide.
    const long long la = a.e_ + static_cast<long long>(boost::multiprecision::msb(
                                    sa > 0 ? a.m_ : BigInt(-a.m_)));
    const long long lb = b.e_ + static_cast<long long>(boost::multiprecision::msb(
                                    sb > 0 ? b.m_ : BigInt(-b.m_)));
    if (la != lb) {
      const bool a_bigger_mag = la > lb;
      return (a_bigger_mag == (sa > 0)) ? std::strong_ordering::greater
                                        : std::strong_ordering::less;
    }
    const Dyadic d = a - b;
    return d.sign() <=> 0;
  }

  /// Canonical text form "m*2^e", e.g. "7*2^-4".
  std::string str() const {
    return m_.str() + "*2^" + std::to_string(e_);
  }

  /// Exact decimal rendering truncated (toward zero) to `digits` fractional
  /// digits.  Display only; never used in comparisons or re-parsed.
  std::string decimal(int digits = 6) const {
    const bool neg = sign() < 0;
    BigInt abs_m = neg ? BigInt(-m_) : m_;
    std::string out = neg ? "-" : "";
    if (e_ >= 0) {
      out += BigInt(abs_m << e_).str();
      return out;
    }
    const int f = -e_;
    BigInt ip = abs_m >> f;
    BigInt rest = abs_m - (ip << f);
    out += ip.str();
    if (digits > 0) {
      out += '.';
      for (int i = 0; i < digits; ++i) {
        rest *= 10;
        BigInt digit = rest >> f;
        out += static_cast<char>('0' + digit.convert_to<int>());
        rest -= digit << f;
      }
    }
    return out;
  }

 private:
  struct already_canonical {};

  Dyadic(BigInt m, long long e) : m_(std::move(m)) {
    if (m_.is_zero()) {
      e_ = 0;
      return;
    }
    const unsigned tz = boost::multiprecision::lsb(m_.sign() > 0 ? m_ : BigInt(-m_));
    if (tz > 0) m_ >>= tz;
    e_ = checked_exponent(e + static_cast<long long>(tz));
  }

  Dyadic(BigInt m, long long e, already_canonical) : m_(std::move(m)) {
    e_ = checked_exponent(e);
  }

  static int checked_exponent(long long e) {
    // Exponents stay far below this in practice (|e| <= 2^n plus slack);
    // the check guards against silent wraparound on misuse.
    if (e > (1ll << 40) || e < -(1ll << 40)) {
      throw std::domain_error("dyadic exponent out of supported range");
    }
    return static_cast<int>(e);
  }

  BigInt m_;
  int e_ = 0;
};

/// Parses the canonical "m*2^e" text form.
inline Dyadic parse_dyadic(std::string_view text) {
  const auto star = text.find("*2^");
  if (star == std::string_view::npos) {
    throw parse_error("dyadic must have the form m*2^e, got \"" + std::string(text) + "\"");
  }
  try {
    BigInt m(std::string(text.substr(0, star)));
    const long long e = std::stoll(std::string(text.substr(star + 3)));
    return Dyadic::from_parts(std::move(m), e);
  } catch (const std::exception&) {
    throw parse_error("cannot parse dyadic \"" + std::string(text) + "\"");
  }
}

/// alpha = 2 - 2^-(n-1) = (2^n - 1) * 2^-(n-1), the base of the
/// per-generation coefficients in the tree construction.  Chosen just shy
/// of 2 so that consecutive-power sums stay strictly between the bracketing
/// powers.
inline Dyadic alpha(GroundSize g) {
  return Dyadic::from_parts(BigInt((std::uint64_t{1} << g.n) - 1), -(g.n - 1));
}

}  // namespace sepkit
