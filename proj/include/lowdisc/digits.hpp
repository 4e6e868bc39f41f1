#pragma once

// Base-b digit arithmetic: expansions, sum-of-digits, the radical inverse
// (Monna map restricted to N_0) and its inverse on finite expansions.

#include "lowdisc/types.hpp"

#include <compare>
#include <cstdint>
#include <string>
#include <vector>

namespace lowdisc {

/// Base-b expansion, least-significant digit first. Zero has no digits.
struct DigitVector {
  unsigned base = 2;
  std::vector<unsigned> digits;

  BigInt value() const;
  std::size_t size() const { return digits.size(); }
};

void require_base(unsigned base);

DigitVector expand(std::uint64_t n, unsigned base);
DigitVector expand(const BigInt& n, unsigned base);

std::uint64_t sum_of_digits(std::uint64_t n, unsigned q);

/// Number of base-b digits of n (0 for n = 0).
unsigned digit_count(std::uint64_t n, unsigned base);

/// Exact point coordinate num / base^prec in [0, 1).
///
/// The base stays explicit: values in different bases compare by exact
/// cross-multiplication. `is_minimal()` records whether `prec` is the
/// shortest representation or was padded with trailing zero digits.
class BRational {
 public:
  BRational() = default;
  BRational(BigInt num, unsigned base, unsigned prec);

  static BRational zero(unsigned base) { return BRational(0, base, 0); }

  const BigInt& num() const { return num_; }
  unsigned base() const { return base_; }
  unsigned prec() const { return prec_; }
  bool is_minimal() const { return minimal_; }

  BigInt denominator() const;
  BRational normalized() const;
  BRational padded_to(unsigned prec) const;

  Rational to_rational() const;
  double to_double() const;

  /// Same numerator, base and precision (not just the same value).
  bool identical(const BRational& other) const {
    return base_ == other.base_ && prec_ == other.prec_ && num_ == other.num_;
  }

  friend std::strong_ordering operator<=>(const BRational& a,
                                          const BRational& b);
  friend bool operator==(const BRational& a, const BRational& b) {
    return (a <=> b) == std::strong_ordering::equal;
  }

 private:
  BigInt num_ = 0;
  unsigned base_ = 2;
  unsigned prec_ = 0;
  bool minimal_ = true;
};

std::string to_string(const BRational& x);

/// phi_b(n) = a_0/b + a_1/b^2 + ... with prec equal to the digit count of n.
BRational radical_inverse(std::uint64_t n, unsigned base);

/// Inverse of the radical inverse on finite b-adic expansions.
BigInt monna_plus(const BRational& x);

/// ||x||: distance to the nearest integer, in [0, 1/2].
double nearest_int_distance(double x);
Rational nearest_int_distance(const Rational& x);

}  // namespace lowdisc
