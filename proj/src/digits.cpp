#include "lowdisc/digits.hpp"

#include <algorithm>
#include <cmath>

namespace lowdisc {

namespace {

BigInt big_pow(unsigned base, unsigned exp) {
  return boost::multiprecision::pow(BigInt(base), exp);
}

}  // namespace

void require_base(unsigned base) {
  if (base < 2)
    throw Error(ErrorCode::invalid_base,
                "base must be at least 2, got " + std::to_string(base));
}

BigInt DigitVector::value() const {
  BigInt out = 0;
  for (auto it = digits.rbegin(); it != digits.rend(); ++it)
    out = out * base + *it;
  return out;
}

DigitVector expand(std::uint64_t n, unsigned base) {
  require_base(base);
  DigitVector out{base, {}};
  while (n > 0) {
    out.digits.push_back(static_cast<unsigned>(n % base));
    n /= base;
  }
  return out;
}

DigitVector expand(const BigInt& n, unsigned base) {
  require_base(base);
  if (n < 0)
    throw Error(ErrorCode::invalid_argument, "negative integers have no expansion");
  DigitVector out{base, {}};
  BigInt rest = n;
  while (rest > 0) {
    out.digits.push_back(static_cast<unsigned>(rest % base));
    rest /= base;
  }
  return out;
}

std::uint64_t sum_of_digits(std::uint64_t n, unsigned q) {
  require_base(q);
  std::uint64_t sum = 0;
  while (n > 0) {
    sum += n % q;
    n /= q;
  }
  return sum;
}

unsigned digit_count(std::uint64_t n, unsigned base) {
  require_base(base);
  unsigned count = 0;
  while (n > 0) {
    ++count;
    n /= base;
  }
  return count;
}

BRational::BRational(BigInt num, unsigned base, unsigned prec)
    : num_(std::move(num)), base_(base), prec_(prec) {
  require_base(base);
  if (num_ < 0 || num_ >= big_pow(base, prec))
    throw Error(ErrorCode::invalid_argument,
                "numerator " + num_.str() + " outside [0, " +
                    std::to_string(base) + "^" + std::to_string(prec) + ")");
  minimal_ = (prec_ == 0) || (num_ % base_ != 0);
}

BigInt BRational::denominator() const { return big_pow(base_, prec_); }

BRational BRational::normalized() const {
  BigInt num = num_;
  unsigned prec = prec_;
  while (prec > 0 && num % base_ == 0) {
    num /= base_;
    --prec;
  }
  return BRational(std::move(num), base_, prec);
}

BRational BRational::padded_to(unsigned prec) const {
  if (prec < prec_) return normalized().padded_to(prec);
  return BRational(num_ * big_pow(base_, prec - prec_), base_, prec);
}

Rational BRational::to_rational() const { return Rational(num_, denominator()); }

double BRational::to_double() const { return lowdisc::to_double(to_rational()); }

std::strong_ordering operator<=>(const BRational& a, const BRational& b) {
  BigInt lhs, rhs;
  if (a.base_ == b.base_) {
    if (a.prec_ >= b.prec_) {
      lhs = a.num_;
      rhs = b.num_ * big_pow(b.base_, a.prec_ - b.prec_);
    } else {
      lhs = a.num_ * big_pow(a.base_, b.prec_ - a.prec_);
      rhs = b.num_;
    }
  } else {
    lhs = a.num_ * b.denominator();
    rhs = b.num_ * a.denominator();
  }
  if (lhs < rhs) return std::strong_ordering::less;
  if (lhs > rhs) return std::strong_ordering::greater;
  return std::strong_ordering::equal;
}

std::string to_string(const BRational& x) {
  return x.num().str() + "/" + std::to_string(x.base()) + "^" +
         std::to_string(x.prec());
}

BRational radical_inverse(std::uint64_t n, unsigned base) {
  const DigitVector d = expand(n, base);
  BigInt num = 0;
  for (unsigned digit : d.digits) num = num * base + digit;
  return BRational(std::move(num), base, static_cast<unsigned>(d.size()));
}

BigInt monna_plus(const BRational& x) {
  // x = sum_i d_i b^(i-prec), so digit i of the numerator is the digit at
  // position prec-1-i of the b-adic integer.
  const DigitVector d = expand(x.num(), x.base());
  BigInt out = 0;
  for (unsigned i = 0; i < x.prec(); ++i)
    out = out * x.base() + (i < d.size() ? d.digits[i] : 0u);
  return out;
}

double nearest_int_distance(double x) {
  const double frac = x - std::floor(x);
  return std::min(frac, 1.0 - frac);
}

Rational nearest_int_distance(const Rational& x) {
  BigInt fl = boost::multiprecision::numerator(x) /
              boost::multiprecision::denominator(x);
  if (x < 0 && Rational(fl) != x) fl -= 1;
  const Rational frac = x - Rational(fl);
  const Rational other = Rational(1) - frac;
  return frac < other ? frac : other;
}

}  // namespace lowdisc
