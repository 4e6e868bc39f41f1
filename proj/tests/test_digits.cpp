#include "lowdisc/digits.hpp"

#include "doctest.h"
#include "oracles.hpp"

#include <set>

using namespace lowdisc;

TEST_CASE("expand") {
  CHECK(expand(std::uint64_t{0}, 2).digits.empty());
  CHECK(expand(std::uint64_t{5}, 2).digits == std::vector<unsigned>{1, 0, 1});
  CHECK(expand(std::uint64_t{10}, 3).digits == std::vector<unsigned>{1, 0, 1});
  CHECK_THROWS_AS(expand(std::uint64_t{3}, 1), Error);
  try {
    expand(std::uint64_t{3}, 0);
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::invalid_base);
  }
}

TEST_CASE("expand big integers") {
  const BigInt n = boost::multiprecision::pow(BigInt(7), 40) - 1;
  const auto d = expand(n, 7);
  CHECK(d.size() == 40);
  for (unsigned x : d.digits) CHECK(x == 6);
  CHECK(d.value() == n);
}

TEST_CASE("sum of digits") {
  CHECK(sum_of_digits(0, 2) == 0);
  CHECK(sum_of_digits(7, 2) == 3);
  CHECK(sum_of_digits(1234, 10) == 10);
}

TEST_CASE("radical inverse examples") {
  CHECK(radical_inverse(0, 2).to_rational() == 0);
  CHECK(radical_inverse(3, 2).to_rational() == Rational(3, 4));
  const auto x = radical_inverse(7, 5);
  CHECK(x.num() == 11);
  CHECK(x.denominator() == 25);
  CHECK(x.prec() == 2);
}

TEST_CASE("monna_plus examples") {
  CHECK(monna_plus(BRational(3, 2, 2)) == 3);
  CHECK(monna_plus(BRational::zero(2)) == 0);
  CHECK(monna_plus(BRational(11, 5, 2)) == 7);
  // Padding with trailing zero digits does not change the preimage.
  CHECK(monna_plus(BRational(1, 2, 1).padded_to(5)) == 1);
}

TEST_CASE("nearest integer distance") {
  CHECK(nearest_int_distance(0.75) == doctest::Approx(0.25));
  CHECK(nearest_int_distance(2.0) == 0.0);
  CHECK(nearest_int_distance(0.5) == 0.5);
  CHECK(nearest_int_distance(-0.75) == doctest::Approx(0.25));
  CHECK(nearest_int_distance(Rational(7, 4)) == Rational(1, 4));
  CHECK(nearest_int_distance(Rational(-1, 3)) == Rational(1, 3));
}

TEST_CASE("BRational validates and compares across bases") {
  CHECK_THROWS_AS(BRational(4, 2, 2), Error);
  CHECK_THROWS_AS(BRational(-1, 2, 2), Error);
  CHECK(BRational(1, 2, 1) < BRational(2, 3, 1));
  CHECK(BRational(2, 4, 1) == BRational(1, 2, 1));
  CHECK(BRational(2, 2, 2).normalized().identical(BRational(1, 2, 1)));
  CHECK_FALSE(BRational(2, 2, 2).is_minimal());
}

TEST_CASE("round trips for all n below 10^6, bases 2..16") {
  for (unsigned b = 2; b <= 16; ++b) {
    bool ok = true;
    for (std::uint64_t n = 0; n < 1000000; ++n) {
      const auto d = expand(n, b);
      if (d.value() != n) ok = false;
      for (unsigned x : d.digits)
        if (x >= b) ok = false;
      if (!d.digits.empty() && d.digits.back() == 0) ok = false;
      if (monna_plus(radical_inverse(n, b)) != n) ok = false;
      if (!ok) {
        FAIL("round trip failed at n=" << n << " b=" << b);
        break;
      }
    }
    CHECK(ok);
  }
}

TEST_CASE("radical inverse agrees with the digit definition") {
  oracle::Gen gen(11);
  for (int i = 0; i < 2000; ++i) {
    const unsigned b = static_cast<unsigned>(gen.uniform(2, 16));
    const std::uint64_t n = gen.uniform(0, std::uint64_t{1} << 40);
    CHECK(radical_inverse(n, b).to_rational() == oracle::radical_inverse(n, b));
  }
}

TEST_CASE("digit-block additivity") {
  oracle::Gen gen(5);
  for (int i = 0; i < 5000; ++i) {
    const unsigned q = static_cast<unsigned>(gen.uniform(2, 10));
    const unsigned j = static_cast<unsigned>(gen.uniform(0, 8));
    std::uint64_t qj = 1;
    for (unsigned r = 0; r < j; ++r) qj *= q;
    const std::uint64_t m = gen.uniform(0, qj - 1), A = gen.uniform(0, 100000);
    CHECK(sum_of_digits(m + A * qj, q) == sum_of_digits(m, q) + sum_of_digits(A, q));
  }
}

TEST_CASE("radical inverse permutes the b^m grid") {
  for (unsigned b : {2u, 3u, 5u, 7u})
    for (unsigned m = 0; m <= 5; ++m) {
      std::uint64_t size = 1;
      for (unsigned r = 0; r < m; ++r) size *= b;
      std::set<BigInt> seen;
      for (std::uint64_t n = 0; n < size; ++n) {
        const auto x = radical_inverse(n, b).padded_to(m);
        CHECK(x.num() < size);
        seen.insert(x.num());
      }
      CHECK(seen.size() == size);
    }
}
