#include "lowdisc/discrepancy.hpp"
#include "lowdisc/expsums.hpp"

#include "doctest.h"
#include "oracles.hpp"

#include <algorithm>
#include <cmath>

using namespace lowdisc;

namespace {

constexpr double kEps = 1e-12;

bool near(Complex a, Complex b, double tol = kEps) { return std::abs(a - b) < tol; }

}  // namespace

TEST_CASE("characters") {
  CHECK(near(gamma_k(2, 0, BRational(5, 2, 3)), 1.0));
  CHECK(near(gamma_k(2, 1, BRational(1, 2, 1)), -1.0));
  CHECK(near(gamma_k(2, 1, BRational(3, 2, 2)), -1.0));
  CHECK_THROWS_AS(gamma_k(2, 1, BRational(1, 3, 1)), Error);
  for (std::uint64_t k = 0; k < 50; ++k)
    for (std::uint64_t n = 0; n < 50; ++n)
      CHECK(std::abs(gamma_k(3, k, radical_inverse(n, 3))) == doctest::Approx(1.0));
  CHECK(near(unit_phase(Rational(7, 4)), Complex(0, -1)));
  CHECK(near(unit_phase(Rational(-1, 2)), -1.0));
}

TEST_CASE("rho weights") {
  CHECK(rho_weight(2, 0) == 1.0);
  CHECK(rho_weight(2, 1) == doctest::Approx(1.0));
  CHECK(rho_weight(2, 2) == doctest::Approx(0.5));
  CHECK(rho_weight(2, 3) == doctest::Approx(0.5));
  CHECK(rho_weight(3, 2) == doctest::Approx(2.0 / (3 * std::sin(2 * std::numbers::pi / 3))));
  for (unsigned b = 2; b <= 7; ++b)
    for (std::uint64_t k = 1; k < 400; ++k) CHECK(rho_weight(b, k) > 0);
}

TEST_CASE("Weyl sum examples") {
  CHECK(weyl_sum(2, 2, 1, 2).abs() < kEps);
  CHECK(weyl_sum(2, 2, 1, 4).abs() < kEps);
  for (std::uint64_t k = 0; k < 20; ++k) CHECK(near(weyl_sum(3, 5, k, 1).value, 1.0));
  CHECK(near(weyl_sum(5, 3, 0, 123456).value, 1.0));
  CHECK_THROWS_AS(weyl_sum(2, 2, 1, 0), Error);
}

TEST_CASE("Weyl sums agree with a long double oracle and stay in the unit disc") {
  oracle::Gen gen(7);
  for (int rep = 0; rep < 200; ++rep) {
    const unsigned b = static_cast<unsigned>(gen.uniform(2, 10));
    const unsigned q = static_cast<unsigned>(gen.uniform(2, 13));
    const std::uint64_t k = gen.uniform(0, 500), N = gen.uniform(1, 3000);
    const auto w = weyl_sum(b, q, k, N);
    const auto ref = oracle::weyl(b, q, k, N);
    CHECK(std::abs(w.value - Complex(double(ref.real()), double(ref.imag()))) < 1e-12);
    CHECK(w.abs() <= 1.0 + kEps);
  }
}

TEST_CASE("both summation routes agree") {
  for (auto [b, q, k] : {std::tuple{2u, 2u, 1ull}, {3u, 2u, 5ull}, {2u, 3u, 7ull}, {5u, 13u, 101ull}})
    for (std::uint64_t N : {1ull, 4095ull, 4097ull, 100000ull, 1048577ull}) {
      const auto d = weyl_sum(b, q, k, N, SumRoute::direct);
      const auto h = weyl_sum(b, q, k, N, SumRoute::histogram);
      CHECK(std::abs(d.value - h.value) < 1e-12);
    }
}

TEST_CASE("compensated sum") {
  CompensatedSum acc;
  acc.add(1e16);
  for (int i = 0; i < 1000; ++i) acc.add(1.0);
  acc.add(-1e16);
  CHECK(acc.value().real() == 1000.0);
}

TEST_CASE("product identity") {
  CHECK(product_identity_check(2, 2, 1, 3).holds);
  CHECK(product_identity_check(2, 3, 1, 4).holds);
  const auto zero = product_identity_check(3, 5, 7, 0);
  CHECK(zero.holds);
  CHECK(near(zero.lhs, 1.0));
  for (unsigned b = 2; b <= 5; ++b)
    for (unsigned q = 2; q <= 5; ++q)
      for (std::uint64_t k = 0; k <= 40; ++k)
        for (unsigned m = 0; m <= 10; ++m) CHECK(product_identity_check(b, q, k, m).holds);
}

TEST_CASE("first lemma") {
  const auto eq = lemma_le1_bound(2, 2, 1, 1);
  CHECK(eq.holds);
  CHECK(eq.lhs < kEps);
  CHECK(eq.rhs == 0.0);
  const auto zero = lemma_le1_bound(5, 3, 0, 4);
  CHECK(zero.rhs == 1.0);
  CHECK(zero.holds);
  CHECK(lemma_le1_bound(3, 2, 1, 5).holds);
  for (unsigned q = 2; q <= 20; ++q)
    for (std::uint64_t k = 0; k < 30; ++k) CHECK_FALSE(lemma_le1_bound(2, q, k, 1).clamped);
}

TEST_CASE("second lemma") {
  for (unsigned q : {2u, 3u, 5u})
    for (unsigned m = 0; m <= 6; ++m) {
      const std::uint64_t N = checked_pow(q, m);
      const auto r = lemma_le2_bound(3, q, 4, N);
      CHECK(r.lhs == doctest::Approx(r.rhs).epsilon(1e-12));
    }
  CHECK(lemma_le2_bound(2, 2, 1, 3).holds);
  CHECK(lemma_le2_bound(2, 3, 2, 10).holds);
}

TEST_CASE("lemma sweeps") {
  for (unsigned b : {2u, 3u, 5u, 10u})
    for (unsigned q : {2u, 3u, 5u, 13u})
      for (std::uint64_t k = 0; k <= 100; ++k) {
        for (unsigned m = 0; m <= 12; ++m) CHECK(lemma_le1_bound(b, q, k, m).holds);
        const auto sweep = lemma_le2_sweep(b, q, k, 10000);
        CHECK(sweep.checked == 10000);
        CHECK(sweep.failures == 0);
      }
}

TEST_CASE("sweep agrees with pointwise evaluation") {
  for (std::uint64_t N_max : {1ull, 50ull, 300ull}) {
    const auto sweep = lemma_le2_sweep(3, 2, 7, N_max);
    double worst = -1e300;
    for (std::uint64_t N = 1; N <= N_max; ++N) {
      const auto r = lemma_le2_bound(3, 2, 7, N);
      worst = std::max(worst, r.lhs - r.rhs);
    }
    CHECK(sweep.worst_margin == doctest::Approx(worst).epsilon(1e-9));
  }
}

TEST_CASE("Hellekalek bound examples") {
  std::vector<BRational> zeros(5, BRational::zero(2));
  CHECK(hellekalek_bound(2, 1, zeros) == doctest::Approx(1.5));
  CHECK(extreme_discrepancy_1d(zeros).value == 1);
  CHECK_THROWS_AS(hellekalek_bound(2, 0, zeros), Error);
  std::vector<BRational> mixed{BRational(1, 2, 1), BRational(1, 3, 1)};
  CHECK_THROWS_AS(hellekalek_bound(2, 1, mixed), Error);
  CHECK(hellekalek_resolution(2, 2) == 1);
  CHECK(hellekalek_resolution(2, std::uint64_t{1} << 62) == 2);
}

TEST_CASE("Hellekalek terms agree with the character definition") {
  const auto pts = generate_range(SequenceSpec::van_der_corput(3), 5, 17);
  std::vector<BRational> xs;
  for (const auto& p : pts) xs.push_back(p.coords[0]);
  const auto terms = hellekalek_terms(3, 2, xs);
  REQUIRE(terms.size() == 8);
  for (const auto& t : terms) {
    Complex sum = 0;
    for (const auto& x : xs) sum += gamma_k(3, t.k, x);
    CHECK(near(t.average, sum / double(xs.size()), 1e-12));
  }
}

TEST_CASE("Hellekalek bound dominates the exact star discrepancy") {
  oracle::Gen gen(99);
  for (int rep = 0; rep < 2000; ++rep) {
    const unsigned b = static_cast<unsigned>(gen.uniform(2, 3));
    const unsigned g = static_cast<unsigned>(gen.uniform(1, 4));
    const std::size_t N = gen.uniform(1, 64);
    std::vector<BRational> xs;
    std::vector<oracle::Coords> pts;
    for (std::size_t n = 0; n < N; ++n) {
      const unsigned prec = static_cast<unsigned>(gen.uniform(0, 6));
      xs.push_back(BRational(gen.uniform(0, checked_pow(b, prec) - 1), b, prec));
      pts.push_back({xs.back().to_rational()});
    }
    const double bound = hellekalek_bound(b, g, xs);
    const double star = to_double(oracle::extreme(pts, true));
    CHECK(bound + kHellekalekRounding >= star);
  }
}

TEST_CASE("Hellekalek bound can undershoot the extreme discrepancy") {
  const std::vector<BRational> xs{BRational(1, 2, 2), BRational(15, 2, 4)};
  CHECK(hellekalek_bound(2, 1, xs) == doctest::Approx(0.5));
  CHECK(extreme_discrepancy_1d(xs).value == Rational(11, 16));
}

TEST_CASE("digit-sum indexed van der Corput decays like 1/sqrt(log N)") {
  for (unsigned q : {2u, 3u})
    for (unsigned b : {2u, 3u}) {
      const auto spec = SequenceSpec::van_der_corput(b);
      const auto t = IndexTransform::sum_of_digits(q);
      std::vector<double> scaled;
      for (unsigned d = 1; d <= 22; ++d) {
        const std::uint64_t N = std::uint64_t{1} << d;
        const auto D = discrepancy(transformed_points(spec, t, 0, N), Mode::extreme).value;
        scaled.push_back(to_double(D) * std::sqrt(std::log(double(N))));
      }
      std::vector<double> tail(scaled.begin() + 9, scaled.end());
      std::nth_element(tail.begin(), tail.begin() + tail.size() / 2, tail.end());
      const double median = tail[tail.size() / 2];
      CHECK(*std::max_element(scaled.begin(), scaled.end()) <= 3 * median);
    }
}
