#include "lowdisc/transforms.hpp"

#include "doctest.h"
#include "oracles.hpp"

#include <filesystem>
#include <fstream>

using namespace lowdisc;

TEST_CASE("apply") {
  CHECK(apply(IndexTransform::sum_of_digits(2), 7) == 3);
  CHECK(apply(IndexTransform::floor_power(1, 2), 10) == 3);
  CHECK(apply(IndexTransform::floor_power(2, 3), 8) == 4);
  CHECK(apply(IndexTransform::identity(), 42) == 42);
  const auto table = IndexTransform::table({0, 0, 1, 3});
  CHECK(table(3) == 3);
  try {
    table(4);
    FAIL("expected out-of-table");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::out_of_table);
  }
}

TEST_CASE("floor power is exact at perfect powers") {
  const auto f = IndexTransform::floor_power(1, 3);
  for (std::uint64_t k = 1; k < 3000; k += 7) {
    CHECK(f(k * k * k) == k);
    CHECK(f(k * k * k - 1) == k - 1);
  }
  const auto g = IndexTransform::floor_power(2, 4);  // normalized to 1/2
  CHECK(g.describe() == IndexTransform::floor_power(1, 2).describe());
  CHECK(f(std::uint64_t{1} << 63) == oracle::floor_power(std::uint64_t{1} << 63, 1, 3));
}

TEST_CASE("floor power agrees with brute force") {
  for (auto [u, v] : {std::pair{1u, 2u}, {1u, 3u}, {2u, 3u}, {3u, 7u}})
    for (std::uint64_t n = 0; n < 3000; ++n)
      CHECK(IndexTransform::floor_power(u, v)(n) == oracle::floor_power(n, u, v));
}

TEST_CASE("transform validation and parsing") {
  CHECK_THROWS_AS(IndexTransform::floor_power(2, 2), Error);
  CHECK_THROWS_AS(IndexTransform::floor_power(0, 2), Error);
  CHECK_THROWS_AS(IndexTransform::sum_of_digits(1), Error);
  CHECK_THROWS_AS(IndexTransform::table({3, 1}), Error);
  CHECK(IndexTransform::parse("sod:3").describe() == IndexTransform::sum_of_digits(3).describe());
  CHECK(IndexTransform::parse(R"({"kind":"pow","u":1,"v":2})")(10) == 3);
  CHECK(IndexTransform::parse(R"({"kind":"sod","q":2})")(7) == 3);
  CHECK(IndexTransform::parse("pow:2/3")(8) == 4);
  CHECK_THROWS_AS(IndexTransform::parse("sqrt"), Error);

  const auto path = std::filesystem::temp_directory_path() / "lowdisc_table_test.txt";
  {
    std::ofstream f(path);
    f << "# counts\n0, 0 1\n1 2\n";
  }
  const auto t = IndexTransform::parse("table:" + path.string());
  CHECK(t(0) == 0);
  CHECK(t(4) == 2);
  CHECK(IndexTransform::parse(R"({"kind":"table","path":")" + path.string() + R"("})")(2) == 1);
  std::filesystem::remove(path);
}

TEST_CASE("multiplicity F") {
  const auto sqrt = IndexTransform::floor_power(1, 2);
  CHECK(multiplicity_F(sqrt, 2) == 5);
  CHECK(multiplicity_F(sqrt, 0) == 1);
  // n in {8, 9, 10, 11} have floor(n^(2/3)) = 4.
  CHECK(multiplicity_F(IndexTransform::floor_power(2, 3), 4) == 4);
  CHECK_THROWS_AS(multiplicity_F(IndexTransform::sum_of_digits(2), 1), Error);
  CHECK(multiplicity_F(IndexTransform::table({0, 0, 1, 1, 1, 2, 5}), 1) == 3);
}

TEST_CASE("multiplicity F agrees with bisection for k <= 1000") {
  for (auto [u, v] : {std::pair{1u, 2u}, {1u, 3u}, {2u, 3u}}) {
    const auto f = IndexTransform::floor_power(u, v);
    for (std::uint64_t k = 0; k <= 1000; ++k)
      CHECK(multiplicity_F(f, k) ==
            oracle::first_at_least(k + 1, u, v) - oracle::first_at_least(k, u, v));
    // F(k) = ceil((k+1)^(1/alpha)) - ceil(k^(1/alpha)) and the real gaps grow,
    // so F can drop by at most one from one level to the next.
    for (std::uint64_t k = 1; k <= 1000; ++k)
      CHECK(multiplicity_F(f, k) + 1 >= multiplicity_F(f, k - 1));
  }
}

TEST_CASE("F covers the first N indices") {
  for (auto [u, v] : {std::pair{1u, 2u}, {1u, 3u}, {2u, 3u}}) {
    const auto f = IndexTransform::floor_power(u, v);
    for (std::uint64_t N = 1; N <= 100000; N = N * 3 + 1) {
      std::uint64_t total = 0;
      for (std::uint64_t r = 0; r <= f(N - 1); ++r) total += multiplicity_F(f, r);
      CHECK(total >= N);
      // Only the last level can overshoot.
      CHECK(total - multiplicity_F(f, f(N - 1)) < N);
    }
  }
}

TEST_CASE("block counts G") {
  const auto chain2 = DivisibilityChain::powers(2, 8);
  const auto sod2 = IndexTransform::sum_of_digits(2);
  CHECK(block_counts_G(sod2, 0, 4, chain2) == Counts{{0, 1}, {1, 4}, {2, 6}, {3, 4}, {4, 1}});
  CHECK(block_counts_G(sod2, 3, 1, chain2) == Counts{{2, 1}, {3, 1}});
  CHECK(block_counts_G(IndexTransform::sum_of_digits(3), 0, 2, DivisibilityChain::powers(3, 4)) ==
        Counts{{0, 1}, {1, 2}, {2, 3}, {3, 2}, {4, 1}});
}

TEST_CASE("block counts agree with scans and sum to N_j") {
  oracle::Gen gen(17);
  const std::vector<IndexTransform> ts{IndexTransform::sum_of_digits(2),
                                       IndexTransform::sum_of_digits(3),
                                       IndexTransform::sum_of_digits(5),
                                       IndexTransform::floor_power(1, 2),
                                       IndexTransform::floor_power(2, 3),
                                       IndexTransform::identity()};
  for (const auto& t : ts) {
    for (const auto& chain : {DivisibilityChain::powers(2, 10), DivisibilityChain::powers(3, 7),
                              DivisibilityChain({1, 2, 6, 12, 60})}) {
      for (int rep = 0; rep < 10; ++rep) {
        const unsigned j = static_cast<unsigned>(gen.uniform(0, chain.size() - 1));
        const std::uint64_t A = gen.uniform(0, 200);
        const auto G = block_counts_G(t, A, j, chain);
        Counts scan;
        for (std::uint64_t n = A * chain[j]; n < (A + 1) * chain[j]; ++n) ++scan[t(n)];
        CHECK(G == scan);
        std::uint64_t total = 0;
        for (const auto& [k, c] : G) total += c;
        CHECK(total == chain[j]);
        CHECK(distinct_values_v(t, A, j, chain) == scan.size());
      }
    }
  }
}

TEST_CASE("histogram agrees with a scan") {
  oracle::Gen gen(23);
  for (const auto& t : {IndexTransform::sum_of_digits(2), IndexTransform::sum_of_digits(7),
                        IndexTransform::floor_power(1, 2), IndexTransform::floor_power(3, 5)}) {
    for (int rep = 0; rep < 40; ++rep) {
      const std::uint64_t a = gen.uniform(0, 5000), b = a + gen.uniform(0, 5000);
      Counts scan;
      for (std::uint64_t n = a; n < b; ++n) ++scan[t(n)];
      CHECK(histogram(t, a, b) == scan);
    }
  }
}

TEST_CASE("distinct values") {
  const auto chain2 = DivisibilityChain::powers(2, 6);
  const auto chain3 = DivisibilityChain::powers(3, 6);
  CHECK(distinct_values_v(IndexTransform::sum_of_digits(2), 0, 3, chain2) == 4);
  CHECK(distinct_values_v(IndexTransform::sum_of_digits(3), 1, 2, chain3) == 5);
  CHECK(distinct_values_v(IndexTransform::floor_power(1, 2), 17, 0, chain2) == 1);
  for (unsigned j = 1; j < 6; ++j)
    CHECK(distinct_values_v(IndexTransform::sum_of_digits(3), 0, j, chain3) <= 3 * j);
}

TEST_CASE("unimodality") {
  CHECK(is_unimodal(Counts{{0, 1}, {1, 4}, {2, 6}, {3, 4}, {4, 1}}));
  CHECK_FALSE(is_unimodal(Counts{{0, 2}, {1, 1}, {2, 2}}));
  CHECK(is_unimodal(Counts{{0, 3}, {1, 3}, {2, 3}}));
  CHECK(is_unimodal(Counts{}));
  // A gap inside the support is a zero count.
  CHECK_FALSE(is_unimodal(Counts{{0, 1}, {2, 1}}));
  CHECK(is_unimodal(std::vector<BigInt>{1, 2, 2, 1}));
  CHECK_FALSE(is_unimodal(std::vector<BigInt>{1, 0, 1}));
}

TEST_CASE("divisibility chains") {
  CHECK_THROWS_AS(DivisibilityChain({1, 2, 3}), Error);
  CHECK_THROWS_AS(DivisibilityChain({2, 4}), Error);
  CHECK_THROWS_AS(DivisibilityChain({1, 2, 2}), Error);
  CHECK(DivisibilityChain::powers(3, 4).terms() == std::vector<std::uint64_t>{1, 3, 9, 27});
  CHECK(DivisibilityChain::powers(3, 4).power_base() == 3u);
  CHECK_FALSE(DivisibilityChain({1, 2, 6}).power_base().has_value());
}

TEST_CASE("counting profile") {
  const auto profile = counting_profile(IndexTransform::sum_of_digits(2),
                                        DivisibilityChain::powers(2, 8), 6);
  REQUIRE(profile.levels.size() == 7);
  const std::uint64_t central[] = {1, 1, 2, 3, 6, 10, 20};
  for (unsigned j = 0; j <= 6; ++j) {
    CHECK(profile.levels[j].G == central[j]);
    CHECK(profile.levels[j].v == j + 1);
    CHECK(profile.levels[j].unimodal);
    CHECK(profile.levels[j].exact);
  }
  const auto window = counting_profile(IndexTransform::floor_power(1, 2),
                                       DivisibilityChain::powers(2, 6), 4, 8);
  CHECK_FALSE(window.levels[2].exact);
}
