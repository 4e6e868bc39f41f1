#include "lowdisc/generators.hpp"

#include "doctest.h"
#include "oracles.hpp"

#include <sstream>

using namespace lowdisc;

namespace {

std::vector<oracle::Coords> as_coords(const std::vector<Point>& pts) {
  std::vector<oracle::Coords> out;
  for (const auto& p : pts) {
    oracle::Coords c;
    for (const auto& x : p.coords) c.push_back(x.to_rational());
    out.push_back(c);
  }
  return out;
}

GeneratorMatrix from_rows(unsigned p, std::vector<std::vector<unsigned>> rows) {
  std::vector<unsigned> flat;
  for (const auto& r : rows) flat.insert(flat.end(), r.begin(), r.end());
  return GeneratorMatrix(p, static_cast<unsigned>(rows.size()), flat);
}

}  // namespace

TEST_CASE("van der Corput and Halton points") {
  const auto vdc = generate_range(SequenceSpec::van_der_corput(2), 0, 4);
  CHECK(vdc[0].coords[0].to_rational() == 0);
  CHECK(vdc[1].coords[0].to_rational() == Rational(1, 2));
  CHECK(vdc[2].coords[0].to_rational() == Rational(1, 4));
  CHECK(vdc[3].coords[0].to_rational() == Rational(3, 4));
  const auto h = SequenceSpec::halton({2, 3}).point(5);
  CHECK(h.coords[0].to_rational() == Rational(5, 8));
  CHECK(h.coords[1].to_rational() == Rational(7, 9));
}

TEST_CASE("identity digital sequence is van der Corput") {
  const auto spec = SequenceSpec::digital(2, {GeneratorMatrix::identity(2, 8)});
  for (std::uint64_t n = 0; n < 256; ++n)
    CHECK(spec.point(n) == SequenceSpec::van_der_corput(2).point(n));
}

TEST_CASE("spec validation") {
  CHECK_THROWS_AS(SequenceSpec::halton({2, 4}), Error);
  CHECK_THROWS_AS(SequenceSpec::halton({6, 3}), Error);
  CHECK_THROWS_AS(SequenceSpec::van_der_corput(1), Error);
  CHECK_THROWS_AS(SequenceSpec::digital(4, {GeneratorMatrix::identity(4, 2)}), Error);
  CHECK_THROWS_AS(SequenceSpec::parse("sobol:2"), Error);
  const auto small = SequenceSpec::parse("identity:2:3");
  CHECK_NOTHROW(small.point(7));
  try {
    small.point(8);
    FAIL("expected index-out-of-precision");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::index_out_of_precision);
  }
}

TEST_CASE("Halton projections are van der Corput") {
  const auto h = SequenceSpec::halton({2, 3, 5});
  for (std::uint64_t n = 0; n < 2000; ++n) {
    const auto p = h.point(n);
    CHECK(p.coords[0] == radical_inverse(n, 2));
    CHECK(p.coords[1] == radical_inverse(n, 3));
    CHECK(p.coords[2] == radical_inverse(n, 5));
  }
}

TEST_CASE("Pascal matrices") {
  const auto one = pascal_matrices(2, 1, 3);
  CHECK(one.size() == 1);
  CHECK(one[0] == GeneratorMatrix::identity(2, 3));
  const auto two = pascal_matrices(3, 2, 2);
  CHECK(two[0] == GeneratorMatrix::identity(3, 2));
  CHECK(two[1] == from_rows(3, {{1, 1}, {0, 1}}));
  const auto three = pascal_matrices(5, 3, 2);
  CHECK(three[2] == from_rows(5, {{1, 2}, {0, 1}}));
  // Powers of the Pascal matrix: P^j = P^(j-1) P.
  const auto faure = pascal_matrices(7, 4, 6);
  for (unsigned j = 2; j < 4; ++j) CHECK(faure[j] == multiply(faure[j - 1], faure[1]));
  CHECK_THROWS_AS(pascal_matrices(3, 4, 2), Error);
}

TEST_CASE("rank condition") {
  for (unsigned m = 0; m <= 6; ++m)
    CHECK(check_rank_condition(std::vector{GeneratorMatrix::identity(2, 6)}, 0, m));
  CHECK(check_rank_condition(pascal_matrices(3, 2, 4), 0, 2));
  CHECK_FALSE(check_rank_condition(std::vector{GeneratorMatrix(2, 3)}, 0, 1));
  CHECK_THROWS_AS(check_rank_condition(pascal_matrices(3, 2, 2), 0, 3), Error);
}

TEST_CASE("net checks") {
  CHECK(check_net(generate_range(SequenceSpec::van_der_corput(2), 0, 8), 2, 0, 3, 1));
  const auto faure = SequenceSpec::parse("faure:3:2:8");
  CHECK(check_net(generate_range(faure, 0, 9), 3, 0, 2, 2));
  std::vector<Point> origin(8, Point{{BRational::zero(2)}});
  const auto bad = check_net(origin, 2, 0, 3, 1);
  CHECK_FALSE(bad.ok);
  REQUIRE(bad.violation.has_value());
  CHECK(bad.violation->d == std::vector<unsigned>{3});
  CHECK(bad.violation->a == std::vector<std::uint64_t>{0});
  CHECK(bad.found == 8);
  CHECK(bad.expected == 1);
  CHECK_THROWS_AS(check_net(origin, 2, 0, 2, 1), Error);
}

TEST_CASE("sequence property") {
  CHECK(check_sequence_property(SequenceSpec::van_der_corput(2), 2, 0, 1, 3, 4));
  CHECK(check_sequence_property(SequenceSpec::parse("faure:3:2:8"), 3, 0, 2, 2, 2));
  CHECK_FALSE(check_sequence_property(SequenceSpec::halton({2, 3}), 2, 0, 2, 3, 3));
}

TEST_CASE("net check agrees with the interval-counting oracle") {
  oracle::Gen gen(3);
  const std::vector<std::string> specs{"vdc:2", "vdc:3", "faure:3:2:8", "faure:5:3:6",
                                       "halton:2,3", "identity:2:8"};
  for (const auto& text : specs) {
    const auto spec = SequenceSpec::parse(text);
    const unsigned b = spec.coordinate_base(0);
    for (unsigned m = 0; m <= 3; ++m) {
      std::uint64_t size = 1;
      for (unsigned r = 0; r < m; ++r) size *= b;
      for (unsigned t = 0; t <= m; ++t) {
        const std::uint64_t start = gen.uniform(0, 5) * size;
        const auto pts = generate_range(spec, start, size);
        CHECK(check_net(pts, b, t, m, spec.dimension()).ok ==
              oracle::is_net(as_coords(pts), b, t, m));
      }
    }
  }
}

TEST_CASE("rank condition implies the net property") {
  for (unsigned p : {2u, 3u, 5u})
    for (unsigned s = 1; s <= std::min(p, 3u); ++s) {
      const auto mats = pascal_matrices(p, s, 6);
      bool rank = true;
      for (unsigned m = 0; m <= 3; ++m) rank = rank && check_rank_condition(mats, 0, m);
      REQUIRE(rank);
      CHECK(check_sequence_property(SequenceSpec::digital(p, mats), p, 0, s, 3, 3));
    }
}

TEST_CASE("point files round trip exactly") {
  std::vector<IndexedPoint> pts;
  const auto spec = SequenceSpec::parse("halton:2,3,5");
  for (std::uint64_t n = 0; n < 100; ++n) pts.push_back({n * 7, spec.point(n * 7)});
  std::ostringstream out;
  write_points_csv(out, pts);
  CHECK(out.str().rfind("n,dim,base_1,prec_1,num_1,float_1,base_2", 0) == 0);
  std::istringstream in(out.str());
  const auto back = read_points_csv(in);
  REQUIRE(back.size() == pts.size());
  for (std::size_t i = 0; i < pts.size(); ++i) {
    CHECK(back[i].n == pts[i].n);
    for (std::size_t c = 0; c < 3; ++c)
      CHECK(back[i].point.coords[c].identical(pts[i].point.coords[c]));
  }
}
