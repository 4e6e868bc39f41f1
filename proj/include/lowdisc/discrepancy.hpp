#pragma once

// Exact extreme and star discrepancy of finite point multisets, plus the
// windowed (lower) estimate of the uniform discrepancy sup_k D_N(x_{n+k}).
//
// All values are exact rationals. Coordinates of one dimension are brought
// to a common denominator (lcm of their b^prec) and compared as integers.

#include "lowdisc/generators.hpp"
#include "lowdisc/transforms.hpp"

#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace lowdisc {

enum class Method { exact_1d, exact_grid, star_only };
enum class Mode { extreme, star };

std::string_view to_string(Method method);
Mode parse_mode(const std::string& text);

/// One side of a half-open box. lo_closed: points sitting exactly at lo are
/// inside (the face is [lo, ...)); otherwise the box starts just above lo.
/// hi_closed: points sitting exactly at hi are inside (the box ends just
/// above hi); otherwise the face is [..., hi).
struct BoxSide {
  Rational lo = 0;
  Rational hi = 1;
  bool lo_closed = true;
  bool hi_closed = false;
};

struct Box {
  std::vector<BoxSide> sides;
};

std::string to_string(const Box& box);

struct WeightedPoint {
  Point point;
  std::uint64_t weight = 1;
};

struct DiscrepancyReport {
  std::uint64_t N = 0;
  Rational value = 0;
  Box witness;
  /// +1: count/N - vol(witness) = value; -1: vol(witness) - count/N = value.
  int witness_sign = 1;
  Method method = Method::exact_1d;
};

/// Groups value-equal points and sums their weights.
std::vector<WeightedPoint> merge_points(std::span<const Point> points);

DiscrepancyReport extreme_discrepancy_1d(std::span<const BRational> points);
DiscrepancyReport extreme_discrepancy_1d(std::span<const WeightedPoint> points);

inline constexpr std::uint64_t kDefaultBoxBudget = std::uint64_t{1} << 27;

/// Sup over all boxes whose faces sit at 0, 1 or a point coordinate, with
/// both attainment limits per face.
DiscrepancyReport extreme_discrepancy_grid(std::span<const Point> points,
                                           std::uint64_t budget = kDefaultBoxBudget);
DiscrepancyReport extreme_discrepancy_grid(std::span<const WeightedPoint> points,
                                           std::uint64_t budget = kDefaultBoxBudget);

/// Sup over boxes anchored at the origin.
DiscrepancyReport star_discrepancy(std::span<const Point> points,
                                   std::uint64_t budget = kDefaultBoxBudget);
DiscrepancyReport star_discrepancy(std::span<const WeightedPoint> points,
                                   std::uint64_t budget = kDefaultBoxBudget);

/// extreme -> exact_1d for s = 1 and exact_grid otherwise; star -> star_only.
DiscrepancyReport discrepancy(std::span<const WeightedPoint> points, Mode mode,
                              std::uint64_t budget = kDefaultBoxBudget);

/// count/N - vol for the box, recounted directly from the points.
Rational box_deviation(std::span<const WeightedPoint> points, const Box& box);
std::uint64_t box_count(std::span<const WeightedPoint> points, const Box& box);

/// The multiset {x_{g(n)} : shift <= n < shift + N} with multiplicities.
std::vector<WeightedPoint> transformed_points(const SequenceSpec& spec,
                                              const IndexTransform& transform,
                                              std::uint64_t shift, std::uint64_t N);

/// max over 0 <= k <= k_max of D_N(x_{g(n+k)}): a lower estimate of the
/// uniform discrepancy.
struct WindowedReport {
  std::uint64_t N = 0;
  std::uint64_t k_max = 0;
  std::uint64_t argmax_k = 0;
  Rational value = 0;
  DiscrepancyReport at_argmax;
  bool lower_estimate = true;
};

WindowedReport windowed_uniform_discrepancy(const SequenceSpec& spec,
                                            const IndexTransform& transform,
                                            std::uint64_t N, std::uint64_t k_max,
                                            Mode mode = Mode::extreme,
                                            std::uint64_t budget = kDefaultBoxBudget);

struct ProfileEntry {
  std::uint64_t N = 0;
  std::uint64_t argmax_k = 0;
  Rational value = 0;  // max over the window of D_N
};

/// Windowed estimate for every N = 1..N_max of a one-dimensional sequence,
/// built incrementally per shift. k_max = 0 gives the exact D_N prefix profile.
std::vector<ProfileEntry> windowed_profile_1d(const SequenceSpec& spec,
                                              const IndexTransform& transform,
                                              std::uint64_t N_max, std::uint64_t k_max);

}  // namespace lowdisc
