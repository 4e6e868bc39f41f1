#include "lowdisc/discrepancy.hpp"

#include "lowdisc/parallel.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <type_traits>

namespace lowdisc {

namespace {

using i128 = __int128;

// --- Integer plumbing -------------------------------------------------------

bool fits_i128(const BigInt& magnitude) {
  return magnitude >= 0 && (magnitude == 0 || msb(magnitude) < 120);
}

template <class Int>
Int from_big(const BigInt& x);

template <>
BigInt from_big<BigInt>(const BigInt& x) {
  return x;
}

template <>
i128 from_big<i128>(const BigInt& x) {
  const bool negative = x < 0;
  BigInt rest = negative ? BigInt(-x) : x;
  i128 out = 0;
  unsigned shift = 0;
  while (rest > 0) {
    out |= i128(static_cast<std::uint64_t>(rest & 0xFFFFFFFFFFFFFFFFull)) << shift;
    rest >>= 64;
    shift += 64;
  }
  return negative ? -out : out;
}

template <>
std::int64_t from_big<std::int64_t>(const BigInt& x) {
  return static_cast<std::int64_t>(x);
}

BigInt to_big(const BigInt& x) { return x; }
BigInt to_big(std::int64_t x) { return BigInt(x); }
BigInt to_big(i128 x) {
  const bool negative = x < 0;
  unsigned __int128 mag = negative ? static_cast<unsigned __int128>(-(x + 1)) + 1
                                   : static_cast<unsigned __int128>(x);
  BigInt out = static_cast<std::uint64_t>(mag >> 64);
  out <<= 64;
  out += static_cast<std::uint64_t>(mag);
  return negative ? BigInt(-out) : out;
}

BigInt lcm_of_denominators(std::span<const BRational* const> xs) {
  BigInt l = 1;
  std::map<unsigned, unsigned> max_prec;  // base -> largest precision
  for (const BRational* x : xs) {
    auto& p = max_prec[x->base()];
    p = std::max(p, x->prec());
  }
  for (const auto& [base, prec] : max_prec)
    l = boost::multiprecision::lcm(l, boost::multiprecision::pow(BigInt(base), prec));
  return l;
}

BigInt scaled_numerator(const BRational& x, const BigInt& den) {
  return x.num() * (den / x.denominator());
}

void require_points(std::uint64_t N) {
  if (N == 0) throw Error(ErrorCode::invalid_argument, "discrepancy of an empty point set");
}

// --- One-dimensional closed form -------------------------------------------

struct Axis1D {
  std::vector<BigInt> values;  // strictly increasing numerators over den
  std::vector<std::uint64_t> weights;
  BigInt den;
  std::uint64_t N = 0;
};

Axis1D build_axis_1d(std::span<const WeightedPoint> points) {
  Axis1D axis;
  std::vector<const BRational*> xs;
  xs.reserve(points.size());
  for (const auto& wp : points) {
    if (wp.point.dim() != 1)
      throw Error(ErrorCode::invalid_argument, "one-dimensional discrepancy needs 1D points");
    xs.push_back(&wp.point.coords[0]);
  }
  axis.den = lcm_of_denominators(xs);
  std::vector<std::pair<BigInt, std::uint64_t>> items;
  items.reserve(points.size());
  for (const auto& wp : points) {
    items.emplace_back(scaled_numerator(wp.point.coords[0], axis.den), wp.weight);
    axis.N = checked_add(axis.N, wp.weight);
  }
  std::sort(items.begin(), items.end(),
            [](const auto& a, const auto& b) { return a.first < b.first; });
  for (auto& [v, w] : items) {
    if (w == 0) continue;
    if (!axis.values.empty() && axis.values.back() == v) {
      axis.weights.back() += w;
    } else {
      axis.values.push_back(std::move(v));
      axis.weights.push_back(w);
    }
  }
  return axis;
}

// Cuts: 0 = origin, 2i+1 = just below value i, 2i+2 = just above value i.
// E(cut) * N * den = count_below(cut) * den - N * position(cut).
template <class Int>
DiscrepancyReport scan_axis_1d(const Axis1D& axis) {
  const Int L = from_big<Int>(axis.den);
  const Int N = static_cast<Int>(axis.N);
  Int max_e = 0, min_e = 0, cum = 0;
  std::size_t max_cut = 0, min_cut = 0;
  for (std::size_t i = 0; i < axis.values.size(); ++i) {
    const Int u = from_big<Int>(axis.values[i]);
    const Int before = cum * L - N * u;
    if (before < min_e) { min_e = before; min_cut = 2 * i + 1; }
    if (before > max_e) { max_e = before; max_cut = 2 * i + 1; }
    cum += static_cast<Int>(axis.weights[i]);
    const Int after = cum * L - N * u;
    if (after < min_e) { min_e = after; min_cut = 2 * i + 2; }
    if (after > max_e) { max_e = after; max_cut = 2 * i + 2; }
  }
  DiscrepancyReport report;
  report.N = axis.N;
  report.method = Method::exact_1d;
  report.value = Rational(to_big(max_e - min_e), axis.den * axis.N);
  const std::size_t lo_cut = std::min(max_cut, min_cut), hi_cut = std::max(max_cut, min_cut);
  report.witness_sign = hi_cut == max_cut ? 1 : -1;
  BoxSide side;
  if (lo_cut == 0) {
    side.lo = 0;
    side.lo_closed = true;
  } else {
    side.lo = Rational(axis.values[(lo_cut - 1) / 2], axis.den);
    side.lo_closed = lo_cut % 2 == 1;
  }
  side.hi = Rational(axis.values[(hi_cut - 1) / 2], axis.den);
  side.hi_closed = hi_cut % 2 == 0;
  report.witness.sides.push_back(side);
  return report;
}

DiscrepancyReport exact_1d(const Axis1D& axis) {
  require_points(axis.N);
  if (fits_i128(axis.den * axis.N)) return scan_axis_1d<i128>(axis);
  return scan_axis_1d<BigInt>(axis);
}

// --- Critical grid ------------------------------------------------------------

struct GridAxis {
  std::vector<BigInt> values;  // sorted distinct numerators
  BigInt den;
};

struct Grid {
  unsigned s = 0;
  std::uint64_t N = 0;
  std::vector<GridAxis> axes;
  std::vector<std::size_t> strides;  // over (m_i + 1) per axis
  std::vector<std::uint64_t> cum;    // weight with rank_i < r_i for all i
};

Grid build_grid(std::span<const WeightedPoint> points) {
  Grid g;
  if (points.empty()) require_points(0);
  g.s = static_cast<unsigned>(points.front().point.dim());
  if (g.s == 0) throw Error(ErrorCode::invalid_argument, "zero-dimensional points");
  g.axes.resize(g.s);
  std::vector<std::vector<std::size_t>> ranks(points.size(), std::vector<std::size_t>(g.s));
  for (unsigned i = 0; i < g.s; ++i) {
    std::vector<const BRational*> xs;
    for (const auto& wp : points) {
      if (wp.point.dim() != g.s) throw Error(ErrorCode::invalid_argument, "mixed dimensions");
      xs.push_back(&wp.point.coords[i]);
    }
    GridAxis& axis = g.axes[i];
    axis.den = lcm_of_denominators(xs);
    std::vector<BigInt> scaled;
    scaled.reserve(points.size());
    for (const auto* x : xs) scaled.push_back(scaled_numerator(*x, axis.den));
    axis.values = scaled;
    std::sort(axis.values.begin(), axis.values.end());
    axis.values.erase(std::unique(axis.values.begin(), axis.values.end()), axis.values.end());
    for (std::size_t n = 0; n < points.size(); ++n)
      ranks[n][i] = static_cast<std::size_t>(
          std::lower_bound(axis.values.begin(), axis.values.end(), scaled[n]) -
          axis.values.begin());
  }
  g.strides.assign(g.s, 1);
  std::size_t total = 1;
  for (unsigned i = g.s; i-- > 0;) {
    g.strides[i] = total;
    total *= g.axes[i].values.size() + 1;
  }
  g.cum.assign(total, 0);
  for (std::size_t n = 0; n < points.size(); ++n) {
    std::size_t cell = 0;
    for (unsigned i = 0; i < g.s; ++i) cell += (ranks[n][i] + 1) * g.strides[i];
    g.cum[cell] += points[n].weight;
    g.N = checked_add(g.N, points[n].weight);
  }
  require_points(g.N);
  for (unsigned i = 0; i < g.s; ++i) {
    const std::size_t extent = g.axes[i].values.size() + 1;
    for (std::size_t idx = 0; idx < total; ++idx)
      if ((idx / g.strides[i]) % extent != 0) g.cum[idx] += g.cum[idx - g.strides[i]];
  }
  return g;
}

constexpr int kOrigin = -1;  // face at 0 (as lower) or 1 (as upper)

template <class Int>
struct Candidate {
  std::uint32_t rank_lo, rank_hi;  // points with rank_lo <= rank < rank_hi
  Int length;
  int lo_index, hi_index;          // value index or kOrigin
  bool lo_closed, hi_closed;
};

template <class Int>
std::vector<Candidate<Int>> candidates(const GridAxis& axis, bool star, bool positive) {
  const auto m = static_cast<std::uint32_t>(axis.values.size());
  std::vector<Int> v(m);
  for (std::uint32_t i = 0; i < m; ++i) v[i] = from_big<Int>(axis.values[i]);
  const Int one = from_big<Int>(axis.den);
  std::vector<Candidate<Int>> out;
  if (positive) {
    // Smallest boxes keeping their points: both faces on coordinates, closed.
    for (std::uint32_t a = 0; a < m; ++a) {
      if (star && a > 0) break;
      for (std::uint32_t c = a; c < m; ++c) {
        if (star)
          out.push_back({0, c + 1, v[c], kOrigin, static_cast<int>(c), true, true});
        else
          out.push_back({a, c + 1, v[c] - v[a], static_cast<int>(a), static_cast<int>(c), true, true});
      }
    }
  } else {
    // Largest boxes avoiding their boundary points.
    for (int a = kOrigin; a < static_cast<int>(m); ++a) {
      if (star && a != kOrigin) break;
      const Int lo = a == kOrigin ? Int(0) : v[a];
      const std::uint32_t rank_lo = a == kOrigin ? 0 : static_cast<std::uint32_t>(a) + 1;
      for (int c = 0; c <= static_cast<int>(m); ++c) {
        const bool at_one = c == static_cast<int>(m);
        const Int hi = at_one ? one : v[c];
        if (!(lo < hi)) continue;
        out.push_back({rank_lo, static_cast<std::uint32_t>(c), hi - lo, a,
                       at_one ? kOrigin : c, a == kOrigin, false});
      }
    }
  }
  return out;
}

template <class Int>
struct Best {
  Int dev = 0;
  bool found = false;
  std::uint64_t flat = 0;
  int sign = 1;
};

template <class Int>
Best<Int> scan_candidates(const Grid& g, const std::vector<std::vector<Candidate<Int>>>& cands,
                          int sign, const Int& prod_den) {
  std::uint64_t total = 1;
  for (const auto& c : cands) total *= c.size();
  Best<Int> best;
  best.sign = sign;
  if (total == 0) return best;
  const std::uint64_t chunks = std::min<std::uint64_t>(total, 256);
  std::vector<Best<Int>> partial(chunks);
  const Int N = static_cast<Int>(g.N);
  const unsigned s = g.s;
  const unsigned masks = 1u << s;
  parallel_for(chunks, [&](std::size_t chunk) {
    const std::uint64_t begin = total * chunk / chunks, end = total * (chunk + 1) / chunks;
    std::vector<std::size_t> digit(s);
    std::uint64_t rest = begin;
    for (unsigned i = s; i-- > 0;) {
      digit[i] = rest % cands[i].size();
      rest /= cands[i].size();
    }
    Best<Int> local;
    local.sign = sign;
    std::vector<std::ptrdiff_t> delta(s);
    for (std::uint64_t flat = begin; flat < end; ++flat) {
      std::ptrdiff_t base = 0;
      Int volume = 1;
      for (unsigned i = 0; i < s; ++i) {
        const auto& c = cands[i][digit[i]];
        base += static_cast<std::ptrdiff_t>(c.rank_hi * g.strides[i]);
        delta[i] = (static_cast<std::ptrdiff_t>(c.rank_lo) - static_cast<std::ptrdiff_t>(c.rank_hi)) *
                   static_cast<std::ptrdiff_t>(g.strides[i]);
        volume *= c.length;
      }
      std::int64_t count = 0;
      for (unsigned mask = 0; mask < masks; ++mask) {
        std::ptrdiff_t idx = base;
        for (unsigned i = 0; i < s; ++i)
          if (mask >> i & 1u) idx += delta[i];
        const auto v = static_cast<std::int64_t>(g.cum[static_cast<std::size_t>(idx)]);
        count += (std::popcount(mask) & 1) ? -v : v;
      }
      const Int c = static_cast<Int>(count);
      const Int dev = sign > 0 ? c * prod_den - N * volume : N * volume - c * prod_den;
      if (!local.found || dev > local.dev) {
        local.dev = dev;
        local.found = true;
        local.flat = flat;
      }
      for (unsigned i = s; i-- > 0;) {  // odometer, last axis fastest
        if (++digit[i] < cands[i].size()) break;
        digit[i] = 0;
      }
    }
    partial[chunk] = local;
  });
  for (const auto& p : partial)
    if (p.found && (!best.found || p.dev > best.dev)) best = p;
  return best;
}

template <class Int>
DiscrepancyReport grid_discrepancy(const Grid& g, bool star, std::uint64_t budget) {
  std::vector<std::vector<Candidate<Int>>> pos(g.s), neg(g.s);
  std::uint64_t pos_total = 1, neg_total = 1;
  Int prod_den = 1;
  BigInt prod_den_big = 1;
  for (unsigned i = 0; i < g.s; ++i) {
    pos[i] = candidates<Int>(g.axes[i], star, true);
    neg[i] = candidates<Int>(g.axes[i], star, false);
    pos_total = checked_mul(pos_total, pos[i].size());
    neg_total = checked_mul(neg_total, neg[i].size());
    prod_den *= from_big<Int>(g.axes[i].den);
    prod_den_big *= g.axes[i].den;
  }
  if (checked_add(pos_total, neg_total) > budget)
    throw Error(ErrorCode::budget_exceeded,
                "box enumeration of " + std::to_string(pos_total + neg_total) +
                    " boxes exceeds budget " + std::to_string(budget) +
                    (star ? "" : "; try --mode star"));
  Best<Int> best = scan_candidates(g, pos, +1, prod_den);
  const Best<Int> best_neg = scan_candidates(g, neg, -1, prod_den);
  if (best_neg.found && (!best.found || best_neg.dev > best.dev)) best = best_neg;

  DiscrepancyReport report;
  report.N = g.N;
  report.method = star ? Method::star_only : Method::exact_grid;
  report.value = Rational(to_big(best.dev), prod_den_big * g.N);
  report.witness_sign = best.sign;
  const auto& chosen = best.sign > 0 ? pos : neg;
  std::uint64_t rest = best.flat;
  report.witness.sides.resize(g.s);
  for (unsigned i = g.s; i-- > 0;) {
    const auto& c = chosen[i][rest % chosen[i].size()];
    rest /= chosen[i].size();
    const GridAxis& axis = g.axes[i];
    BoxSide& side = report.witness.sides[i];
    side.lo = c.lo_index == kOrigin ? Rational(0) : Rational(axis.values[c.lo_index], axis.den);
    side.hi = c.hi_index == kOrigin ? Rational(1) : Rational(axis.values[c.hi_index], axis.den);
    side.lo_closed = c.lo_closed;
    side.hi_closed = c.hi_closed;
  }
  return report;
}

DiscrepancyReport grid_dispatch(std::span<const WeightedPoint> points, bool star,
                                std::uint64_t budget) {
  const Grid g = build_grid(points);
  BigInt prod = g.N;
  for (const auto& axis : g.axes) prod *= axis.den;
  if (fits_i128(prod)) return grid_discrepancy<i128>(g, star, budget);
  return grid_discrepancy<BigInt>(g, star, budget);
}

std::vector<WeightedPoint> as_weighted(std::span<const Point> points) {
  std::vector<WeightedPoint> out;
  out.reserve(points.size());
  for (const auto& p : points) out.push_back({p, 1});
  return out;
}

}  // namespace

std::string_view to_string(Method method) {
  switch (method) {
    case Method::exact_1d: return "exact-1d";
    case Method::exact_grid: return "exact-grid";
    case Method::star_only: return "star-only";
  }
  return "unknown";
}

Mode parse_mode(const std::string& text) {
  if (text == "extreme") return Mode::extreme;
  if (text == "star") return Mode::star;
  throw Error(ErrorCode::parse_error, "mode must be 'extreme' or 'star', got '" + text + "'");
}

std::string to_string(const Box& box) {
  // lower face "[a" (points at a inside) or "(a"; upper "b]" or "b)".
  std::string out;
  for (std::size_t i = 0; i < box.sides.size(); ++i) {
    const auto& side = box.sides[i];
    if (i) out += " x ";
    out += side.lo_closed ? "[" : "(";
    out += to_fraction_string(side.lo) + ";" + to_fraction_string(side.hi);
    out += side.hi_closed ? "]" : ")";
  }
  return out;
}

std::vector<WeightedPoint> merge_points(std::span<const Point> points) {
  std::vector<const Point*> order;
  order.reserve(points.size());
  for (const auto& p : points) order.push_back(&p);
  auto less = [](const Point* a, const Point* b) {
    return std::lexicographical_compare(a->coords.begin(), a->coords.end(), b->coords.begin(),
                                        b->coords.end());
  };
  std::stable_sort(order.begin(), order.end(), less);
  std::vector<WeightedPoint> out;
  for (const Point* p : order) {
    if (!out.empty() && out.back().point == *p) ++out.back().weight;
    else out.push_back({*p, 1});
  }
  return out;
}

DiscrepancyReport extreme_discrepancy_1d(std::span<const BRational> points) {
  std::vector<WeightedPoint> weighted;
  weighted.reserve(points.size());
  for (const auto& x : points) weighted.push_back({Point{{x}}, 1});
  return extreme_discrepancy_1d(std::span<const WeightedPoint>(weighted));
}

DiscrepancyReport extreme_discrepancy_1d(std::span<const WeightedPoint> points) {
  return exact_1d(build_axis_1d(points));
}

DiscrepancyReport extreme_discrepancy_grid(std::span<const Point> points, std::uint64_t budget) {
  const auto weighted = as_weighted(points);
  return extreme_discrepancy_grid(std::span<const WeightedPoint>(weighted), budget);
}

DiscrepancyReport extreme_discrepancy_grid(std::span<const WeightedPoint> points,
                                           std::uint64_t budget) {
  return grid_dispatch(points, false, budget);
}

DiscrepancyReport star_discrepancy(std::span<const Point> points, std::uint64_t budget) {
  const auto weighted = as_weighted(points);
  return star_discrepancy(std::span<const WeightedPoint>(weighted), budget);
}

DiscrepancyReport star_discrepancy(std::span<const WeightedPoint> points, std::uint64_t budget) {
  return grid_dispatch(points, true, budget);
}

DiscrepancyReport discrepancy(std::span<const WeightedPoint> points, Mode mode,
                              std::uint64_t budget) {
  if (points.empty()) require_points(0);
  if (mode == Mode::star) return star_discrepancy(points, budget);
  if (points.front().point.dim() == 1) return extreme_discrepancy_1d(points);
  return extreme_discrepancy_grid(points, budget);
}

std::uint64_t box_count(std::span<const WeightedPoint> points, const Box& box) {
  std::uint64_t count = 0;
  for (const auto& wp : points) {
    if (wp.point.dim() != box.sides.size())
      throw Error(ErrorCode::invalid_argument, "box and point dimensions differ");
    bool inside = true;
    for (std::size_t i = 0; i < box.sides.size() && inside; ++i) {
      const Rational x = wp.point.coords[i].to_rational();
      const auto& side = box.sides[i];
      const bool above_lo = side.lo_closed ? x >= side.lo : x > side.lo;
      const bool below_hi = side.hi_closed ? x <= side.hi : x < side.hi;
      inside = above_lo && below_hi;
    }
    if (inside) count += wp.weight;
  }
  return count;
}

Rational box_deviation(std::span<const WeightedPoint> points, const Box& box) {
  std::uint64_t N = 0;
  for (const auto& wp : points) N += wp.weight;
  require_points(N);
  Rational volume = 1;
  for (const auto& side : box.sides) volume *= side.hi - side.lo;
  return Rational(box_count(points, box), N) - volume;
}

std::vector<WeightedPoint> transformed_points(const SequenceSpec& spec,
                                              const IndexTransform& transform,
                                              std::uint64_t shift, std::uint64_t N) {
  const Counts hist = histogram(transform, shift, checked_add(shift, N));
  std::vector<std::uint64_t> indices;
  indices.reserve(hist.size());
  for (const auto& [index, weight] : hist) indices.push_back(index);
  const auto pts = generate(spec, indices);
  std::vector<WeightedPoint> out;
  out.reserve(pts.size());
  std::size_t i = 0;
  for (const auto& [index, weight] : hist) out.push_back({pts[i++], weight});
  return out;
}

WindowedReport windowed_uniform_discrepancy(const SequenceSpec& spec,
                                            const IndexTransform& transform, std::uint64_t N,
                                            std::uint64_t k_max, Mode mode,
                                            std::uint64_t budget) {
  require_points(N);
  std::vector<DiscrepancyReport> per_shift(k_max + 1);
  parallel_for(k_max + 1, [&](std::size_t k) {
    const auto pts = transformed_points(spec, transform, k, N);
    per_shift[k] = discrepancy(pts, mode, budget);
  });
  WindowedReport out;
  out.N = N;
  out.k_max = k_max;
  for (std::uint64_t k = 0; k <= k_max; ++k)
    if (k == 0 || per_shift[k].value > out.value) {
      out.value = per_shift[k].value;
      out.argmax_k = k;
    }
  out.at_argmax = per_shift[out.argmax_k];
  return out;
}

// --- Incremental 1D profile ----------------------------------------------------

namespace {

constexpr std::uint64_t kBlockedProfileFrom = 64;

template <class Int>
void profile_lane(const std::vector<Int>& u, Int L, std::uint64_t N_max, std::uint64_t k_begin,
                  std::uint64_t k_end, std::uint64_t k_step, std::vector<Int>& best,
                  std::vector<std::uint64_t>& best_k) {
  std::vector<Int> values;
  std::vector<std::uint64_t> weights;
  values.reserve(N_max);
  weights.reserve(N_max);
  for (std::uint64_t k = k_begin; k < k_end; k += k_step) {
    values.clear();
    weights.clear();
    for (std::uint64_t N = 1; N <= N_max; ++N) {
      const Int x = u[k + N - 1];
      auto it = std::lower_bound(values.begin(), values.end(), x);
      const auto pos = static_cast<std::size_t>(it - values.begin());
      if (it != values.end() && *it == x) {
        ++weights[pos];
      } else {
        values.insert(it, x);
        weights.insert(weights.begin() + static_cast<std::ptrdiff_t>(pos), 1);
      }
      const Int n = static_cast<Int>(N);
      Int cum = 0, max_e = 0, min_e = 0;
      for (std::size_t i = 0; i < values.size(); ++i) {
        const Int nu = n * values[i];
        const Int before = cum * L - nu;
        if (before < min_e) min_e = before;
        cum += static_cast<Int>(weights[i]);
        const Int after = cum * L - nu;
        if (after > max_e) max_e = after;
      }
      const Int d = max_e - min_e;
      if (d > best[N] || (d == best[N] && k < best_k[N])) {
        best[N] = d;
        best_k[N] = k;
      }
    }
  }
}

// The same recurrence for 64-bit values, organized for long windows. Cuts are
// kept in rank order and split into blocks; each block keeps the upper hull of
// (v, cum L) and the lower hull of (v, cum_before L), so max/min of
// cum L - n v over a block is a binary search, and an insertion only rebuilds
// one block and bumps the offsets of the blocks after it.
class BlockedProfile {
 public:
  BlockedProfile(std::vector<std::int64_t> sorted_values, std::int64_t L)
      : v_(std::move(sorted_values)), L_(L), w_(v_.size(), 0) {
    const std::size_t M = v_.size();
    B_ = std::max<std::size_t>(16, static_cast<std::size_t>(std::sqrt(double(M))));
    blocks_.resize((M + B_ - 1) / B_);
  }

  void insert(std::size_t rank) {
    ++w_[rank];
    const std::size_t b = rank / B_;
    rebuild(b);
    for (std::size_t i = b + 1; i < blocks_.size(); ++i) ++blocks_[i].offset;
  }

  // N * L * D for the current multiset of n points.
  std::int64_t scaled_discrepancy(std::int64_t n) const {
    std::int64_t max_e = 0, min_e = 0;
    for (const auto& block : blocks_) {
      if (block.upper.empty()) continue;
      const std::int64_t base = block.offset * L_;
      max_e = std::max(max_e, base + best(block.upper, n, true));
      min_e = std::min(min_e, base + best(block.lower, n, false));
    }
    return max_e - min_e;
  }

 private:
  struct Vertex {
    std::int64_t x, y;
  };
  struct Block {
    std::int64_t offset = 0;
    std::vector<Vertex> upper, lower;
  };

  // Is the turn a -> b -> c clockwise (upper hull keeps b) or counter-clockwise?
  static i128 cross(const Vertex& a, const Vertex& b, const Vertex& c) {
    return i128(b.x - a.x) * (c.y - a.y) - i128(b.y - a.y) * (c.x - a.x);
  }

  static void push(std::vector<Vertex>& hull, Vertex p, bool upper) {
    while (hull.size() >= 2) {
      const i128 turn = cross(hull[hull.size() - 2], hull.back(), p);
      if (upper ? turn >= 0 : turn <= 0)
        hull.pop_back();
      else
        break;
    }
    hull.push_back(p);
  }

  void rebuild(std::size_t b) {
    Block& block = blocks_[b];
    block.upper.clear();
    block.lower.clear();
    std::int64_t cum = 0;
    const std::size_t end = std::min(v_.size(), (b + 1) * B_);
    for (std::size_t j = b * B_; j < end; ++j) {
      if (!w_[j]) continue;
      push(block.lower, {v_[j], cum * L_}, false);
      cum += static_cast<std::int64_t>(w_[j]);
      push(block.upper, {v_[j], cum * L_}, true);
    }
  }

  // max (upper) or min (lower) of y - n x over the hull vertices.
  static std::int64_t best(const std::vector<Vertex>& hull, std::int64_t n, bool upper) {
    std::size_t lo = 0, hi = hull.size() - 1;
    while (lo < hi) {
      const std::size_t mid = (lo + hi) / 2;
      const std::int64_t step = (hull[mid + 1].y - hull[mid].y) - n * (hull[mid + 1].x - hull[mid].x);
      if (upper ? step > 0 : step < 0)
        lo = mid + 1;
      else
        hi = mid;
    }
    return hull[lo].y - n * hull[lo].x;
  }

  std::vector<std::int64_t> v_;
  std::int64_t L_;
  std::vector<std::uint64_t> w_;
  std::size_t B_ = 16;
  std::vector<Block> blocks_;
};

void profile_lane_blocked(const std::vector<std::int64_t>& u, std::int64_t L,
                          std::uint64_t N_max, std::uint64_t k_begin, std::uint64_t k_end,
                          std::uint64_t k_step, std::vector<std::int64_t>& best,
                          std::vector<std::uint64_t>& best_k) {
  for (std::uint64_t k = k_begin; k < k_end; k += k_step) {
    std::vector<std::int64_t> sorted(u.begin() + static_cast<std::ptrdiff_t>(k),
                                     u.begin() + static_cast<std::ptrdiff_t>(k + N_max));
    std::sort(sorted.begin(), sorted.end());
    sorted.erase(std::unique(sorted.begin(), sorted.end()), sorted.end());
    BlockedProfile profile(sorted, L);
    for (std::uint64_t N = 1; N <= N_max; ++N) {
      const std::int64_t x = u[k + N - 1];
      profile.insert(static_cast<std::size_t>(std::lower_bound(sorted.begin(), sorted.end(), x) -
                                              sorted.begin()));
      const std::int64_t d = profile.scaled_discrepancy(static_cast<std::int64_t>(N));
      if (d > best[N] || (d == best[N] && k < best_k[N])) {
        best[N] = d;
        best_k[N] = k;
      }
    }
  }
}

template <class Int>
std::vector<ProfileEntry> run_profile(const std::vector<BigInt>& u_big, const BigInt& den,
                                      std::uint64_t N_max, std::uint64_t k_max) {
  std::vector<Int> u(u_big.size());
  for (std::size_t i = 0; i < u.size(); ++i) u[i] = from_big<Int>(u_big[i]);
  const Int L = from_big<Int>(den);
  const std::uint64_t shifts = k_max + 1;
  const std::uint64_t lanes = std::min<std::uint64_t>(thread_count(), shifts);
  std::vector<std::vector<Int>> best(lanes, std::vector<Int>(N_max + 1, Int(-1)));
  std::vector<std::vector<std::uint64_t>> best_k(
      lanes, std::vector<std::uint64_t>(N_max + 1, std::numeric_limits<std::uint64_t>::max()));
  parallel_for(lanes, [&](std::size_t lane) {
    if constexpr (std::is_same_v<Int, std::int64_t>) {
      if (N_max >= kBlockedProfileFrom) {
        profile_lane_blocked(u, L, N_max, lane, shifts, lanes, best[lane], best_k[lane]);
        return;
      }
    }
    profile_lane<Int>(u, L, N_max, lane, shifts, lanes, best[lane], best_k[lane]);
  });
  std::vector<ProfileEntry> out;
  out.reserve(N_max);
  for (std::uint64_t N = 1; N <= N_max; ++N) {
    Int value = best[0][N];
    std::uint64_t k = best_k[0][N];
    for (std::uint64_t lane = 1; lane < lanes; ++lane)
      if (best[lane][N] > value || (best[lane][N] == value && best_k[lane][N] < k)) {
        value = best[lane][N];
        k = best_k[lane][N];
      }
    out.push_back({N, k, Rational(to_big(value), den * N)});
  }
  return out;
}

}  // namespace

std::vector<ProfileEntry> windowed_profile_1d(const SequenceSpec& spec,
                                              const IndexTransform& transform,
                                              std::uint64_t N_max, std::uint64_t k_max) {
  if (spec.dimension() != 1)
    throw Error(ErrorCode::invalid_argument, "the incremental profile is one-dimensional");
  if (N_max == 0) return {};
  const std::uint64_t length = checked_add(N_max, k_max);
  std::vector<std::uint64_t> index(length);
  for (std::uint64_t i = 0; i < length; ++i) index[i] = transform(i);
  std::vector<std::uint64_t> distinct = index;
  std::sort(distinct.begin(), distinct.end());
  distinct.erase(std::unique(distinct.begin(), distinct.end()), distinct.end());
  const auto pts = generate(spec, distinct);
  std::vector<const BRational*> xs;
  for (const auto& p : pts) xs.push_back(&p.coords[0]);
  const BigInt den = lcm_of_denominators(xs);
  std::vector<BigInt> u(length);
  for (std::uint64_t i = 0; i < length; ++i) {
    const auto pos = std::lower_bound(distinct.begin(), distinct.end(), index[i]) - distinct.begin();
    u[i] = scaled_numerator(pts[static_cast<std::size_t>(pos)].coords[0], den);
  }
  const BigInt scale = den * N_max;
  if (scale < (BigInt(1) << 60)) return run_profile<std::int64_t>(u, den, N_max, k_max);
  if (fits_i128(scale)) return run_profile<i128>(u, den, N_max, k_max);
  throw Error(ErrorCode::overflow, "profile scale exceeds 120 bits");
}

}  // namespace lowdisc
