#include "lowdisc/bounds.hpp"

#include "lowdisc/digitsum_dist.hpp"
#include "lowdisc/parallel.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

namespace lowdisc {

namespace {

unsigned floor_log(std::uint64_t N, unsigned b) {
  unsigned r = 0;
  for (std::uint64_t p = b; p <= N; p *= b) {
    ++r;
    if (p > N / b) break;
  }
  return r;
}

bool rational_le(const Rational& a, double b) { return a <= Rational(b); }

std::uint64_t max_multiplicity(const Counts& counts) {
  std::uint64_t best = 0;
  for (const auto& [value, count] : counts) best = std::max(best, count);
  return best;
}

// D_N for every N = 1..N_max of a one-dimensional transformed sequence.
std::vector<Rational> prefix_profile(const SequenceSpec& spec, const IndexTransform& g,
                                     std::uint64_t N_max) {
  const auto profile = windowed_profile_1d(spec, g, N_max, 0);
  std::vector<Rational> out(N_max + 1, Rational(0));
  for (const auto& e : profile) out[e.N] = e.value;
  return out;
}

// D_N for the requested Ns (sorted or not).
std::vector<Rational> measure_many(const SequenceSpec& spec, const IndexTransform& g,
                                   const std::vector<std::uint64_t>& Ns, Mode mode) {
  std::vector<Rational> out(Ns.size());
  if (Ns.empty()) return out;
  if (spec.dimension() == 1 && mode == Mode::extreme) {
    const auto profile = prefix_profile(spec, g, *std::max_element(Ns.begin(), Ns.end()));
    for (std::size_t i = 0; i < Ns.size(); ++i) out[i] = profile[Ns[i]];
    return out;
  }
  for (std::size_t i = 0; i < Ns.size(); ++i)
    out[i] = discrepancy(transformed_points(spec, g, 0, Ns[i]), mode).value;
  return out;
}

}  // namespace

double log_floor1(double x) { return x > std::numbers::e ? std::log(x) : 1.0; }

// --- Envelope ---------------------------------------------------------------

Envelope Envelope::constant(double c) {
  Envelope e;
  e.source_ = Source::constant;
  e.c_ = c;
  return e;
}

Envelope Envelope::analytic(double C, unsigned s) {
  Envelope e;
  e.source_ = Source::analytic;
  e.c_ = C;
  e.s_ = s;
  return e;
}

Envelope Envelope::measured(const SequenceSpec& spec, std::uint64_t v_max, std::uint64_t k_max) {
  Envelope e;
  e.source_ = Source::measured;
  e.table_.assign(v_max + 1, 0.0);
  const auto identity = IndexTransform::identity();
  if (spec.dimension() == 1) {
    for (const auto& entry : windowed_profile_1d(spec, identity, v_max, k_max))
      e.table_[entry.N] = to_double(entry.value * entry.N);
  } else {
    for (std::uint64_t v = 1; v <= v_max; ++v)
      e.table_[v] = to_double(
          windowed_uniform_discrepancy(spec, identity, v, k_max).value * v);
  }
  for (std::uint64_t v = 1; v <= v_max; ++v) e.table_[v] = std::max(e.table_[v], e.table_[v - 1]);
  return e;
}

Envelope Envelope::appendix_vdc(unsigned b) {
  require_base(b);
  Envelope e;
  e.source_ = Source::appendix;
  e.b_ = b;
  return e;
}

double Envelope::operator()(std::uint64_t v) const {
  switch (source_) {
    case Source::constant: return c_;
    case Source::analytic: return c_ * std::pow(log_floor1(double(v)), double(s_));
    case Source::measured:
      if (v >= table_.size())
        throw Error(ErrorCode::out_of_table, "measured envelope covers v <= " +
                                                 std::to_string(table_limit()) + ", asked " +
                                                 std::to_string(v));
      return table_[v];
    case Source::appendix: return v == 0 ? 0.0 : (2.0 * b_ - 1.0) * (floor_log(v, b_) + 1);
  }
  return 0;
}

std::string_view to_string(Envelope::Source source) {
  switch (source) {
    case Envelope::Source::constant: return "constant";
    case Envelope::Source::analytic: return "analytic";
    case Envelope::Source::measured: return "measured";
    case Envelope::Source::appendix: return "appendix";
  }
  return "unknown";
}

std::string Envelope::describe() const {
  switch (source_) {
    case Source::constant: return "constant:" + std::to_string(c_);
    case Source::analytic:
      return "analytic:" + std::to_string(c_) + "*log^" + std::to_string(s_);
    case Source::measured: return "measured:v<=" + std::to_string(table_limit());
    case Source::appendix: return "appendix:b=" + std::to_string(b_);
  }
  return "unknown";
}

// --- General theorem ----------------------------------------------------------

std::uint64_t general_lower(const IndexTransform& g, const DivisibilityChain& chain, unsigned d) {
  if (d >= chain.size())
    throw Error(ErrorCode::invalid_argument, "chain too short for level " + std::to_string(d));
  return max_multiplicity(block_counts_G(g, 0, d, chain));
}

GeneralUpper general_upper(const IndexTransform& g, const DivisibilityChain& chain,
                           const Envelope& f, unsigned d, std::uint64_t a_window) {
  if (d + 1 >= chain.size())
    throw Error(ErrorCode::invalid_argument,
                "general upper bound at level " + std::to_string(d) + " needs N_" +
                    std::to_string(d + 1));
  const CountingProfile profile = counting_profile(g, chain, d, a_window);
  GeneralUpper out;
  out.exact_counts = true;
  for (const auto& level : profile.levels) {
    if (!level.unimodal)
      throw Error(ErrorCode::hypothesis_failed,
                  "G_{A,j} not unimodal at A=" + std::to_string(level.violating_A.value_or(0)) +
                      ", j=" + std::to_string(level.j));
    UpperTerm term;
    term.j = level.j;
    term.ratio = chain[level.j + 1] / chain[level.j];
    term.G = level.G;
    term.v = level.v;
    term.f_v = f(level.v);
    term.term = double(term.ratio) * double(term.G) * term.f_v;
    out.value += term.term;
    out.exact_counts = out.exact_counts && level.exact;
    out.terms.push_back(term);
  }
  return out;
}

Rational measured_discrepancy(const SequenceSpec& spec, const IndexTransform& g, std::uint64_t N,
                              Mode mode) {
  return discrepancy(transformed_points(spec, g, 0, N), mode).value * N;
}

std::vector<SandwichRow> general_sandwich(const SequenceSpec& spec, const IndexTransform& g,
                                          const DivisibilityChain& chain, const Envelope& f,
                                          unsigned d_max) {
  std::vector<SandwichRow> rows(d_max + 1);
  for (unsigned d = 0; d <= d_max; ++d) {
    SandwichRow& row = rows[d];
    row.d = d;
    row.N = chain[d];
    row.lower = general_lower(g, chain, d);
    row.measured = measured_discrepancy(spec, g, row.N);
    row.upper = general_upper(g, chain, f, d).value;
    row.holds = Rational(row.lower) <= row.measured && rational_le(row.measured, row.upper);
  }
  return rows;
}

// --- Sum-of-digits envelopes -------------------------------------------------

SodCheck sod_envelope_check(const SequenceSpec& spec, unsigned q, unsigned d_max,
                            unsigned d_cal, double kappa, std::uint64_t level_base, Mode mode) {
  require_base(q);
  const std::uint64_t base = level_base ? level_base : q;
  const auto sod = IndexTransform::sum_of_digits(q);
  SodCheck out;
  out.q = q;
  out.s = spec.dimension();
  out.kappa = kappa;
  out.rows.resize(d_max);
  // G_{A,j} = G_{0,j}(. - s_q(A)), so unimodality of the digit-sum
  // distribution at every level covers every block.
  for (unsigned j = 0; j <= d_max && out.unimodal; ++j)
    out.unimodal = is_unimodal(distribution(q, j).counts);

  parallel_for(d_max, [&](std::size_t i) {
    SodRow& row = out.rows[i];
    row.d = static_cast<unsigned>(i + 1);
    row.N = checked_pow(base, row.d);
    const auto points = transformed_points(spec, sod, 0, row.N);
    row.measured = discrepancy(points, mode).value;
    std::uint64_t mult = 0;
    for (const auto& wp : points) mult = std::max(mult, wp.weight);
    row.exact_lower = Rational(mult, row.N);
    row.scaled = to_double(row.measured) * std::sqrt(std::log(double(row.N)));
    row.calibration = row.d <= d_cal;
  });

  double c2 = std::numeric_limits<double>::infinity(), c3 = 0;
  for (const auto& row : out.rows) {
    if (!row.calibration) continue;
    const double L = std::log(double(row.N));
    c2 = std::min(c2, row.scaled);
    c3 = std::max(c3, row.scaled / std::pow(log_floor1(L), double(out.s)));
  }
  out.c2 = std::isfinite(c2) ? c2 : 0;
  out.c3 = c3;
  out.holds = out.unimodal && !out.rows.empty();
  for (auto& row : out.rows) {
    const double L = std::log(double(row.N));
    row.lower_fit = out.c2 / (kappa * std::sqrt(L));
    row.upper_fit = kappa * out.c3 * std::pow(log_floor1(L), double(out.s)) / std::sqrt(L);
    // Star boxes only see a duplicate point through one of 2^s corners.
    const Rational lower_side =
        mode == Mode::star ? row.measured * BigInt(BigInt(1) << out.s) : row.measured;
    row.holds = lower_side >= row.exact_lower && Rational(row.lower_fit) <= row.measured &&
                rational_le(row.measured, row.upper_fit);
    out.holds = out.holds && row.holds;
  }
  return out;
}

// --- Monotone transforms -----------------------------------------------------

Rational monotone_lower(const IndexTransform& f, std::uint64_t N) {
  if (N == 0) throw Error(ErrorCode::invalid_argument, "N must be >= 1");
  const std::uint64_t top = f(N);
  if (top == f(0)) return 0;
  return Rational(multiplicity_F(f, top - 1), N);
}

double monotone_upper(const IndexTransform& f, std::uint64_t N, unsigned s, double C,
                      double factor) {
  if (N == 0) throw Error(ErrorCode::invalid_argument, "N must be >= 1");
  const double F = double(multiplicity_F(f, f(N - 1) + 1));
  return factor * C * 2.0 * F * std::pow(log_floor1(double(N)), double(s)) / double(N);
}

std::uint64_t multiplicity_monotone_from(const IndexTransform& f, std::uint64_t k_max) {
  const std::uint64_t start = f(0);
  if (k_max <= start) return start;
  std::uint64_t k0 = k_max;
  std::uint64_t next = multiplicity_F(f, k_max);
  while (k0 > start) {
    const std::uint64_t prev = multiplicity_F(f, k0 - 1);
    if (prev > next) break;
    next = prev;
    --k0;
  }
  return k0;
}

MonotoneCheck monotone_check(const SequenceSpec& spec, const IndexTransform& f,
                             const std::vector<std::uint64_t>& Ns, std::uint64_t N_cal,
                             double kappa, Mode mode) {
  if (!f.is_monotone())
    throw Error(ErrorCode::hypothesis_failed, "transform " + f.describe() + " is not monotone");
  MonotoneCheck out;
  out.kappa = kappa;
  if (Ns.empty()) return out;
  const std::uint64_t N_max = *std::max_element(Ns.begin(), Ns.end());
  out.F_monotone_from = multiplicity_monotone_from(f, f(N_max));
  out.hypotheses = out.F_monotone_from <= f(std::min(N_cal, N_max));

  const unsigned s = spec.dimension();
  const auto measured = measure_many(spec, f, Ns, mode);
  std::vector<double> shape(Ns.size());
  out.rows.resize(Ns.size());
  for (std::size_t i = 0; i < Ns.size(); ++i) {
    MonotoneRow& row = out.rows[i];
    row.N = Ns[i];
    row.lower = monotone_lower(f, row.N);
    row.measured = measured[i];
    row.calibration = row.N <= N_cal;
    shape[i] = monotone_upper(f, row.N, s, 1.0);
    if (row.calibration) out.C = std::max(out.C, to_double(row.measured) / shape[i]);
  }
  out.holds = out.hypotheses;
  for (std::size_t i = 0; i < Ns.size(); ++i) {
    MonotoneRow& row = out.rows[i];
    row.upper = kappa * out.C * out.factor * shape[i];
    row.holds = row.lower <= row.measured && rational_le(row.measured, row.upper);
    out.holds = out.holds && row.holds;
  }
  return out;
}

AlphaCheck alpha_corollary_check(const SequenceSpec& spec, unsigned u, unsigned v,
                                 const std::vector<std::uint64_t>& Ns, std::uint64_t F_k_max,
                                 Mode mode) {
  const auto f = IndexTransform::floor_power(u, v);
  AlphaCheck out;
  out.u = u;
  out.v = v;
  const double alpha = double(u) / double(v);
  out.F_window_lo = std::numeric_limits<double>::infinity();
  for (std::uint64_t k = 1; k <= F_k_max; ++k) {
    const double w = double(multiplicity_F(f, k)) * std::pow(double(k), 1.0 - 1.0 / alpha);
    out.F_window_lo = std::min(out.F_window_lo, w);
    out.F_window_hi = std::max(out.F_window_hi, w);
  }
  const unsigned s = spec.dimension();
  const auto measured = measure_many(spec, f, Ns, mode);
  out.C1 = std::numeric_limits<double>::infinity();
  double lo = std::numeric_limits<double>::infinity(), hi = 0;
  for (std::size_t i = 0; i < Ns.size(); ++i) {
    AlphaRow row;
    row.N = Ns[i];
    row.measured = measured[i];
    row.scaled = to_double(row.measured) * std::pow(double(row.N), alpha);
    row.normalized = row.scaled / std::pow(log_floor1(double(row.N)), double(s));
    out.C1 = std::min(out.C1, row.scaled);
    out.C2 = std::max(out.C2, row.normalized);
    lo = std::min(lo, row.normalized);
    hi = std::max(hi, row.normalized);
    out.rows.push_back(row);
  }
  out.band = out.rows.empty() ? 0 : hi / lo;
  out.holds = out.F_window_lo > 0 && !out.rows.empty() && out.band <= 100.0;
  return out;
}

// --- Uniform discrepancy of (t,s)-sequences ---------------------------------

DeltaTable measured_delta_table(const SequenceSpec& spec, unsigned b, unsigned m_max,
                                std::uint64_t blocks, Mode mode) {
  DeltaTable table(m_max + 1);
  for (unsigned m = 0; m <= m_max; ++m) {
    const std::uint64_t size = checked_pow(b, m);
    std::vector<Rational> values(blocks);
    parallel_for(blocks, [&](std::size_t A) {
      const auto pts = merge_points(generate_range(spec, A * size, size));
      values[A] = discrepancy(pts, mode).value * size;
    });
    Rational best = 0;
    for (const auto& x : values) best = std::max(best, x);
    table[m] = {m, to_double(best), "measured"};
  }
  return table;
}

DeltaTable shape_delta_table(unsigned b, unsigned t, unsigned s, unsigned m_max, double C) {
  DeltaTable table(m_max + 1);
  for (unsigned m = 0; m <= m_max; ++m)
    table[m] = {m, C * std::pow(double(b), double(t)) *
                       std::pow(double(std::max(m, 1u)), double(s) - 1.0),
                "shape"};
  return table;
}

double uniform_bound_ts(unsigned b, unsigned t, unsigned s, std::uint64_t N,
                        const DeltaTable& delta) {
  require_base(b);
  (void)s;
  const double bt = std::pow(double(b), double(t));
  if (double(N) < bt) return double(N);
  const unsigned top = floor_log(N, b);
  double sum = t * bt;
  for (unsigned m = t; m <= top; ++m) {
    if (m >= delta.size() || delta[m].m != m)
      throw Error(ErrorCode::out_of_table, "delta table has no entry for m=" + std::to_string(m));
    sum += delta[m].value;
  }
  return (2.0 * b - 1.0) * sum;
}

double halton_uniform_main_term(const std::vector<unsigned>& bases, std::uint64_t N) {
  if (bases.empty()) throw Error(ErrorCode::invalid_argument, "no bases");
  if (N == 0) throw Error(ErrorCode::invalid_argument, "N must be >= 1");
  const double s = double(bases.size());
  double product = 1;
  for (unsigned b : bases) {
    require_base(b);
    product *= (b / 2) * std::log(double(N)) / std::log(double(b)) + s;
  }
  return product / std::tgamma(s + 1.0);
}

UniformCheck uniform_check(const SequenceSpec& spec, unsigned t, std::uint64_t N_max,
                           std::uint64_t k_max, std::uint64_t N_cal, double kappa) {
  if (spec.dimension() != 1)
    throw Error(ErrorCode::unsupported, "uniform check is implemented for one dimension");
  const unsigned b = spec.coordinate_base(0);
  UniformCheck out;
  out.kappa = kappa;
  out.delta = measured_delta_table(spec, b, floor_log(std::max<std::uint64_t>(N_max, 1), b));
  const auto profile = windowed_profile_1d(spec, IndexTransform::identity(), N_max, k_max);
  out.rows.resize(profile.size());
  for (std::size_t i = 0; i < profile.size(); ++i) {
    UniformRow& row = out.rows[i];
    row.N = profile[i].N;
    row.argmax_k = profile[i].argmax_k;
    row.windowed = profile[i].value * row.N;
    row.ts_bound = uniform_bound_ts(b, t, 1, row.N, out.delta);
    row.main_term = halton_uniform_main_term({b}, row.N);
    row.calibration = row.N <= N_cal;
    if (row.calibration)
      out.slack = std::max(out.slack, to_double(row.windowed) - row.main_term);
  }
  out.holds = !out.rows.empty();
  for (auto& row : out.rows) {
    row.holds_ts = rational_le(row.windowed, row.ts_bound);
    row.holds_main = rational_le(row.windowed, row.main_term + kappa * out.slack);
    out.holds = out.holds && row.holds_ts && row.holds_main;
  }
  return out;
}

}  // namespace lowdisc
