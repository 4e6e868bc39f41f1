#pragma once

// Evaluation and empirical verification of the discrepancy bounds for
// index-transformed sequences: the general divisibility-chain theorem, the
// sum-of-digits envelopes, the monotone-index bounds and the uniform
// discrepancy bound for (t,s)-sequences.
//
// Unspecified constants are fitted on a calibration range and then checked,
// inflated by a stability factor kappa, on a held-out range.

#include "lowdisc/discrepancy.hpp"
#include "lowdisc/generators.hpp"
#include "lowdisc/transforms.hpp"

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

namespace lowdisc {

inline constexpr double kDefaultStability = 2.0;

/// max(log x, 1): keeps the (log N)^s shapes positive at N < e.
double log_floor1(double x);

/// A non-decreasing bound f(v) >= v * (uniform discrepancy of the first v terms).
class Envelope {
 public:
  enum class Source { constant, analytic, measured, appendix };

  static Envelope constant(double c);
  /// C * max(log v, 1)^s.
  static Envelope analytic(double C, unsigned s);
  /// Running maximum of v * windowed estimate for v = 1..v_max (a lower
  /// estimate of the true envelope, so results built on it are empirical).
  static Envelope measured(const SequenceSpec& spec, std::uint64_t v_max, std::uint64_t k_max);
  /// (2b-1)(floor(log_b v) + 1): the uniform bound for (0,1)-sequences with
  /// the net constant 1 of aligned van der Corput blocks.
  static Envelope appendix_vdc(unsigned b);

  double operator()(std::uint64_t v) const;
  Source source() const { return source_; }
  std::string describe() const;
  std::uint64_t table_limit() const { return table_.empty() ? 0 : table_.size() - 1; }

 private:
  Source source_ = Source::constant;
  double c_ = 1;
  unsigned s_ = 1;
  unsigned b_ = 2;
  std::vector<double> table_;  // index v
};

std::string_view to_string(Envelope::Source source);

/// max_k G_{0,d}(k).
std::uint64_t general_lower(const IndexTransform& g, const DivisibilityChain& chain, unsigned d);

struct UpperTerm {
  unsigned j = 0;
  std::uint64_t ratio = 0;  // N_{j+1} / N_j
  std::uint64_t G = 0;
  std::uint64_t v = 0;
  double f_v = 0;
  double term = 0;
};

struct GeneralUpper {
  double value = 0;
  std::vector<UpperTerm> terms;
  bool exact_counts = false;  // G_j, v_j certified over all A (not a window)
};

/// sum_{j<=d} (N_{j+1}/N_j) G_j f(v_j). Throws hypothesis_failed naming the
/// offending (A, j) if some G_{A,j} is not unimodal.
GeneralUpper general_upper(const IndexTransform& g, const DivisibilityChain& chain,
                           const Envelope& f, unsigned d, std::uint64_t a_window = 64);

/// N D_N over the first N terms of the transformed sequence, exactly.
Rational measured_discrepancy(const SequenceSpec& spec, const IndexTransform& g, std::uint64_t N,
                              Mode mode = Mode::extreme);

struct SandwichRow {
  unsigned d = 0;
  std::uint64_t N = 0;
  std::uint64_t lower = 0;   // general_lower
  Rational measured = 0;     // N * D_N
  double upper = 0;          // general_upper
  bool holds = false;
};

std::vector<SandwichRow> general_sandwich(const SequenceSpec& spec, const IndexTransform& g,
                                          const DivisibilityChain& chain, const Envelope& f,
                                          unsigned d_max);

struct SodRow {
  unsigned d = 0;
  std::uint64_t N = 0;
  Rational measured = 0;      // D_N
  Rational exact_lower = 0;   // max_k G_{0,d}(k) / N; star mode checks 2^s D*_N against it
  double scaled = 0;          // D_N sqrt(log N)
  double lower_fit = 0;       // c2 / sqrt(log N)
  double upper_fit = 0;       // c3 max(log log N, 1)^s / sqrt(log N)
  bool calibration = false;
  bool holds = false;
};

struct SodCheck {
  unsigned q = 2;
  unsigned s = 1;
  double c2 = 0;
  double c3 = 0;
  double kappa = kDefaultStability;
  bool unimodal = true;
  bool holds = false;
  std::vector<SodRow> rows;
};

/// Rows for N = q^d, d = 1..d_max (or N = base^d if base is given). c2 and
/// c3 are fitted on d <= d_cal and checked on the rest.
SodCheck sod_envelope_check(const SequenceSpec& spec, unsigned q, unsigned d_max,
                            unsigned d_cal, double kappa = kDefaultStability,
                            std::uint64_t level_base = 0, Mode mode = Mode::extreme);

/// F(f(N)-1)/N, or 0 when f(N) = f(0).
Rational monotone_lower(const IndexTransform& f, std::uint64_t N);

/// factor * C * 2 F(f(N-1)+1) max(log N, 1)^s / N; factor = p^t for digital
/// sequences and 1 for Halton.
double monotone_upper(const IndexTransform& f, std::uint64_t N, unsigned s, double C,
                      double factor = 1.0);

/// Smallest k0 <= k_max with F non-decreasing on [k0, k_max].
std::uint64_t multiplicity_monotone_from(const IndexTransform& f, std::uint64_t k_max);

struct MonotoneRow {
  std::uint64_t N = 0;
  Rational lower = 0;
  Rational measured = 0;
  double upper = 0;
  bool calibration = false;
  bool holds = false;
};

struct MonotoneCheck {
  double C = 0;
  double factor = 1;
  double kappa = kDefaultStability;
  std::uint64_t F_monotone_from = 0;
  bool hypotheses = false;
  bool holds = false;
  std::vector<MonotoneRow> rows;
};

/// Exact lower side on every N; C fitted on N <= N_cal.
MonotoneCheck monotone_check(const SequenceSpec& spec, const IndexTransform& f,
                             const std::vector<std::uint64_t>& Ns, std::uint64_t N_cal,
                             double kappa = kDefaultStability, Mode mode = Mode::extreme);

struct AlphaRow {
  std::uint64_t N = 0;
  Rational measured = 0;
  double scaled = 0;      // D_N N^alpha
  double normalized = 0;  // D_N N^alpha / max(log N, 1)^s
};

struct AlphaCheck {
  unsigned u = 1, v = 2;
  double F_window_lo = 0, F_window_hi = 0;  // F(k) k^(1 - 1/alpha), 1 <= k <= k_max
  double C1 = 0, C2 = 0;                    // min scaled, max normalized
  double band = 0;                          // max/min of normalized
  bool holds = false;
  std::vector<AlphaRow> rows;
};

/// For one-dimensional specs every N in 1..N_max is measured through the
/// incremental profile; otherwise only the listed Ns.
AlphaCheck alpha_corollary_check(const SequenceSpec& spec, unsigned u, unsigned v,
                                 const std::vector<std::uint64_t>& Ns,
                                 std::uint64_t F_k_max = 1000, Mode mode = Mode::extreme);

struct DeltaEntry {
  unsigned m = 0;
  double value = 0;
  std::string provenance;  // "measured" or "shape"
};

using DeltaTable = std::vector<DeltaEntry>;

/// max over aligned blocks A < blocks of b^m D(x_{A b^m}, ..., x_{(A+1) b^m - 1}).
DeltaTable measured_delta_table(const SequenceSpec& spec, unsigned b, unsigned m_max,
                                std::uint64_t blocks = 16, Mode mode = Mode::extreme);

/// C b^t max(m, 1)^(s-1).
DeltaTable shape_delta_table(unsigned b, unsigned t, unsigned s, unsigned m_max, double C);

/// (2b-1)(t b^t + sum_{m=t}^{floor(log_b N)} Delta(m)); N when N < b^t.
double uniform_bound_ts(unsigned b, unsigned t, unsigned s, std::uint64_t N,
                        const DeltaTable& delta);

/// (1/s!) prod_j (floor(b_j/2) log N / log b_j + s).
double halton_uniform_main_term(const std::vector<unsigned>& bases, std::uint64_t N);

struct UniformRow {
  std::uint64_t N = 0;
  std::uint64_t argmax_k = 0;
  Rational windowed = 0;  // N * windowed estimate
  double ts_bound = 0;
  double main_term = 0;
  bool calibration = false;
  bool holds_ts = false;
  bool holds_main = false;
};

struct UniformCheck {
  double slack = 0;
  double kappa = kDefaultStability;
  bool holds = false;
  DeltaTable delta;
  std::vector<UniformRow> rows;
};

/// One-dimensional van der Corput style check for every N = 1..N_max.
UniformCheck uniform_check(const SequenceSpec& spec, unsigned t, std::uint64_t N_max,
                           std::uint64_t k_max, std::uint64_t N_cal,
                           double kappa = kDefaultStability);

}  // namespace lowdisc
