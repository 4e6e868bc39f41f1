#include "lowdisc/expsums.hpp"

#include "lowdisc/parallel.hpp"
#include "lowdisc/transforms.hpp"

#include <cmath>
#include <limits>
#include <numbers>

namespace lowdisc {

namespace {

constexpr std::uint64_t kChunkWidth = 4096;
constexpr std::uint64_t kDirectLimit = std::uint64_t{1} << 16;

// e(s * phi_b(k)) for s = 0..s_max, each phase reduced exactly.
std::vector<Complex> phase_table(unsigned b, std::uint64_t k, std::uint64_t s_max) {
  const BRational phi = radical_inverse(k, b);
  const BigInt den = phi.denominator();
  std::vector<Complex> table(s_max + 1);
  for (std::uint64_t s = 0; s <= s_max; ++s)
    table[s] = unit_phase(Rational(BigInt(phi.num() * s % den), den));
  return table;
}

std::uint64_t max_digit_sum_below(std::uint64_t N, unsigned q) {
  return N <= 1 ? 0 : std::uint64_t{q - 1} * digit_count(N - 1, q);
}

Complex tree_sum(std::vector<Complex> parts) {
  if (parts.empty()) return {};
  while (parts.size() > 1) {
    std::vector<Complex> next((parts.size() + 1) / 2);
    for (std::size_t i = 0; i < next.size(); ++i)
      next[i] = 2 * i + 1 < parts.size() ? parts[2 * i] + parts[2 * i + 1] : parts[2 * i];
    parts = std::move(next);
  }
  return parts.front();
}

Complex direct_sum(const std::vector<Complex>& table, unsigned q, std::uint64_t N) {
  const std::uint64_t chunks = (N + kChunkWidth - 1) / kChunkWidth;
  std::vector<Complex> parts(chunks);
  parallel_for(chunks, [&](std::size_t c) {
    const std::uint64_t begin = c * kChunkWidth, end = std::min(N, begin + kChunkWidth);
    CompensatedSum acc;
    for (std::uint64_t n = begin; n < end; ++n) acc.add(table[sum_of_digits(n, q)]);
    parts[c] = acc.value();
  });
  return tree_sum(std::move(parts));
}

Complex histogram_sum(const std::vector<Complex>& table, unsigned q, std::uint64_t N) {
  const Counts counts = histogram(IndexTransform::sum_of_digits(q), 0, N);
  CompensatedSum acc;
  for (const auto& [s, c] : counts) acc.add(static_cast<double>(c) * table[s]);
  return acc.value();
}

}  // namespace

Complex unit_phase(const Rational& x) {
  const BigInt den = denominator(x);
  BigInt num = numerator(x) % den;
  if (num < 0) num += den;
  // Fold to (-1/2, 1/2] so the angle fed to cos/sin is as small as possible.
  if (2 * num > den) num -= den;
  const double angle = 2.0 * std::numbers::pi * to_double(Rational(num, den));
  return {std::cos(angle), std::sin(angle)};
}

Complex gamma_k(unsigned b, std::uint64_t k, const BRational& x) {
  if (x.base() != b)
    throw Error(ErrorCode::invalid_argument, "gamma_k needs a point written in base " +
                                                 std::to_string(b));
  const BRational phi = radical_inverse(k, b);
  return unit_phase(Rational(phi.num() * monna_plus(x), phi.denominator()));
}

double rho_weight(unsigned b, std::uint64_t k) {
  require_base(b);
  if (k == 0) return 1.0;
  const DigitVector d = expand(k, b);
  const unsigned r = static_cast<unsigned>(d.size()) - 1;
  const unsigned kappa = d.digits.back();
  return 2.0 / (std::pow(double(b), double(r + 1)) * std::sin(std::numbers::pi * kappa / b));
}

void CompensatedSum::step(double& sum, double& comp, double x) {
  const double t = sum + x;
  if (std::abs(sum) >= std::abs(x))
    comp += (sum - t) + x;
  else
    comp += (x - t) + sum;
  sum = t;
}

void CompensatedSum::add(Complex x) {
  step(re_, cre_, x.real());
  step(im_, cim_, x.imag());
}

WeylSum weyl_sum(unsigned b, unsigned q, std::uint64_t k, std::uint64_t N, SumRoute route) {
  require_base(b);
  require_base(q);
  if (N == 0) throw Error(ErrorCode::invalid_argument, "Weyl sum needs N >= 1");
  const auto table = phase_table(b, k, max_digit_sum_below(N, q));
  if (route == SumRoute::automatic)
    route = N <= kDirectLimit ? SumRoute::direct : SumRoute::histogram;
  const Complex total =
      route == SumRoute::direct ? direct_sum(table, q, N) : histogram_sum(table, q, N);
  return {b, q, k, N, total / static_cast<double>(N)};
}

IdentityCheck product_identity_check(unsigned b, unsigned q, std::uint64_t k, unsigned m) {
  IdentityCheck out;
  out.lhs = weyl_sum(b, q, k, checked_pow(q, m)).value;
  const Complex base = weyl_sum(b, q, k, q).value;
  out.rhs = 1.0;
  for (unsigned i = 0; i < m; ++i) out.rhs *= base;
  out.diff = std::abs(out.lhs - out.rhs);
  out.holds = out.diff < kProductTolerance;
  return out;
}

LemmaCheck lemma_le1_bound(unsigned b, unsigned q, std::uint64_t k, unsigned m) {
  require_base(q);
  LemmaCheck out;
  out.lhs = weyl_sum(b, q, k, checked_pow(q, m)).abs();
  const Rational dist = nearest_int_distance(radical_inverse(k, b).to_rational());
  Rational base = 1 - Rational(16 * (q - 1), q * q) * dist * dist;
  if (base < 0) {
    base = 0;
    out.clamped = true;
  }
  out.rhs = std::pow(to_double(base), m / 2.0);
  out.holds = out.lhs <= out.rhs + kLemmaSlack;
  return out;
}

LemmaCheck lemma_le2_bound(unsigned b, unsigned q, std::uint64_t k, std::uint64_t N) {
  if (N == 0) throw Error(ErrorCode::invalid_argument, "lemma needs N >= 1");
  LemmaCheck out;
  out.lhs = weyl_sum(b, q, k, N).abs();
  const DigitVector a = expand(N, q);
  CompensatedSum acc;
  std::uint64_t power = 1;
  for (std::size_t r = 0; r < a.size(); ++r) {
    if (a.digits[r] != 0)
      acc.add(double(a.digits[r]) * double(power) * weyl_sum(b, q, k, power).abs());
    if (r + 1 < a.size()) power *= q;
  }
  out.rhs = acc.value().real() / static_cast<double>(N);
  out.holds = out.lhs <= out.rhs + kLemmaSlack;
  return out;
}

SweepSummary lemma_le2_sweep(unsigned b, unsigned q, std::uint64_t k, std::uint64_t N_max) {
  SweepSummary out;
  if (N_max == 0) return out;
  const auto table = phase_table(b, k, max_digit_sum_below(N_max + 1, q));
  std::vector<double> abs_power;  // |T_k(q^r)|
  for (std::uint64_t power = 1; power <= N_max; power *= q) {
    abs_power.push_back(weyl_sum(b, q, k, power).abs());
    if (power > N_max / q) break;
  }
  CompensatedSum running;
  out.worst_margin = -std::numeric_limits<double>::infinity();
  for (std::uint64_t N = 1; N <= N_max; ++N) {
    running.add(table[sum_of_digits(N - 1, q)]);
    const double lhs = std::abs(running.value()) / static_cast<double>(N);
    double rhs = 0;
    std::uint64_t rest = N, power = 1;
    for (std::size_t r = 0; rest > 0; ++r, rest /= q, power *= q)
      if (rest % q) rhs += double(rest % q) * double(power) * abs_power[r];
    rhs /= static_cast<double>(N);
    ++out.checked;
    if (lhs > rhs + kLemmaSlack) ++out.failures;
    if (lhs - rhs > out.worst_margin) {
      out.worst_margin = lhs - rhs;
      out.worst_N = N;
    }
  }
  return out;
}

std::vector<HellekalekTerm> hellekalek_terms(unsigned b, unsigned g,
                                             std::span<const BRational> points) {
  require_base(b);
  if (g == 0) throw Error(ErrorCode::invalid_argument, "resolution g must be >= 1");
  if (points.empty()) throw Error(ErrorCode::invalid_argument, "empty point set");
  const std::uint64_t M = checked_pow(b, g);
  // Only monna_plus(y) mod b^g enters e(phi_b(k) monna_plus(y)) for k < b^g.
  std::vector<std::uint64_t> residues;
  residues.reserve(points.size());
  for (const auto& y : points) {
    if (y.base() != b) throw Error(ErrorCode::invalid_argument, "point not written in base " +
                                                                    std::to_string(b));
    residues.push_back(static_cast<std::uint64_t>(monna_plus(y) % M));
  }
  std::vector<Complex> circle(M);
  for (std::uint64_t j = 0; j < M; ++j) circle[j] = unit_phase(Rational(j, M));
  std::vector<HellekalekTerm> terms(M - 1);
  parallel_for(M - 1, [&](std::size_t i) {
    const std::uint64_t k = i + 1;
    const BRational phi = radical_inverse(k, b);
    const std::uint64_t a = static_cast<std::uint64_t>(phi.num()) * checked_pow(b, g - phi.prec());
    CompensatedSum acc;
    for (std::uint64_t r : residues)
      acc.add(circle[static_cast<std::uint64_t>((static_cast<unsigned __int128>(a) * r) % M)]);
    const Complex average = acc.value() / static_cast<double>(points.size());
    terms[i] = {k, rho_weight(b, k), average, std::abs(average)};
  });
  return terms;
}

double hellekalek_bound(unsigned b, unsigned g, std::span<const BRational> points) {
  const auto terms = hellekalek_terms(b, g, points);
  double total = 1.0 / std::pow(double(b), double(g));
  for (const auto& t : terms) total += t.rho * t.abs;
  return total;
}

unsigned hellekalek_resolution(unsigned b, std::uint64_t N) {
  require_base(b);
  if (N < 3) return 1;
  const double g = std::floor(std::log(std::sqrt(std::log(double(N)))) / std::log(double(b)));
  return g < 1 ? 1u : static_cast<unsigned>(g);
}

}  // namespace lowdisc
