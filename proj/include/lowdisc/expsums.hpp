#pragma once

// b-adic characters, rho_b weights and the Weyl sums
//   T_k(N) = (1/N) sum_{n<N} e(s_q(n) phi_b(k)),
// together with the two lemma inequalities and the Hellekalek-type bound.

#include "lowdisc/digits.hpp"

#include <complex>
#include <cstdint>
#include <span>
#include <vector>

namespace lowdisc {

using Complex = std::complex<double>;

/// e(x) = exp(2 pi i x) after exact reduction of x modulo 1.
Complex unit_phase(const Rational& x);

/// gamma_k(x) = e(phi_b(k) * monna_plus(x)); x must be written in base b.
Complex gamma_k(unsigned b, std::uint64_t k, const BRational& x);

/// rho_b(0) = 1, rho_b(k) = 2 / (b^(r+1) sin(pi kappa_r / b)) with kappa_r
/// the leading base-b digit of k at position r.
double rho_weight(unsigned b, std::uint64_t k);

struct WeylSum {
  unsigned b = 2;
  unsigned q = 2;
  std::uint64_t k = 0;
  std::uint64_t N = 0;
  Complex value;
  double abs() const { return std::abs(value); }
};

enum class SumRoute { automatic, direct, histogram };

/// Direct route: chunked compensated sums combined by a fixed pairwise tree,
/// so the value does not depend on the thread count. Histogram route: groups
/// n by s_q(n) with exact counts; automatic picks it above 2^16 terms.
WeylSum weyl_sum(unsigned b, unsigned q, std::uint64_t k, std::uint64_t N,
                 SumRoute route = SumRoute::automatic);

/// Neumaier-compensated accumulator.
class CompensatedSum {
 public:
  void add(Complex x);
  Complex value() const { return {re_ + cre_, im_ + cim_}; }

 private:
  static void step(double& sum, double& comp, double x);
  double re_ = 0, im_ = 0, cre_ = 0, cim_ = 0;
};

struct IdentityCheck {
  Complex lhs;  // T_k(q^m)
  Complex rhs;  // T_k(q)^m
  double diff = 0;
  bool holds = false;
};

inline constexpr double kProductTolerance = 1e-10;
inline constexpr double kLemmaSlack = 1e-12;

IdentityCheck product_identity_check(unsigned b, unsigned q, std::uint64_t k, unsigned m);

struct LemmaCheck {
  double lhs = 0;
  double rhs = 0;
  bool holds = false;
  bool clamped = false;  // the base 1 - 16(q-1)/q^2 ||phi||^2 was negative
};

/// |T_k(q^m)| <= (1 - 16(q-1)/q^2 ||phi_b(k)||^2)^(m/2).
LemmaCheck lemma_le1_bound(unsigned b, unsigned q, std::uint64_t k, unsigned m);

/// |T_k(N)| <= (1/N) sum_r a_r q^r |T_k(q^r)| for N = sum_r a_r q^r.
LemmaCheck lemma_le2_bound(unsigned b, unsigned q, std::uint64_t k, std::uint64_t N);

struct SweepSummary {
  std::uint64_t checked = 0;
  std::uint64_t failures = 0;
  double worst_margin = 0;  // max of lhs - rhs (non-positive when all hold)
  std::uint64_t worst_N = 0;
};

/// lemma_le2_bound for every N = 1..N_max, by one running sum.
SweepSummary lemma_le2_sweep(unsigned b, unsigned q, std::uint64_t k, std::uint64_t N_max);

inline constexpr double kHellekalekRounding = 1e-12;

/// 1/b^g + sum_{k=1}^{b^g-1} rho_b(k) |(1/N) sum_n gamma_k(y_n)|. All points
/// must be written in base b. This bounds the star discrepancy; the extreme
/// discrepancy can exceed it, e.g. {1/4, 15/16} with b = 2, g = 1 gives 1/2
/// against D_N = 11/16.
double hellekalek_bound(unsigned b, unsigned g, std::span<const BRational> points);

struct HellekalekTerm {
  std::uint64_t k = 0;
  double rho = 0;
  Complex average;  // (1/N) sum_n gamma_k(y_n)
  double abs = 0;
};

std::vector<HellekalekTerm> hellekalek_terms(unsigned b, unsigned g,
                                             std::span<const BRational> points);

/// max(1, floor(log_b sqrt(log N))).
unsigned hellekalek_resolution(unsigned b, std::uint64_t N);

}  // namespace lowdisc
