#pragma once

#include "lowdisc/types.hpp"

#include <cstdint>
#include <vector>

namespace lowdisc {

/// Exact distribution of s_q on [0, q^j): counts[k] is the coefficient of x^k
/// in (1 + x + ... + x^(q-1))^j.
struct DigitSumDistribution {
  unsigned q = 2;
  unsigned j = 0;
  std::vector<BigInt> counts;

  BigInt total() const;
  std::uint64_t at(std::uint64_t k) const;  // 0 outside the support; checked narrow
};

/// Iterated convolution; throws budget_exceeded when j * (j(q-1)+1) exceeds
/// the budget.
DigitSumDistribution distribution(unsigned q, unsigned j,
                                  std::uint64_t budget = kDefaultScanBudget);

struct MaxCount {
  std::uint64_t k = 0;   // smallest arg-max
  BigInt count = 0;
  bool at_center = false;  // maximum also attained at floor(j(q-1)/2)
};

MaxCount max_count(unsigned q, unsigned j);

double sigma_q(unsigned q);

/// Gaussian main term q^j / (sqrt(2 pi j) sigma_q) * exp(-x_{j,k}^2 / 2).
double gaussian_main_term(unsigned q, unsigned j, double k);

/// Smallest j0 such that distribution(q, j) is unimodal for all
/// j0 <= j <= j_max; j_max + 1 if distribution(q, j_max) is not.
unsigned unimodality_onset(unsigned q, unsigned j_max);

}  // namespace lowdisc
