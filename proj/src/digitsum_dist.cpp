#include "lowdisc/digitsum_dist.hpp"

#include "lowdisc/digits.hpp"
#include "lowdisc/transforms.hpp"

#include <cmath>
#include <numbers>

namespace lowdisc {

BigInt DigitSumDistribution::total() const {
  BigInt sum = 0;
  for (const auto& c : counts) sum += c;
  return sum;
}

std::uint64_t DigitSumDistribution::at(std::uint64_t k) const {
  return k < counts.size() ? to_u64(counts[k]) : 0;
}

DigitSumDistribution distribution(unsigned q, unsigned j, std::uint64_t budget) {
  require_base(q);
  const std::uint64_t length = std::uint64_t{j} * (q - 1) + 1;
  if (std::uint64_t{j} * length > budget)
    throw Error(ErrorCode::budget_exceeded,
                "distribution(" + std::to_string(q) + ", " + std::to_string(j) +
                    ") exceeds the convolution budget");
  std::vector<BigInt> counts{1};
  for (unsigned step = 0; step < j; ++step) {
    std::vector<BigInt> next(counts.size() + q - 1, 0);
    // Sliding window of width q over the previous row.
    BigInt window = 0;
    for (std::size_t k = 0; k < next.size(); ++k) {
      if (k < counts.size()) window += counts[k];
      if (k >= q) window -= counts[k - q];
      next[k] = window;
    }
    counts = std::move(next);
  }
  return {q, j, std::move(counts)};
}

MaxCount max_count(unsigned q, unsigned j) {
  const auto dist = distribution(q, j);
  MaxCount out;
  for (std::size_t k = 0; k < dist.counts.size(); ++k)
    if (dist.counts[k] > out.count) {
      out.count = dist.counts[k];
      out.k = k;
    }
  const std::size_t center = std::size_t{j} * (q - 1) / 2;
  out.at_center = dist.counts[center] == out.count;
  return out;
}

double sigma_q(unsigned q) {
  require_base(q);
  return std::sqrt((double(q) * q - 1.0) / 12.0);
}

double gaussian_main_term(unsigned q, unsigned j, double k) {
  if (j == 0) throw Error(ErrorCode::invalid_argument, "Gaussian main term needs j >= 1");
  const double sigma = sigma_q(q);
  const double x = (k - j * (q - 1) / 2.0) / (sigma * std::sqrt(double(j)));
  return std::pow(double(q), double(j)) / (std::sqrt(2.0 * std::numbers::pi * j) * sigma) *
         std::exp(-x * x / 2.0);
}

unsigned unimodality_onset(unsigned q, unsigned j_max) {
  unsigned onset = j_max + 1;
  for (unsigned j = j_max + 1; j-- > 0;) {
    if (!is_unimodal(distribution(q, j).counts)) break;
    onset = j;
  }
  return onset;
}

}  // namespace lowdisc
