#pragma once

// Index transforms f: N_0 -> N_0 and their counting statistics: the
// multiplicity F(k), block counts G_{A,j}(k) and distinct-value counts
// v_{A,j} over a divisibility chain.

#include "lowdisc/types.hpp"

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <variant>
#include <vector>

namespace lowdisc {

struct IdentityTransform {};

struct SumOfDigitsTransform {
  unsigned q;
};

/// floor(n^(u/v)) with 0 < u < v, gcd(u, v) = 1. Irrational exponents must
/// be approximated by a rational by the caller.
struct FloorPowerTransform {
  unsigned u;
  unsigned v;
};

/// Explicit non-decreasing map on 0..values.size()-1.
struct TableTransform {
  std::vector<std::uint64_t> values;
};

class IndexTransform {
 public:
  using Variant = std::variant<IdentityTransform, SumOfDigitsTransform, FloorPowerTransform,
                               TableTransform>;

  static IndexTransform identity() { return IndexTransform(IdentityTransform{}); }
  static IndexTransform sum_of_digits(unsigned q);
  static IndexTransform floor_power(unsigned u, unsigned v);
  static IndexTransform table(std::vector<std::uint64_t> values);

  /// Accepts the JSON forms {"kind":"sod","q":2}, {"kind":"pow","u":1,"v":2},
  /// {"kind":"table","path":...}, {"kind":"id"} and the short forms "sod:2",
  /// "pow:1/2", "table:path", "id".
  static IndexTransform parse(const std::string& text);
  static IndexTransform load_table(const std::string& path);

  const Variant& variant() const { return variant_; }
  bool is_monotone() const;
  std::string describe() const;

  std::uint64_t operator()(std::uint64_t n) const;

 private:
  explicit IndexTransform(Variant v) : variant_(std::move(v)) {}
  Variant variant_;
};

std::uint64_t apply(const IndexTransform& t, std::uint64_t n);

/// floor(x^(1/k)) and ceil(x^(1/k)) by exact integer bracketing.
BigInt root_floor(const BigInt& x, unsigned k);
BigInt root_ceil(const BigInt& x, unsigned k);

/// F(k) = #{n : f(n) = k} for monotone transforms.
std::uint64_t multiplicity_F(const IndexTransform& t, std::uint64_t k);

/// Smallest n with f(n) >= k (monotone transforms).
std::uint64_t first_index_at_least(const IndexTransform& t, std::uint64_t k);

using Counts = std::map<std::uint64_t, std::uint64_t>;

/// Histogram of f(n) over begin <= n < end. Sum-of-digits and floor-power
/// transforms use closed forms; the others scan within the budget.
Counts histogram(const IndexTransform& t, std::uint64_t begin, std::uint64_t end,
                 std::uint64_t budget = kDefaultScanBudget);

/// Strictly increasing N_0 = 1 | N_1 | N_2 | ...
class DivisibilityChain {
 public:
  explicit DivisibilityChain(std::vector<std::uint64_t> terms);
  static DivisibilityChain powers(std::uint64_t q, unsigned length);

  std::size_t size() const { return terms_.size(); }
  std::uint64_t operator[](std::size_t j) const;
  const std::vector<std::uint64_t>& terms() const { return terms_; }
  /// q if N_j = q^j for every stored j, else nullopt.
  std::optional<std::uint64_t> power_base() const;

 private:
  std::vector<std::uint64_t> terms_;
};

/// G_{A,j}(k) = #{n : A N_j <= n < (A+1) N_j, g(n) = k}.
Counts block_counts_G(const IndexTransform& t, std::uint64_t A, unsigned j,
                      const DivisibilityChain& chain,
                      std::uint64_t budget = kDefaultScanBudget);

/// v_{A,j}: number of distinct values of g on block A of level j.
std::uint64_t distinct_values_v(const IndexTransform& t, std::uint64_t A, unsigned j,
                                const DivisibilityChain& chain,
                                std::uint64_t budget = kDefaultScanBudget);

/// True iff successive differences change sign at most once (non-decreasing,
/// then non-increasing). Missing keys inside the support count as zero.
bool is_unimodal(const Counts& counts);
bool is_unimodal(const std::vector<BigInt>& counts);

/// Per-level statistics feeding the general upper bound.
struct BlockStats {
  unsigned j = 0;
  std::uint64_t N_j = 1;
  std::uint64_t G = 0;      // max over k and scanned A of G_{A,j}(k)
  std::uint64_t v = 0;      // max over scanned A of v_{A,j}
  bool unimodal = true;     // every scanned G_{A,j} unimodal
  std::optional<std::uint64_t> violating_A;
  bool exact = false;       // true when the sup over all A is certified
};

struct CountingProfile {
  std::vector<BlockStats> levels;
};

/// Levels 0..d. Sum-of-digits over a q-power chain is exact through the
/// shift identity G_{A,j}(k) = G_{0,j}(k - s_q(A)); other transforms scan
/// A in [0, a_window).
CountingProfile counting_profile(const IndexTransform& t, const DivisibilityChain& chain,
                                 unsigned d, std::uint64_t a_window = 64,
                                 std::uint64_t budget = kDefaultScanBudget);

}  // namespace lowdisc
