#pragma once

#include <boost/multiprecision/cpp_int.hpp>

#include <cstdint>
#include <stdexcept>
#include <string>
#include <string_view>

namespace lowdisc {

using BigInt = boost::multiprecision::cpp_int;
using Rational = boost::multiprecision::cpp_rational;

enum class ErrorCode {
  invalid_base,
  invalid_argument,
  index_out_of_precision,
  out_of_table,
  unsupported,
  budget_exceeded,
  overflow,
  hypothesis_failed,
  parse_error,
};

std::string_view to_string(ErrorCode code);

/// Every failure raised by the library carries a machine-readable code.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

/// Default evaluation budget for generic scans (2^24).
inline constexpr std::uint64_t kDefaultScanBudget = std::uint64_t{1} << 24;

/// Checked helpers for the fixed-width fast paths.
std::uint64_t checked_mul(std::uint64_t a, std::uint64_t b);
std::uint64_t checked_add(std::uint64_t a, std::uint64_t b);
std::uint64_t checked_pow(std::uint64_t base, unsigned exp);

/// Narrow a BigInt, throwing ErrorCode::overflow if it does not fit.
std::uint64_t to_u64(const BigInt& value);

double to_double(const Rational& value);

/// "num/den" in lowest terms.
std::string to_fraction_string(const Rational& value);

}  // namespace lowdisc
