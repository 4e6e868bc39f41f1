#include "lowdisc/types.hpp"

#include "lowdisc/parallel.hpp"

#include <algorithm>
#include <atomic>
#include <cstdlib>
#include <limits>

namespace lowdisc {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::invalid_base: return "invalid-base";
    case ErrorCode::invalid_argument: return "invalid-argument";
    case ErrorCode::index_out_of_precision: return "index-out-of-precision";
    case ErrorCode::out_of_table: return "out-of-table";
    case ErrorCode::unsupported: return "unsupported";
    case ErrorCode::budget_exceeded: return "budget-exceeded";
    case ErrorCode::overflow: return "overflow";
    case ErrorCode::hypothesis_failed: return "hypothesis-failed";
    case ErrorCode::parse_error: return "parse-error";
  }
  return "unknown";
}

std::uint64_t checked_mul(std::uint64_t a, std::uint64_t b) {
  std::uint64_t out = 0;
  if (__builtin_mul_overflow(a, b, &out))
    throw Error(ErrorCode::overflow, "64-bit multiplication overflow");
  return out;
}

std::uint64_t checked_add(std::uint64_t a, std::uint64_t b) {
  std::uint64_t out = 0;
  if (__builtin_add_overflow(a, b, &out))
    throw Error(ErrorCode::overflow, "64-bit addition overflow");
  return out;
}

std::uint64_t checked_pow(std::uint64_t base, unsigned exp) {
  std::uint64_t out = 1;
  for (unsigned i = 0; i < exp; ++i) out = checked_mul(out, base);
  return out;
}

std::uint64_t to_u64(const BigInt& value) {
  if (value < 0 || value > std::numeric_limits<std::uint64_t>::max())
    throw Error(ErrorCode::overflow, "value does not fit in 64 bits");
  return static_cast<std::uint64_t>(value);
}

double to_double(const Rational& value) {
  return value.convert_to<double>();
}

std::string to_fraction_string(const Rational& value) {
  return boost::multiprecision::numerator(value).str() + "/" +
         boost::multiprecision::denominator(value).str();
}

namespace {

unsigned initial_thread_count() {
  unsigned hw = std::max(1u, std::thread::hardware_concurrency());
  if (const char* env = std::getenv("LOWDISC_THREADS")) {
    char* end = nullptr;
    long v = std::strtol(env, &end, 10);
    if (end != env && v > 0) return static_cast<unsigned>(v);
  }
  return hw;
}

std::atomic<unsigned>& thread_setting() {
  static std::atomic<unsigned> value{initial_thread_count()};
  return value;
}

}  // namespace

unsigned thread_count() { return thread_setting().load(); }

void set_thread_count(unsigned n) { thread_setting().store(std::max(1u, n)); }

}  // namespace lowdisc
