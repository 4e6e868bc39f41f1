#include "lowdisc/transforms.hpp"

#include "lowdisc/digits.hpp"
#include "lowdisc/digitsum_dist.hpp"

#include <json.hpp>

#include <algorithm>
#include <fstream>
#include <numeric>
#include <sstream>

namespace lowdisc {

IndexTransform IndexTransform::sum_of_digits(unsigned q) {
  require_base(q);
  return IndexTransform(SumOfDigitsTransform{q});
}

IndexTransform IndexTransform::floor_power(unsigned u, unsigned v) {
  if (u == 0 || v == 0 || u >= v)
    throw Error(ErrorCode::invalid_argument,
                "floor power needs 0 < u < v, got " + std::to_string(u) + "/" + std::to_string(v));
  const unsigned g = std::gcd(u, v);
  return IndexTransform(FloorPowerTransform{u / g, v / g});
}

IndexTransform IndexTransform::table(std::vector<std::uint64_t> values) {
  if (values.empty()) throw Error(ErrorCode::invalid_argument, "empty transform table");
  if (!std::is_sorted(values.begin(), values.end()))
    throw Error(ErrorCode::invalid_argument, "transform table must be non-decreasing");
  return IndexTransform(TableTransform{std::move(values)});
}

IndexTransform IndexTransform::load_table(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::parse_error, "cannot open transform table '" + path + "'");
  std::vector<std::uint64_t> values;
  std::string line;
  while (std::getline(in, line)) {
    if (auto hash = line.find('#'); hash != std::string::npos) line.resize(hash);
    std::replace(line.begin(), line.end(), ',', ' ');
    std::istringstream fields(line);
    std::string tok;
    while (fields >> tok) {
      try {
        std::size_t used = 0;
        values.push_back(std::stoull(tok, &used));
        if (used != tok.size()) throw std::invalid_argument(tok);
      } catch (const std::exception&) {
        throw Error(ErrorCode::parse_error, "bad table entry '" + tok + "' in " + path);
      }
    }
  }
  return table(std::move(values));
}

IndexTransform IndexTransform::parse(const std::string& text) {
  if (!text.empty() && text.front() == '{') {
    nlohmann::json j;
    try {
      j = nlohmann::json::parse(text);
      const std::string kind = j.at("kind").get<std::string>();
      if (kind == "sod") return sum_of_digits(j.at("q").get<unsigned>());
      if (kind == "pow") return floor_power(j.at("u").get<unsigned>(), j.at("v").get<unsigned>());
      if (kind == "table") return load_table(j.at("path").get<std::string>());
      if (kind == "id") return identity();
    } catch (const nlohmann::json::exception& e) {
      throw Error(ErrorCode::parse_error, std::string("bad transform JSON: ") + e.what());
    }
    throw Error(ErrorCode::parse_error, "unknown transform kind in '" + text + "'");
  }
  if (text == "id" || text.empty()) return identity();
  const auto colon = text.find(':');
  const std::string kind = text.substr(0, colon);
  const std::string arg = colon == std::string::npos ? "" : text.substr(colon + 1);
  try {
    if (kind == "sod") return sum_of_digits(static_cast<unsigned>(std::stoul(arg)));
    if (kind == "pow") {
      const auto slash = arg.find('/');
      if (slash == std::string::npos) throw std::invalid_argument(arg);
      return floor_power(static_cast<unsigned>(std::stoul(arg.substr(0, slash))),
                         static_cast<unsigned>(std::stoul(arg.substr(slash + 1))));
    }
    if (kind == "table") return load_table(arg);
  } catch (const std::invalid_argument&) {
  } catch (const std::out_of_range&) {
  }
  throw Error(ErrorCode::parse_error,
              "unknown transform '" + text + "' (expected sod:Q, pow:U/V, table:PATH, id)");
}

bool IndexTransform::is_monotone() const {
  return !std::holds_alternative<SumOfDigitsTransform>(variant_);
}

std::string IndexTransform::describe() const {
  return std::visit(
      [](const auto& v) -> std::string {
        using T = std::decay_t<decltype(v)>;
        if constexpr (std::is_same_v<T, IdentityTransform>) return "id";
        else if constexpr (std::is_same_v<T, SumOfDigitsTransform>) return "sod:" + std::to_string(v.q);
        else if constexpr (std::is_same_v<T, FloorPowerTransform>)
          return "pow:" + std::to_string(v.u) + "/" + std::to_string(v.v);
        else return "table:" + std::to_string(v.values.size());
      },
      variant_);
}

// --- Integer roots --------------------------------------------------------------

namespace {

using u128 = unsigned __int128;

// r^k, saturating at 2^128 - 1.
u128 pow_saturating(u128 r, unsigned k) {
  u128 out = 1;
  for (unsigned i = 0; i < k; ++i) {
    if (r != 0 && out > ~u128{0} / r) return ~u128{0};
    out *= r;
  }
  return out;
}

unsigned bit_length(u128 x) {
  unsigned bits = 0;
  while (x) {
    ++bits;
    x >>= 1;
  }
  return bits;
}

u128 root_floor_u128(u128 x, unsigned k) {
  if (k == 1 || x < 2) return x;
  u128 lo = 0, hi = u128{1} << (bit_length(x) / k + 1);
  while (lo < hi) {  // largest r with r^k <= x
    const u128 mid = lo + (hi - lo + 1) / 2;
    if (pow_saturating(mid, k) <= x) lo = mid;
    else hi = mid - 1;
  }
  return lo;
}

bool fits_u128(const BigInt& x) { return x >= 0 && (x == 0 || msb(x) < 127); }

u128 to_u128(const BigInt& x) {
  u128 out = 0;
  BigInt rest = x;
  unsigned shift = 0;
  while (rest > 0) {
    out |= u128(static_cast<std::uint64_t>(rest & 0xFFFFFFFFFFFFFFFFull)) << shift;
    rest >>= 64;
    shift += 64;
  }
  return out;
}

BigInt from_u128(u128 x) {
  BigInt out = static_cast<std::uint64_t>(x >> 64);
  out <<= 64;
  out += static_cast<std::uint64_t>(x);
  return out;
}

std::uint64_t pow_floor(std::uint64_t n, unsigned u, unsigned v) {
  // floor(n^(u/v)) = floor((n^u)^(1/v))
  u128 nu = 1;
  bool fits = true;
  for (unsigned i = 0; i < u && fits; ++i) {
    if (n != 0 && nu > (~u128{0} >> 1) / n) fits = false;
    else nu *= n;
  }
  if (fits) return static_cast<std::uint64_t>(root_floor_u128(nu, v));
  return to_u64(root_floor(boost::multiprecision::pow(BigInt(n), u), v));
}

}  // namespace

BigInt root_floor(const BigInt& x, unsigned k) {
  if (x < 0 || k == 0) throw Error(ErrorCode::invalid_argument, "bad integer root");
  if (fits_u128(x)) return from_u128(root_floor_u128(to_u128(x), k));
  BigInt lo = 0, hi = BigInt(1) << (msb(x) / k + 2);
  while (lo < hi) {
    BigInt mid = lo + (hi - lo + 1) / 2;
    if (boost::multiprecision::pow(mid, k) <= x) lo = mid;
    else hi = mid - 1;
  }
  return lo;
}

BigInt root_ceil(const BigInt& x, unsigned k) {
  BigInt r = root_floor(x, k);
  if (boost::multiprecision::pow(r, k) < x) ++r;
  return r;
}

std::uint64_t IndexTransform::operator()(std::uint64_t n) const {
  return std::visit(
      [n](const auto& v) -> std::uint64_t {
        using T = std::decay_t<decltype(v)>;
        if constexpr (std::is_same_v<T, IdentityTransform>) {
          return n;
        } else if constexpr (std::is_same_v<T, SumOfDigitsTransform>) {
          return lowdisc::sum_of_digits(n, v.q);
        } else if constexpr (std::is_same_v<T, FloorPowerTransform>) {
          return pow_floor(n, v.u, v.v);
        } else {
          if (n >= v.values.size())
            throw Error(ErrorCode::out_of_table,
                        "index " + std::to_string(n) + " outside transform table of size " +
                            std::to_string(v.values.size()));
          return v.values[n];
        }
      },
      variant_);
}

std::uint64_t apply(const IndexTransform& t, std::uint64_t n) { return t(n); }

std::uint64_t first_index_at_least(const IndexTransform& t, std::uint64_t k) {
  return std::visit(
      [k](const auto& v) -> std::uint64_t {
        using T = std::decay_t<decltype(v)>;
        if constexpr (std::is_same_v<T, IdentityTransform>) {
          return k;
        } else if constexpr (std::is_same_v<T, SumOfDigitsTransform>) {
          throw Error(ErrorCode::unsupported, "sum-of-digits is not monotone");
        } else if constexpr (std::is_same_v<T, FloorPowerTransform>) {
          // smallest n with n^u >= k^v
          return to_u64(root_ceil(boost::multiprecision::pow(BigInt(k), v.v), v.u));
        } else {
          auto it = std::lower_bound(v.values.begin(), v.values.end(), k);
          if (it == v.values.end())
            throw Error(ErrorCode::out_of_table, "value " + std::to_string(k) +
                                                     " not reached inside the transform table");
          return static_cast<std::uint64_t>(it - v.values.begin());
        }
      },
      t.variant());
}

std::uint64_t multiplicity_F(const IndexTransform& t, std::uint64_t k) {
  if (std::holds_alternative<SumOfDigitsTransform>(t.variant()))
    throw Error(ErrorCode::unsupported, "F(k) is infinite for the sum-of-digits transform");
  if (const auto* tab = std::get_if<TableTransform>(&t.variant())) {
    if (k >= tab->values.back())
      throw Error(ErrorCode::out_of_table,
                  "F(" + std::to_string(k) + ") is not determined by a finite table");
  }
  return first_index_at_least(t, checked_add(k, 1)) - first_index_at_least(t, k);
}

// --- Histograms -------------------------------------------------------------

namespace {

Counts sod_prefix_histogram(unsigned q, std::uint64_t N) {
  Counts out;
  const DigitVector digits = expand(N, q);
  std::uint64_t prefix = 0;
  for (std::size_t r = digits.size(); r-- > 0;) {
    const unsigned a = digits.digits[r];
    if (a > 0) {
      const auto dist = distribution(q, static_cast<unsigned>(r));
      for (unsigned lead = 0; lead < a; ++lead)
        for (std::size_t k = 0; k < dist.counts.size(); ++k)
          out[prefix + lead + k] += to_u64(dist.counts[k]);
    }
    prefix += a;
  }
  return out;
}

void require_budget(std::uint64_t evaluations, std::uint64_t budget) {
  if (evaluations > budget)
    throw Error(ErrorCode::budget_exceeded,
                "scan of " + std::to_string(evaluations) + " evaluations exceeds budget " +
                    std::to_string(budget));
}

}  // namespace

Counts histogram(const IndexTransform& t, std::uint64_t begin, std::uint64_t end,
                 std::uint64_t budget) {
  if (end < begin) throw Error(ErrorCode::invalid_argument, "histogram range reversed");
  Counts out;
  if (begin == end) return out;
  if (const auto* sod = std::get_if<SumOfDigitsTransform>(&t.variant())) {
    out = sod_prefix_histogram(sod->q, end);
    for (const auto& [k, c] : sod_prefix_histogram(sod->q, begin)) {
      out[k] -= c;
      if (out[k] == 0) out.erase(k);
    }
    return out;
  }
  if (std::holds_alternative<FloorPowerTransform>(t.variant())) {
    const std::uint64_t lo = t(begin), hi = t(end - 1);
    require_budget(hi - lo + 1, budget);
    std::uint64_t start = begin;
    for (std::uint64_t k = lo; k <= hi; ++k) {
      const std::uint64_t stop = k == hi ? end : std::min(end, first_index_at_least(t, k + 1));
      if (stop > start) out[k] = stop - start;
      start = stop;
    }
    return out;
  }
  require_budget(end - begin, budget);
  for (std::uint64_t n = begin; n < end; ++n) ++out[t(n)];
  return out;
}

// --- Chains and block statistics --------------------------------------------

DivisibilityChain::DivisibilityChain(std::vector<std::uint64_t> terms) : terms_(std::move(terms)) {
  if (terms_.empty() || terms_.front() != 1)
    throw Error(ErrorCode::invalid_argument, "divisibility chain must start with N_0 = 1");
  for (std::size_t j = 1; j < terms_.size(); ++j)
    if (terms_[j] <= terms_[j - 1] || terms_[j] % terms_[j - 1] != 0)
      throw Error(ErrorCode::invalid_argument,
                  "not a divisibility chain at j=" + std::to_string(j));
}

DivisibilityChain DivisibilityChain::powers(std::uint64_t q, unsigned length) {
  if (q < 2) throw Error(ErrorCode::invalid_base, "chain ratio must be at least 2");
  std::vector<std::uint64_t> terms{1};
  for (unsigned j = 1; j < length; ++j) terms.push_back(checked_mul(terms.back(), q));
  return DivisibilityChain(std::move(terms));
}

std::uint64_t DivisibilityChain::operator[](std::size_t j) const {
  if (j >= terms_.size())
    throw Error(ErrorCode::invalid_argument,
                "chain prefix too short for level " + std::to_string(j));
  return terms_[j];
}

std::optional<std::uint64_t> DivisibilityChain::power_base() const {
  if (terms_.size() < 2) return std::nullopt;
  const std::uint64_t q = terms_[1];
  for (std::size_t j = 1; j < terms_.size(); ++j)
    if (terms_[j] != terms_[j - 1] * q) return std::nullopt;
  return q;
}

namespace {

const SumOfDigitsTransform* sod_on_matching_chain(const IndexTransform& t,
                                                  const DivisibilityChain& chain) {
  const auto* sod = std::get_if<SumOfDigitsTransform>(&t.variant());
  if (!sod) return nullptr;
  const auto q = chain.power_base();
  if (chain.size() == 1 || (q && *q == sod->q)) return sod;
  return nullptr;
}

}  // namespace

Counts block_counts_G(const IndexTransform& t, std::uint64_t A, unsigned j,
                      const DivisibilityChain& chain, std::uint64_t budget) {
  const std::uint64_t Nj = chain[j];
  if (const auto* sod = sod_on_matching_chain(t, chain)) {
    const std::uint64_t shift = sum_of_digits(A, sod->q);
    const auto dist = distribution(sod->q, j);
    Counts out;
    for (std::size_t k = 0; k < dist.counts.size(); ++k) out[shift + k] = to_u64(dist.counts[k]);
    return out;
  }
  return histogram(t, checked_mul(A, Nj), checked_mul(A + 1, Nj), budget);
}

std::uint64_t distinct_values_v(const IndexTransform& t, std::uint64_t A, unsigned j,
                                const DivisibilityChain& chain, std::uint64_t budget) {
  if (const auto* sod = sod_on_matching_chain(t, chain)) {
    (void)chain[j];
    return std::uint64_t{j} * (sod->q - 1) + 1;
  }
  return block_counts_G(t, A, j, chain, budget).size();
}

namespace {

template <class Seq, class Less>
bool unimodal_sequence(const Seq& seq, Less less) {
  bool descending = false;
  for (std::size_t i = 1; i < seq.size(); ++i) {
    if (less(seq[i], seq[i - 1])) descending = true;
    else if (descending && less(seq[i - 1], seq[i])) return false;
  }
  return true;
}

}  // namespace

bool is_unimodal(const Counts& counts) {
  if (counts.empty()) return true;
  const std::uint64_t lo = counts.begin()->first, hi = counts.rbegin()->first;
  std::vector<std::uint64_t> dense(hi - lo + 1, 0);
  for (const auto& [k, c] : counts) dense[k - lo] = c;
  return unimodal_sequence(dense, std::less<>{});
}

bool is_unimodal(const std::vector<BigInt>& counts) {
  return unimodal_sequence(counts, [](const BigInt& a, const BigInt& b) { return a < b; });
}

CountingProfile counting_profile(const IndexTransform& t, const DivisibilityChain& chain,
                                 unsigned d, std::uint64_t a_window, std::uint64_t budget) {
  CountingProfile profile;
  for (unsigned j = 0; j <= d; ++j) {
    BlockStats stats;
    stats.j = j;
    stats.N_j = chain[j];
    if (const auto* sod = sod_on_matching_chain(t, chain)) {
      const auto dist = distribution(sod->q, j);
      for (const auto& c : dist.counts) stats.G = std::max(stats.G, to_u64(c));
      stats.v = std::uint64_t{j} * (sod->q - 1) + 1;
      stats.unimodal = is_unimodal(dist.counts);
      if (!stats.unimodal) stats.violating_A = 0;
      stats.exact = true;
    } else {
      if (a_window == 0) throw Error(ErrorCode::invalid_argument, "empty A window");
      for (std::uint64_t A = 0; A < a_window; ++A) {
        const Counts g = block_counts_G(t, A, j, chain, budget);
        for (const auto& [k, c] : g) stats.G = std::max(stats.G, c);
        stats.v = std::max<std::uint64_t>(stats.v, g.size());
        if (stats.unimodal && !is_unimodal(g)) {
          stats.unimodal = false;
          stats.violating_A = A;
        }
      }
    }
    profile.levels.push_back(stats);
  }
  return profile;
}

}  // namespace lowdisc
