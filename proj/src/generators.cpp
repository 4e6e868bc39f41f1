#include "lowdisc/generators.hpp"

#include "lowdisc/parallel.hpp"

#include <charconv>
#include <cstdio>
#include <istream>
#include <numeric>
#include <ostream>
#include <sstream>

namespace lowdisc {

bool is_prime(std::uint64_t p) {
  if (p < 2) return false;
  for (std::uint64_t d = 2; d * d <= p; ++d)
    if (p % d == 0) return false;
  return true;
}

GeneratorMatrix::GeneratorMatrix(unsigned p, unsigned size)
    : p_(p), size_(size), entries_(std::size_t{size} * size, 0) {
  if (!is_prime(p))
    throw Error(ErrorCode::invalid_base, "generator matrices need a prime modulus, got " +
                                             std::to_string(p));
}

GeneratorMatrix::GeneratorMatrix(unsigned p, unsigned size, std::vector<unsigned> entries)
    : GeneratorMatrix(p, size) {
  if (entries.size() != entries_.size())
    throw Error(ErrorCode::invalid_argument, "generator matrix entry count mismatch");
  for (std::size_t i = 0; i < entries.size(); ++i) entries_[i] = entries[i] % p;
}

GeneratorMatrix GeneratorMatrix::identity(unsigned p, unsigned size) {
  GeneratorMatrix out(p, size);
  for (unsigned i = 0; i < size; ++i) out.set(i, i, 1);
  return out;
}

void GeneratorMatrix::set(unsigned row, unsigned col, unsigned value) {
  entries_[std::size_t{row} * size_ + col] = value % p_;
}

GeneratorMatrix multiply(const GeneratorMatrix& a, const GeneratorMatrix& b) {
  if (a.p() != b.p() || a.size() != b.size())
    throw Error(ErrorCode::invalid_argument, "incompatible generator matrices");
  const unsigned n = a.size();
  GeneratorMatrix out(a.p(), n);
  for (unsigned r = 0; r < n; ++r)
    for (unsigned c = 0; c < n; ++c) {
      std::uint64_t acc = 0;
      for (unsigned k = 0; k < n; ++k) acc += std::uint64_t{a.at(r, k)} * b.at(k, c);
      out.set(r, c, static_cast<unsigned>(acc % a.p()));
    }
  return out;
}

// --- SequenceSpec -----------------------------------------------------------

SequenceSpec SequenceSpec::van_der_corput(unsigned base) {
  require_base(base);
  return SequenceSpec(VanDerCorputSpec{base});
}

SequenceSpec SequenceSpec::halton(std::vector<unsigned> bases) {
  if (bases.empty())
    throw Error(ErrorCode::invalid_argument, "Halton sequence needs at least one base");
  for (unsigned b : bases) require_base(b);
  for (std::size_t i = 0; i < bases.size(); ++i)
    for (std::size_t j = i + 1; j < bases.size(); ++j)
      if (std::gcd(bases[i], bases[j]) != 1)
        throw Error(ErrorCode::invalid_base,
                    "Halton bases must be pairwise co-prime: " + std::to_string(bases[i]) +
                        " and " + std::to_string(bases[j]));
  return SequenceSpec(HaltonSpec{std::move(bases)});
}

SequenceSpec SequenceSpec::digital(unsigned p, std::vector<GeneratorMatrix> matrices) {
  if (!is_prime(p))
    throw Error(ErrorCode::invalid_base, "digital sequences need a prime base");
  if (matrices.empty())
    throw Error(ErrorCode::invalid_argument, "digital sequence needs generator matrices");
  const unsigned precision = matrices.front().size();
  for (const auto& c : matrices)
    if (c.p() != p || c.size() != precision)
      throw Error(ErrorCode::invalid_argument,
                  "generator matrices must share modulus and size");
  return SequenceSpec(DigitalSpec{p, std::move(matrices), precision});
}

namespace {

std::vector<std::string> split(const std::string& text, char sep) {
  std::vector<std::string> parts;
  std::string cur;
  std::istringstream in(text);
  while (std::getline(in, cur, sep)) parts.push_back(cur);
  if (!text.empty() && text.back() == sep) parts.emplace_back();
  return parts;
}

unsigned parse_unsigned(const std::string& s) {
  unsigned v = 0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size() || s.empty())
    throw Error(ErrorCode::parse_error, "expected an unsigned integer, got '" + s + "'");
  return v;
}

}  // namespace

SequenceSpec SequenceSpec::parse(const std::string& text) {
  const auto parts = split(text, ':');
  if (parts.empty()) throw Error(ErrorCode::parse_error, "empty sequence spec");
  const std::string& kind = parts[0];
  if (kind == "vdc" && parts.size() == 2) return van_der_corput(parse_unsigned(parts[1]));
  if (kind == "halton" && parts.size() == 2) {
    std::vector<unsigned> bases;
    for (const auto& b : split(parts[1], ',')) bases.push_back(parse_unsigned(b));
    return halton(std::move(bases));
  }
  if (kind == "faure" && (parts.size() == 3 || parts.size() == 4)) {
    const unsigned p = parse_unsigned(parts[1]);
    const unsigned s = parse_unsigned(parts[2]);
    const unsigned prec = parts.size() == 4 ? parse_unsigned(parts[3]) : kDefaultPrecision;
    return digital(p, pascal_matrices(p, s, prec));
  }
  if (kind == "identity" && (parts.size() == 2 || parts.size() == 3)) {
    const unsigned p = parse_unsigned(parts[1]);
    const unsigned prec = parts.size() == 3 ? parse_unsigned(parts[2]) : kDefaultPrecision;
    return digital(p, {GeneratorMatrix::identity(p, prec)});
  }
  throw Error(ErrorCode::parse_error,
              "unknown sequence spec '" + text +
                  "' (expected vdc:B, halton:B1,B2,..., faure:P:S[:PREC], identity:P[:PREC])");
}

unsigned SequenceSpec::dimension() const {
  return std::visit(
      [](const auto& v) -> unsigned {
        using T = std::decay_t<decltype(v)>;
        if constexpr (std::is_same_v<T, VanDerCorputSpec>) return 1;
        else if constexpr (std::is_same_v<T, HaltonSpec>) return static_cast<unsigned>(v.bases.size());
        else return static_cast<unsigned>(v.matrices.size());
      },
      variant_);
}

unsigned SequenceSpec::coordinate_base(unsigned i) const {
  return std::visit(
      [i](const auto& v) -> unsigned {
        using T = std::decay_t<decltype(v)>;
        if constexpr (std::is_same_v<T, VanDerCorputSpec>) return v.base;
        else if constexpr (std::is_same_v<T, HaltonSpec>) return v.bases.at(i);
        else return v.p;
      },
      variant_);
}

std::string SequenceSpec::describe() const {
  return std::visit(
      [](const auto& v) -> std::string {
        using T = std::decay_t<decltype(v)>;
        if constexpr (std::is_same_v<T, VanDerCorputSpec>) {
          return "vdc:" + std::to_string(v.base);
        } else if constexpr (std::is_same_v<T, HaltonSpec>) {
          std::string out = "halton:";
          for (std::size_t i = 0; i < v.bases.size(); ++i)
            out += (i ? "," : "") + std::to_string(v.bases[i]);
          return out;
        } else {
          return "digital:" + std::to_string(v.p) + ":s=" +
                 std::to_string(v.matrices.size()) + ":prec=" + std::to_string(v.precision);
        }
      },
      variant_);
}

namespace {

BRational digital_coordinate(const DigitalSpec& spec, const GeneratorMatrix& c,
                             std::span<const unsigned> digits) {
  BigInt num = 0;
  for (unsigned r = 0; r < spec.precision; ++r) {
    std::uint64_t acc = 0;
    const auto row = c.row(r);
    for (std::size_t col = 0; col < digits.size(); ++col)
      acc += std::uint64_t{row[col]} * digits[col];
    num = num * spec.p + static_cast<unsigned>(acc % spec.p);
  }
  return BRational(std::move(num), spec.p, spec.precision).normalized();
}

}  // namespace

Point SequenceSpec::point(std::uint64_t n) const {
  return std::visit(
      [n](const auto& v) -> Point {
        using T = std::decay_t<decltype(v)>;
        Point out;
        if constexpr (std::is_same_v<T, VanDerCorputSpec>) {
          out.coords.push_back(radical_inverse(n, v.base));
        } else if constexpr (std::is_same_v<T, HaltonSpec>) {
          for (unsigned b : v.bases) out.coords.push_back(radical_inverse(n, b));
        } else {
          const DigitVector d = expand(n, v.p);
          if (d.size() > v.precision)
            throw Error(ErrorCode::index_out_of_precision,
                        "index " + std::to_string(n) + " needs " + std::to_string(d.size()) +
                            " digits but the generator matrices have precision " +
                            std::to_string(v.precision));
          for (const auto& c : v.matrices)
            out.coords.push_back(digital_coordinate(v, c, d.digits));
        }
        return out;
      },
      variant_);
}

std::vector<Point> generate(const SequenceSpec& spec, std::span<const std::uint64_t> indices) {
  std::vector<Point> out(indices.size());
  parallel_for(indices.size(), [&](std::size_t i) { out[i] = spec.point(indices[i]); });
  return out;
}

std::vector<Point> generate_range(const SequenceSpec& spec, std::uint64_t first,
                                  std::uint64_t count) {
  std::vector<std::uint64_t> idx(count);
  std::iota(idx.begin(), idx.end(), first);
  return generate(spec, idx);
}

// --- Matrices and net checks --------------------------------------------------

std::vector<GeneratorMatrix> pascal_matrices(unsigned p, unsigned s, unsigned precision) {
  if (!is_prime(p)) throw Error(ErrorCode::invalid_base, "Pascal matrices need a prime p");
  if (s == 0 || s > p)
    throw Error(ErrorCode::invalid_argument,
                "Faure construction needs 1 <= s <= p, got s=" + std::to_string(s));
  // binom[c][r] mod p
  std::vector<std::vector<unsigned>> binom(precision, std::vector<unsigned>(precision, 0));
  for (unsigned c = 0; c < precision; ++c) {
    binom[c][0] = 1;
    for (unsigned r = 1; r <= c; ++r)
      binom[c][r] = (binom[c - 1][r - 1] + (r < c ? binom[c - 1][r] : 0)) % p;
  }
  std::vector<GeneratorMatrix> out;
  for (unsigned j = 0; j < s; ++j) {
    GeneratorMatrix m(p, precision);
    for (unsigned r = 0; r < precision; ++r) {
      std::uint64_t power = 1;  // j^(c-r), with 0^0 = 1
      for (unsigned c = r; c < precision; ++c) {
        m.set(r, c, static_cast<unsigned>(binom[c][r] * power % p));
        power = power * j % p;
      }
    }
    out.push_back(std::move(m));
  }
  return out;
}

namespace {

std::uint64_t inverse_mod(std::uint64_t a, std::uint64_t p) {
  std::uint64_t result = 1, e = p - 2;
  a %= p;
  while (e) {
    if (e & 1) result = result * a % p;
    a = a * a % p;
    e >>= 1;
  }
  return result;
}

unsigned rank_mod_p(std::vector<std::vector<unsigned>> rows, unsigned p) {
  unsigned rank = 0;
  const std::size_t cols = rows.empty() ? 0 : rows.front().size();
  for (std::size_t c = 0; c < cols && rank < rows.size(); ++c) {
    std::size_t pivot = rank;
    while (pivot < rows.size() && rows[pivot][c] == 0) ++pivot;
    if (pivot == rows.size()) continue;
    std::swap(rows[pivot], rows[rank]);
    const std::uint64_t inv = inverse_mod(rows[rank][c], p);
    for (std::size_t r = 0; r < rows.size(); ++r) {
      if (r == rank || rows[r][c] == 0) continue;
      const std::uint64_t factor = rows[r][c] * inv % p;
      for (std::size_t k = c; k < cols; ++k)
        rows[r][k] = static_cast<unsigned>((rows[r][k] + (p - factor) * rows[rank][k]) % p);
    }
    ++rank;
  }
  return rank;
}

// Calls visit(d) for every composition of total into parts non-negative parts,
// in lexicographic order. Stops early when visit returns false.
template <class Visit>
bool for_each_composition(unsigned total, unsigned parts, Visit&& visit) {
  std::vector<unsigned> d(parts, 0);
  auto rec = [&](auto&& self, unsigned i, unsigned left) -> bool {
    if (i + 1 == parts) {
      d[i] = left;
      return visit(d);
    }
    for (unsigned v = 0; v <= left; ++v) {
      d[i] = v;
      if (!self(self, i + 1, left - v)) return false;
    }
    return true;
  };
  if (parts == 0) return total == 0 ? visit(d) : true;
  return rec(rec, 0, total);
}

}  // namespace

bool check_rank_condition(std::span<const GeneratorMatrix> matrices, unsigned t, unsigned m) {
  if (matrices.empty()) throw Error(ErrorCode::invalid_argument, "no generator matrices");
  const unsigned precision = matrices.front().size();
  const unsigned p = matrices.front().p();
  if (m < t) throw Error(ErrorCode::invalid_argument, "rank condition needs m >= t");
  if (m > precision)
    throw Error(ErrorCode::index_out_of_precision,
                "m=" + std::to_string(m) + " exceeds matrix precision " + std::to_string(precision));
  const unsigned s = static_cast<unsigned>(matrices.size());
  return for_each_composition(m - t, s, [&](const std::vector<unsigned>& d) {
    std::vector<std::vector<unsigned>> rows;
    for (unsigned j = 0; j < s; ++j)
      for (unsigned r = 0; r < d[j]; ++r) {
        auto row = matrices[j].row(r);
        rows.emplace_back(row.begin(), row.begin() + m);
      }
    return rank_mod_p(std::move(rows), p) == m - t;
  });
}

std::string to_string(const ElementaryInterval& interval) {
  std::string out;
  for (std::size_t i = 0; i < interval.a.size(); ++i) {
    if (i) out += ";";
    out += "a=" + std::to_string(interval.a[i]) + ",d=" + std::to_string(interval.d[i]);
  }
  return out;
}

NetCheckResult check_net(std::span<const Point> points, unsigned b, unsigned t, unsigned m,
                         unsigned s) {
  require_base(b);
  if (t > m) throw Error(ErrorCode::invalid_argument, "net check needs t <= m");
  const std::uint64_t bm = checked_pow(b, m);
  if (points.size() != bm)
    throw Error(ErrorCode::invalid_argument, "a (t,m,s)-net in base " + std::to_string(b) +
                                                 " has " + std::to_string(bm) + " points, got " +
                                                 std::to_string(points.size()));
  // floor(x * b^m) per point and coordinate; coarser cells follow by division.
  std::vector<std::uint64_t> fine(points.size() * s);
  const BigInt scale = boost::multiprecision::pow(BigInt(b), m);
  for (std::size_t n = 0; n < points.size(); ++n) {
    if (points[n].dim() != s)
      throw Error(ErrorCode::invalid_argument, "point dimension does not match s");
    for (unsigned i = 0; i < s; ++i) {
      const BRational& x = points[n].coords[i];
      fine[n * s + i] = to_u64(x.num() * scale / x.denominator());
    }
  }
  std::vector<std::uint64_t> pow_b(m + 1, 1);
  for (unsigned k = 1; k <= m; ++k) pow_b[k] = pow_b[k - 1] * b;
  const std::uint64_t cells = pow_b[m - t];
  const std::uint64_t expected = pow_b[t];

  NetCheckResult result;
  result.expected = expected;
  std::vector<std::uint64_t> count(cells);
  for_each_composition(m - t, s, [&](const std::vector<unsigned>& d) {
    std::fill(count.begin(), count.end(), 0);
    for (std::size_t n = 0; n < points.size(); ++n) {
      std::uint64_t cell = 0;
      for (unsigned i = 0; i < s; ++i)
        cell = cell * pow_b[d[i]] + fine[n * s + i] / pow_b[m - d[i]];
      ++count[cell];
    }
    for (std::uint64_t cell = 0; cell < cells; ++cell) {
      if (count[cell] == expected) continue;
      ElementaryInterval where{std::vector<std::uint64_t>(s), d};
      std::uint64_t rest = cell;
      for (unsigned i = s; i-- > 0;) {
        where.a[i] = rest % pow_b[d[i]];
        rest /= pow_b[d[i]];
      }
      result.ok = false;
      result.violation = std::move(where);
      result.found = count[cell];
      return false;
    }
    return true;
  });
  if (result.ok) result.found = expected;
  return result;
}

SequenceCheckResult check_sequence_property(const SequenceSpec& spec, unsigned b, unsigned t,
                                            unsigned s, std::uint64_t k_max, unsigned m_max) {
  if (spec.dimension() != s)
    throw Error(ErrorCode::invalid_argument, "sequence dimension does not match s");
  SequenceCheckResult result;
  for (unsigned m = t; m <= m_max; ++m) {
    const std::uint64_t bm = checked_pow(b, m);
    for (std::uint64_t k = 0; k <= k_max; ++k) {
      const auto pts = generate_range(spec, checked_mul(k, bm), bm);
      auto net = check_net(pts, b, t, m, s);
      if (!net) {
        result.ok = false;
        result.block = k;
        result.m = m;
        result.net = std::move(net);
        return result;
      }
    }
  }
  return result;
}

// --- Point files --------------------------------------------------------------

void write_points_csv(std::ostream& out, std::span<const IndexedPoint> points) {
  const std::size_t dim = points.empty() ? 1 : points.front().point.dim();
  out << "n,dim";
  for (std::size_t i = 1; i <= dim; ++i)
    out << ",base_" << i << ",prec_" << i << ",num_" << i << ",float_" << i;
  out << '\n';
  char buf[64];
  for (const auto& ip : points) {
    if (ip.point.dim() != dim)
      throw Error(ErrorCode::invalid_argument, "mixed dimensions in one point file");
    out << ip.n << ',' << dim;
    for (const auto& x : ip.point.coords) {
      std::snprintf(buf, sizeof buf, "%.17g", x.to_double());
      out << ',' << x.base() << ',' << x.prec() << ',' << x.num().str() << ',' << buf;
    }
    out << '\n';
  }
}

std::vector<IndexedPoint> read_points_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line) || line.rfind("n,dim", 0) != 0)
    throw Error(ErrorCode::parse_error, "point file must start with header 'n,dim,...'");
  std::vector<IndexedPoint> out;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const auto f = split(line, ',');
    if (f.size() < 2) throw Error(ErrorCode::parse_error, "short point row: " + line);
    IndexedPoint ip;
    ip.n = std::stoull(f[0]);
    const unsigned dim = parse_unsigned(f[1]);
    if (f.size() != 2 + 4 * std::size_t{dim})
      throw Error(ErrorCode::parse_error, "point row has wrong field count: " + line);
    for (unsigned i = 0; i < dim; ++i) {
      const unsigned base = parse_unsigned(f[2 + 4 * i]);
      const unsigned prec = parse_unsigned(f[3 + 4 * i]);
      ip.point.coords.emplace_back(BigInt(f[4 + 4 * i]), base, prec);
    }
    out.push_back(std::move(ip));
  }
  return out;
}

}  // namespace lowdisc
