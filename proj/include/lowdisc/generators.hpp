#pragma once

#include "lowdisc/digits.hpp"

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <variant>
#include <vector>

namespace lowdisc {

bool is_prime(std::uint64_t p);

/// Square generator matrix over F_p, row-major, entries reduced mod p.
class GeneratorMatrix {
 public:
  GeneratorMatrix(unsigned p, unsigned size);
  GeneratorMatrix(unsigned p, unsigned size, std::vector<unsigned> entries);

  static GeneratorMatrix identity(unsigned p, unsigned size);

  unsigned p() const { return p_; }
  unsigned size() const { return size_; }
  unsigned at(unsigned row, unsigned col) const { return entries_[row * size_ + col]; }
  void set(unsigned row, unsigned col, unsigned value);
  std::span<const unsigned> row(unsigned r) const {
    return {entries_.data() + std::size_t{r} * size_, size_};
  }

  friend bool operator==(const GeneratorMatrix&, const GeneratorMatrix&) = default;

 private:
  unsigned p_;
  unsigned size_;
  std::vector<unsigned> entries_;
};

GeneratorMatrix multiply(const GeneratorMatrix& a, const GeneratorMatrix& b);

struct VanDerCorputSpec {
  unsigned base;
};

struct HaltonSpec {
  std::vector<unsigned> bases;
};

struct DigitalSpec {
  unsigned p;
  std::vector<GeneratorMatrix> matrices;
  unsigned precision;
};

/// Coordinates of one point; every coordinate lies in [0, 1).
struct Point {
  std::vector<BRational> coords;

  std::size_t dim() const { return coords.size(); }
  friend bool operator==(const Point&, const Point&) = default;
};

/// Declarative description of a point sequence. Constructors validate.
class SequenceSpec {
 public:
  using Variant = std::variant<VanDerCorputSpec, HaltonSpec, DigitalSpec>;

  static constexpr unsigned kDefaultPrecision = 32;

  static SequenceSpec van_der_corput(unsigned base);
  static SequenceSpec halton(std::vector<unsigned> bases);
  static SequenceSpec digital(unsigned p, std::vector<GeneratorMatrix> matrices);

  /// Parses "vdc:2", "halton:2,3", "faure:3:2[:prec]", "identity:2[:prec]".
  static SequenceSpec parse(const std::string& text);

  const Variant& variant() const { return variant_; }
  unsigned dimension() const;
  /// Base of coordinate i.
  unsigned coordinate_base(unsigned i) const;
  std::string describe() const;

  Point point(std::uint64_t n) const;

 private:
  explicit SequenceSpec(Variant v) : variant_(std::move(v)) {}
  Variant variant_;
};

std::vector<Point> generate(const SequenceSpec& spec,
                            std::span<const std::uint64_t> indices);
std::vector<Point> generate_range(const SequenceSpec& spec, std::uint64_t first,
                                  std::uint64_t count);

/// Faure construction: matrix j is the j-th power (j = 0..s-1) of the upper
/// triangular Pascal matrix mod p.
std::vector<GeneratorMatrix> pascal_matrices(unsigned p, unsigned s,
                                             unsigned precision);

/// For every composition d_1 + ... + d_s = m - t, the first d_j rows of each
/// C_j, truncated to m columns, are linearly independent over F_p.
bool check_rank_condition(std::span<const GeneratorMatrix> matrices, unsigned t,
                          unsigned m);

/// prod_i [a_i b^-d_i, (a_i + 1) b^-d_i)
struct ElementaryInterval {
  std::vector<std::uint64_t> a;
  std::vector<unsigned> d;

  friend bool operator==(const ElementaryInterval&, const ElementaryInterval&) = default;
};

std::string to_string(const ElementaryInterval& interval);

struct NetCheckResult {
  bool ok = true;
  std::optional<ElementaryInterval> violation;
  std::uint64_t found = 0;
  std::uint64_t expected = 0;

  explicit operator bool() const { return ok; }
};

NetCheckResult check_net(std::span<const Point> points, unsigned b, unsigned t,
                         unsigned m, unsigned s);

struct SequenceCheckResult {
  bool ok = true;
  std::uint64_t block = 0;  // k of the first failing block
  unsigned m = 0;
  NetCheckResult net;

  explicit operator bool() const { return ok; }
};

/// check_net on every block k*b^m .. (k+1)*b^m - 1 for k <= k_max and
/// t <= m <= m_max.
SequenceCheckResult check_sequence_property(const SequenceSpec& spec, unsigned b,
                                            unsigned t, unsigned s,
                                            std::uint64_t k_max, unsigned m_max);

/// Point file: header `n,dim,base_1,prec_1,num_1,float_1,...`. The exact
/// fields are authoritative; floats are advisory.
struct IndexedPoint {
  std::uint64_t n;
  Point point;
};

void write_points_csv(std::ostream& out, std::span<const IndexedPoint> points);
std::vector<IndexedPoint> read_points_csv(std::istream& in);

}  // namespace lowdisc
