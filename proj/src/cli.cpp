#include "lowdisc/cli.hpp"

#include "lowdisc/bounds.hpp"
#include "lowdisc/digitsum_dist.hpp"
#include "lowdisc/discrepancy.hpp"
#include "lowdisc/expsums.hpp"
#include "lowdisc/generators.hpp"
#include "lowdisc/parallel.hpp"
#include "lowdisc/transforms.hpp"

#include "CLI11.hpp"
#include "json.hpp"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>

namespace lowdisc::cli {

namespace {

struct RunConfig {
  std::string spec = "vdc:2";
  std::string transform = "id";
  std::string N = "1";
  std::string mode = "extreme";
  std::string what;
  std::string k = "1";
  std::string chain;
  std::string envelope = "measured";
  std::string alpha = "1/2";
  std::string out;
  std::string out_dir;
  std::string config;
  std::uint64_t start = 0;
  std::uint64_t shift_window = 0;
  std::uint64_t k_max = 0;  // 0: default window 4N
  std::uint64_t K = 16;
  std::uint64_t A = 0;
  std::uint64_t blocks = 1;
  std::uint64_t ncal = 0;
  std::uint64_t level_base = 0;
  std::uint64_t n_max = 1024;
  unsigned q = 2;
  unsigned j = 0;
  unsigned b = 2;
  unsigned g = 0;
  unsigned t = 0;
  unsigned m = 0;
  unsigned d = 0;
  unsigned dmax = 10;
  unsigned dcal = 0;
  unsigned threads = 0;
  double kappa = kDefaultStability;
};

/// A verification that ran to completion but did not hold.
struct VerificationFailed {
  std::string detail;
};

std::string fmt(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

std::string fmt(std::uint64_t x) { return std::to_string(x); }
std::string fmt(bool x) { return x ? "true" : "false"; }

// num,den of an exact rational in lowest terms.
std::string fraction_fields(const Rational& r) {
  return numerator(r).str() + "," + denominator(r).str();
}

void line(std::ostream& os, const std::vector<std::string>& fields) {
  for (std::size_t i = 0; i < fields.size(); ++i) {
    if (i) os << ',';
    os << fields[i];
  }
  os << '\n';
}

std::uint64_t parse_u64(const std::string& text) {
  std::size_t used = 0;
  unsigned long long value = 0;
  try {
    value = std::stoull(text, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used != text.size() || text.empty() || text.front() == '-')
    throw Error(ErrorCode::parse_error, "not a non-negative integer: '" + text + "'");
  return value;
}

/// "n", "a:b" (inclusive), "a:b:step" or "a,b,c".
std::vector<std::uint64_t> parse_range(const std::string& text) {
  std::vector<std::uint64_t> out;
  if (text.find(',') != std::string::npos) {
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) out.push_back(parse_u64(item));
    return out;
  }
  std::vector<std::string> parts;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ':')) parts.push_back(item);
  if (parts.size() == 1) return {parse_u64(parts[0])};
  if (parts.size() > 3) throw Error(ErrorCode::parse_error, "bad range '" + text + "'");
  const std::uint64_t a = parse_u64(parts[0]), b = parse_u64(parts[1]);
  const std::uint64_t step = parts.size() == 3 ? parse_u64(parts[2]) : 1;
  if (step == 0) throw Error(ErrorCode::parse_error, "range step must be positive");
  for (std::uint64_t x = a; x <= b; x += step) out.push_back(x);
  return out;
}

std::vector<std::uint64_t> positive_range(const std::string& text) {
  auto Ns = parse_range(text);
  for (auto N : Ns)
    if (N == 0) throw Error(ErrorCode::invalid_argument, "N must be >= 1");
  return Ns;
}

DivisibilityChain make_chain(const RunConfig& cfg, const IndexTransform& g, unsigned length) {
  if (!cfg.chain.empty() && cfg.chain.rfind("pow:", 0) != 0) {
    std::vector<std::uint64_t> terms;
    for (auto x : parse_range(cfg.chain)) terms.push_back(x);
    return DivisibilityChain(terms);
  }
  std::uint64_t q = 2;
  if (!cfg.chain.empty()) q = parse_u64(cfg.chain.substr(4));
  else if (const auto* sod = std::get_if<SumOfDigitsTransform>(&g.variant())) q = sod->q;
  return DivisibilityChain::powers(q, length);
}

unsigned transform_q(const IndexTransform& g) {
  if (const auto* sod = std::get_if<SumOfDigitsTransform>(&g.variant())) return sod->q;
  return 0;
}

std::vector<BRational> expand_1d(const std::vector<WeightedPoint>& points) {
  std::vector<BRational> out;
  for (const auto& wp : points) {
    if (wp.point.dim() != 1) throw Error(ErrorCode::invalid_argument, "one-dimensional spec required");
    for (std::uint64_t i = 0; i < wp.weight; ++i) out.push_back(wp.point.coords[0]);
  }
  return out;
}

// --- Subcommands ----------------------------------------------------------------

void cmd_gen(const RunConfig& cfg, std::ostream& os) {
  const auto spec = SequenceSpec::parse(cfg.spec);
  const auto g = IndexTransform::parse(cfg.transform);
  const std::uint64_t N = parse_u64(cfg.N);
  std::vector<std::uint64_t> indices(N);
  for (std::uint64_t i = 0; i < N; ++i) indices[i] = g(cfg.start + i);
  const auto points = generate(spec, indices);
  std::vector<IndexedPoint> rows;
  rows.reserve(N);
  for (std::uint64_t i = 0; i < N; ++i) rows.push_back({cfg.start + i, points[i]});
  write_points_csv(os, rows);
}

void cmd_transform(const RunConfig& cfg, std::ostream& os) {
  const auto g = IndexTransform::parse(cfg.transform);
  const std::string what = cfg.what.empty() ? "values" : cfg.what;
  if (what == "values") {
    line(os, {"n", "value"});
    const std::uint64_t N = parse_u64(cfg.N);
    for (std::uint64_t n = cfg.start; n < cfg.start + N; ++n) line(os, {fmt(n), fmt(g(n))});
  } else if (what == "F") {
    line(os, {"k", "F"});
    for (std::uint64_t k = 0; k < cfg.K; ++k) line(os, {fmt(k), fmt(multiplicity_F(g, k))});
  } else if (what == "G") {
    const auto chain = make_chain(cfg, g, cfg.j + 1);
    line(os, {"A", "j", "k", "G"});
    for (const auto& [k, count] : block_counts_G(g, cfg.A, cfg.j, chain))
      line(os, {fmt(cfg.A), fmt(std::uint64_t{cfg.j}), fmt(k), fmt(count)});
  } else if (what == "profile") {
    const auto chain = make_chain(cfg, g, cfg.d + 1);
    line(os, {"j", "N_j", "G", "v", "unimodal", "exact"});
    for (const auto& level : counting_profile(g, chain, cfg.d).levels)
      line(os, {fmt(std::uint64_t{level.j}), fmt(level.N_j), fmt(level.G), fmt(level.v),
                fmt(level.unimodal), fmt(level.exact)});
  } else {
    throw Error(ErrorCode::invalid_argument, "--what must be values, F, G or profile");
  }
}

void cmd_dist(const RunConfig& cfg, std::ostream& os) {
  const auto dist = distribution(cfg.q, cfg.j);
  line(os, {"q", "j", "k", "count", "gaussian_main"});
  for (std::size_t k = 0; k < dist.counts.size(); ++k)
    line(os, {fmt(std::uint64_t{cfg.q}), fmt(std::uint64_t{cfg.j}), fmt(std::uint64_t{k}),
              dist.counts[k].str(),
              cfg.j ? fmt(gaussian_main_term(cfg.q, cfg.j, double(k))) : std::string()});
}

void cmd_disc(const RunConfig& cfg, std::ostream& os) {
  const auto spec = SequenceSpec::parse(cfg.spec);
  const auto g = IndexTransform::parse(cfg.transform);
  const Mode mode = parse_mode(cfg.mode);
  line(os, {"N", "value_num", "value_den", "method", "witness", "value_float", "argmax_k"});
  for (const auto N : positive_range(cfg.N)) {
    DiscrepancyReport report;
    std::uint64_t argmax = cfg.start;
    if (cfg.shift_window > 0) {
      if (cfg.start != 0)
        throw Error(ErrorCode::invalid_argument, "--start and --shift-window are exclusive");
      const auto w = windowed_uniform_discrepancy(spec, g, N, cfg.shift_window, mode);
      report = w.at_argmax;
      argmax = w.argmax_k;
    } else {
      report = discrepancy(transformed_points(spec, g, cfg.start, N), mode);
    }
    line(os, {fmt(N), fraction_fields(report.value), std::string(to_string(report.method)),
              to_string(report.witness), fmt(to_double(report.value)), fmt(argmax)});
  }
}

void cmd_udisc(const RunConfig& cfg, std::ostream& os) {
  const auto spec = SequenceSpec::parse(cfg.spec);
  const auto g = IndexTransform::parse(cfg.transform);
  const Mode mode = parse_mode(cfg.mode);
  const auto Ns = positive_range(cfg.N);
  line(os, {"N", "k_max", "argmax_k", "value_num", "value_den", "value_float", "estimate"});
  if (cfg.k_max > 0 && spec.dimension() == 1 && mode == Mode::extreme && !Ns.empty()) {
    const auto N_max = *std::max_element(Ns.begin(), Ns.end());
    const auto profile = windowed_profile_1d(spec, g, N_max, cfg.k_max);
    for (const auto N : Ns) {
      const auto& e = profile[N - 1];
      line(os, {fmt(N), fmt(cfg.k_max), fmt(e.argmax_k), fraction_fields(e.value),
                fmt(to_double(e.value)), "lower"});
    }
    return;
  }
  for (const auto N : Ns) {
    const std::uint64_t k_max = cfg.k_max > 0 ? cfg.k_max : checked_mul(4, N);
    const auto w = windowed_uniform_discrepancy(spec, g, N, k_max, mode);
    line(os, {fmt(N), fmt(k_max), fmt(w.argmax_k), fraction_fields(w.value),
              fmt(to_double(w.value)), "lower"});
  }
}

// (1/N) sum_r a_r q^r (le1 bound at m = r): both lemmas combined.
double combined_lemma_bound(unsigned b, unsigned q, std::uint64_t k, std::uint64_t N) {
  const DigitVector a = expand(N, q);
  double sum = 0, power = 1;
  for (std::size_t r = 0; r < a.size(); ++r, power *= q)
    if (a.digits[r]) sum += a.digits[r] * power * lemma_le1_bound(b, q, k, unsigned(r)).rhs;
  return sum / double(N);
}

void cmd_expsum(const RunConfig& cfg, std::ostream& os) {
  line(os, {"b", "q", "k", "N", "re", "im", "abs", "bound"});
  std::vector<std::string> failures;
  for (const auto k : parse_range(cfg.k))
    for (const auto N : positive_range(cfg.N)) {
      const auto w = weyl_sum(cfg.b, cfg.q, k, N);
      const double bound = combined_lemma_bound(cfg.b, cfg.q, k, N);
      line(os, {fmt(std::uint64_t{cfg.b}), fmt(std::uint64_t{cfg.q}), fmt(k), fmt(N),
                fmt(w.value.real()), fmt(w.value.imag()), fmt(w.abs()), fmt(bound)});
      if (w.abs() > bound + kLemmaSlack || w.abs() > 1 + kLemmaSlack)
        failures.push_back("k=" + fmt(k) + " N=" + fmt(N));
    }
  if (!failures.empty()) throw VerificationFailed{"lemma bound exceeded at " + failures.front()};
}

void cmd_hkbound(const RunConfig& cfg, std::ostream& os) {
  const auto spec = SequenceSpec::parse(cfg.spec);
  const auto g = IndexTransform::parse(cfg.transform);
  if (spec.dimension() != 1) throw Error(ErrorCode::invalid_argument, "hkbound is one-dimensional");
  const unsigned b = spec.coordinate_base(0);
  const std::uint64_t N = parse_u64(cfg.N);
  const auto weighted = transformed_points(spec, g, cfg.start, N);
  const auto points = expand_1d(weighted);
  const unsigned res = cfg.g ? cfg.g : hellekalek_resolution(b, N);
  const auto terms = hellekalek_terms(b, res, points);
  const std::string bs = fmt(std::uint64_t{b}), qs = fmt(std::uint64_t{transform_q(g)});
  line(os, {"b", "q", "k", "N", "re", "im", "abs", "bound"});
  double total = 1.0 / std::pow(double(b), double(res));
  for (const auto& term : terms) {
    total += term.rho * term.abs;
    line(os, {bs, qs, fmt(term.k), fmt(N), fmt(term.average.real()), fmt(term.average.imag()),
              fmt(term.abs), fmt(term.rho * term.abs)});
  }
  const Rational exact = discrepancy(weighted, Mode::star).value;
  line(os, {bs, qs, "sum", fmt(N), "", "", fmt(to_double(exact)), fmt(total)});
  if (Rational(total + kHellekalekRounding) < exact)
    throw VerificationFailed{"bound " + fmt(total) + " below exact star discrepancy " +
                             to_fraction_string(exact)};
}

Envelope make_envelope(const RunConfig& cfg, const SequenceSpec& spec, std::uint64_t v_needed) {
  std::vector<std::string> parts;
  std::stringstream ss(cfg.envelope);
  std::string item;
  while (std::getline(ss, item, ':')) parts.push_back(item);
  if (parts.empty()) throw Error(ErrorCode::parse_error, "empty envelope");
  const std::string& kind = parts[0];
  auto number = [&](std::size_t i, double fallback) {
    return i < parts.size() ? std::stod(parts[i]) : fallback;
  };
  if (kind == "constant") return Envelope::constant(number(1, 1.0));
  if (kind == "analytic")
    return Envelope::analytic(number(1, 1.0), static_cast<unsigned>(number(2, spec.dimension())));
  if (kind == "appendix") {
    if (spec.dimension() != 1)
      throw Error(ErrorCode::unsupported, "appendix envelope is one-dimensional");
    return Envelope::appendix_vdc(spec.coordinate_base(0));
  }
  if (kind == "measured") {
    const std::uint64_t v_max = parts.size() > 1 ? parse_u64(parts[1]) : v_needed;
    const std::uint64_t k_max = parts.size() > 2 ? parse_u64(parts[2]) : 4 * v_max;
    return Envelope::measured(spec, v_max, k_max);
  }
  throw Error(ErrorCode::parse_error, "unknown envelope '" + cfg.envelope + "'");
}

void cmd_genbound(const RunConfig& cfg, std::ostream& os) {
  const auto spec = SequenceSpec::parse(cfg.spec);
  const auto g = IndexTransform::parse(cfg.transform);
  const unsigned d_max = cfg.dmax;
  const auto chain = make_chain(cfg, g, d_max + 2);
  std::uint64_t v_needed = 1;
  for (const auto& level : counting_profile(g, chain, d_max).levels)
    v_needed = std::max(v_needed, level.v);
  const Envelope f = make_envelope(cfg, spec, v_needed);
  const auto rows = general_sandwich(spec, g, chain, f, d_max);
  line(os, {"d", "N", "envelope", "lower", "measured_num", "measured_den", "measured_float",
            "upper", "holds"});
  bool all = true;
  for (const auto& row : rows) {
    line(os, {fmt(std::uint64_t{row.d}), fmt(row.N), f.describe(), fmt(row.lower),
              fraction_fields(row.measured), fmt(to_double(row.measured)), fmt(row.upper),
              fmt(row.holds)});
    all = all && row.holds;
  }
  if (!all) throw VerificationFailed{"sandwich violated"};
}

void cmd_sodcheck(const RunConfig& cfg, std::ostream& os) {
  const auto spec = SequenceSpec::parse(cfg.spec);
  const unsigned d_cal = cfg.dcal ? cfg.dcal : std::max(1u, cfg.dmax / 2);
  const auto check = sod_envelope_check(spec, cfg.q, cfg.dmax, d_cal, cfg.kappa, cfg.level_base,
                                        parse_mode(cfg.mode));
  line(os, {"q", "d", "N", "lower_num", "lower_den", "measured_num", "measured_den",
            "measured_float", "scaled", "lower_fit", "upper_fit", "calibration", "holds"});
  for (const auto& row : check.rows)
    line(os, {fmt(std::uint64_t{cfg.q}), fmt(std::uint64_t{row.d}), fmt(row.N),
              fraction_fields(row.exact_lower), fraction_fields(row.measured),
              fmt(to_double(row.measured)), fmt(row.scaled), fmt(row.lower_fit),
              fmt(row.upper_fit), fmt(row.calibration), fmt(row.holds)});
  if (!check.unimodal) throw Error(ErrorCode::hypothesis_failed, "digit-sum counts not unimodal");
  if (!check.holds) throw VerificationFailed{"sum-of-digits sandwich violated"};
}

void cmd_monocheck(const RunConfig& cfg, std::ostream& os) {
  const auto spec = SequenceSpec::parse(cfg.spec);
  const auto g = IndexTransform::parse(cfg.transform);
  const Mode mode = parse_mode(cfg.mode);
  const auto Ns = positive_range(cfg.N);
  const std::string what = cfg.what.empty() ? "bounds" : cfg.what;
  if (what == "alpha") {
    const auto* pow = std::get_if<FloorPowerTransform>(&g.variant());
    if (!pow) throw Error(ErrorCode::invalid_argument, "alpha check needs a pow:U/V transform");
    const auto check = alpha_corollary_check(spec, pow->u, pow->v, Ns, 1000, mode);
    line(os, {"N", "measured_num", "measured_den", "measured_float", "scaled", "normalized"});
    for (const auto& row : check.rows)
      line(os, {fmt(row.N), fraction_fields(row.measured), fmt(to_double(row.measured)),
                fmt(row.scaled), fmt(row.normalized)});
    if (!check.holds) throw VerificationFailed{"band ratio " + fmt(check.band)};
    return;
  }
  if (what != "bounds") throw Error(ErrorCode::invalid_argument, "--what must be bounds or alpha");
  const std::uint64_t N_max = Ns.empty() ? 1 : *std::max_element(Ns.begin(), Ns.end());
  const std::uint64_t N_cal = cfg.ncal ? cfg.ncal : std::max<std::uint64_t>(1, N_max / 16);
  const auto check = monotone_check(spec, g, Ns, N_cal, cfg.kappa, mode);
  line(os, {"N", "lower_num", "lower_den", "measured_num", "measured_den", "measured_float",
            "upper", "calibration", "holds"});
  for (const auto& row : check.rows)
    line(os, {fmt(row.N), fraction_fields(row.lower), fraction_fields(row.measured),
              fmt(to_double(row.measured)), fmt(row.upper), fmt(row.calibration),
              fmt(row.holds)});
  if (!check.hypotheses)
    throw Error(ErrorCode::hypothesis_failed,
                "F not monotone before k=" + fmt(check.F_monotone_from));
  if (!check.holds) throw VerificationFailed{"monotone bounds violated"};
}

void cmd_ubound(const RunConfig& cfg, std::ostream& os) {
  const auto spec = SequenceSpec::parse(cfg.spec);
  const std::uint64_t N_max = parse_u64(cfg.N);
  const std::uint64_t k_max = cfg.k_max ? cfg.k_max : checked_mul(4, N_max);
  const std::uint64_t N_cal = cfg.ncal ? cfg.ncal : std::max<std::uint64_t>(1, N_max / 16);
  const auto check = uniform_check(spec, cfg.t, N_max, k_max, N_cal, cfg.kappa);
  line(os, {"N", "argmax_k", "windowed_num", "windowed_den", "windowed_float", "ts_bound",
            "main_term", "calibration", "holds"});
  for (const auto& row : check.rows)
    line(os, {fmt(row.N), fmt(row.argmax_k), fraction_fields(row.windowed),
              fmt(to_double(row.windowed)), fmt(row.ts_bound), fmt(row.main_term),
              fmt(row.calibration), fmt(row.holds_ts && row.holds_main)});
  if (!check.holds) throw VerificationFailed{"uniform bound violated"};
}

void cmd_netcheck(const RunConfig& cfg, std::ostream& os) {
  const auto spec = SequenceSpec::parse(cfg.spec);
  const unsigned s = spec.dimension();
  const unsigned b = spec.coordinate_base(0);
  for (unsigned i = 1; i < s; ++i)
    if (spec.coordinate_base(i) != b)
      throw Error(ErrorCode::unsupported, "net check needs a single base");
  line(os, {"m", "block", "ok", "found", "expected", "violation"});
  bool all = true;
  for (unsigned m = cfg.t; m <= cfg.m; ++m) {
    const std::uint64_t size = checked_pow(b, m);
    for (std::uint64_t block = 0; block < cfg.blocks; ++block) {
      const auto points = generate_range(spec, block * size, size);
      const auto result = check_net(points, b, cfg.t, m, s);
      line(os, {fmt(std::uint64_t{m}), fmt(block), fmt(result.ok), fmt(result.found),
                fmt(result.expected), result.violation ? to_string(*result.violation) : ""});
      all = all && result.ok;
    }
  }
  if (!all) throw VerificationFailed{"net property violated"};
}

void write_curve(const std::filesystem::path& path,
                 const std::vector<std::pair<double, double>>& rows) {
  std::ofstream f(path);
  if (!f) throw Error(ErrorCode::invalid_argument, "cannot write " + path.string());
  f << "x,y\n";
  for (const auto& [x, y] : rows) f << fmt(x) << ',' << fmt(y) << '\n';
}

void cmd_report(const RunConfig& cfg, std::ostream& os) {
  if (cfg.out_dir.empty()) throw Error(ErrorCode::invalid_argument, "--out-dir is required");
  const std::filesystem::path dir(cfg.out_dir);
  std::filesystem::create_directories(dir);
  const auto spec = SequenceSpec::parse(cfg.spec);
  if (spec.dimension() != 1) throw Error(ErrorCode::unsupported, "report curves are 1D");

  std::ostringstream canonical;
  canonical << "spec=" << spec.describe() << "\nq=" << cfg.q << "\ndmax=" << cfg.dmax
            << "\nalpha=" << cfg.alpha << "\nn_max=" << cfg.n_max << "\nk_max=" << cfg.k_max
            << "\nt=" << cfg.t << "\nkappa=" << fmt(cfg.kappa)
            << "\nlevel_base=" << cfg.level_base << "\n";
  nlohmann::ordered_json manifest;
  manifest["tool"] = kToolName;
  manifest["version"] = kVersion;
  char hash[20];
  std::snprintf(hash, sizeof hash, "%016llx",
                static_cast<unsigned long long>(fnv1a(canonical.str())));
  manifest["config_hash"] = std::string("fnv1a64:") + hash;
  manifest["config"] = canonical.str();
  manifest["files"] = nlohmann::ordered_json::array();
  auto record = [&](const std::string& name, const std::string& x, const std::string& y,
                    const std::vector<std::pair<double, double>>& rows) {
    write_curve(dir / name, rows);
    manifest["files"].push_back({{"name", name}, {"x", x}, {"y", y}, {"rows", rows.size()}});
  };

  {
    std::vector<std::pair<double, double>> rows;
    if (cfg.dmax > 0) {
      const auto check = sod_envelope_check(spec, cfg.q, cfg.dmax, std::max(1u, cfg.dmax / 2),
                                            cfg.kappa, cfg.level_base);
      for (const auto& row : check.rows) rows.emplace_back(double(row.N), row.scaled);
    }
    record("sod_q" + std::to_string(cfg.q) + ".csv", "N", "D_N*sqrt(log N)", rows);
  }
  std::stringstream alphas(cfg.alpha);
  std::string item;
  while (std::getline(alphas, item, ',')) {
    const auto g = IndexTransform::parse("pow:" + item);
    const auto& pow = std::get<FloorPowerTransform>(g.variant());
    std::vector<std::pair<double, double>> rows;
    if (cfg.n_max > 0)
      for (const auto& e : windowed_profile_1d(spec, g, cfg.n_max, 0))
        rows.emplace_back(double(e.N),
                          to_double(e.value) * std::pow(double(e.N), double(pow.u) / pow.v));
    record("alpha_" + std::to_string(pow.u) + "_" + std::to_string(pow.v) + ".csv", "N",
           "D_N*N^alpha", rows);
  }
  {
    std::vector<std::pair<double, double>> measured, bound;
    if (cfg.n_max > 0) {
      const std::uint64_t k_max = cfg.k_max ? cfg.k_max : 4 * cfg.n_max;
      const auto check = uniform_check(spec, cfg.t, cfg.n_max, k_max,
                                       std::max<std::uint64_t>(1, cfg.n_max / 16), cfg.kappa);
      for (const auto& row : check.rows) {
        measured.emplace_back(double(row.N), to_double(row.windowed));
        bound.emplace_back(double(row.N), row.ts_bound);
      }
    }
    record("uniform_measured.csv", "N", "N*windowed D", measured);
    record("uniform_bound.csv", "N", "(t,s) uniform bound", bound);
  }
  std::ofstream(dir / "manifest.json") << manifest.dump(2) << '\n';
  line(os, {"file", "rows"});
  for (const auto& f : manifest["files"])
    line(os, {f["name"].get<std::string>(), fmt(f["rows"].get<std::uint64_t>())});
}

// --- Plumbing -------------------------------------------------------------------

using Handler = std::function<void(const RunConfig&, std::ostream&)>;

struct Command {
  CLI::App* app;
  Handler handler;
};

void common_options(CLI::App* sub, RunConfig& cfg) {
  sub->add_option("--threads", cfg.threads, "worker threads (default: LOWDISC_THREADS or all)");
  sub->add_option("--config", cfg.config, "flat key=value file; keys are long option names");
  sub->add_option("--out", cfg.out, "write CSV here instead of stdout");
}

void add_spec(CLI::App* sub, RunConfig& cfg) {
  sub->add_option("--spec", cfg.spec, "vdc:B | halton:B1,B2,.. | faure:P:S[:PREC] | identity:P")
      ->capture_default_str();
}

void add_transform(CLI::App* sub, RunConfig& cfg) {
  sub->add_option("--transform", cfg.transform, "id | sod:Q | pow:U/V | table:PATH | JSON")
      ->capture_default_str();
}

std::map<std::string, Command> build(CLI::App& app, RunConfig& cfg) {
  std::map<std::string, Command> cmds;
  auto add = [&](const std::string& name, const std::string& help, Handler h) {
    CLI::App* sub = app.add_subcommand(name, help);
    common_options(sub, cfg);
    cmds[name] = {sub, std::move(h)};
    return sub;
  };

  auto* gen = add("gen", "emit points x_{f(n)} as CSV", cmd_gen);
  add_spec(gen, cfg);
  add_transform(gen, cfg);
  gen->add_option("--N", cfg.N, "number of points")->required();
  gen->add_option("--start", cfg.start, "first n");

  auto* tr = add("transform", "index transform values and counting statistics", cmd_transform);
  add_transform(tr, cfg);
  tr->add_option("--what", cfg.what, "values | F | G | profile");
  tr->add_option("--N", cfg.N, "number of values");
  tr->add_option("--start", cfg.start, "first n");
  tr->add_option("--K", cfg.K, "F(k) for k < K");
  tr->add_option("--A", cfg.A, "block index for G");
  tr->add_option("--j", cfg.j, "level for G");
  tr->add_option("--d", cfg.d, "last level for profile");
  tr->add_option("--chain", cfg.chain, "pow:Q or N_0,N_1,...");

  auto* dist = add("dist", "digit-sum distribution on [0, q^j)", cmd_dist);
  dist->add_option("--q", cfg.q, "base")->required();
  dist->add_option("--j", cfg.j, "digits")->required();

  auto* disc = add("disc", "exact discrepancy of the first N transformed points", cmd_disc);
  add_spec(disc, cfg);
  add_transform(disc, cfg);
  disc->add_option("--N", cfg.N, "N, a:b or list")->required();
  disc->add_option("--mode", cfg.mode, "extreme | star")->capture_default_str();
  disc->add_option("--start", cfg.start, "index shift");
  disc->add_option("--shift-window", cfg.shift_window, "max over shifts 0..k_max");

  auto* ud = add("udisc", "windowed lower estimate of the uniform discrepancy", cmd_udisc);
  add_spec(ud, cfg);
  add_transform(ud, cfg);
  ud->add_option("--N", cfg.N, "N, a:b or list")->required();
  ud->add_option("--k-max", cfg.k_max, "window (default 4N)");
  ud->add_option("--mode", cfg.mode, "extreme | star")->capture_default_str();

  auto* ex = add("expsum", "Weyl sums T_k(N) with the combined lemma bound", cmd_expsum);
  ex->add_option("--b", cfg.b, "character base")->capture_default_str();
  ex->add_option("--q", cfg.q, "digit-sum base")->capture_default_str();
  ex->add_option("--k", cfg.k, "k, a:b or list")->capture_default_str();
  ex->add_option("--N", cfg.N, "N, a:b or list")->required();

  auto* hk = add("hkbound", "character-sum upper bound versus exact star discrepancy", cmd_hkbound);
  add_spec(hk, cfg);
  add_transform(hk, cfg);
  hk->add_option("--N", cfg.N, "number of points")->required();
  hk->add_option("--g", cfg.g, "resolution (default floor(log_b sqrt(log N)), at least 1)");
  hk->add_option("--start", cfg.start, "index shift");

  auto* gb = add("genbound", "lower <= N D_N <= upper over a divisibility chain", cmd_genbound);
  add_spec(gb, cfg);
  add_transform(gb, cfg);
  gb->add_option("--dmax", cfg.dmax, "last level")->capture_default_str();
  gb->add_option("--chain", cfg.chain, "pow:Q or N_0,N_1,...");
  gb->add_option("--envelope", cfg.envelope,
                 "constant:C | analytic:C[:S] | measured[:VMAX[:KMAX]] | appendix")
      ->capture_default_str();

  auto* sc = add("sodcheck", "sum-of-digits envelope table with fitted constants", cmd_sodcheck);
  add_spec(sc, cfg);
  sc->add_option("--q", cfg.q, "digit-sum base")->capture_default_str();
  sc->add_option("--dmax", cfg.dmax, "levels 1..dmax")->capture_default_str();
  sc->add_option("--dcal", cfg.dcal, "calibration levels (default dmax/2)");
  sc->add_option("--kappa", cfg.kappa, "stability factor")->capture_default_str();
  sc->add_option("--level-base", cfg.level_base, "N = base^d (default q)");
  sc->add_option("--mode", cfg.mode, "extreme | star")->capture_default_str();

  auto* mc = add("monocheck", "monotone-index bounds or the alpha corollary", cmd_monocheck);
  add_spec(mc, cfg);
  add_transform(mc, cfg);
  mc->add_option("--N", cfg.N, "N, a:b or list")->required();
  mc->add_option("--what", cfg.what, "bounds | alpha");
  mc->add_option("--ncal", cfg.ncal, "fit C on N <= ncal (default max N / 16)");
  mc->add_option("--kappa", cfg.kappa, "stability factor")->capture_default_str();
  mc->add_option("--mode", cfg.mode, "extreme | star")->capture_default_str();

  auto* ub = add("ubound", "windowed N D against the (t,s)-sequence bound", cmd_ubound);
  add_spec(ub, cfg);
  ub->add_option("--N", cfg.N, "largest N")->required();
  ub->add_option("--t", cfg.t, "quality parameter")->capture_default_str();
  ub->add_option("--k-max", cfg.k_max, "window (default 4N)");
  ub->add_option("--ncal", cfg.ncal, "fit slack on N <= ncal (default N / 16)");
  ub->add_option("--kappa", cfg.kappa, "stability factor")->capture_default_str();

  auto* nc = add("netcheck", "(t,m,s)-net property of aligned blocks", cmd_netcheck);
  add_spec(nc, cfg);
  nc->add_option("--t", cfg.t, "quality parameter")->capture_default_str();
  nc->add_option("--m", cfg.m, "largest m")->required();
  nc->add_option("--blocks", cfg.blocks, "blocks per m")->capture_default_str();

  auto* rp = add("report", "plot-ready x,y files and a manifest", cmd_report);
  add_spec(rp, cfg);
  rp->add_option("--out-dir", cfg.out_dir, "output directory")->required();
  rp->add_option("--q", cfg.q, "digit-sum base")->capture_default_str();
  rp->add_option("--dmax", cfg.dmax, "sum-of-digits levels")->capture_default_str();
  rp->add_option("--level-base", cfg.level_base, "N = base^d (default q)");
  rp->add_option("--alpha", cfg.alpha, "comma-separated U/V list")->capture_default_str();
  rp->add_option("--n-max", cfg.n_max, "largest N for alpha and uniform curves")
      ->capture_default_str();
  rp->add_option("--k-max", cfg.k_max, "uniform window (default 4 n-max)");
  rp->add_option("--t", cfg.t, "quality parameter")->capture_default_str();
  rp->add_option("--kappa", cfg.kappa, "stability factor")->capture_default_str();
  return cmds;
}

std::string trim(const std::string& s) {
  const auto a = s.find_first_not_of(" \t\r");
  if (a == std::string::npos) return "";
  return s.substr(a, s.find_last_not_of(" \t\r") - a + 1);
}

bool given_on_command_line(const std::vector<std::string>& args, const std::string& flag) {
  for (const auto& a : args)
    if (a == flag || a.rfind(flag + "=", 0) == 0) return true;
  return false;
}

// Appends config-file settings not already given on the command line.
std::vector<std::string> merge_config(std::vector<std::string> args, CLI::App* sub) {
  std::string path;
  for (std::size_t i = 0; i < args.size(); ++i) {
    if (args[i] == "--config" && i + 1 < args.size()) path = args[i + 1];
    if (args[i].rfind("--config=", 0) == 0) path = args[i].substr(9);
  }
  if (path.empty()) return args;
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::invalid_argument, "cannot read config '" + path + "'");
  std::vector<std::string> extra;
  std::string raw;
  unsigned lineno = 0;
  while (std::getline(in, raw)) {
    ++lineno;
    const std::string text = trim(raw.substr(0, raw.find('#')));
    if (text.empty()) continue;
    const auto eq = text.find('=');
    if (eq == std::string::npos)
      throw Error(ErrorCode::parse_error, path + ":" + std::to_string(lineno) + ": expected key=value");
    const std::string key = trim(text.substr(0, eq)), value = trim(text.substr(eq + 1));
    const std::string flag = "--" + key;
    if (key == "config" || sub->get_option_no_throw(flag) == nullptr)
      throw Error(ErrorCode::parse_error, path + ":" + std::to_string(lineno) +
                                              ": unknown key '" + key + "' for " + sub->get_name());
    if (!given_on_command_line(args, flag)) {
      extra.push_back(flag);
      extra.push_back(value);
    }
  }
  args.insert(args.end(), extra.begin(), extra.end());
  return args;
}

void failure_record(std::ostream& err, const std::string& command, std::string_view code,
                    const std::string& detail) {
  nlohmann::ordered_json j;
  j["status"] = "fail";
  j["command"] = command;
  j["code"] = code;
  j["detail"] = detail;
  err << j.dump() << '\n';
}

class ThreadScope {
 public:
  explicit ThreadScope(unsigned n) : saved_(thread_count()) {
    if (n) set_thread_count(n);
  }
  ~ThreadScope() { set_thread_count(saved_); }

 private:
  unsigned saved_;
};

}  // namespace

std::uint64_t fnv1a(std::string_view bytes) {
  std::uint64_t h = 0xcbf29ce484222325ull;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ull;
  }
  return h;
}

int run(const std::vector<std::string>& args_in, std::ostream& out, std::ostream& err) {
  RunConfig cfg;
  CLI::App app{"Quasi-Monte Carlo discrepancy laboratory", std::string(kToolName)};
  app.set_version_flag("--version", std::string(kVersion));
  app.require_subcommand(1);
  auto cmds = build(app, cfg);

  std::string command = args_in.empty() ? "" : args_in.front();
  std::vector<std::string> args = args_in;
  try {
    if (auto it = cmds.find(command); it != cmds.end()) args = merge_config(args, it->second.app);
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    std::ostringstream help;
    const int code = app.exit(e, help, help);
    if (code == 0) {
      out << help.str();
      return 0;
    }
    err << help.str();
    failure_record(err, command, "usage", e.what());
    return 2;
  } catch (const Error& e) {
    failure_record(err, command, "usage", e.what());
    return 2;
  }

  const auto& cmd = cmds.at(command);
  ThreadScope threads(cfg.threads);
  try {
    if (!cfg.out.empty()) {
      std::ostringstream buffer;
      cmd.handler(cfg, buffer);
      std::ofstream f(cfg.out, std::ios::binary);
      if (!f) throw Error(ErrorCode::invalid_argument, "cannot write '" + cfg.out + "'");
      f << buffer.str();
    } else {
      cmd.handler(cfg, out);
    }
  } catch (const VerificationFailed& v) {
    failure_record(err, command, "verification-failed", v.detail);
    return 1;
  } catch (const Error& e) {
    failure_record(err, command, to_string(e.code()), e.what());
    switch (e.code()) {
      case ErrorCode::invalid_base:
      case ErrorCode::invalid_argument:
      case ErrorCode::parse_error: return 2;
      default: return 1;
    }
  } catch (const std::exception& e) {
    failure_record(err, command, "internal", e.what());
    return 1;
  }
  return 0;
}

}  // namespace lowdisc::cli
