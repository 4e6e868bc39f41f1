#include "lowdisc/cli.hpp"
#include "lowdisc/digitsum_dist.hpp"
#include "lowdisc/discrepancy.hpp"
#include "lowdisc/expsums.hpp"
#include "lowdisc/generators.hpp"
#include "lowdisc/transforms.hpp"

#include <pybind11/complex.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <sstream>

namespace py = pybind11;
using namespace lowdisc;

namespace {

py::object to_python_int(const BigInt& x) {
  return py::module_::import("builtins").attr("int")(x.str());
}

py::object to_fraction(const Rational& x) {
  static py::object fraction = py::module_::import("fractions").attr("Fraction");
  return fraction(to_python_int(numerator(x)), to_python_int(denominator(x)));
}

py::list to_python(const std::vector<Point>& points) {
  py::list out;
  for (const auto& p : points) {
    py::list coords;
    for (const auto& x : p.coords) coords.append(to_fraction(x.to_rational()));
    out.append(coords);
  }
  return out;
}

py::dict report(const DiscrepancyReport& r) {
  py::dict d;
  d["N"] = r.N;
  d["value"] = to_fraction(r.value);
  d["witness"] = to_string(r.witness);
  d["witness_sign"] = r.witness_sign;
  d["method"] = std::string(to_string(r.method));
  return d;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Exact discrepancy of index-transformed low-discrepancy sequences.";

  static py::exception<Error> error(m, "LowdiscError", PyExc_ValueError);
  py::register_exception_translator([](std::exception_ptr p) {
    try {
      if (p) std::rethrow_exception(p);
    } catch (const Error& e) {
      const std::string message = "[" + std::string(to_string(e.code())) + "] " + e.what();
      PyErr_SetString(error.ptr(), message.c_str());
    }
  });

  m.def("radical_inverse", [](std::uint64_t n, unsigned b) {
    return to_fraction(radical_inverse(n, b).to_rational());
  }, py::arg("n"), py::arg("b"));

  m.def("sum_of_digits", &sum_of_digits, py::arg("n"), py::arg("q"));

  m.def("generate", [](const std::string& spec, std::uint64_t count, std::uint64_t start) {
    return to_python(generate_range(SequenceSpec::parse(spec), start, count));
  }, py::arg("spec"), py::arg("count"), py::arg("start") = 0);

  m.def("apply_transform", [](const std::string& transform, std::uint64_t n) {
    return apply(IndexTransform::parse(transform), n);
  }, py::arg("transform"), py::arg("n"));

  m.def("multiplicity", [](const std::string& transform, std::uint64_t k) {
    return multiplicity_F(IndexTransform::parse(transform), k);
  }, py::arg("transform"), py::arg("k"));

  m.def("distribution", [](unsigned q, unsigned j) {
    py::list out;
    for (const auto& c : distribution(q, j).counts) out.append(to_python_int(c));
    return out;
  }, py::arg("q"), py::arg("j"));

  m.def("discrepancy", [](const std::string& spec, std::uint64_t N, const std::string& transform,
                          const std::string& mode, std::uint64_t start) {
    const auto points = transformed_points(SequenceSpec::parse(spec),
                                           IndexTransform::parse(transform), start, N);
    return report(discrepancy(points, parse_mode(mode)));
  }, py::arg("spec"), py::arg("N"), py::arg("transform") = "id", py::arg("mode") = "extreme",
     py::arg("start") = 0);

  m.def("weyl_sum", [](unsigned b, unsigned q, std::uint64_t k, std::uint64_t N) {
    return weyl_sum(b, q, k, N).value;
  }, py::arg("b"), py::arg("q"), py::arg("k"), py::arg("N"));

  m.def("hellekalek_bound", [](unsigned b, unsigned g, const std::vector<std::uint64_t>& numerators,
                               unsigned precision) {
    std::vector<BRational> points;
    for (auto a : numerators) points.emplace_back(a, b, precision);
    return hellekalek_bound(b, g, points);
  }, py::arg("b"), py::arg("g"), py::arg("numerators"), py::arg("precision"));

  m.def("run_cli", [](const std::vector<std::string>& args) {
    std::ostringstream out, err;
    const int code = cli::run(args, out, err);
    return py::make_tuple(code, out.str(), err.str());
  }, py::arg("args"));
}
