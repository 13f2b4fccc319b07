#include <pybind11/complex.h>
#include <pybind11/functional.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <nlohmann/json.hpp>

#include "schottky/error.hpp"
#include "schottky/experiments.hpp"
#include "schottky/group.hpp"
#include "schottky/permrep.hpp"
#include "schottky/words.hpp"
#include "schottky/zeros.hpp"
#include "schottky/zeta.hpp"

namespace py = pybind11;
using namespace schottky;

namespace {

Representation make_rep(const std::string& kind, int n, std::uint64_t seed, bool identity, int r) {
  if (kind == "trivial") return Representation::trivial();
  const PermutationRep perm = identity ? identity_rep(n, r) : sample_rep(n, r, seed);
  if (kind == "std") return Representation::standard(perm);
  if (kind == "std0") return Representation::standard_reduced(perm);
  fail(ErrorCode::InvalidArgument, "rep must be trivial, std or std0");
}

Region make_region(const std::vector<double>& v) {
  if (v.size() == 4) return RectRegion{v[0], v[1], v[2], v[3]};
  if (v.size() == 3) return DiskRegion{Complex(v[0], v[1]), v[2]};
  fail(ErrorCode::InvalidArgument, "region is [re_min, re_max, im_min, im_max] or [center_re, center_im, radius]");
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Selberg zeta functions of Schottky surfaces and their random covers";

  static py::exception<Error> error(m, "SchottkyError");
  py::register_exception_translator([](std::exception_ptr p) {
    try {
      if (p) std::rethrow_exception(p);
    } catch (const Error& e) {
      py::set_error(error, e.what());
    }
  });

  py::class_<SchottkyData>(m, "Group")
      .def_readonly("r", &SchottkyData::r)
      .def_readonly("centers", &SchottkyData::centers)
      .def_readonly("radii", &SchottkyData::radii)
      .def("to_json", [](const SchottkyData& g) { return group_to_json(g).dump(); })
      .def("__repr__", [](const SchottkyData& g) { return "<Group r=" + std::to_string(g.r) + ">"; });

  m.def("reference_group", &reference_group);
  m.def("build_from_disks", &build_from_disks, py::arg("centers"), py::arg("radii"));
  m.def("load_group", &load_group, py::arg("path"));
  m.def("validate", [](const SchottkyData& g) {
    const ValidationReport report = validate(g);
    py::list checks;
    for (const auto& c : report.checks) {
      checks.append(py::dict(py::arg("name") = c.name, py::arg("passed") = c.passed, py::arg("residual") = c.residual,
                             py::arg("detail") = c.detail));
    }
    return py::make_tuple(report.ok(), checks);
  });

  m.def("pressure", &pressure, py::arg("sigma"), py::arg("group"), py::arg("M") = 24);
  m.def(
      "hausdorff_dimension",
      [](const SchottkyData& g, double tol, int M) { return hausdorff_dimension(g, tol, M).delta; }, py::arg("group"),
      py::arg("tol") = 1e-12, py::arg("M") = 24);

  py::class_<ZetaFunction>(m, "Zeta")
      .def(py::init([](const SchottkyData& g, const std::string& rep, int n, std::uint64_t seed, bool identity,
                       std::optional<double> tau, int M) {
             AssembleOptions o;
             o.M = M;
             return ZetaFunction(g, tau ? ZetaKind::refined(*tau) : ZetaKind::standard(),
                                 make_rep(rep, n, seed, identity, g.r), o);
           }),
           py::arg("group"), py::arg("rep") = "trivial", py::arg("n") = 1, py::arg("seed") = 1,
           py::arg("identity") = false, py::arg("tau") = py::none(), py::arg("M") = 16)
      .def("__call__", &ZetaFunction::evaluate, py::arg("s"))
      .def("log_derivative", &ZetaFunction::log_derivative, py::arg("s"))
      .def_property_readonly("size", &ZetaFunction::size)
      .def(
          "count_zeros",
          [](const ZetaFunction& z, const std::vector<double>& region, bool by_argument) {
            const ZeroCount c = by_argument ? count_zeros_by_argument(z.value_evaluator(), make_region(region))
                                            : count_zeros(z.evaluator(), make_region(region));
            return c.count;
          },
          py::arg("region"), py::arg("by_argument") = false)
      .def(
          "locate_zeros",
          [](const ZetaFunction& z, const std::vector<double>& region, double tol, bool by_argument) {
            LocateOptions o;
            o.tol = tol;
            o.winding_by_argument = by_argument;
            py::list out;
            for (const auto& zero : locate_zeros(z.analytic(), make_region(region), o).zeros)
              out.append(py::make_tuple(zero.s, zero.multiplicity));
            return out;
          },
          py::arg("region"), py::arg("tol") = 1e-10, py::arg("by_argument") = false)
      .def(
          "jensen_residual",
          [](const ZetaFunction& z, Complex center, double radius, bool by_argument) {
            return jensen_audit(z, DiskRegion{center, radius}, 1024, by_argument).residual;
          },
          py::arg("center"), py::arg("radius"), py::arg("by_argument") = false);

  m.def("euler_product_zeta",
        [](Complex s, const SchottkyData& g, int max_word_len) { return euler_product_zeta(s, g, max_word_len); },
        py::arg("s"), py::arg("group"), py::arg("max_word_len") = 14);

  m.def(
      "partition",
      [](double tau, const SchottkyData& g, bool mirrored) {
        py::list out;
        for (const auto& e : mirrored ? mirror_partition(tau, g) : partition(tau, g))
          out.append(py::make_tuple(e.letters, e.upsilon));
        return out;
      },
      py::arg("tau"), py::arg("group"), py::arg("mirror") = false);
  m.def(
      "proper_power",
      [](const Word& w, int r) -> py::object {
        if (const auto p = proper_power_decomposition(w, r)) return py::make_tuple(p->root, p->q);
        return py::none();
      },
      py::arg("word"), py::arg("r") = 2);

  m.def(
      "sample_rep", [](int n, int r, std::uint64_t seed) { return sample_rep(n, r, seed).images; }, py::arg("n"),
      py::arg("r") = 2, py::arg("seed") = 1);
  m.def(
      "expected_trace",
      [](const Word& w, int n, int r, const std::string& mode, std::size_t trials, std::uint64_t seed) {
        const TraceEstimate e =
            expected_trace(w, n, r, mode == "exhaustive" ? TraceMode::Exhaustive : TraceMode::MonteCarlo, trials, seed);
        return py::make_tuple(e.mean, e.standard_error);
      },
      py::arg("word"), py::arg("n"), py::arg("r") = 2, py::arg("mode") = "mc", py::arg("trials") = 10000,
      py::arg("seed") = 1);
  m.def("bsp_bound", &bsp_bound, py::arg("word"), py::arg("n"), py::arg("r") = 2);

  m.def(
      "gap_experiment",
      [](const SchottkyData& g, const std::string& config, int jobs, bool timing) {
        GapExperimentRecord rec;
        {
          py::gil_scoped_release release;
          rec = run_gap_experiment(g, gap_config_from_json(nlohmann::json::parse(config)), jobs);
        }
        return py::make_tuple(gap_csv(rec, timing), gap_summary_json(rec).dump());
      },
      py::arg("group"), py::arg("config") = "{}", py::arg("jobs") = 0, py::arg("timing") = false);
  m.def(
      "hs_decay",
      [](const SchottkyData& g, const std::string& config, int jobs) {
        HsDecayRecord rec;
        {
          py::gil_scoped_release release;
          rec = run_hs_decay(g, hs_decay_config_from_json(nlohmann::json::parse(config)), jobs);
        }
        return py::make_tuple(hs_decay_csv(rec), hs_decay_json(rec).dump());
      },
      py::arg("group"), py::arg("config") = "{}", py::arg("jobs") = 0);
}
