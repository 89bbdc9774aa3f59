// Python bindings. Structured results cross the boundary as JSON text and are
// decoded by the package wrapper.

#include <string>
#include <vector>

#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "wildeuler/convex_geometry.hpp"
#include "wildeuler/engine.hpp"
#include "wildeuler/errors.hpp"
#include "wildeuler/euler_state.hpp"
#include "wildeuler/io.hpp"
#include "wildeuler/toy_model.hpp"
#include "wildeuler/verify.hpp"
#include "wildeuler/waves.hpp"

namespace py = pybind11;
using namespace wildeuler;
using nlohmann::json;

namespace {

using Matrix = std::vector<std::vector<double>>;

EulerState make_state(double rho, const std::vector<double>& m, const Matrix& M, double Q) {
  const int d = static_cast<int>(m.size());
  if (static_cast<int>(M.size()) != d) throw InvalidArgument("M must be d x d");
  EulerState z;
  z.rho = rho;
  z.m = Eigen::Map<const Eigen::VectorXd>(m.data(), d);
  z.M = Eigen::MatrixXd(d, d);
  for (int a = 0; a < d; ++a) {
    if (static_cast<int>(M[static_cast<std::size_t>(a)].size()) != d) {
      throw InvalidArgument("M must be d x d");
    }
    for (int b = 0; b < d; ++b) z.M(a, b) = M[static_cast<std::size_t>(a)][static_cast<std::size_t>(b)];
  }
  z.Q = Q;
  z.validate();
  return z;
}

std::vector<double> vec(const Eigen::VectorXd& v) { return {v.data(), v.data() + v.size()}; }

Matrix mat(const Eigen::MatrixXd& M) {
  Matrix out(static_cast<std::size_t>(M.rows()));
  for (Eigen::Index r = 0; r < M.rows(); ++r) {
    for (Eigen::Index c = 0; c < M.cols(); ++c) out[static_cast<std::size_t>(r)].push_back(M(r, c));
  }
  return out;
}

}  // namespace

PYBIND11_MODULE(_wildeuler, mod) {
  mod.doc() = "Convex-integration engine for the isentropic Euler relaxation";

  py::register_exception<Error>(mod, "WildEulerError", PyExc_RuntimeError);
  py::register_exception<InvalidArgument>(mod, "InvalidArgument", PyExc_ValueError);

  mod.def("pressure", [](double rho, double gamma) { return PressureLaw(gamma).pressure(rho); },
          py::arg("rho"), py::arg("gamma") = 2.0);
  mod.def(
      "e_kin",
      [](double rho, const std::vector<double>& m, const Matrix& M) {
        return e_kin(make_state(rho, m, M, 0.0));
      },
      py::arg("rho"), py::arg("m"), py::arg("M"));
  mod.def(
      "hull_functional",
      [](double rho, const std::vector<double>& m, const Matrix& M, double Q, double gamma) {
        return hull_functional(make_state(rho, m, M, Q), PressureLaw(gamma));
      },
      py::arg("rho"), py::arg("m"), py::arg("M"), py::arg("Q"), py::arg("gamma") = 2.0);
  mod.def(
      "in_K",
      [](double rho, const std::vector<double>& m, const Matrix& M, double Q, double gamma) {
        return in_K(make_state(rho, m, M, Q), PressureLaw(gamma));
      },
      py::arg("rho"), py::arg("m"), py::arg("M"), py::arg("Q"), py::arg("gamma") = 2.0);
  mod.def(
      "in_hull",
      [](double rho, const std::vector<double>& m, const Matrix& M, double Q, double gamma) {
        return in_hull(make_state(rho, m, M, Q), PressureLaw(gamma));
      },
      py::arg("rho"), py::arg("m"), py::arg("M"), py::arg("Q"), py::arg("gamma") = 2.0);
  mod.def(
      "build_segment",
      [](double rho, const std::vector<double>& m, const Matrix& M, double Q, double gamma,
         const std::string& radius, std::uint64_t seed) {
        SegmentOptions so;
        if (radius == "grid") {
          so.radius_rule = RadiusRule::Grid;
        } else if (radius != "hull") {
          throw InvalidArgument("radius must be 'hull' or 'grid'");
        }
        so.seed = seed;
        const PressureLaw law(gamma);
        const OscillationSegment seg = build_segment(make_state(rho, m, M, Q), law, so);
        py::dict out;
        out["r"] = seg.r;
        out["amplitude_m"] = vec(seg.amplitude_m);
        out["amplitude_M"] = mat(seg.amplitude_M);
        out["floor"] = seg.amplitude_floor();
        out["F_plus"] = hull_functional(seg.endpoint(1.0), law);
        out["F_minus"] = hull_functional(seg.endpoint(-1.0), law);
        if (seg.center.dim() == 2) out["xi"] = vec(find_direction(seg).xi);
        return out;
      },
      py::arg("rho"), py::arg("m"), py::arg("M"), py::arg("Q"), py::arg("gamma") = 2.0,
      py::arg("radius") = "hull", py::arg("seed") = 0);

  mod.def(
      "toy_first_step",
      [](long n) { return I_toy(perturb_toy(ToyPair(), n)); }, py::arg("n") = 64);
  mod.def(
      "_toy_iterate",
      [](int steps, long n0, long min_points) {
        ToyQuadrature q;
        q.min_points = min_points;
        py::gil_scoped_release release;
        return to_json(iterate_toy(ToyPair(), doubling_schedule(n0, steps), 0.0, q)).dump();
      },
      py::arg("steps") = 20, py::arg("n0") = 8, py::arg("min_points") = 1L << 16);

  mod.def(
      "_resolve_config",
      [](const std::string& text) { return config_to_json(parse_config(json::parse(text))).dump(); },
      py::arg("config"));
  mod.def(
      "_iterate",
      [](const std::string& text) {
        const RunConfig cfg = parse_config(json::parse(text));
        py::gil_scoped_release release;
        const IterationResult res = iterate(cfg.scenario);
        json steps = json::array();
        for (const auto& s : res.trace) steps.push_back(to_json(s));
        return json{{"initial", to_json(res.initial)},
                    {"final", to_json(res.final_pass)},
                    {"steps", steps},
                    {"failed", res.failed},
                    {"failure", res.failure}}
            .dump();
      },
      py::arg("config"));
  mod.def(
      "_verify",
      [](const std::string& text) {
        const RunConfig cfg = parse_config(json::parse(text));
        py::gil_scoped_release release;
        json out = json::array();
        for (const auto& s : run_verify_suites(cfg)) {
          out.push_back({{"suite", s.name}, {"pass", s.pass}, {"measured", s.measured}});
        }
        return out.dump();
      },
      py::arg("config"));
}
