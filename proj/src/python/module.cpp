#include "spiralctl/acceptance.hpp"
#include "spiralctl/blowup.hpp"
#include "spiralctl/errors.hpp"
#include "spiralctl/floquet.hpp"
#include "spiralctl/pendulum.hpp"
#include "spiralctl/pmp.hpp"
#include "spiralctl/spiral.hpp"

#include <pybind11/complex.h>
#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

namespace py = pybind11;
using namespace spiralctl;

namespace {

KMatrix k_of(std::pair<double, double> k) { return {k.first, k.second}; }

spiral::SpiralFamily family(double t_star, double alpha, double zeta_angle, bool reflect) {
  return spiral::SpiralFamily::make(t_star, alpha, Isometry{zeta_angle, reflect});
}

py::dict report_dict(const floquet::FloquetReport& r) {
  py::dict d;
  d["J"] = r.j_reconstructed;
  d["eigenvalues"] = r.spectrum.eigenvalues;
  d["classification"] = r.classification;
  d["constancy_residual"] = r.constancy_residual;
  d["spectral_gap_to_paper"] = r.spectral_gap_to_paper;
  d["cylinder_spectrum"] = r.cylinder_spectrum;
  d["cylinder_gap_to_paper"] = r.cylinder_gap_to_paper;
  d["transverse_exponent"] = r.transverse_exponent;
  d["samples"] = r.samples;
  return d;
}

}  // namespace

PYBIND11_MODULE(_spiralctl, m) {
  m.doc() = "Spiral extremals, blow-up and Floquet analysis for bounded-control pendulum stabilization";

  auto base = py::register_exception<Error>(m, "Error");
  auto numeric = py::register_exception<NumericError>(m, "NumericError", base.ptr());
  py::register_exception<DomainError>(m, "DomainError", base.ptr());
  py::register_exception<TransformNotConstant>(m, "TransformNotConstant", numeric.ptr());

  m.attr("SQRT5") = kSqrt5;
  m.attr("A0") = spiral::kA0;

  m.def("a_constants", [](double alpha, double a0) {
        const auto a = spiral::a_constants(alpha, a0);
        return std::vector<std::complex<double>>(a.begin(), a.end());
      },
      py::arg("alpha") = kSqrt5, py::arg("a0") = spiral::kA0);

  m.def("spiral_state",
        [](double t, double t_star, double alpha, double zeta_angle, bool reflect) {
          return spiral::spiral_state(t, family(t_star, alpha, zeta_angle, reflect)).to_vector();
        },
        py::arg("t"), py::arg("t_star") = 1.0, py::arg("alpha") = kSqrt5,
        py::arg("zeta_angle") = 0.0, py::arg("reflect") = false,
        "Packed (Re z1, Im z1, ..., Re z4, Im z4).");

  m.def("ham_rhs",
        [](const numkit::Vector& z, std::pair<double, double> k) {
          return pmp::ham_rhs_p1(k_of(k), pmp::ZState::from_vector(z)).to_vector();
        },
        py::arg("z"), py::arg("k") = std::pair<double, double>{0.0, 0.0});

  m.def("hamiltonian",
        [](const numkit::Vector& z, std::pair<double, double> k) {
          return pmp::hamiltonian(pmp::ZState::from_vector(z), k_of(k));
        },
        py::arg("z"), py::arg("k") = std::pair<double, double>{0.0, 0.0});

  m.def("simulate",
        [](const numkit::Vector& z0, std::pair<double, double> k, double handoff_ratio,
           double t_max) {
          pmp::SimulationOptions o;
          o.handoff_ratio = handoff_ratio;
          o.t_max = t_max;
          const auto r = pmp::simulate_closed_loop(pmp::ZState::from_vector(z0), k_of(k), o);
          py::dict d;
          d["hit_time"] = r.hit_time ? py::cast(*r.hit_time) : py::none();
          d["stop_reason"] = pmp::to_string(r.reason);
          d["stop_time"] = r.stop_time;
          d["times"] = r.trajectory.times();
          d["states"] = r.trajectory.states();
          d["cost"] = r.trajectory.empty() ? 0.0 : pmp::cost(r.trajectory);
          return d;
        },
        py::arg("z0"), py::arg("k") = std::pair<double, double>{0.0, 0.0},
        py::arg("handoff_ratio") = 1e-2, py::arg("t_max") = 100.0);

  m.def("blow_up",
        [](const numkit::Vector& z) {
          return blowup::blow_up(pmp::ZState::from_vector(z)).to_vector();
        },
        py::arg("z"), "Packed (mu, z~) in R^9.");
  m.def("blow_down",
        [](const numkit::Vector& b) {
          return blowup::blow_down(blowup::BlownState::from_vector(b)).to_vector();
        },
        py::arg("b"));
  m.def("m_rate",
        [](const numkit::Vector& b, std::pair<double, double> k) {
          const auto r = blowup::m_rate(blowup::BlownState::from_vector(b), k_of(k));
          return py::make_tuple(r.m, r.m0, r.m1);
        },
        py::arg("b"), py::arg("k") = std::pair<double, double>{0.0, 0.0});
  m.def("cycle_state",
        [](double s, double alpha) { return blowup::cycle_state(s, alpha).to_vector(); },
        py::arg("s"), py::arg("alpha") = kSqrt5);
  m.def("pi_residual",
        [](const numkit::Vector& b) {
          return blowup::pi_residual(blowup::BlownState::from_vector(b));
        },
        py::arg("b"));

  m.def("paper_J", &floquet::paper_J);
  m.def("paper_eigenvalues", &floquet::paper_eigenvalues);
  m.def("paper_char_poly", &floquet::paper_char_poly);
  m.def("char_poly", &numkit::char_poly, py::arg("a"));
  m.def("eigenvalues", [](const numkit::Matrix& a) { return numkit::eig_dense(a).eigenvalues; },
        py::arg("a"));
  m.def("analyze_matrix", [](const numkit::Matrix& j) { return report_dict(floquet::analyze_matrix(j)); },
        py::arg("j"));
  m.def("reconstruct_J",
        [](std::pair<double, double> k, std::size_t samples, const std::string& convention,
           unsigned threads) {
          floquet::ReconstructOptions o;
          o.threads = threads;
          if (convention == "unnormalized_gradient") {
            o.convention = floquet::RateConvention::UnnormalizedGradient;
          } else if (convention != "chain_rule") {
            throw DomainError("convention must be chain_rule or unnormalized_gradient");
          }
          py::gil_scoped_release release;
          auto rep = floquet::reconstruct_J(k_of(k), samples, o);
          py::gil_scoped_acquire acquire;
          return report_dict(rep);
        },
        py::arg("k") = std::pair<double, double>{0.0, 0.0}, py::arg("samples") = 16,
        py::arg("convention") = "chain_rule", py::arg("threads") = 1);

  m.def("pendulum_system_matrix",
        [](double M, double mass, double l, double g) {
          return pendulum::linear_system_matrix({M, mass, l, g});
        },
        py::arg("M") = 1.0, py::arg("m") = 1.0, py::arg("l") = 1.0, py::arg("g") = 1.0,
        "Linear model [A | B] on (x1, x2, y1, y2, u1, u2).");

  m.def("verify",
        [](std::vector<std::string> only) {
          acceptance::AcceptanceOptions o;
          o.only = std::move(only);
          py::list out;
          for (const auto& r : acceptance::run(o)) {
            py::dict d;
            d["id"] = r.id;
            d["name"] = r.name;
            d["passed"] = r.passed;
            d["seconds"] = r.seconds;
            d["detail"] = r.detail;
            out.append(d);
          }
          return out;
        },
        py::arg("only") = std::vector<std::string>{});
}
