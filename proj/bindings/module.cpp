// Copyright 2026 The statematch developers
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <pybind11/complex.h>
#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "statematch/kak.hpp"
#include "statematch/mitigation.hpp"
#include "statematch/report.hpp"
#include "statematch/simulator.hpp"
#include "statematch/state_space.hpp"
#include "statematch/stats.hpp"
#include "statematch/unitary_builder.hpp"

namespace py = pybind11;
using namespace statematch;

namespace {

py::object complex_point_to_py(const ComplexPoint& z) {
  if (z.is_infinity()) return py::none();
  return py::cast(z.value());
}

ComplexPoint complex_point_from_py(const py::object& obj) {
  if (obj.is_none()) return ComplexPoint::infinity();
  return ComplexPoint::finite(obj.cast<std::complex<double>>());
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() =
      "Quantum-state-matching protocol toolkit: U_epsilon decomposition, "
      "protocol simulation and the statistical benchmark harness. The point "
      "at infinity of the extended complex plane maps to Python None.";
  m.attr("__version__") = kToolkitVersion;

  py::class_<BlochState>(m, "BlochState")
      .def(py::init<double, double>(), py::arg("theta"), py::arg("phi") = 0.0)
      .def_readonly("theta", &BlochState::theta)
      .def_readonly("phi", &BlochState::phi)
      .def("__repr__", [](const BlochState& s) {
        return "BlochState(theta=" + std::to_string(s.theta) +
               ", phi=" + std::to_string(s.phi) + ")";
      });

  // state_space
  m.def("project_to_plane", [](const BlochState& s) {
    return complex_point_to_py(project_to_plane(s));
  });
  m.def("lift_to_sphere", [](const py::object& z) {
    return lift_to_sphere(complex_point_from_py(z));
  });
  m.def("apply_map", [](const py::object& z, double eps) {
    return complex_point_to_py(apply_map(complex_point_from_py(z),
                                         Epsilon(eps)));
  });
  m.def("iterate_map", [](const py::object& z, double eps, int steps) {
    py::list out;
    for (const ComplexPoint& p :
         iterate_map(complex_point_from_py(z), Epsilon(eps), steps)) {
      out.append(complex_point_to_py(p));
    }
    return out;
  });
  m.def("ideal_state_after", [](const BlochState& s, double eps, int steps) {
    const IdealIteration it = ideal_state_after(s, Epsilon(eps), steps);
    return py::make_tuple(it.state, it.success_probability);
  });

  // unitary_builder
  m.def("build_u_epsilon",
        [](double eps) { return Eigen::Matrix4cd(build_u_epsilon(Epsilon(eps))); });
  m.def("action_on_pair", [](double eps, const BlochState& s) {
    const PairAction a = action_on_pair(Epsilon(eps), s);
    return py::make_tuple(a.probability_q2_zero, a.kept_state);
  });

  // kak
  py::class_<KakResult>(m, "KakResult")
      .def_readonly("k0", &KakResult::k0)
      .def_readonly("k", &KakResult::k)
      .def_readonly("a1", &KakResult::a1)
      .def_readonly("a2", &KakResult::a2)
      .def_readonly("b1", &KakResult::b1)
      .def_readonly("b2", &KakResult::b2);
  py::class_<GateSequence>(m, "GateSequence")
      .def_readonly("epsilon", &GateSequence::epsilon)
      .def_readonly("cnot_count", &GateSequence::cnot_count)
      .def_readonly("global_phase", &GateSequence::global_phase)
      .def("__len__",
           [](const GateSequence& s) { return s.gates.size(); })
      .def("gate", [](const GateSequence& s, std::size_t i) {
        const Gate& g = s.gates.at(i);
        py::dict d;
        if (g.kind == Gate::Kind::OneQubit) {
          d["kind"] = "u1q";
          d["qubit"] = g.qubit;
          d["matrix"] = Eigen::Matrix2cd(g.matrix);
        } else {
          d["kind"] = "cnot";
          d["control"] = g.control;
          d["target"] = g.target;
        }
        return d;
      });
  m.def("decompose", &decompose);
  m.def("decompose_epsilon",
        [](double eps) { return decompose_epsilon(Epsilon(eps)); });
  m.def("synthesize", [](const KakResult& kak, double eps) {
    return canonicalize_and_synthesize(kak, eps);
  });
  m.def("sequence_matrix", &sequence_matrix);
  m.def("verify_decomposition", &verify_decomposition);

  // simulator
  py::class_<Circuit>(m, "Circuit")
      .def_readonly("iterations", &Circuit::iterations)
      .def_readonly("qubit_count", &Circuit::qubit_count)
      .def_readonly("epsilon", &Circuit::epsilon)
      .def_readonly("pairs", &Circuit::pairs)
      .def_readonly("kept_qubit", &Circuit::kept_qubit)
      .def_readonly("discard_set", &Circuit::discard_set);
  py::class_<CountsTable>(m, "CountsTable")
      .def_readonly("counts", &CountsTable::counts)
      .def_readonly("shots", &CountsTable::shots)
      .def_readonly("seed", &CountsTable::seed);
  m.def("build_protocol_circuit", [](double eps, int iterations) {
    return build_protocol_circuit(Epsilon(eps), iterations);
  });
  m.def("simulate_statevector", &simulate_statevector, py::arg("circuit"),
        py::arg("input"), py::arg("use_gate_sequence") = false);
  m.def("run_statevector", &run_statevector, py::arg("circuit"),
        py::arg("input"), py::arg("shots"), py::arg("seed"),
        py::arg("use_gate_sequence") = false);
  m.def("run_density_exact",
        [](const Circuit& c, const BlochState& input, double gamma) {
          return run_density_exact(
              c, input,
              gamma > 0.0 ? NoiseSpec::uniform_damping(c.qubit_count, gamma)
                          : NoiseSpec::none());
        },
        py::arg("circuit"), py::arg("input"), py::arg("gamma") = 0.0);
  m.def("post_select", [](const CountsTable& counts, const Circuit& c) {
    const PostSelection s = post_select(counts, c);
    return py::make_tuple(s.p_success_estimate,
                          py::make_tuple(s.kept_zero, s.kept_one));
  });
  m.def("post_select_exact",
        [](const Eigen::VectorXd& probs, const Circuit& c) {
          const ExactPostSelection s = post_select_exact(probs, c);
          return py::make_tuple(s.p_success,
                                py::make_tuple(s.p_kept_zero, s.p_kept_one));
        });
  m.def("estimate_theta1", [](std::uint64_t kept_zero, std::uint64_t kept_one) {
    return estimate_theta1(kept_zero, kept_one);
  });

  // stats + mitigation
  m.def("sigma_band", [](double p, std::uint64_t shots, double k) {
    const SigmaBand b = sigma_band(p, shots, k);
    return py::make_tuple(b.lo, b.hi, b.sigma);
  }, py::arg("p_ideal"), py::arg("shots"), py::arg("k") = 3.0);
  m.def("run_sweep_config_json", [](const std::string& text) {
    const SweepResult result = run_sweep(parse_config_json(text));
    return sweep_to_csv(result);
  });
  m.def("mitigate",
        [](const Eigen::Vector4d& raw, const Eigen::Matrix4d& confusion) {
          ConfusionMatrix cm;
          cm.entries = confusion;
          return Eigen::Vector4d(mitigate(raw, cm));
        });
}
