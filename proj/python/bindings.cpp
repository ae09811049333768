#include <pybind11/functional.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <sstream>

#include "addyn/commands.hpp"
#include "addyn/config.hpp"
#include "addyn/errors.hpp"
#include "addyn/fitness.hpp"
#include "addyn/lotka_volterra.hpp"
#include "addyn/pes.hpp"
#include "addyn/singularity.hpp"
#include "addyn/tss.hpp"

namespace py = pybind11;
using namespace addyn;

namespace {

py::dict report_dict(const SingularityReport& r) {
  py::dict d;
  d["x_star"] = r.x_star;
  d["a"] = r.a;
  d["c"] = r.c;
  d["a_fd"] = r.a_fd;
  d["c_fd"] = r.c_fd;
  d["classification"] = to_string(r.classification);
  if (r.coexistence_nearby) {
    d["coexistence_nearby"] = *r.coexistence_nearby;
  } else {
    d["coexistence_nearby"] = py::none();
  }
  return d;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Adaptive dynamics toolkit: fitness, singularities, PES and TSS.";
  m.attr("__version__") = kVersion;

  py::register_exception<Error>(m, "Error", PyExc_RuntimeError);
  py::register_exception<ConfigError>(m, "ConfigError", PyExc_ValueError);
  py::register_exception<DomainError>(m, "DomainError", PyExc_ValueError);

  py::class_<ModelSpec>(m, "Model")
      .def_readonly("K", &ModelSpec::carrying_scale)
      .def_readonly("u_K", &ModelSpec::mut_rate_scale)
      .def_readonly("epsilon", &ModelSpec::jump_scale)
      .def_readonly("family", &ModelSpec::family)
      .def_property_readonly("bounds",
                             [](const ModelSpec& s) {
                               return py::make_tuple(s.space.lower, s.space.upper);
                             })
      .def("birth", [](const ModelSpec& s, double x) { return s.birth(x); })
      .def("death", [](const ModelSpec& s, double x) { return s.death(x); })
      .def("competition", [](const ModelSpec& s, double x, double y) { return s.competition(x, y); });

  m.def(
      "gaussian_example",
      [](double sigma_b, double sigma_alpha, double sigma, double p, int K, double u_K,
         double epsilon) {
        return make_gaussian_example({sigma_b, sigma_alpha, sigma, p, K, u_K, epsilon});
      },
      py::arg("sigma_b") = 0.9, py::arg("sigma_alpha") = 1.0, py::arg("sigma") = 0.01,
      py::arg("p") = 0.1, py::arg("K") = 1000, py::arg("u_K") = 1.0, py::arg("epsilon") = 1.0);

  m.def(
      "model_from_config",
      [](const std::string& text, const std::string& base_dir) {
        return build_model(parse_config(text, base_dir));
      },
      py::arg("text"), py::arg("base_dir") = ".");

  m.def("monomorphic_equilibrium", &monomorphic_equilibrium, py::arg("model"), py::arg("x"));
  m.def("fitness", &fitness1, py::arg("model"), py::arg("y"), py::arg("x"),
        "Invasion fitness f(y; x) of a mutant y in a resident x.");
  m.def("fitness2", &fitness2, py::arg("model"), py::arg("z"), py::arg("x"), py::arg("y"));
  m.def(
      "dimorphic_equilibrium",
      [](const ModelSpec& s, double x, double y) {
        const auto eq = dimorphic_equilibrium(s, x, y);
        return py::make_tuple(eq.n1, eq.n2);
      },
      py::arg("model"), py::arg("x"), py::arg("y"));
  m.def("selection_gradient",
        [](const ModelSpec& s, double x) { return selection_gradient(s, x); });

  m.def("classify_singularity", [](double a, double c) {
    return std::string(to_string(classify_singularity(a, c)));
  });
  m.def("find_singularities", [](const ModelSpec& s) {
    py::list out;
    for (const auto& r : find_singularities(s)) {
      out.append(report_dict(r));
    }
    return out;
  });

  m.def(
      "coexist",
      [](const ModelSpec& s, const std::vector<double>& traits) {
        return check_coexistence(s, traits).coexist;
      },
      py::arg("model"), py::arg("traits"));

  m.def(
      "simulate_pes",
      [](const ModelSpec& s, double x0, double t_end, std::uint64_t seed,
         const std::string& variant) {
        Rng rng = make_stream(seed);
        const auto tr = simulate_pes(s, monomorphic_state(s, x0), t_end, rng,
                                     parse_variant(variant));
        py::list jumps;
        for (const auto& j : tr.jumps) {
          jumps.append(py::make_tuple(j.t, j.state.support, j.event.accepted));
        }
        return jumps;
      },
      py::arg("model"), py::arg("x0"), py::arg("t_end"), py::arg("seed") = 1,
      py::arg("variant") = "full");

  m.def(
      "simulate_tss",
      [](const ModelSpec& s, double x0, double epsilon, double t_end, std::uint64_t seed) {
        Rng rng = make_stream(seed);
        const auto p = simulate_tss(s, x0, epsilon, t_end, rng);
        return py::make_tuple(p.times, p.traits);
      },
      py::arg("model"), py::arg("x0"), py::arg("epsilon"), py::arg("t_end"),
      py::arg("seed") = 1);

  m.def(
      "solve_canonical",
      [](const ModelSpec& s, double x0, double t_end, int samples) {
        const auto sol = solve_canonical(s, x0, t_end, 1e-10, samples);
        return py::make_tuple(sol.times, sol.traits);
      },
      py::arg("model"), py::arg("x0"), py::arg("t_end"), py::arg("samples") = 500);

  m.def(
      "run_command",
      [](const std::string& command, const std::string& config_text, const std::string& out) {
        CommandOptions opt;
        opt.out = out;
        std::ostringstream o, e;
        int code;
        {
          py::gil_scoped_release release;
          try {
            code = run_command(command, parse_config(config_text), opt, o, e);
          } catch (const ConfigError& err) {
            e << err.what() << '\n';
            code = 2;
          }
        }
        return py::make_tuple(code, o.str(), e.str());
      },
      py::arg("command"), py::arg("config_text"), py::arg("out"),
      "Runs a CLI command on INI text; returns (exit_code, stdout, stderr).");
}
