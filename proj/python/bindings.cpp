#include <sstream>
#include <string>
#include <vector>

#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "cosim/cli/commands.hpp"
#include "cosim/cli/config.hpp"
#include "cosim/controller.hpp"
#include "cosim/error.hpp"
#include "cosim/estimators.hpp"
#include "cosim/indicator.hpp"
#include "cosim/master.hpp"
#include "cosim/monolithic.hpp"
#include "cosim/scenarios.hpp"

namespace py = pybind11;
using namespace cosim;

namespace {

cli::RunConfig config_from(const py::object& config) {
  const auto json_mod = py::module_::import("json");
  const std::string text =
      py::isinstance<py::str>(config) ? config.cast<std::string>()
                                      : json_mod.attr("dumps")(config).cast<std::string>();
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw configuration_error(std::string("config is not valid JSON: ") + e.what());
  }
  return cli::parse_config(doc);
}

py::dict result_to_dict(const RunResult& r) {
  std::vector<double> t, dt, eps, energy;
  std::vector<std::vector<double>> y, u, dp, de;
  for (const auto& rec : r.records) {
    t.push_back(rec.t);
    dt.push_back(rec.dt);
    eps.push_back(rec.eps);
    energy.push_back(rec.energy.value_or(std::nan("")));
    y.push_back(rec.y);
    u.push_back(rec.u);
    dp.push_back(rec.bond_power);
    de.push_back(rec.bond_energy);
  }
  std::vector<std::string> out_labels, in_labels;
  for (const auto& s : r.output_layout->slots) out_labels.push_back(s.label);
  for (const auto& s : r.input_layout->slots) in_labels.push_back(s.label);
  py::dict d;
  d["t"] = t;
  d["dt"] = dt;
  d["y"] = y;
  d["u"] = u;
  d["eps"] = eps;
  d["deltaP"] = dp;
  d["deltaE"] = de;
  d["E_total"] = energy;
  d["outputs"] = out_labels;
  d["inputs"] = in_labels;
  d["bonds"] = r.bond_labels;
  d["steps"] = r.steps();
  d["diverged_at"] = r.diverged_at ? py::cast(*r.diverged_at) : py::none();
  d["warnings"] = r.warnings;
  return d;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Co-simulation master algorithms with coupling-error estimation.";

  auto base = py::register_exception<error>(m, "CosimError", PyExc_RuntimeError);
  py::register_exception<configuration_error>(m, "ConfigurationError", base.ptr());
  py::register_exception<argument_error>(m, "ArgumentError", base.ptr());
  py::register_exception<divergence_error>(m, "DivergenceError", base.ptr());
  py::register_exception<estimator_error>(m, "EstimatorError", base.ptr());
  py::register_exception<controller_error>(m, "ControllerError", base.ptr());

  m.def("builtin_scenarios", &builtin_names, "Names of the built-in scenarios.");

  m.def(
      "run",
      [](const py::object& config) {
        const auto cfg = config_from(config);
        RunResult r;
        {
          py::gil_scoped_release release;
          r = cosim::run(cfg.scenario);
        }
        return result_to_dict(r);
      },
      py::arg("config"),
      "Run a co-simulation from a configuration (dict or JSON string) and return its "
      "time series as lists.");

  m.def(
      "effective_config",
      [](const py::object& config) { return config_from(config).effective.dump(); },
      py::arg("config"), "The configuration with all defaults filled in, as JSON text.");

  m.def(
      "compare",
      [](const py::object& config) {
        const auto cfg = config_from(config);
        const auto r = cosim::run(cfg.scenario);
        const auto series = reference_for(cfg.scenario, r, cfg.monolithic_dt);
        const auto c = compare_with_reference(r, series);
        py::dict d;
        d["t"] = c.t;
        d["dy"] = c.dy;
        d["E_cosim"] = c.energy_cosim;
        d["E_mono"] = c.energy_mono;
        d["E_err"] = c.energy_error;
        return d;
      },
      py::arg("config"), "Output and energy errors against the monolithic reference.");

  m.def(
      "main",
      [](std::vector<std::string> args) {
        args.insert(args.begin(), "cosim");
        std::vector<const char*> argv;
        for (const auto& a : args) argv.push_back(a.c_str());
        std::ostringstream out, err;
        const int code = cli::run_cli(static_cast<int>(argv.size()), argv.data(), out, err);
        return py::make_tuple(code, out.str(), err.str());
      },
      py::arg("args"), "Run the command-line interface; returns (exit code, stdout, stderr).");

  m.def(
      "nepce_input_error",
      [](const std::vector<double>& u_now, const std::vector<double>& u_prev) {
        return nepce_input_error(u_now, u_prev);
      },
      py::arg("u_now"), py::arg("u_prev"));
  m.def(
      "lagrange_weights",
      [](const std::vector<double>& times, double t) { return lagrange_weights(times, t); },
      py::arg("times"), py::arg("t"));
  m.def(
      "lagrange_predict",
      [](const std::vector<double>& times, const std::vector<double>& values, double t) {
        return lagrange_predict(times, values, t);
      },
      py::arg("times"), py::arg("values"), py::arg("t_target"));
  m.def(
      "predictor_output_error",
      [](const std::vector<double>& times, const std::vector<double>& values, double y_now,
         double t_now) { return predictor_output_error(times, values, y_now, t_now); },
      py::arg("times"), py::arg("values"), py::arg("y_now"), py::arg("t_now"));
  m.def("ecco_residual_energy", &ecco_residual_energy, py::arg("delta_p"), py::arg("dt"),
        py::arg("m"));

  m.def(
      "normalize",
      [](const std::vector<double>& dy, const std::vector<double>& y,
         const std::vector<double>& absolute, const std::vector<double>& relative) {
        return normalize(dy, y, ToleranceSet{absolute, relative});
      },
      py::arg("dy"), py::arg("y"), py::arg("absolute"), py::arg("relative"));
  m.def(
      "aggregate",
      [](const std::vector<double>& eps, const std::string& kind) {
        return aggregate(eps, parse_aggregation(kind));
      },
      py::arg("eps"), py::arg("kind") = "rmse");
  m.def(
      "scaled_tolerances",
      [](double sigma, const std::vector<double>& typical) {
        const auto t = scaled_tolerances(sigma, typical);
        return py::make_tuple(t.absolute, t.relative);
      },
      py::arg("sigma"), py::arg("typical_magnitudes"));

  py::class_<ControllerConfig>(m, "ControllerConfig")
      .def(py::init<>())
      .def_static("pi_defaults", &ControllerConfig::pi_defaults, py::arg("order"))
      .def_static("integrating", &ControllerConfig::integrating, py::arg("order"))
      .def_readwrite("k_p", &ControllerConfig::k_p)
      .def_readwrite("k_i", &ControllerConfig::k_i)
      .def_readwrite("dt_min", &ControllerConfig::dt_min)
      .def_readwrite("dt_max", &ControllerConfig::dt_max)
      .def_readwrite("theta_min", &ControllerConfig::theta_min)
      .def_readwrite("theta_max", &ControllerConfig::theta_max)
      .def_readwrite("order", &ControllerConfig::order)
      .def_readwrite("safety", &ControllerConfig::safety)
      .def_readwrite("dt_start", &ControllerConfig::dt_start)
      .def("validate", &ControllerConfig::validate);

  py::class_<PiController>(m, "PiController")
      .def(py::init<const ControllerConfig&>(), py::arg("config"))
      .def("next", &PiController::next, py::arg("dt_old"), py::arg("eps"))
      .def("reset", &PiController::reset)
      .def_property_readonly("integral", [](const PiController& c) { return c.state().integral; })
      .def_property_readonly("clamp_conflicts",
                             [](const PiController& c) { return c.state().clamp_conflicts; });

  m.def("compact_reference", &compact_reference, py::arg("dt_prev"), py::arg("eps_now"),
        py::arg("eps_prev"), py::arg("config"));
  m.def("oscillator_energy", &oscillator_energy, py::arg("mass"), py::arg("stiffness"),
        py::arg("velocity"), py::arg("position"));
}
