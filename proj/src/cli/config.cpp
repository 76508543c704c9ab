#include "cosim/cli/config.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include "cosim/error.hpp"
#include "cosim/scenarios.hpp"

namespace cosim::cli {

using nlohmann::json;
using nlohmann::ordered_json;

namespace {

[[noreturn]] void fail(const std::string& field, const std::string& msg) {
  throw configuration_error("config field '" + field + "': " + msg);
}

// Reads the members of one JSON object and rejects any key never asked for.
class Fields {
public:
  Fields(const json& obj, std::string prefix) : obj_(obj), prefix_(std::move(prefix)) {
    if (!obj_.is_object()) fail(prefix_.empty() ? "<root>" : prefix_, "must be an object");
  }

  [[nodiscard]] std::string path(const std::string& key) const {
    return prefix_.empty() ? key : prefix_ + "." + key;
  }

  [[nodiscard]] const json* find(const std::string& key) {
    seen_.insert(key);
    const auto it = obj_.find(key);
    return it == obj_.end() || it->is_null() ? nullptr : &*it;
  }

  double number(const std::string& key, double fallback) {
    const auto* v = find(key);
    if (!v) return fallback;
    if (!v->is_number()) fail(path(key), "must be a number");
    const double d = v->get<double>();
    if (!std::isfinite(d)) fail(path(key), "must be finite");
    return d;
  }

  double positive(const std::string& key, double fallback) {
    const double d = number(key, fallback);
    if (!(d > 0.0)) fail(path(key), "must be positive");
    return d;
  }

  double non_negative(const std::string& key, double fallback) {
    const double d = number(key, fallback);
    if (d < 0.0) fail(path(key), "must not be negative");
    return d;
  }

  bool boolean(const std::string& key, bool fallback) {
    const auto* v = find(key);
    if (!v) return fallback;
    if (!v->is_boolean()) fail(path(key), "must be true or false");
    return v->get<bool>();
  }

  std::string string(const std::string& key, const std::string& fallback) {
    const auto* v = find(key);
    if (!v) return fallback;
    if (!v->is_string()) fail(path(key), "must be a string");
    return v->get<std::string>();
  }

  std::optional<std::vector<double>> numbers(const std::string& key) {
    const auto* v = find(key);
    if (!v) return std::nullopt;
    if (!v->is_array()) fail(path(key), "must be an array of numbers");
    std::vector<double> out;
    for (const auto& e : *v) {
      if (!e.is_number()) fail(path(key), "must be an array of numbers");
      out.push_back(e.get<double>());
    }
    return out;
  }

  void finish() const {
    for (const auto& [key, value] : obj_.items()) {
      if (!seen_.count(key)) fail(path(key), "unknown key");
    }
  }

private:
  const json& obj_;
  std::string prefix_;
  std::set<std::string> seen_;
};

const json& empty_object() {
  static const json obj = json::object();
  return obj;
}

struct Built {
  Scenario scenario;
  ordered_json parameters;
  double micro_dt = 1e-4;
  double typical_force = 0.0;
  double typical_velocity = 0.0;
  double default_sigma = 0.0;
};

Built build_oscillator(const std::string& name, Fields& f) {
  auto p = oscillator_defaults(name == "mass_spring_damped");
  p.mass.mass = f.positive("mass", p.mass.mass);
  p.spring.stiffness = f.positive("stiffness", p.spring.stiffness);
  p.spring.damping = f.non_negative("damping", p.spring.damping);
  p.mass.velocity = f.number("initial_velocity", p.mass.velocity);
  p.mass.position = f.number("initial_position", p.mass.position);
  p.spring.extension = f.number("initial_extension", p.spring.extension);
  const double micro = f.positive("micro_dt", p.mass.micro_dt);
  p.mass.micro_dt = micro;
  p.spring.micro_dt = micro;
  f.finish();

  Built b;
  b.scenario = make_oscillator(p, name);
  b.parameters = {{"mass", p.mass.mass},
                  {"stiffness", p.spring.stiffness},
                  {"damping", p.spring.damping},
                  {"initial_velocity", p.mass.velocity},
                  {"initial_position", p.mass.position},
                  {"initial_extension", p.spring.extension},
                  {"micro_dt", micro}};
  b.micro_dt = micro;
  b.typical_force = oscillator_typical_force;
  b.typical_velocity = oscillator_typical_velocity;
  b.default_sigma = oscillator_sigma;
  return b;
}

Built build_quarter_car(Fields& f) {
  QuarterCarParams p;
  p.chassis.mass = f.positive("chassis_mass", p.chassis.mass);
  p.chassis.position = f.number("chassis_position", p.chassis.position);
  p.chassis.velocity = f.number("chassis_velocity", p.chassis.velocity);
  p.wheel.suspension_stiffness = f.positive("suspension_stiffness", p.wheel.suspension_stiffness);
  p.wheel.suspension_damping = f.positive("suspension_damping", p.wheel.suspension_damping);
  p.wheel.wheel_mass = f.positive("wheel_mass", p.wheel.wheel_mass);
  p.wheel.tyre_stiffness = f.positive("tyre_stiffness", p.wheel.tyre_stiffness);
  p.wheel.wheel_position = f.number("wheel_position", p.wheel.wheel_position);
  p.wheel.wheel_velocity = f.number("wheel_velocity", p.wheel.wheel_velocity);
  const double micro = f.positive("micro_dt", p.chassis.micro_dt);
  p.chassis.micro_dt = micro;
  p.wheel.micro_dt = micro;
  f.finish();

  Built b;
  b.scenario = make_quarter_car(p);
  b.parameters = {{"chassis_mass", p.chassis.mass},
                  {"chassis_position", p.chassis.position},
                  {"chassis_velocity", p.chassis.velocity},
                  {"suspension_stiffness", p.wheel.suspension_stiffness},
                  {"suspension_damping", p.wheel.suspension_damping},
                  {"wheel_mass", p.wheel.wheel_mass},
                  {"tyre_stiffness", p.wheel.tyre_stiffness},
                  {"wheel_position", p.wheel.wheel_position},
                  {"wheel_velocity", p.wheel.wheel_velocity},
                  {"micro_dt", micro}};
  b.micro_dt = micro;
  b.typical_force = quarter_car_typical_force;
  b.typical_velocity = quarter_car_typical_velocity;
  b.default_sigma = quarter_car_sigma;
  return b;
}

// Signal labels "<subsystem>.<signal>" in global order.
std::vector<std::string> labels_of(const Scenario& sc, bool inputs) {
  std::vector<std::string> out;
  for (const auto& s : sc.subsystems) {
    for (const auto& info : inputs ? s->inputs() : s->outputs()) {
      out.push_back(s->name() + "." + info.label);
    }
  }
  return out;
}

std::vector<std::string> units_of(const Scenario& sc, bool inputs) {
  std::vector<std::string> out;
  for (const auto& s : sc.subsystems) {
    for (const auto& info : inputs ? s->inputs() : s->outputs()) out.push_back(info.unit);
  }
  return out;
}

std::vector<std::size_t> parse_signals(Fields& f, const std::string& key,
                                       const std::vector<std::string>& labels) {
  const auto* v = f.find(key);
  if (!v) return {};
  if (!v->is_array()) fail(f.path(key), "must be an array of indices or labels");
  std::vector<std::size_t> out;
  for (const auto& e : *v) {
    if (e.is_number_integer() && e.get<long long>() >= 0) {
      const auto i = e.get<std::size_t>();
      if (i >= labels.size()) fail(f.path(key), "index " + std::to_string(i) + " out of range");
      out.push_back(i);
    } else if (e.is_string()) {
      const auto name = e.get<std::string>();
      const auto it = std::find(labels.begin(), labels.end(), name);
      if (it == labels.end()) fail(f.path(key), "unknown signal '" + name + "'");
      out.push_back(static_cast<std::size_t>(it - labels.begin()));
    } else {
      fail(f.path(key), "must be an array of indices or labels");
    }
  }
  if (out.empty()) fail(f.path(key), "must not be empty");
  return out;
}

Mode parse_mode(const std::string& s) {
  if (s == "fixed") return Mode::fixed;
  if (s == "adaptive") return Mode::adaptive;
  fail("mode", "must be \"fixed\" or \"adaptive\"");
}

}  // namespace

RunConfig parse_config(const json& doc) {
  Fields root(doc, "");

  const auto* version = root.find("schema_version");
  if (!version) fail("schema_version", "is required");
  if (!version->is_number_integer() || version->get<long long>() != current_schema_version) {
    fail("schema_version", "unsupported version (expected " +
                               std::to_string(current_schema_version) + ")");
  }

  const auto name = root.string("scenario", "");
  if (name.empty()) fail("scenario", "is required");
  const auto* params_doc = root.find("parameters");
  Fields params(params_doc ? *params_doc : empty_object(), "parameters");
  Built built;
  if (name == "mass_spring" || name == "mass_spring_damped") {
    built = build_oscillator(name, params);
  } else if (name == "quarter_car") {
    built = build_quarter_car(params);
  } else {
    fail("scenario", "unknown scenario '" + name + "'");
  }
  Scenario& sc = built.scenario;

  sc.t_start = root.number("t_start", sc.t_start);
  sc.t_stop = root.number("t_stop", sc.t_stop);
  if (sc.t_stop < sc.t_start) fail("t_stop", "must not be earlier than t_start");
  sc.mode = parse_mode(root.string("mode", sc.mode == Mode::fixed ? "fixed" : "adaptive"));
  sc.dt = root.positive("dt", sc.dt);
  sc.parallel = root.boolean("parallel", false);

  // Estimator.
  const auto input_labels = labels_of(sc, true);
  const auto output_labels = labels_of(sc, false);
  const auto* est_doc = root.find("estimator");
  Fields est(est_doc ? *est_doc : empty_object(), "estimator");
  const auto kind = est.string("kind", "nepce");
  ordered_json est_out = {{"kind", kind}};
  std::vector<std::string> signal_units;
  const auto input_units = units_of(sc, true);
  const auto output_units = units_of(sc, false);
  if (kind == "nepce") {
    NepceEstimator::Options o;
    o.feedthrough_correction = est.boolean("feedthrough_correction", false);
    o.signals = parse_signals(est, "signals", input_labels);
    est_out["feedthrough_correction"] = o.feedthrough_correction;
    std::vector<std::size_t> idx = o.signals;
    if (idx.empty()) {
      for (std::size_t i = 0; i < input_labels.size(); ++i) idx.push_back(i);
    }
    est_out["signals"] = json::array();
    for (auto i : idx) {
      est_out["signals"].push_back(input_labels[i]);
      signal_units.push_back(input_units[i]);
    }
    sc.estimator = std::make_shared<NepceEstimator>(o);
  } else if (kind == "predictor") {
    PredictorEstimator::Options o;
    o.signals = parse_signals(est, "signals", output_labels);
    std::vector<std::size_t> idx = o.signals;
    if (idx.empty()) {
      for (std::size_t i = 0; i < output_labels.size(); ++i) idx.push_back(i);
    }
    est_out["signals"] = json::array();
    for (auto i : idx) {
      est_out["signals"].push_back(output_labels[i]);
      signal_units.push_back(output_units[i]);
    }
    sc.estimator = std::make_shared<PredictorEstimator>(o);
  } else if (kind == "ecco") {
    std::vector<std::string> bond_labels;
    for (const auto& b : sc.bonds) bond_labels.push_back(b.label);
    EccoEstimator::Options o;
    o.bonds = parse_signals(est, "bonds", bond_labels);
    std::vector<std::size_t> idx = o.bonds;
    if (idx.empty()) {
      for (std::size_t i = 0; i < bond_labels.size(); ++i) idx.push_back(i);
    }
    est_out["bonds"] = json::array();
    for (auto i : idx) {
      est_out["bonds"].push_back(bond_labels[i]);
      signal_units.emplace_back("J");
    }
    sc.estimator = std::make_shared<EccoEstimator>(o);
  } else if (kind == "none") {
    if (sc.mode == Mode::adaptive) fail("estimator.kind", "adaptive mode needs an estimator");
    sc.estimator.reset();
  } else {
    fail("estimator.kind", "must be one of nepce, predictor, ecco, none");
  }
  est.finish();

  // Indicator.
  const auto* ind_doc = root.find("indicator");
  Fields ind(ind_doc ? *ind_doc : empty_object(), "indicator");
  try {
    sc.aggregation = parse_aggregation(ind.string("aggregation", "rmse"));
  } catch (const error& e) {
    fail("indicator.aggregation", e.what());
  }
  ordered_json ind_out = {{"aggregation", std::string(to_string(sc.aggregation))}};
  const auto absolute = ind.numbers("absolute");
  const auto relative = ind.numbers("relative");
  const auto* sigma_doc = ind.find("relative_tolerance");
  const auto typical = ind.numbers("typical_magnitudes");
  if (absolute || relative) {
    if (!absolute || !relative) fail("indicator", "absolute and relative must be given together");
    if (sigma_doc || typical) {
      fail("indicator", "use either absolute/relative or relative_tolerance/typical_magnitudes");
    }
    sc.tolerances = ToleranceSet{*absolute, *relative};
  } else if (sc.estimator) {
    const double sigma = ind.positive("relative_tolerance", built.default_sigma);
    std::vector<double> mags;
    if (typical) {
      mags = *typical;
    } else {
      // One millisecond of typical transmitted power for energy signals.
      for (const auto& unit : signal_units) {
        if (unit == "N") {
          mags.push_back(built.typical_force);
        } else if (unit == "m/s") {
          mags.push_back(built.typical_velocity);
        } else {
          mags.push_back(built.typical_force * built.typical_velocity * 1e-3);
        }
      }
    }
    if (mags.size() != signal_units.size()) {
      fail("indicator.typical_magnitudes",
           "needs " + std::to_string(signal_units.size()) + " entries");
    }
    try {
      sc.tolerances = scaled_tolerances(sigma, mags);
    } catch (const error& e) {
      fail("indicator.typical_magnitudes", e.what());
    }
  } else {
    sc.tolerances = {};
  }
  if (sc.estimator) {
    if (sc.tolerances.size() != signal_units.size()) {
      fail("indicator.absolute", "needs " + std::to_string(signal_units.size()) + " entries");
    }
    try {
      sc.tolerances.validate();
    } catch (const error& e) {
      fail("indicator", e.what());
    }
  }
  ind_out["absolute"] = sc.tolerances.absolute;
  ind_out["relative"] = sc.tolerances.relative;
  ind.finish();

  // Controller. The default order comes from the estimator.
  const auto* ctl_doc = root.find("controller");
  Fields ctl(ctl_doc ? *ctl_doc : empty_object(), "controller");
  int default_order = 1;
  if (sc.estimator) {
    try {
      default_order = std::max(1, sc.estimator->indicator_order(build_topology(sc)));
    } catch (const error&) {
      default_order = 1;
    }
  }
  const auto* order_doc = ctl.find("order");
  int order = default_order;
  if (order_doc) {
    if (!order_doc->is_number_integer() || order_doc->get<long long>() < 1) {
      fail("controller.order", "must be a positive integer");
    }
    order = static_cast<int>(order_doc->get<long long>());
  }
  const auto preset = ctl.string("preset", "pi");
  ControllerConfig c;
  if (preset == "pi") {
    c = ControllerConfig::pi_defaults(order);
  } else if (preset == "integrating") {
    c = ControllerConfig::integrating(order);
  } else {
    fail("controller.preset", "must be \"pi\" or \"integrating\"");
  }
  c.k_p = ctl.non_negative("k_p", c.k_p);
  c.k_i = ctl.positive("k_i", c.k_i);
  c.dt_min = ctl.positive("dt_min", c.dt_min);
  c.dt_max = ctl.positive("dt_max", c.dt_max);
  c.dt_start = ctl.positive("dt_start", c.dt_min);
  c.theta_min = ctl.positive("theta_min", c.theta_min);
  c.theta_max = ctl.positive("theta_max", c.theta_max);
  c.safety = ctl.positive("safety", c.safety);
  ctl.finish();
  try {
    c.validate();
  } catch (const error& e) {
    fail("controller", e.what());
  }
  sc.controller = c;

  RunConfig cfg;
  cfg.monolithic_dt = root.positive("monolithic_dt", built.micro_dt);
  const auto out = root.string("output", "");
  if (!out.empty()) cfg.output = out;
  const auto* seed = root.find("seed");
  if (seed) {
    if (!seed->is_number_unsigned()) fail("seed", "must be a non-negative integer");
    cfg.seed = seed->get<std::uint64_t>();
  }
  root.finish();

  try {
    validate_scenario(sc);
  } catch (const configuration_error& e) {
    throw configuration_error(std::string("config: ") + e.what());
  }

  ordered_json eff;
  eff["schema_version"] = current_schema_version;
  eff["scenario"] = name;
  eff["parameters"] = built.parameters;
  eff["t_start"] = sc.t_start;
  eff["t_stop"] = sc.t_stop;
  eff["mode"] = sc.mode == Mode::fixed ? "fixed" : "adaptive";
  eff["dt"] = sc.dt;
  eff["estimator"] = est_out;
  eff["indicator"] = ind_out;
  eff["controller"] = {{"preset", preset},     {"order", c.order},
                       {"k_p", c.k_p},         {"k_i", c.k_i},
                       {"dt_min", c.dt_min},   {"dt_max", c.dt_max},
                       {"dt_start", c.dt_start}, {"theta_min", c.theta_min},
                       {"theta_max", c.theta_max}, {"safety", c.safety}};
  eff["monolithic_dt"] = cfg.monolithic_dt;
  eff["parallel"] = sc.parallel;
  eff["seed"] = cfg.seed;
  if (cfg.output) eff["output"] = *cfg.output;

  cfg.scenario = std::move(sc);
  cfg.effective = std::move(eff);
  return cfg;
}

RunConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw configuration_error("cannot open config file '" + path.string() + "'");
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::parse_error& e) {
    throw configuration_error("config file '" + path.string() + "' is not valid JSON: " +
                              e.what());
  }
  return parse_config(doc);
}

}  // namespace cosim::cli
