#include "cosim/cli/commands.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <fstream>
#include <iostream>
#include <sstream>
#include <thread>

#include <CLI11.hpp>

#include "cosim/cli/csv.hpp"
#include "cosim/error.hpp"

namespace cosim::cli {

namespace {

// Opens the destination stream; for a file, also writes the config echo.
class Sink {
public:
  Sink(const Destination& dest, const RunConfig& cfg) {
    if (dest.path) {
      file_.open(*dest.path, std::ios::binary | std::ios::trunc);
      if (!file_) throw std::runtime_error("cannot write '" + *dest.path + "'");
      std::ofstream echo(*dest.path + ".config.json", std::ios::binary | std::ios::trunc);
      if (!echo) throw std::runtime_error("cannot write '" + *dest.path + ".config.json'");
      echo << cfg.effective.dump(2) << '\n';
      out_ = &file_;
    } else {
      out_ = dest.out ? dest.out : &std::cout;
    }
  }

  std::ostream& stream() { return *out_; }

private:
  std::ofstream file_;
  std::ostream* out_ = nullptr;
};

std::vector<std::string> prefixed(const std::string& prefix, const SignalLayout& layout) {
  std::vector<std::string> out;
  for (const auto& slot : layout.slots) out.push_back(prefix + slot.label);
  return out;
}

std::string divergence_comment(const RunResult& r) {
  return "diverged at t=" + format_number(*r.diverged_at);
}

}  // namespace

int cmd_run(const RunConfig& cfg, const Destination& dest, std::ostream& err) {
  const auto result = run(cfg.scenario);
  for (const auto& w : result.warnings) err << "warning: " << w << '\n';

  Sink sink(dest, cfg);
  CsvWriter csv(sink.stream());
  std::vector<std::string> cols = {"t", "dt"};
  for (auto& c : prefixed("y_", *result.output_layout)) cols.push_back(std::move(c));
  for (auto& c : prefixed("u_", *result.input_layout)) cols.push_back(std::move(c));
  cols.emplace_back("eps");
  for (const auto& b : result.bond_labels) cols.push_back("deltaP_" + b);
  for (const auto& b : result.bond_labels) cols.push_back("deltaE_" + b);
  cols.emplace_back("E_total");
  csv.header(cols);

  std::vector<double> row;
  for (const auto& rec : result.records) {
    row.clear();
    row.push_back(rec.t);
    row.push_back(rec.dt);
    row.insert(row.end(), rec.y.begin(), rec.y.end());
    row.insert(row.end(), rec.u.begin(), rec.u.end());
    row.push_back(rec.eps);
    row.insert(row.end(), rec.bond_power.begin(), rec.bond_power.end());
    row.insert(row.end(), rec.bond_energy.begin(), rec.bond_energy.end());
    row.push_back(rec.energy.value_or(std::nan("")));
    csv.row(row);
  }
  if (result.diverged()) {
    csv.comment(divergence_comment(result));
    err << "error: " << result.divergence_message << '\n';
    return exit_diverged;
  }
  return exit_ok;
}

int cmd_sweep(const RunConfig& cfg, std::vector<double> dts, unsigned jobs,
              const Destination& dest, std::ostream& err) {
  if (dts.size() < 2) throw configuration_error("sweep needs at least two step sizes");
  for (double dt : dts) {
    if (!(dt > 0.0) || !std::isfinite(dt)) {
      throw configuration_error("sweep step sizes must be positive, got " + format_number(dt));
    }
  }
  std::sort(dts.begin(), dts.end());

  struct Row {
    std::size_t steps = 0;
    bool diverged = false;
    double diverged_at = std::nan("");
    double cum_abs = 0.0;
    double cum = 0.0;
    double wall = 0.0;
    std::vector<std::string> warnings;
  };
  std::vector<Row> rows(dts.size());

  auto work = [&](std::size_t i) {
    Scenario sc = cfg.scenario;
    sc.mode = Mode::fixed;
    sc.dt = dts[i];
    const auto start = std::chrono::steady_clock::now();
    const auto result = run(sc);
    const auto stop = std::chrono::steady_clock::now();
    Row& r = rows[i];
    r.steps = result.steps();
    r.diverged = result.diverged();
    if (r.diverged) r.diverged_at = *result.diverged_at;
    for (const auto& rec : result.records) {
      if (rec.diverged) continue;
      for (double e : rec.bond_energy) {
        r.cum_abs += std::abs(e);
        r.cum += e;
      }
    }
    r.wall = std::chrono::duration<double>(stop - start).count();
    r.warnings = result.warnings;
  };

  // Config errors are found before any work starts.
  validate_scenario([&] {
    Scenario sc = cfg.scenario;
    sc.mode = Mode::fixed;
    sc.dt = dts.front();
    return sc;
  }());

  jobs = std::max(1u, std::min<unsigned>(jobs, static_cast<unsigned>(dts.size())));
  if (jobs == 1) {
    for (std::size_t i = 0; i < dts.size(); ++i) work(i);
  } else {
    std::atomic<std::size_t> next{0};
    std::vector<std::exception_ptr> errors(jobs);
    {
      std::vector<std::jthread> pool;
      for (unsigned j = 0; j < jobs; ++j) {
        pool.emplace_back([&, j] {
          try {
            for (std::size_t i = next++; i < dts.size(); i = next++) work(i);
          } catch (...) {
            errors[j] = std::current_exception();
          }
        });
      }
    }
    for (auto& e : errors) {
      if (e) std::rethrow_exception(e);
    }
  }

  Sink sink(dest, cfg);
  CsvWriter csv(sink.stream());
  const std::vector<std::string> cols = {"dt",           "steps",          "diverged",
                                         "diverged_at",  "cum_abs_deltaE", "cum_deltaE",
                                         "wall_time_s"};
  csv.header(cols);
  for (std::size_t i = 0; i < dts.size(); ++i) {
    const Row& r = rows[i];
    for (const auto& w : r.warnings) err << "warning (dt=" << format_number(dts[i]) << "): " << w << '\n';
    const double row[] = {dts[i],     static_cast<double>(r.steps), r.diverged ? 1.0 : 0.0,
                          r.diverged_at, r.cum_abs, r.cum, r.wall};
    csv.row(row);
  }
  return exit_ok;
}

int cmd_compare(const RunConfig& cfg, const Destination& dest, std::ostream& err) {
  if (!cfg.scenario.reference) {
    throw configuration_error("scenario '" + cfg.scenario.name +
                              "' has no monolithic reference to compare with");
  }
  const auto result = run(cfg.scenario);
  for (const auto& w : result.warnings) err << "warning: " << w << '\n';

  RunResult usable = result;
  if (usable.diverged()) {
    while (!usable.records.empty() && usable.records.back().diverged) usable.records.pop_back();
  }
  const auto series = reference_for(cfg.scenario, usable, cfg.monolithic_dt);
  const auto cmp = compare_with_reference(usable, series);

  Sink sink(dest, cfg);
  CsvWriter csv(sink.stream());
  std::vector<std::string> cols = {"t"};
  for (auto& c : prefixed("dy_", *result.output_layout)) cols.push_back(std::move(c));
  cols.emplace_back("E_cosim");
  cols.emplace_back("E_mono");
  cols.emplace_back("E_err");
  csv.header(cols);
  std::vector<double> row;
  for (std::size_t i = 0; i < cmp.t.size(); ++i) {
    row.clear();
    row.push_back(cmp.t[i]);
    row.insert(row.end(), cmp.dy[i].begin(), cmp.dy[i].end());
    row.push_back(cmp.energy_cosim[i]);
    row.push_back(cmp.energy_mono[i]);
    row.push_back(cmp.energy_error[i]);
    csv.row(row);
  }
  if (result.diverged()) {
    csv.comment(divergence_comment(result));
    err << "error: " << result.divergence_message << '\n';
    return exit_diverged;
  }
  return exit_ok;
}

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Co-simulation master with coupling-error estimation and step-size control",
               "cosim"};
  app.require_subcommand(1);

  std::string config_path;
  std::string out_path;
  std::vector<double> dts;
  unsigned jobs = 1;

  auto* run_cmd = app.add_subcommand("run", "Run one co-simulation and write its time series");
  auto* sweep_cmd = app.add_subcommand("sweep", "Run fixed-step co-simulations for several step sizes");
  auto* compare_cmd = app.add_subcommand("compare", "Compare a co-simulation with the monolithic reference");
  for (auto* sub : {run_cmd, sweep_cmd, compare_cmd}) {
    sub->add_option("config", config_path, "JSON configuration file")->required();
    sub->add_option("--out", out_path, "CSV output path (default: config 'output' or stdout)");
  }
  sweep_cmd->add_option("--dt", dts, "Comma-separated macro step sizes")
      ->delimiter(',')
      ->required();
  sweep_cmd->add_option("--jobs", jobs, "Runs executed concurrently")->check(CLI::PositiveNumber);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << '\n';
    return exit_config;
  }

  try {
    const auto cfg = load_config(config_path);
    Destination dest;
    dest.out = &out;
    if (!out_path.empty()) {
      dest.path = out_path;
    } else if (cfg.output) {
      dest.path = cfg.output;
    }
    if (*run_cmd) return cmd_run(cfg, dest, err);
    if (*sweep_cmd) return cmd_sweep(cfg, dts, jobs, dest, err);
    return cmd_compare(cfg, dest, err);
  } catch (const configuration_error& e) {
    err << "error: " << e.what() << '\n';
    return exit_config;
  } catch (const divergence_error& e) {
    err << "error: " << e.what() << '\n';
    return exit_diverged;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return exit_failure;
  }
}

}  // namespace cosim::cli
