#include <doctest.h>

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <locale>
#include <random>
#include <sstream>
#include <string>
#include <sys/wait.h>

#include "cosim/cli/commands.hpp"
#include "cosim/cli/config.hpp"
#include "cosim/cli/csv.hpp"
#include "cosim/error.hpp"

using namespace cosim;
using namespace cosim::cli;
using nlohmann::json;
namespace fs = std::filesystem;

namespace {

fs::path scratch_dir() {
  static const fs::path dir = [] {
    auto d = fs::temp_directory_path() / ("cosim_cli_test_" + std::to_string(::getpid()));
    fs::create_directories(d);
    return d;
  }();
  return dir;
}

fs::path write_config(const std::string& name, const json& doc) {
  const auto path = scratch_dir() / name;
  std::ofstream(path) << doc.dump(2);
  return path;
}

struct CliResult {
  int code = 0;
  std::string out;
  std::string err;
};

CliResult invoke(std::vector<std::string> args) {
  args.insert(args.begin(), "cosim");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  CliResult r;
  r.code = run_cli(static_cast<int>(argv.size()), argv.data(), out, err);
  r.out = out.str();
  r.err = err.str();
  return r;
}

CsvTable table(const std::string& text) {
  std::istringstream in(text);
  return read_csv(in);
}

json oscillator(double t_stop = 5.0) {
  return {{"schema_version", 1}, {"scenario", "mass_spring"}, {"t_stop", t_stop}};
}

struct CommaDecimal : std::numpunct<char> {
  char do_decimal_point() const override { return ','; }
  char do_thousands_sep() const override { return '.'; }
  std::string do_grouping() const override { return "\3"; }
};

}  // namespace

TEST_CASE("number formatting round-trips") {
  std::mt19937_64 rng(71);
  std::uniform_real_distribution<double> mant(-1.0, 1.0);
  std::uniform_int_distribution<int> expo(-300, 300);
  for (int i = 0; i < 2000; ++i) {
    const double v = std::ldexp(mant(rng), expo(rng));
    CHECK(parse_number(format_number(v)) == v);
  }
  CHECK(format_number(0.1) == "0.1");
  CHECK(format_number(500.0) == "500");
  CHECK(format_number(std::nan("")) == "nan");
  CHECK(format_number(INFINITY) == "inf");
  CHECK(format_number(-INFINITY) == "-inf");
  CHECK(std::isnan(parse_number("nan")));
  CHECK(parse_number("-inf") == -INFINITY);
  CHECK_THROWS_AS((void)parse_number("1,5"), argument_error);
  CHECK_THROWS_AS((void)parse_number(""), argument_error);
}

TEST_CASE("CSV writer ignores the stream locale") {
  std::ostringstream out;
  out.imbue(std::locale(out.getloc(), new CommaDecimal));
  CsvWriter w(out);
  const std::vector<std::string> cols = {"a", "b"};
  w.header(cols);
  const double row[] = {1234.5, 0.25};
  w.row(row);
  CHECK(out.str() == "a,b\n1234.5,0.25\n");
  const double bad[] = {1.0};
  CHECK_THROWS_AS(w.row(bad), argument_error);
}

TEST_CASE("CSV reader") {
  const auto t = table("x,y\n1,2\n# note\n3,4.5\n");
  CHECK(t.columns == std::vector<std::string>{"x", "y"});
  REQUIRE(t.rows.size() == 2);
  CHECK(t.rows[1][1] == 4.5);
  CHECK(t.comments == std::vector<std::string>{"note"});
  CHECK(t.column("y") == 1);
  CHECK_THROWS_AS((void)t.column("z"), argument_error);
  CHECK_THROWS_AS((void)table("x,y\n1\n"), argument_error);
}

TEST_CASE("configuration parsing") {
  SUBCASE("defaults are filled in") {
    const auto cfg = parse_config(oscillator());
    CHECK(cfg.scenario.dt == 0.05);
    CHECK(cfg.scenario.mode == Mode::fixed);
    CHECK(cfg.monolithic_dt == 1e-4);
    CHECK(cfg.effective["schema_version"] == 1);
    CHECK(cfg.effective["parameters"]["mass"] == 100.0);
    CHECK(cfg.effective.contains("controller"));
    CHECK(cfg.effective.contains("indicator"));
  }
  SUBCASE("effective configuration parses to itself") {
    for (const char* name : {"mass_spring", "mass_spring_damped", "quarter_car"}) {
      CAPTURE(name);
      const auto cfg = parse_config({{"schema_version", 1}, {"scenario", name}});
      const auto again = parse_config(json::parse(cfg.effective.dump()));
      CHECK(again.effective == cfg.effective);
    }
  }
  SUBCASE("schema version is required and checked") {
    CHECK_THROWS_WITH_AS((void)parse_config({{"scenario", "mass_spring"}}),
                         doctest::Contains("schema_version"), configuration_error);
    CHECK_THROWS_AS((void)parse_config({{"schema_version", 2}, {"scenario", "mass_spring"}}),
                    configuration_error);
  }
  SUBCASE("unknown keys are rejected with their path") {
    auto doc = oscillator();
    doc["controller"] = {{"k_x", 1.0}};
    CHECK_THROWS_WITH_AS((void)parse_config(doc), doctest::Contains("controller.k_x"),
                         configuration_error);
    auto top = oscillator();
    top["dtt"] = 0.1;
    CHECK_THROWS_WITH_AS((void)parse_config(top), doctest::Contains("dtt"), configuration_error);
  }
  SUBCASE("invalid values") {
    auto doc = oscillator();
    doc["t_start"] = 2.0;
    doc["t_stop"] = 1.0;
    CHECK_THROWS_WITH_AS((void)parse_config(doc), doctest::Contains("t_stop"), configuration_error);
    auto neg = oscillator();
    neg["dt"] = -0.1;
    CHECK_THROWS_WITH_AS((void)parse_config(neg), doctest::Contains("dt"), configuration_error);
    auto scen = oscillator();
    scen["scenario"] = "pendulum";
    CHECK_THROWS_AS((void)parse_config(scen), configuration_error);
    auto est = oscillator();
    est["mode"] = "adaptive";
    est["estimator"] = {{"kind", "none"}};
    CHECK_THROWS_AS((void)parse_config(est), configuration_error);
    auto sig = oscillator();
    sig["estimator"] = {{"kind", "nepce"}, {"signals", json::array({"mass.nothing"})}};
    CHECK_THROWS_WITH_AS((void)parse_config(sig), doctest::Contains("mass.nothing"),
                         configuration_error);
  }
  SUBCASE("signals by label or index") {
    auto doc = oscillator();
    doc["estimator"] = {{"kind", "nepce"}, {"signals", json::array({"spring_damper.v"})}};
    const auto by_label = parse_config(doc);
    doc["estimator"] = {{"kind", "nepce"}, {"signals", json::array({1})}};
    const auto by_index = parse_config(doc);
    CHECK(by_label.effective == by_index.effective);
    CHECK(by_label.scenario.tolerances.size() == 1);
  }
  SUBCASE("controller order follows the estimator") {
    auto doc = oscillator();
    doc["estimator"] = {{"kind", "ecco"}};
    const auto cfg = parse_config(doc);
    CHECK(cfg.scenario.controller.order == 2);
    CHECK(cfg.scenario.controller.k_p == doctest::Approx(0.2));
  }
  SUBCASE("malformed file") {
    const auto path = scratch_dir() / "broken.json";
    std::ofstream(path) << "{ not json";
    CHECK_THROWS_AS((void)load_config(path), configuration_error);
    CHECK_THROWS_AS((void)load_config(scratch_dir() / "missing.json"), configuration_error);
  }
}

TEST_CASE("run writes one row per synchronization point") {
  const auto path = write_config("run.json", oscillator());
  const auto r = invoke({"run", path.string()});
  REQUIRE(r.code == 0);
  const auto t = table(r.out);
  CHECK(t.columns.front() == "t");
  CHECK(t.columns.back() == "E_total");
  REQUIRE(t.rows.size() == 101);
  CHECK(t.rows[0][t.column("t")] == 0.0);
  CHECK(t.rows[0][t.column("E_total")] == 500.0);
  CHECK(t.rows.back()[t.column("t")] == 5.0);
  CHECK(t.rows.back()[t.column("E_total")] > 500.0);
  CHECK(t.column("y_mass.v") < t.column("u_mass.F"));
  CHECK(t.column("eps") < t.column("deltaP_mass_spring"));
  CHECK(t.column("deltaP_mass_spring") < t.column("deltaE_mass_spring"));
  for (const auto& row : t.rows) CHECK(row.size() == t.columns.size());
}

TEST_CASE("run to a file echoes the effective configuration") {
  const auto path = write_config("echo.json", oscillator(1.0));
  const auto csv = scratch_dir() / "echo.csv";
  const auto r = invoke({"run", path.string(), "--out", csv.string()});
  REQUIRE(r.code == 0);
  CHECK(r.out.empty());
  const auto echo = fs::path(csv.string() + ".config.json");
  REQUIRE(fs::exists(echo));
  const auto reparsed = load_config(echo);
  CHECK(reparsed.effective == load_config(path).effective);

  // Running the echoed configuration reproduces the output byte for byte.
  const auto csv2 = scratch_dir() / "echo2.csv";
  REQUIRE(invoke({"run", echo.string(), "--out", csv2.string()}).code == 0);
  std::ifstream a(csv), b(csv2);
  std::stringstream sa, sb;
  sa << a.rdbuf();
  sb << b.rdbuf();
  CHECK(sa.str() == sb.str());
}

TEST_CASE("exit codes") {
  auto bad = oscillator();
  bad["t_start"] = 2.0;
  bad["t_stop"] = 1.0;
  const auto r = invoke({"run", write_config("bad.json", bad).string()});
  CHECK(r.code == 2);
  CHECK(r.err.find("t_stop") != std::string::npos);
  CHECK(r.out.empty());

  CHECK(invoke({"run", (scratch_dir() / "missing.json").string()}).code == 2);
  CHECK(invoke({"frobnicate"}).code == 2);
  CHECK(invoke({}).code == 2);
  CHECK(invoke({"--help"}).code == 0);

  auto diverging = json{{"schema_version", 1},
                        {"scenario", "mass_spring_damped"},
                        {"dt", 0.5},
                        {"t_stop", 200.0}};
  const auto d = invoke({"run", write_config("div.json", diverging).string()});
  CHECK(d.code == 3);
  const auto t = table(d.out);
  CHECK(t.rows.size() > 2);
  REQUIRE(t.comments.size() == 1);
  CHECK(t.comments[0].rfind("diverged at t=", 0) == 0);
}

TEST_CASE("sweep") {
  auto doc = json{{"schema_version", 1}, {"scenario", "mass_spring_damped"}};
  const auto path = write_config("sweep.json", doc);
  SUBCASE("rows are ordered by step size and residuals shrink with it") {
    const auto r = invoke({"sweep", path.string(), "--dt", "0.05,0.005,0.02,0.01", "--jobs", "3"});
    REQUIRE(r.code == 0);
    const auto t = table(r.out);
    REQUIRE(t.rows.size() == 4);
    const auto dt = t.column("dt");
    const auto cum = t.column("cum_abs_deltaE");
    for (std::size_t i = 1; i < 4; ++i) {
      CHECK(t.rows[i][dt] > t.rows[i - 1][dt]);
      CHECK(t.rows[i][cum] > t.rows[i - 1][cum]);
    }
    CHECK(t.rows[0][t.column("steps")] == 1000);
    for (const auto& row : t.rows) CHECK(row[t.column("diverged")] == 0);
  }
  SUBCASE("a single step size is a configuration error") {
    CHECK(invoke({"sweep", path.string(), "--dt", "0.05"}).code == 2);
    CHECK(invoke({"sweep", path.string(), "--dt", "0.05,-1"}).code == 2);
  }
  SUBCASE("sequential and concurrent sweeps agree") {
    const auto a = table(invoke({"sweep", path.string(), "--dt", "0.05,0.02,0.01"}).out);
    const auto b = table(invoke({"sweep", path.string(), "--dt", "0.05,0.02,0.01", "--jobs", "3"}).out);
    REQUIRE(a.rows.size() == b.rows.size());
    for (std::size_t i = 0; i < a.rows.size(); ++i) {
      for (const char* col : {"dt", "steps", "cum_abs_deltaE", "cum_deltaE"}) {
        CHECK(a.rows[i][a.column(col)] == b.rows[i][b.column(col)]);
      }
    }
  }
}

TEST_CASE("sweep flags runs beyond the stability limit") {
  auto doc = json{{"schema_version", 1}, {"scenario", "mass_spring_damped"}, {"t_stop", 60.0}};
  const auto cfg = parse_config(doc);
  auto diverges = [&](double dt) {
    auto sc = cfg.scenario;
    sc.dt = dt;
    return run(sc).diverged();
  };
  double lo = 0.05;
  double hi = 1.0;
  REQUIRE_FALSE(diverges(lo));
  REQUIRE(diverges(hi));
  for (int i = 0; i < 20; ++i) {
    const double mid = 0.5 * (lo + hi);
    (diverges(mid) ? hi : lo) = mid;
  }
  const double below = lo * 0.9;
  const double above = hi * 1.1;
  REQUIRE_FALSE(diverges(below));
  REQUIRE(diverges(above));

  const auto path = write_config("sweep_div.json", doc);
  const auto r = invoke({"sweep", path.string(), "--dt",
                      format_number(below) + "," + format_number(above)});
  CHECK(r.code == 0);
  const auto t = table(r.out);
  REQUIRE(t.rows.size() == 2);
  CHECK(t.rows[0][t.column("diverged")] == 0);
  CHECK(std::isnan(t.rows[0][t.column("diverged_at")]));
  CHECK(t.rows[1][t.column("diverged")] == 1);
  CHECK(t.rows[1][t.column("diverged_at")] > 0.0);
  CHECK(t.rows[1][t.column("diverged_at")] <= 60.0);
}

TEST_CASE("compare") {
  SUBCASE("macro step equal to the solver step tracks the reference") {
    auto doc = oscillator(2.0);
    doc["dt"] = 1e-4;
    const auto r = invoke({"compare", write_config("cmp_fine.json", doc).string()});
    REQUIRE(r.code == 0);
    const auto t = table(r.out);
    double worst = 0.0;
    for (const auto& row : t.rows) worst = std::max(worst, std::abs(row[t.column("dy_mass.v")]));
    CHECK(worst < 1e-6);
  }
  SUBCASE("coarse steps gain energy relative to the reference") {
    const auto r = invoke({"compare", write_config("cmp.json", oscillator(2.0)).string()});
    REQUIRE(r.code == 0);
    const auto t = table(r.out);
    CHECK(t.columns == std::vector<std::string>{"t", "dy_mass.v", "dy_spring_damper.F",
                                                "E_cosim", "E_mono", "E_err"});
    const auto col_t = t.column("t");
    const auto col_e = t.column("E_err");
    double e_half = NAN, e_end = NAN;
    for (const auto& row : t.rows) {
      if (row[col_t] >= 0.5) {
        CHECK(row[col_e] > 0.0);
        if (std::isnan(e_half)) e_half = row[col_e];
        e_end = row[col_e];
      }
    }
    CHECK(e_end > e_half);
  }
  SUBCASE("a scenario without a reference is a configuration error") {
    auto cfg = parse_config(oscillator(1.0));
    cfg.scenario.reference.reset();
    std::ostringstream out, err;
    Destination dest;
    dest.out = &out;
    CHECK_THROWS_AS(cmd_compare(cfg, dest, err), configuration_error);
  }
}

#ifdef COSIM_EXE
TEST_CASE("executable output is deterministic") {
  const auto path = write_config("exe.json", oscillator(2.0));
  const auto a = scratch_dir() / "exe_a.csv";
  const auto b = scratch_dir() / "exe_b.csv";
  const std::string exe = COSIM_EXE;
  for (const auto& out : {a, b}) {
    const std::string cmd = "\"" + exe + "\" run \"" + path.string() + "\" --out \"" + out.string() + "\"";
    const int status = std::system(cmd.c_str());
    REQUIRE(WIFEXITED(status));
    CHECK(WEXITSTATUS(status) == 0);
  }
  std::ifstream fa(a), fb(b);
  std::stringstream sa, sb;
  sa << fa.rdbuf();
  sb << fb.rdbuf();
  CHECK(!sa.str().empty());
  CHECK(sa.str() == sb.str());

  auto bad = oscillator();
  bad["t_stop"] = -1.0;
  const auto bad_path = write_config("exe_bad.json", bad);
  const std::string cmd = "\"" + exe + "\" run \"" + bad_path.string() + "\" 2>/dev/null";
  const int status = std::system(cmd.c_str());
  REQUIRE(WIFEXITED(status));
  CHECK(WEXITSTATUS(status) == 2);
}
#endif
