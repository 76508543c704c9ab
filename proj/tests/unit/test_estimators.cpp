#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#include "cosim/coupling_estimator.hpp"
#include "cosim/error.hpp"
#include "cosim/estimators.hpp"
#include "cosim/master.hpp"
#include "cosim/scenarios.hpp"

using namespace cosim;

namespace {

// Plain Gaussian elimination with partial pivoting on a dense row-major system.
std::vector<double> solve_dense(std::vector<double> a, std::vector<double> b) {
  const std::size_t n = b.size();
  for (std::size_t c = 0; c < n; ++c) {
    std::size_t p = c;
    for (std::size_t r = c + 1; r < n; ++r) {
      if (std::abs(a[r * n + c]) > std::abs(a[p * n + c])) p = r;
    }
    for (std::size_t k = 0; k < n; ++k) std::swap(a[c * n + k], a[p * n + k]);
    std::swap(b[c], b[p]);
    for (std::size_t r = c + 1; r < n; ++r) {
      const double f = a[r * n + c] / a[c * n + c];
      for (std::size_t k = c; k < n; ++k) a[r * n + k] -= f * a[c * n + k];
      b[r] -= f * b[c];
    }
  }
  std::vector<double> x(n);
  for (std::size_t i = n; i-- > 0;) {
    double s = b[i];
    for (std::size_t k = i + 1; k < n; ++k) s -= a[i * n + k] * x[k];
    x[i] = s / a[i * n + i];
  }
  return x;
}

ConnectionGraph crossed() {
  ConnectionGraph g;
  g.n_inputs = 2;
  g.n_outputs = 2;
  g.entries = {{1, 0, +1}, {0, 1, +1}};
  return g;
}

PowerBond mass_spring_bond() { return {{{0, 0, -1}, {1, 1, +1}}, "mass_spring"}; }

}  // namespace

TEST_CASE("input error under zero-order hold") {
  const double now[] = {1.0, -2.0, 3.0};
  const double prev[] = {0.5, -2.0, 4.0};
  const auto du = nepce_input_error(now, prev);
  CHECK(du == std::vector<double>{0.5, 0.0, -1.0});
  const double short_prev[] = {1.0};
  CHECK_THROWS_AS((void)nepce_input_error(now, short_prev), argument_error);
}

TEST_CASE("first macro step of the oscillator changes the velocity input by -0.5") {
  auto sc = builtin_scenario("mass_spring");
  sc.t_stop = 0.05;
  sc.dt = 0.05;
  const auto r = run(sc);
  REQUIRE(r.records.size() == 2);
  const auto du = nepce_input_error(r.records[1].u, r.records[0].u);
  CHECK(du[1] == doctest::Approx(-0.5).epsilon(1e-12));
  CHECK(du[0] == 0.0);
}

TEST_CASE("feed-through correction matches a dense solve") {
  SUBCASE("no Jacobian entries leaves the estimate unchanged") {
    FeedthroughModel ft;
    ft.available = true;
    ft.n_inputs = ft.n_outputs = 2;
    const double raw[] = {0.3, -0.7};
    CHECK(nepce_feedthrough_correction(raw, crossed(), ft) == std::vector<double>{0.3, -0.7});
  }
  SUBCASE("damped spring") {
    FeedthroughModel ft;
    ft.available = true;
    ft.n_inputs = ft.n_outputs = 2;
    ft.entries = {{1, 1, -40.0}};
    const double raw[] = {12.0, -0.5};
    const auto du = nepce_feedthrough_correction(raw, crossed(), ft);
    // (I - L J) = [[1, 40], [0, 1]]
    CHECK(du[1] == doctest::Approx(-0.5));
    CHECK(du[0] == doctest::Approx(12.0 + 40.0 * 0.5));
  }
  SUBCASE("random three-signal systems") {
    std::mt19937_64 rng(31);
    std::uniform_real_distribution<double> val(-0.8, 0.8);
    ConnectionGraph g;
    g.n_inputs = g.n_outputs = 3;
    g.entries = {{1, 0, +1}, {2, 1, -1}, {0, 2, +1}};
    const auto l = dense_matrix(g);
    for (int trial = 0; trial < 50; ++trial) {
      FeedthroughModel ft;
      ft.available = true;
      ft.n_inputs = ft.n_outputs = 3;
      std::vector<double> j(9, 0.0);
      for (std::size_t o = 0; o < 3; ++o) {
        for (std::size_t i = 0; i < 3; ++i) {
          if ((o + i + trial) % 2 == 0) {
            j[o * 3 + i] = val(rng);
            ft.entries.push_back({o, i, j[o * 3 + i]});
          }
        }
      }
      std::vector<double> a(9, 0.0);
      for (std::size_t r = 0; r < 3; ++r) {
        for (std::size_t c = 0; c < 3; ++c) {
          double lj = 0.0;
          for (std::size_t k = 0; k < 3; ++k) lj += l[r * 3 + k] * j[k * 3 + c];
          a[r * 3 + c] = (r == c ? 1.0 : 0.0) - lj;
        }
      }
      const std::vector<double> raw = {val(rng), val(rng), val(rng)};
      const auto expected = solve_dense(a, raw);
      const auto got = nepce_feedthrough_correction(raw, g, ft);
      for (std::size_t k = 0; k < 3; ++k) CHECK(got[k] == doctest::Approx(expected[k]).epsilon(1e-10));
    }
  }
  SUBCASE("singular system") {
    ConnectionGraph g;
    g.n_inputs = g.n_outputs = 1;
    g.entries = {{0, 0, +1}};
    FeedthroughModel ft;
    ft.available = true;
    ft.n_inputs = ft.n_outputs = 1;
    ft.entries = {{0, 0, 1.0}};
    const double raw[] = {1.0};
    CHECK_THROWS_AS((void)nepce_feedthrough_correction(raw, g, ft), estimator_error);
  }
  SUBCASE("unavailable model") {
    FeedthroughModel ft;
    ft.n_inputs = ft.n_outputs = 2;
    ft.entries = {{1, 1, -40.0}};
    const double raw[] = {1.0, 1.0};
    CHECK_THROWS_AS((void)nepce_feedthrough_correction(raw, crossed(), ft), estimator_error);
  }
}

TEST_CASE("Lagrange extrapolation") {
  const double t[] = {0.0, 1.0, 2.0};
  const double y[] = {0.0, 1.0, 4.0};
  CHECK(lagrange_predict(t, y, 3.0) == doctest::Approx(9.0).epsilon(1e-12));
  const double tn[] = {0.0, 0.5, 2.0};
  const double yn[] = {0.0, 0.25, 4.0};
  CHECK(lagrange_predict(tn, yn, 3.0) == doctest::Approx(9.0).epsilon(1e-12));

  const double tl[] = {0.0, 1.0};
  const double yl[] = {1.0, 3.0};
  CHECK(lagrange_predict(tl, yl, 2.5) == doctest::Approx(6.0));

  const double dup[] = {0.0, 1.0, 1.0};
  CHECK_THROWS_AS((void)lagrange_predict(dup, y, 3.0), argument_error);
  CHECK_THROWS_AS((void)lagrange_predict(t, y, 2.0), argument_error);
  const double one_t[] = {0.0};
  const double one_y[] = {1.0};
  CHECK_THROWS_AS((void)lagrange_predict(one_t, one_y, 1.0), argument_error);
  CHECK_THROWS_AS((void)lagrange_predict(t, yl, 3.0), argument_error);
}

TEST_CASE("Lagrange weights sum to one on moderate spacing") {
  std::mt19937_64 rng(32);
  std::uniform_real_distribution<double> ratio(0.5, 2.0);
  for (int r = 1; r <= 4; ++r) {
    for (int trial = 0; trial < 100; ++trial) {
      std::vector<double> times = {0.0};
      double h = 0.01;
      for (int j = 0; j < r; ++j) {
        times.push_back(times.back() + h);
        h *= ratio(rng);
      }
      const auto w = lagrange_weights(times, times.back() + h);
      const double s = std::accumulate(w.begin(), w.end(), 0.0);
      CHECK(std::abs(s - 1.0) <= 1e-12);
    }
  }
}

TEST_CASE("predictor output error") {
  const double t[] = {0.0, 1.0};
  const double y[] = {0.0, 1.0};
  CHECK(predictor_output_error(t, y, 2.0, 2.0) == doctest::Approx(0.0));
  const double t3[] = {0.0, 1.0, 2.0};
  const double y3[] = {0.0, 1.0, 4.0};
  CHECK(predictor_output_error(t3, y3, 9.0, 3.0) == doctest::Approx(0.0).epsilon(1e-12));
  // A quadratic seen by a linear predictor.
  const double t2[] = {1.0, 2.0};
  const double y2[] = {1.0, 4.0};
  CHECK(predictor_output_error(t2, y2, 9.0, 3.0) == doctest::Approx(2.0));
}

TEST_CASE("predictor error is zero for polynomials up to its order") {
  std::mt19937_64 rng(33);
  std::uniform_real_distribution<double> coef(-3.0, 3.0);
  std::uniform_real_distribution<double> step(0.05, 0.3);
  for (int r = 1; r <= 3; ++r) {
    for (int trial = 0; trial < 50; ++trial) {
      std::vector<double> c(static_cast<std::size_t>(r) + 1);
      for (auto& v : c) v = coef(rng);
      auto poly = [&](double x) {
        double s = 0.0;
        for (std::size_t k = c.size(); k-- > 0;) s = s * x + c[k];
        return s;
      };
      std::vector<double> times = {0.0};
      for (int j = 0; j < r; ++j) times.push_back(times.back() + step(rng));
      std::vector<double> values;
      for (double x : times) values.push_back(poly(x));
      const double tn = times.back() + step(rng);
      const double yn = poly(tn);
      CHECK(std::abs(predictor_output_error(times, values, yn, tn)) <=
            1e-9 * std::max(1.0, std::abs(yn)));
    }
  }
}

TEST_CASE("predictor error from history warms up") {
  StepHistory h(4);
  h.push({.t = 0.0, .u = {}, .y = {0.0}});
  CHECK_FALSE(predictor_output_error(h, 0, 1.0, 1.0, 1).has_value());
  h.push({.t = 1.0, .u = {}, .y = {1.0}});
  const auto e = predictor_output_error(h, 0, 4.0, 2.0, 1);
  REQUIRE(e.has_value());
  CHECK(*e == doctest::Approx(2.0));
}

TEST_CASE("ECCO residual energy") {
  CHECK(ecco_residual_energy(10.0, 0.05, 0) == doctest::Approx(0.25));
  CHECK(ecco_residual_energy(-4.0, 0.1, 0) == doctest::Approx(-0.2));
  CHECK(ecco_residual_energy(24.0, 0.05, 1) == doctest::Approx(0.4));
  CHECK_THROWS_AS((void)ecco_residual_energy(1.0, 0.0, 0), argument_error);
  CHECK_THROWS_AS((void)ecco_residual_energy(1.0, 0.1, -1), argument_error);
}

TEST_CASE("ECCO total residual") {
  CHECK(ecco_total_residual({}) == 0.0);
  const BondResidual two[] = {{"a", 0.0, 0.25, 0.0}, {"b", 0.0, -0.1, 0.0}};
  CHECK(ecco_total_residual(two) == doctest::Approx(0.15));

  std::mt19937_64 rng(34);
  std::uniform_real_distribution<double> e(-10.0, 10.0);
  std::vector<BondResidual> bonds(20);
  for (auto& b : bonds) b.energy = e(rng);
  const double total = ecco_total_residual(bonds);
  double abs_sum = 0.0;
  for (const auto& b : bonds) abs_sum += std::abs(b.energy);
  for (int k = 0; k < 20; ++k) {
    std::shuffle(bonds.begin(), bonds.end(), rng);
    CHECK(std::abs(ecco_total_residual(bonds) - total) <= 1e-12 * abs_sum);
  }
}

TEST_CASE("ECCO total residual is additive over a partition") {
  std::mt19937_64 rng(35);
  std::uniform_int_distribution<int> val(-1000, 1000);
  for (int trial = 0; trial < 50; ++trial) {
    std::vector<BondResidual> all(12);
    // Multiples of 1/64 add without rounding.
    for (auto& b : all) b.energy = val(rng) / 64.0;
    const std::span<const BondResidual> s(all);
    const double left = ecco_total_residual(s.subspan(0, 5));
    const double right = ecco_total_residual(s.subspan(5));
    CHECK(ecco_total_residual(s) == left + right);
  }
}

TEST_CASE("ECCO residual power") {
  const auto bond = mass_spring_bond();
  SUBCASE("exact coupling has no residual") {
    std::mt19937_64 rng(36);
    std::uniform_real_distribution<double> val(-100.0, 100.0);
    for (int k = 0; k < 100; ++k) {
      const std::vector<double> y = {val(rng), val(rng)};
      const auto u = apply_connections(crossed(), y);
      CHECK(ecco_residual_power(bond, y, u) == 0.0);
    }
  }
  SUBCASE("zero outputs") {
    const double y[] = {0.0, 0.0};
    const double u[] = {5.0, -3.0};
    CHECK(ecco_residual_power(bond, y, u) == 0.0);
  }
  SUBCASE("sign convention") {
    // Mass moves at -0.5 m/s under a held force of -1000 N while the spring
    // still sees the old velocity 0: energy is created.
    const double y[] = {-0.5, -1000.0};
    const double u[] = {-1000.0, 0.0};
    CHECK(ecco_residual_power(bond, y, u) == 500.0);
  }
}

TEST_CASE("first-step residual energy equals the energy created by the coupling") {
  auto sc = builtin_scenario("mass_spring");
  sc.t_stop = 0.05;
  sc.dt = 0.05;
  const auto r = run(sc);
  REQUIRE(r.records.size() == 2);
  const auto& rec = r.records[1];
  const double created = *rec.energy - *r.records[0].energy;
  CHECK(rec.bond_energy[0] == doctest::Approx(12.5).epsilon(1e-12));
  CHECK(created == doctest::Approx(rec.bond_energy[0]).epsilon(1e-9));
}

TEST_CASE("recorded residual power matches the raw signals") {
  auto sc = builtin_scenario("mass_spring");
  sc.t_stop = 2.0;
  const auto r = run(sc);
  for (std::size_t i = 1; i < r.records.size(); ++i) {
    const auto& y = r.records[i].y;
    const auto& u_held = r.records[i - 1].u;
    const double expected = -((-1.0) * y[0] * u_held[0] + (+1.0) * y[1] * u_held[1]);
    CHECK(r.records[i].bond_power[0] ==
          doctest::Approx(expected).epsilon(1e-14).scale(1.0));
    CHECK(r.records[i].bond_energy[0] ==
          doctest::Approx(expected * r.records[i].dt / 2.0).epsilon(1e-14).scale(1.0));
  }
}

TEST_CASE("input error is first order in the macro step") {
  auto sc = builtin_scenario("mass_spring");
  sc.t_stop = 0.4;
  auto max_du = [&](double dt) {
    sc.dt = dt;
    const auto r = run(sc);
    double m = 0.0;
    for (std::size_t i = 1; i < r.records.size(); ++i) {
      m = std::max(m, std::abs(r.records[i].u[1] - r.records[i - 1].u[1]));
    }
    return m;
  };
  const double a = max_du(0.02);
  const double b = max_du(0.01);
  const double slope = std::log(a / b) / std::log(2.0);
  CHECK(slope > 0.8);
  CHECK(slope < 1.2);
}

TEST_CASE("estimator orders and checks") {
  const auto damped = builtin_scenario("mass_spring_damped");
  const auto topo = build_topology(damped);
  NepceEstimator nepce;
  CHECK(nepce.indicator_order(topo) == 1);
  CHECK(nepce.signal_count(topo) == 2);
  PredictorEstimator pred;
  CHECK(pred.indicator_order(topo) == 1);
  CHECK(pred.predictor_order(topo) == 1);
  EccoEstimator ecco;
  CHECK(ecco.indicator_order(topo) == 2);
  CHECK(ecco.signal_count(topo) == 1);

  auto plain = topo;
  plain.output_feedthrough.assign(plain.output_feedthrough.size(), false);
  CHECK(pred.indicator_order(plain) == 2);

  auto no_bonds = topo;
  no_bonds.bonds.clear();
  CHECK_THROWS_AS(ecco.check(no_bonds), configuration_error);
  NepceEstimator bad({{7}, false});
  CHECK_THROWS_AS(bad.check(topo), configuration_error);
}

TEST_CASE("estimators over a full run") {
  for (const char* kind : {"nepce", "predictor", "ecco"}) {
    CAPTURE(kind);
    auto sc = builtin_scenario("mass_spring_damped");
    sc.t_stop = 1.0;
    const auto topo = build_topology(sc);
    if (std::string(kind) == "predictor") {
      sc.estimator = std::make_shared<PredictorEstimator>();
    } else if (std::string(kind) == "ecco") {
      sc.estimator = std::make_shared<EccoEstimator>();
    } else {
      sc.estimator = std::make_shared<NepceEstimator>(NepceEstimator::Options{{}, true});
    }
    const auto n = sc.estimator->signal_count(topo);
    const std::vector<double> typical(n, 1.0);
    sc.tolerances = scaled_tolerances(1e-2, typical);
    const auto r = run(sc);
    CHECK_FALSE(r.diverged());
    bool any = false;
    for (const auto& rec : r.records) {
      CHECK(std::isfinite(rec.eps));
      CHECK(rec.eps >= 0.0);
      any = any || rec.eps > 0.0;
    }
    CHECK(any);
  }
}
