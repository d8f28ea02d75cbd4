#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <vector>

#include "dbpot/rng.hpp"
#include "dbpot/serialize.hpp"
#include "dbpot/tails.hpp"

using namespace dbpot;

TEST_CASE("speedup at a nonpositive level is certain") {
  TailSimConfig sim;
  sim.dx = 0.02;
  const auto est = estimate_tail_annealed(0.5, 4.0, -0.5, TailEvent::SpeedupX, 50, 1);
  CHECK(est.p_hat == 1.0);
  CHECK_THROWS(estimate_tail_annealed(0.5, 4.0, 1.0, TailEvent::SpeedupX, 0, 1));
}

TEST_CASE("flat-environment calibration against the gaussian closed form") {
  // zero-noise environment, kappa = 1: X_4 ~ N(1, 4), so P(X_4 < 3) = Phi(1)
  TailSimConfig sim;
  sim.pure_drift_env = true;
  sim.ds = 1e-3;
  const double u = 4.0 / 3.0;  // level t^kappa / u = 3
  const auto est = estimate_tail_annealed(1.0, 4.0, u, TailEvent::SlowdownX, 4000, 2, sim);
  const double p = normal_cdf(1.0);
  CHECK(std::fabs(est.p_hat - p) < 3.0 * std::sqrt(p * (1.0 - p) / 4000.0));
}

TEST_CASE("flat-environment sup event matches the reflection formula") {
  // P(sup_{s<=4} X_s > 3) for BM with drift 1/4:
  //   Phibar((b-mu t)/sqrt(t)) + e^{2 mu b} Phibar((b+mu t)/sqrt(t))
  TailSimConfig sim;
  sim.pure_drift_env = true;
  sim.ds = 1e-3;
  const double b = 3.0, mu = 0.25, t = 4.0;
  const double p = (1.0 - normal_cdf((b - mu * t) / std::sqrt(t))) +
                   std::exp(2.0 * mu * b) * (1.0 - normal_cdf((b + mu * t) / std::sqrt(t)));
  const auto est = estimate_tail_annealed(1.0, t, 0.75, TailEvent::SpeedupX, 4000, 3, sim);
  CHECK(std::fabs(est.p_hat - p) < 3.0 * std::sqrt(p * (1.0 - p) / 4000.0));
}

TEST_CASE("quenched estimates are reproducible and windowed") {
  TailSimConfig sim;
  sim.ds = 2e-3;
  const auto a = estimate_tail_quenched(11, 0.5, 100.0, 0.25, TailEvent::SlowdownH, 200, 4, sim);
  const auto b = estimate_tail_quenched(11, 0.5, 100.0, 0.25, TailEvent::SlowdownH, 200, 4, sim);
  CHECK(a.p_hat == b.p_hat);
  CHECK(a.env_seed.has_value());

  // a level beyond the declared right edge must be rejected
  TailSimConfig narrow = sim;
  narrow.x_right = 2.0;
  CHECK_THROWS(estimate_tail_quenched(11, 0.5, 100.0, 0.9, TailEvent::SlowdownH, 10, 4, narrow));
}

TEST_CASE("estimates are bit-exact across worker counts") {
  for (int workers : {1, 4, 16}) {
    TailSimConfig sim;
    sim.workers = workers;
    sim.ds = 2e-3;
    const auto est = estimate_tail_annealed(0.5, 16.0, 2.0, TailEvent::SpeedupH, 64, 5, sim);
    static double reference = -1.0;
    if (workers == 1) {
      reference = est.p_hat;
    } else {
      CHECK(est.p_hat == reference);
    }
  }
}

TEST_CASE("rule of three kicks in at zero successes") {
  TailSimConfig sim;
  sim.pure_drift_env = true;
  // drift kappa=2 cannot reach level 40 by time 1 in any realistic replicate
  const auto est = estimate_tail_annealed(2.0, 1.0, 10.0, TailEvent::SpeedupX, 100, 6, sim);
  CHECK(est.p_hat == 0.0);
  CHECK(est.upper95 == doctest::Approx(0.03));
}

TEST_CASE("fit recovers synthetic exponents") {
  std::vector<std::pair<double, double>> pts;
  for (double u : {1.0, 2.0, 3.0}) pts.push_back({u, std::exp(-2.0 * u * u)});
  const auto fit = fit_exponent(pts, FitMode::LogLogVsLogU);
  CHECK(fit.slope == doctest::Approx(2.0).epsilon(1e-9));
  CHECK(fit.r2 == doctest::Approx(1.0).epsilon(1e-9));

  std::vector<std::pair<double, double>> inv;
  for (double u : {1.0, 2.0, 4.0, 8.0}) inv.push_back({u, 0.1 / u});
  const auto fit2 = fit_exponent(inv, FitMode::LogPVsLogU);
  CHECK(fit2.slope == doctest::Approx(-1.0).epsilon(1e-9));

  std::vector<std::pair<double, double>> bad = {{1.0, 0.5}, {2.0, 0.0}, {3.0, 1.0}, {4.0, 0.2}};
  CHECK_THROWS(fit_exponent(bad, FitMode::LogLogVsLogU));
  const auto fit3 = fit_exponent({{1.0, 0.5}, {2.0, 0.2}, {3.0, 0.1}, {4.0, 0.0}},
                                 FitMode::LogLogVsLogU);
  CHECK(fit3.n_rejected == 1);
  CHECK(fit3.n_used == 3);
}

TEST_CASE("predicted exponents") {
  const auto a = predicted_exponents(0.5, 0.25);
  CHECK(a.speedup == doctest::Approx(2.0));
  CHECK(a.annealed_slowdown_power == doctest::Approx(1.0));
  CHECK(a.quenched_slowdown_doublelog == doctest::Approx(1.0 / 3.0).epsilon(1e-12));

  const auto b = predicted_exponents(2.0, 1.0);
  CHECK(std::isnan(b.speedup));
  CHECK(b.quenched_slowdown_doublelog == doctest::Approx(0.5));

  CHECK_THROWS(predicted_exponents(0.5, 0.75));
  CHECK_THROWS(predicted_exponents(0.5, -0.1));

  // non-increasing in nu
  double prev = 1e9;
  for (double nu : {0.05, 0.15, 0.3, 0.45}) {
    const double v = predicted_exponents(0.5, nu).quenched_slowdown_doublelog;
    CHECK(v <= prev);
    prev = v;
  }
}

TEST_CASE("constants: closed forms and quadrature cross-check") {
  const auto rec = constants(0.5);
  CHECK(rec.c_kappa == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(rec.c_h_fullline == doctest::Approx(2.0).epsilon(1e-12));
  CHECK(rec.c_h_halfline == doctest::Approx(std::sqrt(2.0)).epsilon(1e-12));
  for (double kappa : {0.3, 0.5, 0.7}) {
    const auto r = constants(kappa);
    CHECK(std::fabs(r.c_h_fullline_quadrature - r.c_h_fullline) < 1e-6 * r.c_h_fullline);
    CHECK(std::fabs(r.c_h_halfline_quadrature - r.c_h_halfline) < 1e-6 * r.c_h_halfline);
  }
  CHECK_THROWS(constants(1.5));
}

TEST_CASE("tail serialization shapes") {
  TailSimConfig sim;
  sim.pure_drift_env = true;
  const auto est = estimate_tail_annealed(0.5, 4.0, 1.0, TailEvent::SpeedupH, 20, 7, sim);
  const std::string j = tail_json(est);
  CHECK(j.find("\"p_hat\"") != std::string::npos);
  CHECK(tail_csv_header() == "event,kappa,t,u,n,p_hat,se,seed,env_seed");
  const std::string row = tail_csv_row(est);
  CHECK(row.find("speedup_H") == 0);
}

TEST_CASE("event names round-trip") {
  for (TailEvent e : {TailEvent::SpeedupX, TailEvent::SlowdownX, TailEvent::SpeedupH,
                      TailEvent::SlowdownH}) {
    CHECK(tail_event_from_name(tail_event_name(e)) == e);
  }
  CHECK_THROWS(tail_event_from_name("nope"));
}
