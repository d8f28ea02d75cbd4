#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <vector>

#include "dbpot/diffusion.hpp"
#include "dbpot/potential.hpp"
#include "dbpot/serialize.hpp"
#include "stats_util.hpp"

using namespace dbpot;
using testutil::mean_se;

namespace {

DiffusionConfig cfg_with(std::uint64_t seed, std::uint64_t rep, double ds = 1e-3) {
  DiffusionConfig c;
  c.ds = ds;
  c.seed = seed;
  c.replicate = rep;
  return c;
}

}  // namespace

TEST_CASE("flat environment reproduces Brownian motion") {
  const auto env = pure_drift_potential(0.0, -40.0, 40.0, 0.01);
  const auto table = scale_table(env);
  std::vector<double> xs;
  for (std::uint64_t i = 0; i < 4'000; ++i) {
    xs.push_back(simulate_position(env, table, 1.0, cfg_with(201, i)).x);
  }
  const auto m = mean_se(xs);
  CHECK(std::fabs(m.mean) < 3.0 * m.se);
  double var = 0.0;
  for (double x : xs) var += x * x;
  var /= static_cast<double>(xs.size());
  CHECK(std::fabs(var - 1.0) < 3.0 * std::sqrt(2.0 / static_cast<double>(xs.size())));
}

TEST_CASE("pure drift environment: E[X_4] = kappa t / 4") {
  const auto env = pure_drift_potential(1.0, -30.0, 40.0, 0.01);
  const auto table = scale_table(env);
  std::vector<double> xs;
  for (std::uint64_t i = 0; i < 4'000; ++i) {
    xs.push_back(simulate_position(env, table, 4.0, cfg_with(202, i)).x);
  }
  const auto m = mean_se(xs);
  CHECK(std::fabs(m.mean - 1.0) < 3.0 * m.se);
}

TEST_CASE("paths are deterministic in (environment, seed)") {
  const auto env = sample_potential(0.5, -20.0, 20.0, 0.01, 7);
  const auto table = scale_table(env);
  const auto a = simulate_path(env, table, 2.0, cfg_with(203, 5));
  const auto b = simulate_path(env, table, 2.0, cfg_with(203, 5));
  REQUIRE(a.x.size() == b.x.size());
  for (std::size_t i = 0; i < a.x.size(); ++i) REQUIRE(a.x[i] == b.x[i]);
  const auto c = simulate_path(env, table, 2.0, cfg_with(204, 5));
  CHECK(a.x.back() != c.x.back());
}

TEST_CASE("hitting time trivia, mean, and monotonicity") {
  const auto env = pure_drift_potential(2.0, -30.0, 20.0, 0.01);
  const auto table = scale_table(env);
  CHECK(first_hitting(env, table, 0.0, cfg_with(205, 0)).h == 0.0);

  std::vector<double> hs;
  for (std::uint64_t i = 0; i < 4'000; ++i) {
    const auto r = first_hitting(env, table, 1.0, cfg_with(206, i));
    REQUIRE(r.status == SimStatus::Ok);
    hs.push_back(r.h);
  }
  const auto m = mean_se(hs);
  CHECK(std::fabs(m.mean - 2.0) < 3.0 * m.se);

  // pathwise monotone on shared driving noise
  for (std::uint64_t i = 0; i < 50; ++i) {
    const double h1 = first_hitting(env, table, 0.5, cfg_with(207, i)).h;
    const double h2 = first_hitting(env, table, 1.5, cfg_with(207, i)).h;
    REQUIRE(h1 <= h2);
  }
}

TEST_CASE("theta split adds up to the hitting time") {
  const auto env = sample_potential(0.5, -60.0, 10.0, 0.01, 11);
  const auto table = scale_table(env);
  for (std::uint64_t i = 0; i < 40; ++i) {
    const auto r = first_hitting(env, table, 2.0, cfg_with(208, i));
    REQUIRE(r.status == SimStatus::Ok);
    REQUIRE(r.theta1 >= 0.0);
    REQUIRE(r.theta2 >= 0.0);
    REQUIRE(r.theta1 + r.theta2 == doctest::Approx(r.h).epsilon(1e-10));
  }
}

TEST_CASE("window exceeded is reported with the exit side") {
  const auto env = sample_potential(0.5, -2.0, 3.0, 0.01, 13);
  const auto table = scale_table(env);
  DiffusionConfig c = cfg_with(209, 0);
  int exceeded = 0;
  for (std::uint64_t i = 0; i < 200; ++i) {
    c.replicate = i;
    const auto r = first_hitting(env, table, 2.9, c);
    if (r.status == SimStatus::WindowExceeded) ++exceeded;
  }
  CHECK(exceeded > 0);  // the left edge at -2 is well within reach
}

TEST_CASE("hitting cap stops the clock") {
  const auto env = sample_potential(0.5, -60.0, 30.0, 0.01, 14);
  const auto table = scale_table(env);
  DiffusionConfig c = cfg_with(210, 3);
  c.h_cap = 0.5;
  const auto r = first_hitting(env, table, 25.0, c);
  CHECK(r.status == SimStatus::Capped);
  CHECK(r.h >= 0.5);
  CHECK(r.h < 1.0);
}

TEST_CASE("occupation split on synthetic paths") {
  DiffusionPath p;
  p.dt = 0.1;
  p.x = {0.0, 0.5, 1.0, 1.5, 2.0, 2.5};
  const auto s = occupation_split(p, 2.0);
  CHECK(s.reached);
  CHECK(s.theta2 == 0.0);
  CHECK(s.theta1 == doctest::Approx(0.4).epsilon(1e-12));

  DiffusionPath q;
  q.dt = 0.1;
  q.x = {0.0, -1.0, 1.0, 3.0};
  const auto t = occupation_split(q, 2.0);
  CHECK(t.reached);
  // the split assigns each step by the endpoint signs, half-and-half here
  CHECK(t.theta1 + t.theta2 == doctest::Approx(0.25).epsilon(1e-12));

  DiffusionPath r;
  r.dt = 0.1;
  r.x = {0.0, 0.1, 0.2};
  CHECK(!occupation_split(r, 5.0).reached);
}

TEST_CASE("five-term decomposition tiles the hitting time") {
  const double t = 6.0, v = 6.0;
  const auto env = sample_potential(0.5, -40.0, 120.0, 0.01, 15);
  const auto table = scale_table(env);
  const auto vd = decompose_valleys(env, t, v);
  for (std::uint64_t i = 0; i < 60; ++i) {
    const auto hb = decompose_hitting(env, table, vd, v, cfg_with(211, i));
    REQUIRE(hb.status == SimStatus::Ok);
    const double sum = hb.h_init + hb.h_dir + hb.h_back + hb.h_left + hb.h_right;
    REQUIRE(sum == doctest::Approx(hb.h_total).epsilon(1e-9));
    REQUIRE(hb.h_init >= 0.0);
    REQUIRE(hb.h_dir >= 0.0);
    REQUIRE(hb.h_back >= 0.0);
    REQUIRE(hb.h_left >= 0.0);
    REQUIRE(hb.h_right >= 0.0);
    REQUIRE(hb.b_total >= 0);
  }
}

TEST_CASE("pure drift decomposition has no backtracks") {
  // deep drift valleys: a backtrack needs an A-ratio ~ e^{-3 log 16} excursion
  const double t = 16.0, v = 10.0;
  const auto env = pure_drift_potential(2.0, -20.0, 55.0, 0.005);
  const auto table = scale_table(env);
  const auto vd = decompose_valleys(env, t, v);
  int clean = 0;
  for (std::uint64_t i = 0; i < 40; ++i) {
    const auto hb = decompose_hitting(env, table, vd, v, cfg_with(212, i));
    REQUIRE(hb.status == SimStatus::Ok);
    if (hb.b_total == 0) {
      ++clean;
      CHECK(hb.h_back == 0.0);
      CHECK(hb.h_left == 0.0);
      CHECK(hb.h_init + hb.h_dir + hb.h_right == doctest::Approx(hb.h_total).epsilon(1e-9));
    }
  }
  CHECK(clean > 30);  // strong drift: backtracks are the exception
}

TEST_CASE("exit probabilities match the scale-function ratio") {
  const auto env = sample_potential(0.5, -8.0, 8.0, 0.01, 16);
  const auto table = scale_table(env);
  // P^x[exit left] = (A(c) - A(x)) / (A(c) - A(a)) for a < x < c
  const double a = -1.5, x0 = 0.3, c = 2.0;
  const double p_exact = (table.at(c) - table.at(x0)) / (table.at(c) - table.at(a));
  int left = 0;
  const int n = 4'000;
  for (std::uint64_t i = 0; i < n; ++i) {
    const auto r = first_exit(env, table, a, c, x0, cfg_with(213, i));
    REQUIRE(r.status == SimStatus::Ok);
    if (!r.exited_right) ++left;
  }
  const double p_hat = static_cast<double>(left) / n;
  const double se = std::sqrt(p_exact * (1.0 - p_exact) / n);
  CHECK(std::fabs(p_hat - p_exact) < 3.0 * se);
}

TEST_CASE("valley crossing probability follows the integral ratio") {
  // same identity read on a valley triple K_{i-1} < K_i < K_{i+1}
  const double t = 2.0;
  const auto env = sample_potential(1.5, -8.0, 40.0, 0.01, 17);
  const auto table = scale_table(env);
  const auto vd = decompose_valleys(env, t, 12.0);
  REQUIRE(vd.k.size() >= 4);
  const double km = vd.k[vd.k.size() - 4];
  const double ki = vd.k[vd.k.size() - 3];
  const double kp = vd.k[vd.k.size() - 2];
  const double p_exact = (table.at(kp) - table.at(ki)) / (table.at(kp) - table.at(km));
  int left = 0;
  const int n = 2'000;
  for (std::uint64_t i = 0; i < n; ++i) {
    const auto r = first_exit(env, table, km, kp, ki, cfg_with(214, i));
    REQUIRE(r.status == SimStatus::Ok);
    if (!r.exited_right) ++left;
  }
  const double p_hat = static_cast<double>(left) / n;
  const double band = 3.0 * std::sqrt(std::max(p_exact * (1.0 - p_exact), 1e-9) / n) + 1.0 / n;
  CHECK(std::fabs(p_hat - p_exact) < band + 0.01);
}

TEST_CASE("halving the step moves E[H(1)] toward the drift closed form") {
  const auto env = pure_drift_potential(2.0, -30.0, 10.0, 0.005);
  const auto table = scale_table(env);
  double err_coarse = 0.0, err_fine = 0.0, se_fine = 0.0;
  for (double ds : {4e-3, 1e-3}) {
    std::vector<double> hs;
    for (std::uint64_t i = 0; i < 20'000; ++i) {
      hs.push_back(first_hitting(env, table, 1.0, cfg_with(215, i, ds)).h);
    }
    const auto m = mean_se(hs);
    if (ds == 4e-3) {
      err_coarse = std::fabs(m.mean - 2.0);
    } else {
      err_fine = std::fabs(m.mean - 2.0);
      se_fine = m.se;
    }
  }
  CHECK(err_fine <= err_coarse + 2.0 * se_fine);
}

TEST_CASE("breakdown serializes to json") {
  const auto env = sample_potential(0.5, -6.0, 60.0, 0.01, 18);
  const auto table = scale_table(env);
  const auto vd = decompose_valleys(env, 4.0, 10.0);
  const auto hb = decompose_hitting(env, table, vd, 10.0, cfg_with(216, 0));
  const std::string j = breakdown_json(hb);
  CHECK(j.find("\"H_init\"") != std::string::npos);
  CHECK(j.find("\"B\"") != std::string::npos);
}
