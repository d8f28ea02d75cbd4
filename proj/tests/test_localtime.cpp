#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <vector>

#include "dbpot/localtime.hpp"
#include "stats_util.hpp"

using namespace dbpot;
using testutil::ks_two_sample;
using testutil::mean_se;

namespace {

SdeConfig cfg_with(std::uint64_t seed, std::uint64_t rep, double dt = 1e-3) {
  SdeConfig c;
  c.dt = dt;
  c.seed = seed;
  c.replicate = rep;
  return c;
}

}  // namespace

TEST_CASE("occupation identity on fixed-time fields") {
  for (std::uint64_t i = 0; i < 20; ++i) {
    const auto path = sample_bm(4.0, cfg_with(301, i));
    const auto f = local_time_field(path, StopRule::fixed_time(4.0));
    CHECK(std::fabs(f.integral() - 4.0) < 0.02 * 4.0);
  }
}

TEST_CASE("inverse local time hits the requested level") {
  for (std::uint64_t i = 0; i < 20; ++i) {
    const auto path = sample_bm_until(StopRule::inv_local_time(1.0), cfg_with(302, i));
    REQUIRE(path.complete);
    const auto f = local_time_field(path, StopRule::inv_local_time(1.0));
    CHECK(std::fabs(f.at_level(0.0) - 1.0) <= 0.05);
  }
  CHECK(inverse_local_time(sample_bm(1.0, cfg_with(303, 0)), 0.0) == 0.0);
}

TEST_CASE("inverse local time is monotone pathwise") {
  for (std::uint64_t i = 0; i < 10; ++i) {
    const auto path = sample_bm_until(StopRule::inv_local_time(2.0), cfg_with(304, i));
    REQUIRE(path.complete);
    const double t1 = inverse_local_time(path, 0.5);
    const double t2 = inverse_local_time(path, 1.5);
    REQUIRE(t1 <= t2);
  }
}

TEST_CASE("subordinator transform of the inverse local time") {
  // E[exp(-lambda tau_r)] = exp(-r sqrt(2 lambda)); r = 1, lambda = 1/2
  std::vector<double> es;
  for (std::uint64_t i = 0; i < 3'000; ++i) {
    const auto path = sample_bm_until(StopRule::inv_local_time(1.0), cfg_with(305, i));
    REQUIRE(path.complete);
    es.push_back(std::exp(-0.5 * inverse_local_time(path, 1.0)));
  }
  const auto m = mean_se(es);
  CHECK(std::fabs(m.mean - std::exp(-1.0)) < 3.0 * m.se + 0.01);
}

TEST_CASE("first-kind field mean grows like 2t below the passage level") {
  // level a - t of the empirical field at the passage of a = 1
  const double a = 1.0;
  std::vector<double> at_half, at_origin;
  for (std::uint64_t i = 0; i < 800; ++i) {
    const auto path = sample_bm_until(StopRule::passage(a), cfg_with(306, i));
    REQUIRE(path.complete);
    const auto f = local_time_field(path, StopRule::passage(a));
    at_half.push_back(f.at_level(0.5));   // t = 0.5: mean 1
    at_origin.push_back(f.at_level(0.0)); // t = 1:   mean 2
  }
  const auto mh = mean_se(at_half);
  CHECK(std::fabs(mh.mean - 1.0) < 3.0 * mh.se + 0.05);
  const auto mo = mean_se(at_origin);
  CHECK(std::fabs(mo.mean - 2.0) < 3.0 * mo.se + 0.05);
}

TEST_CASE("synthetic first-kind field starts at zero and peaks near 2a") {
  std::vector<double> at_zero;
  for (std::uint64_t i = 0; i < 800; ++i) {
    const auto f = rayknight_field_first(1.0, 1.5, cfg_with(307, i, 1e-3));
    CHECK(f.at_level(1.0) == 0.0);  // level a: zero time to accumulate
    at_zero.push_back(f.at_level(0.0));
  }
  const auto m = mean_se(at_zero);
  CHECK(std::fabs(m.mean - 2.0) < 3.0 * m.se);
}

TEST_CASE("second-kind synthetic field starts exactly at u") {
  const auto f = rayknight_field_second(1.0, 1.0, cfg_with(308, 0, 1e-3));
  CHECK(f.at_level(0.0) == 1.0);
}

TEST_CASE("second-kind synthetic and empirical fields agree at level one half") {
  std::vector<double> synthetic, empirical;
  for (std::uint64_t i = 0; i < 700; ++i) {
    synthetic.push_back(rayknight_field_second(1.0, 0.6, cfg_with(309, i, 1e-3)).at_level(0.5));
    const auto path = sample_bm_until(StopRule::inv_local_time(1.0), cfg_with(310, i));
    empirical.push_back(local_time_field(path, StopRule::inv_local_time(1.0)).at_level(0.5));
  }
  CHECK(ks_two_sample(synthetic, empirical) < 0.09);
}

TEST_CASE("pitman-yor closed form") {
  CHECK(pitman_yor_laplace(0.5, 0.0) == doctest::Approx(1.0));
  CHECK(pitman_yor_laplace(0.5, 1.0) == doctest::Approx(std::exp(-0.5)).epsilon(1e-12));
  CHECK_THROWS(pitman_yor_laplace(0.5, -0.2));
  CHECK_THROWS(pitman_yor_laplace(-1.0, 1.0));
  // decreasing in lambda, increasing in eta
  double prev = 2.0;
  for (double lam : {-0.1, 0.0, 0.5, 1.0, 4.0}) {
    const double v = pitman_yor_laplace(0.7, lam);
    CHECK(v < prev);
    prev = v;
  }
  prev = 0.0;
  for (double eta : {0.2, 0.5, 1.0, 3.0}) {
    const double v = pitman_yor_laplace(eta, 1.0);
    CHECK(v > prev);
    prev = v;
  }
}

TEST_CASE("pitman-yor simulation cross-check") {
  // A = int_{1/2}^infty L^x_{tau_1} x^{-2} dx, E[e^{-A}] = e^{-1/2}
  std::vector<double> es;
  for (std::uint64_t i = 0; i < 1'500; ++i) {
    const auto path = sample_bm_until(StopRule::inv_local_time(1.0), cfg_with(311, i));
    REQUIRE(path.complete);
    const auto f = local_time_field(path, StopRule::inv_local_time(1.0));
    es.push_back(std::exp(-weighted_tail_integral(f, 0.5)));
  }
  const auto m = mean_se(es);
  CHECK(std::fabs(m.mean - std::exp(-0.5)) < 0.05);
}

TEST_CASE("deviation bound arithmetic and limits") {
  CHECK(besq_deviation_bound(1.0, 1.0) ==
        doctest::Approx(4.0 * std::sqrt(2.0) * std::exp(-1.0 / 16.0)).epsilon(1e-12));
  CHECK(besq_deviation_bound(2.0, 1e-6) < 1e-10);
  CHECK_THROWS(besq_deviation_bound(-1.0, 1.0));
}

TEST_CASE("deviation bound dominates the simulated excursion probability") {
  // BESQ(0) from 1 over [0, 0.05], delta = 2
  const double bound = besq_deviation_bound(2.0, 0.05);
  int hits = 0;
  const int n = 5'000;
  for (std::uint64_t i = 0; i < n; ++i) {
    const auto p = simulate_besq(0.0, 1.0, 0.05, cfg_with(312, i, 1e-4));
    double worst = 0.0;
    for (double x : p.values) worst = std::max(worst, std::fabs(x - 1.0));
    if (worst > 2.0) ++hits;
  }
  const double p_hat = static_cast<double>(hits) / n;
  CHECK(p_hat <= bound);
}
