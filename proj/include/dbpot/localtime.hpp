#pragma once

#include <cstdint>
#include <vector>

#include "dbpot/processes.hpp"

namespace dbpot {

// Brownian path on its own clock; steps may be non-uniform when the sampler
// coarsens far away from the region of interest.
struct WienerPath {
  std::vector<double> t;
  std::vector<double> x;
  std::uint64_t seed = 0;
  bool complete = true;  // false when the stopping rule outran the step budget
};

enum class StopKind { FixedTime, Passage, InverseLocalTime };

struct StopRule {
  StopKind kind = StopKind::FixedTime;
  double value = 1.0;

  static StopRule fixed_time(double t) { return {StopKind::FixedTime, t}; }
  static StopRule passage(double level) { return {StopKind::Passage, level}; }
  static StopRule inv_local_time(double r) { return {StopKind::InverseLocalTime, r}; }
};

// Uniform-step Brownian motion from 0 on [0, T].
WienerPath sample_bm(double T, const SdeConfig& cfg);

// Brownian motion run until the stopping rule fires. Steps are ds near the
// levels the rule watches and grow quadratically with the distance from them,
// which keeps the heavy-tailed stopping times affordable (Brownian increments
// are exact at any step size).
WienerPath sample_bm_until(const StopRule& stop, const SdeConfig& cfg, double bin = 0.02);

// Occupation-binned local time profile at the stopping time.
struct LocalTimeField {
  double bin = 0.02;
  double stop_time = 0.0;
  std::vector<double> levels;  // bin centers (k * bin)
  std::vector<double> l;
  std::uint64_t seed = 0;

  double at_level(double level) const;  // value in the bin containing `level`
  double integral() const;              // sum l * bin; equals stop_time up to edge bins
};

LocalTimeField local_time_field(const WienerPath& path, const StopRule& stop,
                                double bin = 0.02);

// First time the binned local time at 0 exceeds r; throws when the path ends
// before that happens.
double inverse_local_time(const WienerPath& path, double r, double bin = 0.02);

// Synthetic local-time fields generated directly as the squared Bessel
// processes the two classical theorems prescribe.
//  first(a):  levels a - t; dimension 2 up to level 0 (t = a), dimension 0 after.
//  second(u): levels t >= 0; dimension 0 started at u.
LocalTimeField rayknight_field_first(double a, double span, const SdeConfig& cfg,
                                     double bin = 0.02);
LocalTimeField rayknight_field_second(double u, double span, const SdeConfig& cfg,
                                      double bin = 0.02);

// E[exp(-lambda * int_eta^infty L^x_{tau_1} x^{-2} dx)] in closed form;
// analytic in lambda on (-1/8, infinity).
double pitman_yor_laplace(double eta, double lambda);

// P(sup_{t<=v} |R_t - 1| > delta) upper bound for a squared Bessel process of
// dimension 0 started at 1.
double besq_deviation_bound(double delta, double v);

// int_eta^infty L^x x^{-2} dx of a binned field, with the x^{-2} weight
// integrated exactly over each bin's overlap with [eta, infinity).
double weighted_tail_integral(const LocalTimeField& field, double eta);

}  // namespace dbpot
