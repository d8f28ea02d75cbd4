#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "dbpot/potential.hpp"
#include "dbpot/rng.hpp"

namespace dbpot {

struct SdeConfig {
  double dt = 1e-3;
  std::uint64_t seed = 0;
  std::uint64_t replicate = 0;
  // Hard cap on integrator steps for the heavy-tailed stopping problems.
  std::uint64_t max_steps = 80'000'000;
};

// Time-indexed scalar path on a uniform grid.
struct ProcessPath {
  double dt = 0.0;
  std::vector<double> values;
  std::string scheme;
  std::uint64_t seed = 0;

  double time_at(std::size_t i) const { return dt * static_cast<double>(i); }
  double back() const { return values.back(); }
};

// Trapezoid integral of a ProcessPath over its full span.
double trapezoid(const ProcessPath& p);

// dXi = sqrt(1-e^{-Xi}) dB + (-kappa/2 + (1+kappa)/2 e^{-Xi}) dt, Xi(0)=0,
// full-truncation Euler; the stored path is clamped at zero.
ProcessPath integrate_xi(double kappa, double T, const SdeConfig& cfg);

struct ThetaPair {
  double theta1 = 0.0;
  double theta2 = 0.0;
  bool dimension_nonpositive = false;  // set when 2-2*kappa <= 0
};

// (theta1, theta2) = (4 int_0^v (e^{Xi}-1), 16 * passage of a Bessel(2-2kappa)
// from e^{Xi(v)/2} down to 1), with independent driving noise for the passage.
ThetaPair theta_from_xi(double kappa, double v, const SdeConfig& cfg);

// Full-truncation Euler for dX = 2 sqrt(X) dB + delta dt, optionally with the
// bridge drift -2X/(alpha - s) ds forcing X(alpha) = 0.
ProcessPath simulate_besq(double delta, double x0, double T, const SdeConfig& cfg,
                          std::optional<double> bridge_to_zero_at = std::nullopt);

// First passage time of a Bessel process of the given dimension from x_from
// down to y_to, simulated as the square root of a squared Bessel process.
// The step is dt at and below the unit scale and proportional to the state
// above it; the crossing time is linearly interpolated within the step.
// Returns +infinity if the step budget runs out (deep excursion).
double bessel_first_passage(double dim, double x_from, double y_to, const SdeConfig& cfg);

// Exact law of the passage from 1 to 0 in dimension 2-2kappa: 1/(2 Gamma)
// with Gamma ~ Gamma(kappa, 1). Requires 0 < kappa < 1.
double sample_upsilon_exact(double kappa, std::uint64_t seed, std::uint64_t replicate = 0);

struct StableSample {
  double value = 0.0;
  bool complete = true;
};

// U_s = int_0^{tau_s} gamma_u^{1/kappa-2} 1_{gamma_u>0} du, with tau_s the
// inverse local time at 0 of the driving Brownian motion (occupation-binned).
StableSample stable_functional(double kappa, double s, const SdeConfig& cfg,
                               double bin = 0.02);

// Laplace exponent constant: E[exp(-lambda U_s / 2)] = exp(-s c_kappa lambda^kappa).
double stable_c_kappa(double kappa);

// Stationary positive solution of
//   dU = U dW + (1 + (1-kappa)/2 U - 2 lambda U^2) dt
// driven by the environment's own W increments. Integration starts at the
// deterministic fixed point a burn-in window to the left of 0; the returned
// path covers [0, T] on the environment grid.
ProcessPath kotani_u(double lambda, double kappa, const PotentialPath& env, double T,
                     double burn_in = -1.0);

// Deterministic fixed point of the Kotani drift (noise off).
double kotani_fixed_point(double lambda, double kappa);

// g(x) = int_1^x e^{2/s + 4 lambda s} / s^{1-kappa} ds, a scale function of U_lambda.
double kotani_scale_g(double kappa, double lambda, double x);

struct LemmaEquEstimate {
  double value = 0.0;
  bool complete = true;
};

// D_nu(r) = int_0^{tau_r} g^{-1}(gamma)^nu exp(-4/g^{-1}(gamma) - 8 lambda g^{-1}(gamma)) ds
// by Monte Carlo over one driving Brownian path.
LemmaEquEstimate lemma_equ_integral(double nu, double kappa, double lambda, double r,
                                    const SdeConfig& cfg);

}  // namespace dbpot
