#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "dbpot/diffusion.hpp"
#include "dbpot/potential.hpp"

namespace dbpot {

enum class TailEvent { SpeedupX, SlowdownX, SpeedupH, SlowdownH };

std::string tail_event_name(TailEvent e);
TailEvent tail_event_from_name(const std::string& name);

// Environment + integrator resolution for the tail estimators. Desk-scale
// defaults; the theorems' regime conditions are reported as warnings, never
// enforced.
struct TailSimConfig {
  double dx = 0.02;
  double ds = 1e-3;
  double v = -1.0;           // level for the H events; defaults to t^kappa
  double nu = 0.25;          // exponent for the quenched slowdown events
  double x_left = 0.0;       // left edge of the environment; 0 = choose automatically
  double x_right = 0.0;      // right edge; 0 = choose automatically
  double right_margin = 5.0; // environment slack beyond the highest level used
  int workers = 1;
  std::uint64_t max_steps = 200'000'000ULL;
  bool pure_drift_env = false;  // test hook: zero the environment noise
};

struct TailEstimate {
  std::string event;
  double kappa = 0.0;
  double t = 0.0;
  double u = 0.0;
  std::uint64_t n = 0;
  double p_hat = 0.0;
  double se = 0.0;
  double upper95 = 0.0;  // rule-of-three bound when no successes
  std::uint64_t seed = 0;
  std::optional<std::uint64_t> env_seed;
  bool regime_warning = false;
  std::uint64_t n_incomplete = 0;  // replicates that hit the window or budget
};

// Fresh environment per replicate, event indicator averaged.
TailEstimate estimate_tail_annealed(double kappa, double t, double u, TailEvent event,
                                    std::uint64_t n, std::uint64_t seed,
                                    const TailSimConfig& sim = {});

// One frozen environment (env_seed), n driving-noise replicates.
TailEstimate estimate_tail_quenched(std::uint64_t env_seed, double kappa, double t,
                                    double u_or_nu, TailEvent event, std::uint64_t n,
                                    std::uint64_t seed, const TailSimConfig& sim = {});

enum class FitMode {
  LogLogVsLogU,  // log(-log p) against log u
  LogLogVsLogT,  // log(-log p) against log t
  LogPVsLogU,    // log p against log u
};

struct ExponentFit {
  double slope = 0.0;
  double intercept = 0.0;
  double r2 = 0.0;
  int n_used = 0;
  int n_rejected = 0;  // points with p outside (0,1)
};

ExponentFit fit_exponent(const std::vector<std::pair<double, double>>& points, FitMode mode);

struct PredictedExponents {
  double speedup = 0.0;                      // 1/(1-kappa); NaN when kappa >= 1
  double annealed_slowdown_power = 1.0;      // u * P(slow) tends to a constant
  double quenched_slowdown_doublelog = 0.0;  // min of (1 - nu/kappa) and kappa/(kappa+1)
};

PredictedExponents predicted_exponents(double kappa, double nu);

struct ConstantsRecord {
  double kappa = 0.0;
  double c_kappa = 0.0;
  double c_h_halfline = 0.0;             // analytic 2^{-kappa}/kappa
  double c_h_fullline = 0.0;             // analytic 1/kappa
  double c_h_halfline_quadrature = 0.0;  // independent x-space quadrature
  double c_h_fullline_quadrature = 0.0;
};

ConstantsRecord constants(double kappa);

}  // namespace dbpot
