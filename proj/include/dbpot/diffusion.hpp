#pragma once

#include <cstdint>
#include <limits>
#include <vector>

#include "dbpot/potential.hpp"

namespace dbpot {

enum class SimStatus { Ok, WindowExceeded, Capped, Budget };

struct DiffusionConfig {
  double ds = 1e-4;        // base step of the driving Brownian clock
  std::uint64_t seed = 0;
  std::uint64_t replicate = 0;
  double h_cap = std::numeric_limits<double>::infinity();  // stop once the diffusion clock passes this
  std::uint64_t max_steps = 2'000'000'000ULL;
  double out_dt = 1e-2;    // uniform output clock for stored paths
  double tube = -1.0;      // K-visit half-width; defaults to the environment dx
  bool adaptive = true;    // scale the step to the local scale-function cell width
};

// Diffusion path resampled onto a uniform clock. The driving Brownian motion
// runs on its own (possibly non-uniform) clock; only the time-change quadrature
// discretizes.
struct DiffusionPath {
  double dt = 0.0;
  std::vector<double> x;
  SimStatus status = SimStatus::Ok;
  double time_at(std::size_t i) const { return dt * static_cast<double>(i); }
};

DiffusionPath simulate_path(const PotentialPath& env, const ScaleTable& table, double T,
                            const DiffusionConfig& cfg, double x0 = 0.0);

struct HitResult {
  double h = 0.0;
  double theta1 = 0.0;  // occupation of {X >= 0} up to the hit
  double theta2 = 0.0;  // occupation of {X < 0}
  SimStatus status = SimStatus::Ok;
};

// H(v) via the first passage of the driving Brownian motion through A(v);
// no full path is stored.
HitResult first_hitting(const PotentialPath& env, const ScaleTable& table, double v,
                        const DiffusionConfig& cfg, double x0 = 0.0);

// Position (and running sup) of the diffusion at clock time T.
struct PositionResult {
  double x = 0.0;
  double sup = 0.0;
  SimStatus status = SimStatus::Ok;
};

PositionResult simulate_position(const PotentialPath& env, const ScaleTable& table, double T,
                                 const DiffusionConfig& cfg, double x0 = 0.0);

// Exit of [a, c] started from x0 strictly inside.
struct ExitResult {
  double time = 0.0;
  bool exited_right = false;
  SimStatus status = SimStatus::Ok;
};

ExitResult first_exit(const PotentialPath& env, const ScaleTable& table, double a, double c,
                      double x0, const DiffusionConfig& cfg);

// Five-term split of H(v) along the embedded walk on the break points.
// The walk is read off tube entries of half-width cfg.tube, so visit times
// carry an O(dx) ambiguity; the five terms tile [0, H(v)] exactly.
struct HittingBreakdown {
  double h_total = 0.0;
  double h_init = 0.0;
  double h_dir = 0.0;
  double h_back = 0.0;
  double h_left = 0.0;
  double h_right = 0.0;
  std::vector<long> xi;  // xi[i] = number of moves K_{i+1} -> K_i
  long b_total = 0;      // sum of xi(i) for i = 1..i1-1
  double tube = 0.0;
  SimStatus status = SimStatus::Ok;
};

HittingBreakdown decompose_hitting(const PotentialPath& env, const ScaleTable& table,
                                   const ValleyDecomposition& valleys, double v,
                                   const DiffusionConfig& cfg);

// Occupation split of a stored path up to the first crossing of v.
struct OccupationSplit {
  double theta1 = 0.0;
  double theta2 = 0.0;
  bool reached = false;
};

OccupationSplit occupation_split(const DiffusionPath& path, double v);

}  // namespace dbpot
