#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "dbpot/rng.hpp"

namespace dbpot {

// Two-sided drifted Brownian environment W_kappa(x) = W(x) - (kappa/2) x,
// sampled as exact Gaussian increments on a uniform grid. Between nodes
// W_kappa is treated as linear; every sup/inf below is a grid sup and
// carries the usual O(sqrt(dx) log(1/dx)) modulus bias.
struct PotentialPath {
  double kappa = 0.0;
  double x_min = 0.0;
  double x_max = 0.0;
  double dx = 0.0;
  std::uint64_t seed = 0;
  std::size_t zero_index = 0;
  std::vector<double> values;  // W_kappa at grid nodes
  std::vector<double> noise;   // N(0,dx) draw per cell; cell i joins node i and i+1

  std::size_t size() const { return values.size(); }
  double x_at(std::size_t i) const { return x_min + dx * static_cast<double>(i); }
  // Nearest grid index; throws if x is outside [x_min, x_max].
  std::size_t index_near(double x) const;
  // W_kappa by linear interpolation.
  double value_at(double x) const;
  // Increment of the undrifted W over cell i (used by the Kotani solver).
  double w_increment(std::size_t cell) const { return noise[cell]; }
};

PotentialPath sample_potential(double kappa, double x_min, double x_max, double dx,
                               std::uint64_t seed, std::uint64_t replicate = 0);

// Test hook: all Gaussian draws zeroed, so W_kappa(x) = -(kappa/2) x exactly.
PotentialPath pure_drift_potential(double kappa, double x_min, double x_max, double dx);

// Cumulative scale function A(x) = int_0^x exp(W_kappa), integrated exactly
// on each cell of the piecewise-linear interpolant.
struct ScaleTable {
  double x_min = 0.0;
  double dx = 0.0;
  std::size_t zero_index = 0;
  std::vector<double> a;            // A at grid nodes, a[zero_index] == 0
  // per-cell caches for the time-change walkers
  std::vector<double> em;           // exp(-W) at the left node of each cell
  std::vector<double> slope;        // W slope over the cell
  std::vector<double> width;        // a[i+1] - a[i]
  const PotentialPath* path = nullptr;

  double a_min() const { return a.front(); }
  double a_max() const { return a.back(); }
  double at(double x) const;         // exact within-cell integral
  double inverse(double value) const;  // exact within-cell inverse
};

ScaleTable scale_table(const PotentialPath& path);

// Break points K_i and depths for a given horizon t. K_0 = -floor(t); each
// next break requires a (3/kappa) log floor(t) drop from the previous break
// followed by a near-record of the potential, both evaluated on the grid.
struct ValleyDecomposition {
  double t = 0.0;
  double v = 0.0;
  std::vector<double> k;      // K_0 .. K_{i1}, then v by convention
  std::vector<double> depth;  // per valley [K_i, K_{i+1}]
  int i0 = 0;                 // last index with K_j < 0
  int i1 = 0;                 // last index with K_j < v
  bool certified = true;      // false if the near-record sup touched the window edge
  std::optional<double> next_break;  // true first break >= v when found
};

ValleyDecomposition decompose_valleys(const PotentialPath& path, double t, double v,
                                      double right_window = -1.0);

struct IntervalDepths {
  double d_plus = 0.0;   // largest rise on [a,c]
  double d_minus = 0.0;  // largest fall on [a,c]
  double d = 0.0;        // min of the two
  double m = 0.0;        // sup - inf
};

// Single left-to-right running-min / right-to-left running-max sweep.
IntervalDepths interval_depths(const PotentialPath& path, double a, double c);

// Environment events evaluated literally on the sampled grid.
struct EventReport {
  bool a = false;
  bool g_t = false;
  bool g_v = false;
  std::vector<bool> b;  // one entry per k = 1..m-1
  bool k = false;
  bool l = false;
  bool omega() const;
};

EventReport check_events(const PotentialPath& path, double t, int m, double nu,
                         double epsilon);

// Busy periods of the potential reflected at its running maximum.
struct Excursion {
  double length = 0.0;
  double max = 0.0;
};

// U_t = W_kappa(t) - running min of W_kappa from the left edge of the grid.
std::vector<double> reflected_from_min(const PotentialPath& path);

// Excursions of U away from zero; the trailing incomplete excursion is dropped.
std::vector<Excursion> excursion_statistics(const PotentialPath& path);

// Closed-form tail of the per-excursion maximum, P(m0 > y).
double excursion_max_tail(double kappa, double y);

}  // namespace dbpot
