#include "dbpot/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace dbpot {

double PotentialWeight::at(double t) const {
  if (v.size() < 2) throw std::invalid_argument("PotentialWeight: need at least 2 nodes");
  const double f = t / length * static_cast<double>(v.size() - 1);
  if (f <= 0.0) return v.front();
  if (f >= static_cast<double>(v.size() - 1)) return v.back();
  const auto i = static_cast<std::size_t>(f);
  const double w = f - static_cast<double>(i);
  return v[i] * (1.0 - w) + v[i + 1] * w;
}

double PotentialWeight::vbar(double t) const {
  const double h = length / static_cast<double>(v.size() - 1);
  double s = 0.0;
  double pos = 0.0;
  for (std::size_t i = 0; i + 1 < v.size(); ++i) {
    if (pos + h >= t) {
      const double rem = t - pos;
      const double v_t = at(t);
      return s + 0.5 * (v[i] + v_t) * rem;
    }
    s += 0.5 * (v[i] + v[i + 1]) * h;
    pos += h;
  }
  return s;
}

bool PotentialWeight::is_zero() const {
  for (double x : v)
    if (x != 0.0) return false;
  return true;
}

namespace {

// Shooting: integrate z'' = -lambda V z with z(0)=1, z'(0)=0 by RK4.
// Positivity on [0, length) is read off the interior nodes plus the sign of
// z(length); a zero exactly at the right end is allowed, so bisection on this
// predicate converges to the principal value at the accuracy of z itself.
bool stays_positive(const PotentialWeight& weight, double lambda, int n_steps) {
  const double h = weight.length / n_steps;
  double z = 1.0, w = 0.0;
  for (int i = 0; i < n_steps; ++i) {
    const double t = h * i;
    const double v0 = weight.at(t);
    const double vm = weight.at(t + 0.5 * h);
    const double v1 = weight.at(t + h);
    const double k1z = w, k1w = -lambda * v0 * z;
    const double k2z = w + 0.5 * h * k1w, k2w = -lambda * vm * (z + 0.5 * h * k1z);
    const double k3z = w + 0.5 * h * k2w, k3w = -lambda * vm * (z + 0.5 * h * k2z);
    const double k4z = w + h * k3w, k4w = -lambda * v1 * (z + h * k3z);
    z += h / 6.0 * (k1z + 2.0 * k2z + 2.0 * k3z + k4z);
    w += h / 6.0 * (k1w + 2.0 * k2w + 2.0 * k3w + k4w);
    if (z <= 0.0 && i + 1 < n_steps) return false;
  }
  return z >= 0.0;
}

double bobkov_pivot(const PotentialWeight& weight) {
  // grid sweep of (length - t) Vbar(t)
  const std::size_t n = std::max<std::size_t>(weight.v.size(), 512);
  const double h = weight.length / static_cast<double>(n);
  double best = 0.0;
  double vbar = 0.0;
  for (std::size_t i = 1; i <= n; ++i) {
    const double t0 = h * static_cast<double>(i - 1);
    const double t1 = h * static_cast<double>(i);
    vbar += 0.5 * (weight.at(t0) + weight.at(t1)) * h;
    best = std::max(best, (weight.length - t1) * vbar);
  }
  return best;
}

}  // namespace

double principal_lambda(const PotentialWeight& weight, double rel_tol) {
  if (weight.is_zero()) return std::numeric_limits<double>::infinity();
  const int n_steps = 10'000;
  const double s = bobkov_pivot(weight);
  double lo = 0.25 / s, hi = 1.0 / s;
  // self-consistent bracket, widened defensively
  lo *= 0.5;
  hi *= 2.0;
  while (!stays_positive(weight, lo, n_steps)) lo *= 0.5;
  while (stays_positive(weight, hi, n_steps)) hi *= 2.0;
  for (int it = 0; it < 200; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (stays_positive(weight, mid, n_steps)) {
      lo = mid;
    } else {
      hi = mid;
    }
    if ((hi - lo) <= rel_tol * lo) break;
  }
  return 0.5 * (lo + hi);
}

BobkovBracket bobkov_bracket(const PotentialWeight& weight) {
  BobkovBracket out;
  out.s = bobkov_pivot(weight);
  out.lambda = principal_lambda(weight);
  const double inv = 1.0 / out.lambda;
  const double tol = 1e-9 * std::max(1.0, inv);
  out.lower_ok = out.s <= inv + tol;
  out.upper_ok = inv <= 4.0 * out.s + tol;
  return out;
}

ExitBound exit_laplace_bound(const PotentialPath& env, const ScaleTable& table, double a,
                             double c) {
  if (!(a < c)) throw std::invalid_argument("exit_laplace_bound: need a < c");
  if (a < env.x_min - 1e-9 || c > env.x_max + 1e-9)
    throw std::out_of_range("exit_laplace_bound: interval outside environment");
  ExitBound out;
  out.a = a;
  out.c = c;
  const IntervalDepths depths = interval_depths(env, a, c);
  out.d_plus = depths.d_plus;
  out.m = depths.m;
  out.lambda_star = 1.0 / (64.0 * (c - a) * std::exp(depths.d_plus));
  out.bound = 2.0 * std::exp(depths.m);

  // The constructed weight lives on [0, alpha + ext] in the scale coordinate.
  // The Neumann end sits at the a-side (t = 0); past t = alpha the potential
  // is continued flat at W(c) out to c' with c' - a = 2(c - a).
  const double alpha = table.at(c) - table.at(a);
  const double w_c = env.value_at(c);
  const double ext = std::exp(w_c) * (c - a);  // A(c') - A(c) on the flat piece
  const std::size_t n = 8192;
  PotentialWeight weight;
  weight.length = alpha + ext;
  weight.v.resize(n + 1);
  for (std::size_t j = 0; j <= n; ++j) {
    const double t = weight.length * static_cast<double>(j) / static_cast<double>(n);
    double w;
    if (t <= alpha) {
      w = env.value_at(table.inverse(table.at(a) + t));
    } else {
      w = w_c;
    }
    weight.v[j] = std::exp(-2.0 * w);
  }
  out.lambda_shooting = principal_lambda(weight);
  return out;
}

}  // namespace dbpot
