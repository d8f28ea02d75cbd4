#include "dbpot/processes.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "dbpot/quadrature.hpp"

namespace dbpot {

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kPositivityFloor = 1e-12;
}  // namespace

double trapezoid(const ProcessPath& p) {
  double s = 0.0;
  for (std::size_t i = 0; i + 1 < p.values.size(); ++i)
    s += 0.5 * (p.values[i] + p.values[i + 1]) * p.dt;
  return s;
}

ProcessPath integrate_xi(double kappa, double T, const SdeConfig& cfg) {
  if (!(kappa >= 0.0)) throw std::invalid_argument("integrate_xi: kappa must be >= 0");
  if (!(T > 0.0) || !(cfg.dt > 0.0)) throw std::invalid_argument("integrate_xi: need T > 0, dt > 0");
  const auto n = static_cast<std::size_t>(std::llround(T / cfg.dt));
  RngStream rng(cfg.seed, cfg.replicate, Purpose::Driving);
  ProcessPath p;
  p.dt = cfg.dt;
  p.scheme = "euler-full-truncation";
  p.seed = cfg.seed;
  p.values.assign(n + 1, 0.0);
  const double sqdt = std::sqrt(cfg.dt);
  for (std::size_t i = 0; i < n; ++i) {
    const double x = p.values[i];
    const double e = std::exp(-x);
    const double drift = -0.5 * kappa + 0.5 * (1.0 + kappa) * e;
    const double diff = std::sqrt(std::max(0.0, 1.0 - e));
    p.values[i + 1] = std::max(0.0, x + diff * sqdt * rng.normal() + drift * cfg.dt);
  }
  return p;
}

ThetaPair theta_from_xi(double kappa, double v, const SdeConfig& cfg) {
  if (!(kappa > 0.0) || !(v > 0.0)) throw std::invalid_argument("theta_from_xi: need kappa > 0, v > 0");
  RngStream rng(cfg.seed, cfg.replicate, Purpose::Driving);
  const auto n = static_cast<std::size_t>(std::llround(v / cfg.dt));
  const double sqdt = std::sqrt(cfg.dt);
  double xi = 0.0;
  double z_prev = 0.0;
  double integral = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double e = std::exp(-xi);
    const double drift = -0.5 * kappa + 0.5 * (1.0 + kappa) * e;
    const double diff = std::sqrt(std::max(0.0, 1.0 - e));
    xi = std::max(0.0, xi + diff * sqdt * rng.normal() + drift * cfg.dt);
    const double z = std::exp(xi) - 1.0;
    integral += 0.5 * (z_prev + z) * cfg.dt;
    z_prev = z;
  }
  ThetaPair out;
  out.theta1 = 4.0 * integral;
  const double dim = 2.0 - 2.0 * kappa;
  out.dimension_nonpositive = dim <= 0.0;
  SdeConfig bessel_cfg = cfg;
  const double x_from = std::exp(0.5 * xi);
  out.theta2 = 16.0 * bessel_first_passage(dim, x_from, 1.0, bessel_cfg);
  return out;
}

ProcessPath simulate_besq(double delta, double x0, double T, const SdeConfig& cfg,
                          std::optional<double> bridge_to_zero_at) {
  if (delta < 0.0 || x0 < 0.0) throw std::invalid_argument("simulate_besq: need delta >= 0, x0 >= 0");
  if (!(T > 0.0) || !(cfg.dt > 0.0)) throw std::invalid_argument("simulate_besq: need T > 0, dt > 0");
  double horizon = T;
  if (bridge_to_zero_at) {
    if (!(*bridge_to_zero_at > cfg.dt)) throw std::invalid_argument("simulate_besq: bridge time too small");
    horizon = std::min(horizon, *bridge_to_zero_at - cfg.dt);
  }
  const auto n = static_cast<std::size_t>(std::llround(horizon / cfg.dt));
  RngStream rng(cfg.seed, cfg.replicate, Purpose::Driving);
  ProcessPath p;
  p.dt = cfg.dt;
  p.scheme = bridge_to_zero_at ? "euler-full-truncation-bridge" : "euler-full-truncation";
  p.seed = cfg.seed;
  p.values.assign(n + 1, 0.0);
  p.values[0] = x0;
  const double sqdt = std::sqrt(cfg.dt);
  for (std::size_t i = 0; i < n; ++i) {
    const double x = std::max(0.0, p.values[i]);
    double drift = delta;
    if (bridge_to_zero_at) drift -= 2.0 * x / (*bridge_to_zero_at - p.time_at(i));
    p.values[i + 1] =
        std::max(0.0, x + 2.0 * std::sqrt(x) * sqdt * rng.normal() + drift * cfg.dt);
  }
  return p;
}

namespace {

double first_passage_impl(double dim, double x_from, double y_to, const SdeConfig& cfg,
                          RngStream& rng) {
  if (y_to < 0.0 || x_from < y_to) throw std::invalid_argument("bessel_first_passage: need x_from > y_to >= 0");
  if (x_from == y_to) return 0.0;
  if (dim >= 2.0) throw std::invalid_argument("bessel_first_passage: dimension >= 2, downward passage may be infinite");
  double x = x_from * x_from;
  const double target = y_to * y_to;
  double time = 0.0;
  for (std::uint64_t step = 0; step < cfg.max_steps; ++step) {
    const double dt_eff = cfg.dt * std::max(1.0, x);
    const double next = x + 2.0 * std::sqrt(x) * std::sqrt(dt_eff) * rng.normal() + dim * dt_eff;
    if (next <= target) {
      const double frac = (x - target) / (x - next);
      return time + dt_eff * frac;
    }
    time += dt_eff;
    x = next;
  }
  return kInf;
}

}  // namespace

double bessel_first_passage(double dim, double x_from, double y_to, const SdeConfig& cfg) {
  RngStream rng(cfg.seed, cfg.replicate, Purpose::Bessel);
  return first_passage_impl(dim, x_from, y_to, cfg, rng);
}

double sample_upsilon_exact(double kappa, std::uint64_t seed, std::uint64_t replicate) {
  if (!(kappa > 0.0 && kappa < 1.0))
    throw std::invalid_argument("sample_upsilon_exact: kappa must lie in (0,1)");
  RngStream rng(seed, replicate, Purpose::Aux);
  return 0.5 / rng.gamma(kappa, 1.0);
}

StableSample stable_functional(double kappa, double s, const SdeConfig& cfg, double bin) {
  if (!(kappa > 0.0 && kappa < 1.0))
    throw std::invalid_argument("stable_functional: kappa must lie in (0,1)");
  if (s < 0.0) throw std::invalid_argument("stable_functional: s must be >= 0");
  StableSample out;
  if (s == 0.0) return out;
  RngStream rng(cfg.seed, cfg.replicate, Purpose::Driving);
  const double p = 1.0 / kappa - 2.0;
  const double half_bin = 0.5 * bin;
  const double far_scale = 0.5;  // steps grow quadratically past this level
  double gamma = 0.0;
  double local_time = 0.0;
  double integral = 0.0;
  double h_prev = 0.0;
  for (std::uint64_t step = 0; step < cfg.max_steps; ++step) {
    const double rel = gamma / far_scale;
    const double dt_eff = cfg.dt * std::max(1.0, rel * rel);
    const double next = gamma + std::sqrt(dt_eff) * rng.normal();
    const double h_next = next > 0.0 ? std::pow(next, p) : 0.0;
    integral += 0.5 * (h_prev + h_next) * dt_eff;
    h_prev = h_next;
    gamma = next;
    if (gamma >= -half_bin && gamma < half_bin) {
      local_time += dt_eff / bin;
      if (local_time >= s) {
        out.value = integral;
        return out;
      }
    }
  }
  out.value = integral;
  out.complete = false;
  return out;
}

double stable_c_kappa(double kappa) {
  if (!(kappa > 0.0 && kappa < 1.0)) throw std::invalid_argument("stable_c_kappa: kappa must lie in (0,1)");
  const double pi = 3.14159265358979323846;
  const double ratio = std::pow(kappa, kappa) / std::tgamma(kappa);
  return pi / (2.0 * kappa * std::sin(pi * kappa)) * ratio * ratio;
}

double kotani_fixed_point(double lambda, double kappa) {
  if (!(lambda > 0.0)) throw std::invalid_argument("kotani_fixed_point: lambda must be positive");
  const double b = 0.5 * (1.0 - kappa);
  return (b + std::sqrt(b * b + 8.0 * lambda)) / (4.0 * lambda);
}

ProcessPath kotani_u(double lambda, double kappa, const PotentialPath& env, double T,
                     double burn_in) {
  if (!(lambda > 0.0)) throw std::invalid_argument("kotani_u: lambda must be positive");
  if (burn_in < 0.0) burn_in = 20.0 / lambda;
  if (-burn_in < env.x_min - 1e-9 || T > env.x_max + 1e-9)
    throw std::invalid_argument("kotani_u: environment window does not cover [-burn_in, T]");
  const std::size_t start = env.index_near(-burn_in);
  const std::size_t stop = env.index_near(T);
  const double dx = env.dx;
  double u = kotani_fixed_point(lambda, kappa);
  ProcessPath p;
  p.dt = dx;
  p.scheme = "euler-positivity-floor";
  p.seed = env.seed;
  p.values.reserve(stop - env.zero_index + 1);
  for (std::size_t i = start; i < stop; ++i) {
    if (i >= env.zero_index) p.values.push_back(u);
    const double dw = env.w_increment(i);
    const double drift = 1.0 + 0.5 * (1.0 - kappa) * u - 2.0 * lambda * u * u;
    u = std::max(kPositivityFloor, u + u * dw + drift * dx);
  }
  p.values.push_back(u);
  return p;
}

double kotani_scale_g(double kappa, double lambda, double x) {
  if (!(x > 0.0)) throw std::invalid_argument("kotani_scale_g: x must be positive");
  if (!(lambda > 0.0)) throw std::invalid_argument("kotani_scale_g: lambda must be positive");
  if (x == 1.0) return 0.0;
  const auto f = [kappa, lambda](double s) {
    return std::exp(2.0 / s + 4.0 * lambda * s) / std::pow(s, 1.0 - kappa);
  };
  return adaptive_simpson(f, 1.0, x, 1e-12 * std::max(1.0, std::fabs(x)), 48);
}

namespace {

// Monotone table of the Kotani scale function, accumulated panel by panel
// from the anchor g(1) = 0 so construction costs one pass.
class KotaniScaleTable {
 public:
  KotaniScaleTable(double kappa, double lambda, double g_lo, double x_hi_min) {
    const auto f = [kappa, lambda](double s) {
      return std::exp(2.0 / s + 4.0 * lambda * s) / std::pow(s, 1.0 - kappa);
    };
    // bracket [x_lo, x_hi] by cheap asymptotic probes, then refine cumulatively
    double x_lo = 1.0, x_hi = 2.0;
    while (true) {
      double acc = 0.0;
      double s1 = 1.0;
      while (s1 > x_lo * 1.0000001 && acc > g_lo) {
        const double s0 = std::max(x_lo, s1 * 0.9);
        acc -= gauss16(f, s0, s1);
        s1 = s0;
      }
      if (acc <= g_lo) break;
      x_lo *= 0.5;
    }
    x_hi = std::max(x_hi, x_hi_min);
    const int n = 4096;
    log_x_.resize(n + 1);
    g_.resize(n + 1);
    const double l0 = std::log(x_lo), l1 = std::log(x_hi);
    for (int i = 0; i <= n; ++i) log_x_[i] = l0 + (l1 - l0) * i / n;
    const auto anchor = static_cast<std::size_t>(
        std::lower_bound(log_x_.begin(), log_x_.end(), 0.0) - log_x_.begin());
    log_x_[anchor] = 0.0;
    g_[anchor] = 0.0;
    for (std::size_t i = anchor; i + 1 < log_x_.size(); ++i)
      g_[i + 1] = g_[i] + gauss16(f, std::exp(log_x_[i]), std::exp(log_x_[i + 1]));
    for (std::size_t i = anchor; i-- > 0;)
      g_[i] = g_[i + 1] - gauss16(f, std::exp(log_x_[i]), std::exp(log_x_[i + 1]));
  }

  double g_max() const { return g_.back(); }
  double g_min() const { return g_.front(); }

  double inverse(double y) const {
    auto it = std::upper_bound(g_.begin(), g_.end(), y);
    std::size_t i = (it == g_.begin()) ? 0 : static_cast<std::size_t>(it - g_.begin()) - 1;
    i = std::min(i, g_.size() - 2);
    const double w = (y - g_[i]) / (g_[i + 1] - g_[i]);
    return std::exp(log_x_[i] + w * (log_x_[i + 1] - log_x_[i]));
  }

 private:
  std::vector<double> log_x_;
  std::vector<double> g_;
};

}  // namespace

LemmaEquEstimate lemma_equ_integral(double nu, double kappa, double lambda, double r,
                                    const SdeConfig& cfg) {
  if (!(r >= 0.0)) throw std::invalid_argument("lemma_equ_integral: r must be >= 0");
  LemmaEquEstimate out;
  if (r == 0.0) return out;
  // The integrand dies like exp(-8 lambda w); the table must reach past
  // w ~ 3/lambda before the inverse may be clamped.
  KotaniScaleTable table(kappa, lambda, -std::max(4.0 * r, 100.0), 3.2 / lambda);
  const double reach_lo = table.g_min();
  const double reach_hi = table.g_max();
  RngStream rng(cfg.seed, cfg.replicate, Purpose::Driving);
  const double bin = 0.02;
  const double half_bin = 0.5 * bin;
  const double far_scale = 2.0;
  double gamma = 0.0;
  double local_time = 0.0;
  double integral = 0.0;
  const auto integrand = [&](double y) {
    const double w = table.inverse(std::clamp(y, reach_lo, reach_hi));
    return std::pow(w, nu) * std::exp(-4.0 / w - 8.0 * lambda * w);
  };
  double f_prev = integrand(0.0);
  for (std::uint64_t step = 0; step < cfg.max_steps; ++step) {
    const double rel = gamma / far_scale;
    const double dt_eff = cfg.dt * std::max(1.0, rel * rel);
    gamma += std::sqrt(dt_eff) * rng.normal();
    const double f_next = integrand(gamma);
    integral += 0.5 * (f_prev + f_next) * dt_eff;
    f_prev = f_next;
    if (gamma >= -half_bin && gamma < half_bin) {
      local_time += dt_eff / bin;
      if (local_time >= r) {
        out.value = integral;
        return out;
      }
    }
  }
  out.value = integral;
  out.complete = false;
  return out;
}

}  // namespace dbpot
