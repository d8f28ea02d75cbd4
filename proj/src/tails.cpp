#include "dbpot/tails.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "dbpot/parallel.hpp"
#include "dbpot/processes.hpp"
#include "dbpot/quadrature.hpp"

namespace dbpot {

std::string tail_event_name(TailEvent e) {
  switch (e) {
    case TailEvent::SpeedupX: return "speedup_X";
    case TailEvent::SlowdownX: return "slowdown_X";
    case TailEvent::SpeedupH: return "speedup_H";
    case TailEvent::SlowdownH: return "slowdown_H";
  }
  return "unknown";
}

TailEvent tail_event_from_name(const std::string& name) {
  if (name == "speedup_X" || name == "speedup") return TailEvent::SpeedupX;
  if (name == "slowdown_X") return TailEvent::SlowdownX;
  if (name == "speedup_H") return TailEvent::SpeedupH;
  if (name == "slowdown_H") return TailEvent::SlowdownH;
  throw std::invalid_argument("unknown tail event: " + name);
}

namespace {

struct ReplicateOutcome {
  bool event = false;
  bool incomplete = false;
};

double encode(const ReplicateOutcome& o) {
  return (o.event ? 1.0 : 0.0) + (o.incomplete ? 2.0 : 0.0);
}

struct EventGeometry {
  double level = 0.0;     // space level the event watches
  double h_cap = 0.0;     // clock cap for the hitting simulations
  double x_right = 0.0;   // required right window
  bool regime_warning = false;
};

EventGeometry plan_event(double kappa, double t, double u, double v, double nu,
                         TailEvent event, bool quenched, const TailSimConfig& sim) {
  EventGeometry g;
  const double t_scale = std::pow(t, kappa);
  switch (event) {
    case TailEvent::SpeedupX:
      g.level = t_scale * u;
      g.h_cap = t;
      g.x_right = g.level + sim.right_margin;
      g.regime_warning = !(u < 0.5 * std::pow(t, 1.0 - kappa));
      break;
    case TailEvent::SlowdownX:
      g.level = quenched ? std::pow(t, nu) : t_scale / u;
      g.h_cap = std::numeric_limits<double>::infinity();
      g.x_right = 6.0 * t_scale + 20.0;
      g.regime_warning = !(std::log(std::max(u, 1.000001)) < 0.1 * t_scale);
      break;
    case TailEvent::SpeedupH:
      g.level = v;
      g.h_cap = std::pow(v / u, 1.0 / kappa);
      g.x_right = v + sim.right_margin;
      g.regime_warning = !(u < 0.5 * std::pow(v, 1.0 - kappa));
      break;
    case TailEvent::SlowdownH:
      if (quenched) {
        g.level = std::pow(t, nu);
        g.h_cap = t;
      } else {
        g.level = v;
        g.h_cap = std::pow(v * u, 1.0 / kappa);
      }
      g.x_right = g.level + sim.right_margin;
      g.regime_warning = !(std::log(std::max(u, 1.000001)) < 0.1 * g.level);
      break;
  }
  return g;
}

double auto_left_edge(double kappa, const TailSimConfig& sim) {
  if (sim.x_left != 0.0) return sim.x_left;
  // deep enough that the driving Brownian motion cannot reach A(x_left)
  return -std::max(30.0, 55.0 / std::max(kappa, 0.05));
}

ReplicateOutcome run_event(const PotentialPath& env, const ScaleTable& table,
                           const EventGeometry& g, TailEvent event, double t,
                           const DiffusionConfig& dc) {
  ReplicateOutcome out;
  switch (event) {
    case TailEvent::SpeedupX:
    case TailEvent::SpeedupH: {
      if (g.level <= 0.0) {  // sup_{s<=t} X_s >= X_0 = 0 >= level
        out.event = true;
        return out;
      }
      const HitResult hr = first_hitting(env, table, g.level, dc);
      out.event = hr.status == SimStatus::Ok && hr.h < g.h_cap;
      out.incomplete = hr.status == SimStatus::Budget || hr.status == SimStatus::WindowExceeded;
      return out;
    }
    case TailEvent::SlowdownH: {
      const HitResult hr = first_hitting(env, table, g.level, dc);
      out.event = hr.status == SimStatus::Capped;
      out.incomplete = hr.status == SimStatus::Budget || hr.status == SimStatus::WindowExceeded;
      return out;
    }
    case TailEvent::SlowdownX: {
      const PositionResult pr = simulate_position(env, table, t, dc);
      out.event = pr.x < g.level;
      out.incomplete = pr.status != SimStatus::Ok;
      return out;
    }
  }
  return out;
}

TailEstimate reduce_outcomes(const std::vector<double>& encoded) {
  TailEstimate est;
  double hits = 0.0;
  std::uint64_t incomplete = 0;
  for (double v : encoded) {
    if (v >= 2.0) {
      ++incomplete;
      v -= 2.0;
    }
    hits += v;
  }
  const auto n = static_cast<double>(encoded.size());
  est.n = encoded.size();
  est.p_hat = hits / n;
  est.se = std::sqrt(est.p_hat * (1.0 - est.p_hat) / n);
  est.upper95 = est.p_hat == 0.0 ? 3.0 / n : std::min(1.0, est.p_hat + 1.96 * est.se);
  est.n_incomplete = incomplete;
  return est;
}

}  // namespace

TailEstimate estimate_tail_annealed(double kappa, double t, double u, TailEvent event,
                                    std::uint64_t n, std::uint64_t seed,
                                    const TailSimConfig& sim) {
  if (n == 0) throw std::invalid_argument("estimate_tail_annealed: n must be positive");
  const double v = sim.v > 0.0 ? sim.v : std::pow(t, kappa);
  const EventGeometry g = plan_event(kappa, t, u, v, sim.nu, event, false, sim);
  const double x_left = auto_left_edge(kappa, sim);
  const double x_right = sim.x_right != 0.0 ? sim.x_right : g.x_right;
  if (g.level > x_right + 1e-9)
    throw std::runtime_error("estimate_tail_annealed: window exceeded, level beyond right edge");

  const auto body = [&](std::uint64_t i) {
    const PotentialPath env = sim.pure_drift_env
                                  ? pure_drift_potential(kappa, x_left, x_right, sim.dx)
                                  : sample_potential(kappa, x_left, x_right, sim.dx, seed, i);
    const ScaleTable table = scale_table(env);
    DiffusionConfig dc;
    dc.ds = sim.ds;
    dc.seed = seed;
    dc.replicate = i;
    dc.h_cap = g.h_cap;
    dc.max_steps = sim.max_steps;
    return encode(run_event(env, table, g, event, t, dc));
  };
  TailEstimate est = reduce_outcomes(run_replicates(n, sim.workers, body));
  est.event = tail_event_name(event);
  est.kappa = kappa;
  est.t = t;
  est.u = u;
  est.seed = seed;
  est.regime_warning = g.regime_warning;
  return est;
}

TailEstimate estimate_tail_quenched(std::uint64_t env_seed, double kappa, double t,
                                    double u_or_nu, TailEvent event, std::uint64_t n,
                                    std::uint64_t seed, const TailSimConfig& sim) {
  if (n == 0) throw std::invalid_argument("estimate_tail_quenched: n must be positive");
  const bool slowdown = event == TailEvent::SlowdownH || event == TailEvent::SlowdownX;
  const double nu = slowdown ? u_or_nu : sim.nu;
  const double u = slowdown ? 1.0 : u_or_nu;
  const double v = sim.v > 0.0 ? sim.v : std::pow(t, kappa);
  const EventGeometry g = plan_event(kappa, t, u, v, nu, event, true, sim);
  const double x_left = auto_left_edge(kappa, sim);
  const double x_right = sim.x_right != 0.0 ? sim.x_right : g.x_right;
  if (g.level > x_right + 1e-9)
    throw std::runtime_error("estimate_tail_quenched: window exceeded, level beyond right edge");

  const PotentialPath env = sim.pure_drift_env
                                ? pure_drift_potential(kappa, x_left, x_right, sim.dx)
                                : sample_potential(kappa, x_left, x_right, sim.dx, env_seed, 0);
  const ScaleTable table = scale_table(env);
  const auto body = [&](std::uint64_t i) {
    DiffusionConfig dc;
    dc.ds = sim.ds;
    dc.seed = seed;
    dc.replicate = i;
    dc.h_cap = g.h_cap;
    dc.max_steps = sim.max_steps;
    return encode(run_event(env, table, g, event, t, dc));
  };
  TailEstimate est = reduce_outcomes(run_replicates(n, sim.workers, body));
  est.event = tail_event_name(event);
  est.kappa = kappa;
  est.t = t;
  est.u = u_or_nu;
  est.seed = seed;
  est.env_seed = env_seed;
  est.regime_warning = g.regime_warning;
  return est;
}

ExponentFit fit_exponent(const std::vector<std::pair<double, double>>& points, FitMode mode) {
  std::vector<double> xs, ys;
  int rejected = 0;
  for (const auto& [u, p] : points) {
    if (!(p > 0.0 && p < 1.0)) {
      ++rejected;
      continue;
    }
    xs.push_back(std::log(u));
    switch (mode) {
      case FitMode::LogLogVsLogU:
      case FitMode::LogLogVsLogT:
        ys.push_back(std::log(-std::log(p)));
        break;
      case FitMode::LogPVsLogU:
        ys.push_back(std::log(p));
        break;
    }
  }
  const auto n = static_cast<int>(xs.size());
  if (n < 3) throw std::invalid_argument("fit_exponent: need at least 3 usable points");
  double sx = 0.0, sy = 0.0;
  for (int i = 0; i < n; ++i) {
    sx += xs[i];
    sy += ys[i];
  }
  const double mx = sx / n, my = sy / n;
  double sxx = 0.0, sxy = 0.0, syy = 0.0;
  for (int i = 0; i < n; ++i) {
    sxx += (xs[i] - mx) * (xs[i] - mx);
    sxy += (xs[i] - mx) * (ys[i] - my);
    syy += (ys[i] - my) * (ys[i] - my);
  }
  ExponentFit fit;
  fit.slope = sxy / sxx;
  fit.intercept = my - fit.slope * mx;
  fit.r2 = syy == 0.0 ? 1.0 : (sxy * sxy) / (sxx * syy);
  fit.n_used = n;
  fit.n_rejected = rejected;
  return fit;
}

PredictedExponents predicted_exponents(double kappa, double nu) {
  if (!(kappa > 0.0)) throw std::invalid_argument("predicted_exponents: kappa must be positive");
  if (!(nu > 0.0 && nu <= std::min(1.0, kappa)))
    throw std::invalid_argument("predicted_exponents: nu out of range (0, min(1, kappa)]");
  PredictedExponents out;
  out.speedup = kappa < 1.0 ? 1.0 / (1.0 - kappa) : std::numeric_limits<double>::quiet_NaN();
  out.annealed_slowdown_power = 1.0;
  out.quenched_slowdown_doublelog = std::min(1.0 - nu / kappa, kappa / (kappa + 1.0));
  return out;
}

namespace {

// Scale function f(z) = int_1^z (1+s)^kappa / s ds tabulated on log-spaced
// knots; the inverse is a bracketed Newton iteration with the analytic
// derivative, so the quadrature route below never touches the closed-form
// substitution it is checked against.
class HScale {
 public:
  HScale(double kappa, double z_lo, double z_hi, int per_decade) : kappa_(kappa) {
    const double l0 = std::log10(z_lo), l1 = std::log10(z_hi);
    const int n = static_cast<int>(std::ceil((l1 - l0) * per_decade));
    z_.resize(n + 1);
    f_.resize(n + 1);
    for (int i = 0; i <= n; ++i) z_[i] = std::pow(10.0, l0 + (l1 - l0) * i / n);
    // anchor at z = 1 where f = 0, then accumulate both directions
    const auto anchor = static_cast<std::size_t>(
        std::lower_bound(z_.begin(), z_.end(), 1.0) - z_.begin());
    z_[anchor] = 1.0;
    f_[anchor] = 0.0;
    for (std::size_t i = anchor; i + 1 < z_.size(); ++i)
      f_[i + 1] = f_[i] + gauss16([this](double s) { return integrand(s); }, z_[i], z_[i + 1]);
    for (std::size_t i = anchor; i-- > 0;)
      f_[i] = f_[i + 1] - gauss16([this](double s) { return integrand(s); }, z_[i], z_[i + 1]);
  }

  double integrand(double s) const { return std::pow(1.0 + s, kappa_) / s; }

  double f_min() const { return f_.front(); }
  double f_max() const { return f_.back(); }
  double z_min() const { return z_.front(); }
  double z_max() const { return z_.back(); }
  std::size_t panels() const { return z_.size() - 1; }
  double knot_f(std::size_t i) const { return f_[i]; }

  double inverse(double x) const {
    auto it = std::upper_bound(f_.begin(), f_.end(), x);
    std::size_t i = (it == f_.begin()) ? 0 : static_cast<std::size_t>(it - f_.begin()) - 1;
    i = std::min(i, f_.size() - 2);
    // log-linear start, then Newton on the local sub-integral
    const double w = (x - f_[i]) / (f_[i + 1] - f_[i]);
    double z = std::exp(std::log(z_[i]) * (1.0 - w) + std::log(z_[i + 1]) * w);
    for (int it2 = 0; it2 < 4; ++it2) {
      const double fz = f_[i] + gauss16([this](double s) { return integrand(s); }, z_[i], z);
      z -= (fz - x) / integrand(z);
      z = std::clamp(z, z_[i] * 0.5, z_[i + 1] * 2.0);
    }
    return z;
  }

 private:
  double kappa_;
  std::vector<double> z_;
  std::vector<double> f_;
};

}  // namespace

ConstantsRecord constants(double kappa) {
  if (!(kappa > 0.0 && kappa < 1.0)) throw std::invalid_argument("constants: kappa must lie in (0,1)");
  ConstantsRecord rec;
  rec.kappa = kappa;
  rec.c_kappa = stable_c_kappa(kappa);
  rec.c_h_halfline = std::pow(2.0, -kappa) / kappa;
  rec.c_h_fullline = 1.0 / kappa;

  const HScale scale(kappa, 1e-12, 1e8, 48);
  const double p = 1.0 + 2.0 * kappa;
  const auto h = [&](double x) {
    const double w = scale.inverse(x);
    return w / std::pow(1.0 + w, p);
  };
  // integrate h over x panels aligned with the scale-function knots
  double full = 0.0, half = 0.0;
  for (std::size_t i = 0; i + 1 <= scale.panels(); ++i) {
    const double x0 = scale.knot_f(i);
    const double x1 = scale.knot_f(i + 1);
    const double part = gauss16(h, x0, x1);
    full += part;
    if (x0 >= 0.0) half += part;
  }
  // tails: h ~ const * e^x on the left, h ~ const / x^2 on the right
  const double left_tail = h(scale.f_min());
  const double right_tail = scale.f_max() * h(scale.f_max());
  rec.c_h_fullline_quadrature = full + left_tail + right_tail;
  rec.c_h_halfline_quadrature = half + right_tail;
  return rec;
}

}  // namespace dbpot
