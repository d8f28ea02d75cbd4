#include "dbpot/localtime.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <stdexcept>

namespace dbpot {

WienerPath sample_bm(double T, const SdeConfig& cfg) {
  if (!(T > 0.0) || !(cfg.dt > 0.0)) throw std::invalid_argument("sample_bm: need T > 0, dt > 0");
  const auto n = static_cast<std::size_t>(std::llround(T / cfg.dt));
  RngStream rng(cfg.seed, cfg.replicate, Purpose::Driving);
  WienerPath p;
  p.seed = cfg.seed;
  p.t.resize(n + 1);
  p.x.resize(n + 1);
  const double sd = std::sqrt(cfg.dt);
  p.t[0] = 0.0;
  p.x[0] = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    p.t[i + 1] = p.t[i] + cfg.dt;
    p.x[i + 1] = p.x[i] + sd * rng.normal();
  }
  return p;
}

WienerPath sample_bm_until(const StopRule& stop, const SdeConfig& cfg, double bin) {
  RngStream rng(cfg.seed, cfg.replicate, Purpose::Driving);
  WienerPath p;
  p.seed = cfg.seed;
  p.t.push_back(0.0);
  p.x.push_back(0.0);
  // levels the stopping rule (and the field) cares about
  double focus_lo = 0.0, focus_hi = 0.0;
  if (stop.kind == StopKind::Passage) {
    focus_lo = std::min(0.0, stop.value);
    focus_hi = std::max(0.0, stop.value);
  }
  const double margin = 0.5;
  const double half_bin = 0.5 * bin;
  double local_time = 0.0;
  double time = 0.0;
  double x = 0.0;
  for (std::uint64_t step = 0; step < cfg.max_steps; ++step) {
    if (stop.kind == StopKind::FixedTime && time >= stop.value) return p;
    double dist = 0.0;
    if (x < focus_lo - margin) dist = focus_lo - margin - x;
    if (x > focus_hi + margin) dist = x - focus_hi - margin;
    const double dt_eff = cfg.dt * std::max(1.0, (dist / margin) * (dist / margin));
    double x_next = x + std::sqrt(dt_eff) * rng.normal();
    double t_next = time + dt_eff;
    if (stop.kind == StopKind::FixedTime && t_next > stop.value) {
      // resample the final partial step at the exact remaining duration
      const double rem = stop.value - time;
      x_next = x + std::sqrt(rem) * rng.normal();
      t_next = stop.value;
    }
    if (stop.kind == StopKind::Passage) {
      const double a = stop.value;
      if ((x - a) * (x_next - a) <= 0.0 && x != x_next) {
        const double f = (a - x) / (x_next - x);
        p.t.push_back(time + f * dt_eff);
        p.x.push_back(a);
        return p;
      }
    }
    if (stop.kind == StopKind::InverseLocalTime && x >= -half_bin && x < half_bin) {
      local_time += dt_eff / bin;
      if (local_time >= stop.value) {
        const double excess = (local_time - stop.value) * bin;
        p.t.push_back(t_next - excess);
        p.x.push_back(x_next);
        return p;
      }
    }
    time = t_next;
    x = x_next;
    p.t.push_back(time);
    p.x.push_back(x);
    if (stop.kind == StopKind::FixedTime && time >= stop.value) return p;
  }
  p.complete = false;
  return p;
}

double LocalTimeField::at_level(double level) const {
  if (levels.empty()) return 0.0;
  const auto idx = static_cast<long long>(std::llround((level - levels.front()) / bin));
  if (idx < 0 || idx >= static_cast<long long>(l.size())) return 0.0;
  return l[static_cast<std::size_t>(idx)];
}

double LocalTimeField::integral() const {
  double s = 0.0;
  for (double v : l) s += v * bin;
  return s;
}

namespace {

double find_stop_time(const WienerPath& path, const StopRule& stop, double bin) {
  switch (stop.kind) {
    case StopKind::FixedTime:
      if (path.t.back() + 1e-12 < stop.value)
        throw std::runtime_error("local_time_field: path shorter than the stopping time");
      return stop.value;
    case StopKind::Passage: {
      const double a = stop.value;
      for (std::size_t i = 0; i + 1 < path.x.size(); ++i) {
        if ((path.x[i] - a) * (path.x[i + 1] - a) <= 0.0 && path.x[i] != path.x[i + 1]) {
          const double f = (a - path.x[i]) / (path.x[i + 1] - path.x[i]);
          return path.t[i] + f * (path.t[i + 1] - path.t[i]);
        }
      }
      throw std::runtime_error("local_time_field: passage level not reached");
    }
    case StopKind::InverseLocalTime: {
      const double half_bin = 0.5 * bin;
      double lt = 0.0;
      for (std::size_t i = 0; i + 1 < path.x.size(); ++i) {
        if (path.x[i] >= -half_bin && path.x[i] < half_bin) {
          const double dt = path.t[i + 1] - path.t[i];
          lt += dt / bin;
          if (lt >= stop.value) {
            const double excess = std::max(0.0, (lt - stop.value) * bin);
            return path.t[i + 1] - excess;
          }
        }
      }
      // long paths accumulate clock round-off; accept a hairline shortfall
      if (lt >= stop.value * (1.0 - 1e-4)) return path.t.back();
      throw std::runtime_error("local_time_field: local time budget exhausted");
    }
  }
  throw std::logic_error("local_time_field: unknown stop rule");
}

}  // namespace

double inverse_local_time(const WienerPath& path, double r, double bin) {
  if (r < 0.0) throw std::invalid_argument("inverse_local_time: r must be >= 0");
  if (r == 0.0) return 0.0;
  return find_stop_time(path, StopRule::inv_local_time(r), bin);
}

LocalTimeField local_time_field(const WienerPath& path, const StopRule& stop, double bin) {
  if (!(bin > 0.0)) throw std::invalid_argument("local_time_field: bin must be positive");
  const double stop_time = find_stop_time(path, stop, bin);
  // occupation per bin, left-endpoint assignment
  std::map<long long, double> occ;
  for (std::size_t i = 0; i + 1 < path.t.size(); ++i) {
    if (path.t[i] >= stop_time) break;
    const double dt = std::min(path.t[i + 1], stop_time) - path.t[i];
    const auto k = static_cast<long long>(std::llround(path.x[i] / bin));
    occ[k] += dt;
  }
  LocalTimeField f;
  f.bin = bin;
  f.stop_time = stop_time;
  f.seed = path.seed;
  if (occ.empty()) return f;
  const long long k_lo = occ.begin()->first;
  const long long k_hi = occ.rbegin()->first;
  for (long long k = k_lo; k <= k_hi; ++k) {
    f.levels.push_back(bin * static_cast<double>(k));
    const auto it = occ.find(k);
    f.l.push_back(it == occ.end() ? 0.0 : it->second / bin);
  }
  return f;
}

LocalTimeField rayknight_field_first(double a, double span, const SdeConfig& cfg, double bin) {
  if (!(a > 0.0) || !(span >= a)) throw std::invalid_argument("rayknight_field_first: need a > 0, span >= a");
  RngStream rng(cfg.seed, cfg.replicate, Purpose::Driving);
  LocalTimeField f;
  f.bin = bin;
  f.seed = cfg.seed;
  const double sqdt = std::sqrt(cfg.dt);
  double x = 0.0;
  double t = 0.0;
  double next_record = 0.0;
  while (t < span) {
    if (t >= next_record - 1e-12) {
      f.levels.push_back(a - next_record);
      f.l.push_back(x);
      next_record += bin;
    }
    const double dim = (t <= a) ? 2.0 : 0.0;
    const double xp = std::max(0.0, x);
    x = std::max(0.0, xp + 2.0 * std::sqrt(xp) * sqdt * rng.normal() + dim * cfg.dt);
    t += cfg.dt;
  }
  std::reverse(f.levels.begin(), f.levels.end());
  std::reverse(f.l.begin(), f.l.end());
  return f;
}

LocalTimeField rayknight_field_second(double u, double span, const SdeConfig& cfg, double bin) {
  if (!(u > 0.0) || !(span > 0.0)) throw std::invalid_argument("rayknight_field_second: need u > 0, span > 0");
  RngStream rng(cfg.seed, cfg.replicate, Purpose::Driving);
  LocalTimeField f;
  f.bin = bin;
  f.seed = cfg.seed;
  const double sqdt = std::sqrt(cfg.dt);
  double x = u;
  double t = 0.0;
  double next_record = 0.0;
  while (t < span) {
    if (t >= next_record - 1e-12) {
      f.levels.push_back(next_record);
      f.l.push_back(x);
      next_record += bin;
    }
    const double xp = std::max(0.0, x);
    x = std::max(0.0, xp + 2.0 * std::sqrt(xp) * sqdt * rng.normal());
    t += cfg.dt;
  }
  return f;
}

double pitman_yor_laplace(double eta, double lambda) {
  if (!(eta > 0.0)) throw std::invalid_argument("pitman_yor_laplace: eta must be positive");
  if (!(lambda > -0.125)) throw std::invalid_argument("pitman_yor_laplace: lambda must exceed -1/8");
  const double root = std::sqrt(1.0 + 8.0 * lambda);
  return std::exp((1.0 - root) / (2.0 * (1.0 + root) * eta));
}

double besq_deviation_bound(double delta, double v) {
  if (!(delta > 0.0) || !(v > 0.0)) throw std::invalid_argument("besq_deviation_bound: need delta > 0, v > 0");
  return 4.0 * std::sqrt((1.0 + delta) * v) / delta * std::exp(-delta * delta / (8.0 * (1.0 + delta) * v));
}

double weighted_tail_integral(const LocalTimeField& field, double eta) {
  if (!(eta > 0.0)) throw std::invalid_argument("weighted_tail_integral: eta must be positive");
  double sum = 0.0;
  for (std::size_t i = 0; i < field.levels.size(); ++i) {
    const double lo = field.levels[i] - 0.5 * field.bin;
    const double hi = field.levels[i] + 0.5 * field.bin;
    if (hi <= eta) continue;
    const double a = std::max(lo, eta);
    if (a <= 0.0) continue;
    sum += field.l[i] * (1.0 / a - 1.0 / hi);
  }
  return sum;
}

}  // namespace dbpot
