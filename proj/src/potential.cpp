#include "dbpot/potential.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <limits>
#include <stdexcept>

namespace dbpot {

namespace {

// (e^d - 1)/d with the d -> 0 limit handled.
double expm1_over(double d) {
  if (std::fabs(d) < 1e-12) return 1.0 + 0.5 * d;
  return std::expm1(d) / d;
}

struct GridSpec {
  std::size_t n_cells;
  std::size_t zero_index;
};

GridSpec make_grid(double x_min, double x_max, double dx) {
  if (!(dx > 0.0)) throw std::invalid_argument("potential: dx must be positive");
  if (!(x_min <= 0.0 && 0.0 <= x_max) || !(x_min < x_max))
    throw std::invalid_argument("potential: bounds must bracket 0");
  const auto n_cells = static_cast<std::size_t>(std::floor((x_max - x_min) / dx + 1e-9));
  if (n_cells == 0) throw std::invalid_argument("potential: window shorter than dx");
  const double zi = -x_min / dx;
  const auto zero_index = static_cast<std::size_t>(std::llround(zi));
  if (std::fabs(zi - static_cast<double>(zero_index)) > 1e-6 || zero_index > n_cells)
    throw std::invalid_argument("potential: grid does not contain 0");
  return {n_cells, zero_index};
}

PotentialPath build_path(double kappa, double x_min, double x_max, double dx,
                         std::uint64_t seed, std::uint64_t replicate, bool zero_noise) {
  const GridSpec g = make_grid(x_min, x_max, dx);
  PotentialPath p;
  p.kappa = kappa;
  p.x_min = x_min;
  p.x_max = x_max;
  p.dx = dx;
  p.seed = seed;
  p.zero_index = g.zero_index;
  p.noise.resize(g.n_cells);
  if (!zero_noise) {
    RngStream rng(seed, replicate, Purpose::Environment);
    const double sd = std::sqrt(dx);
    for (auto& z : p.noise) z = sd * rng.normal();
  }
  p.values.assign(g.n_cells + 1, 0.0);
  const double drift = 0.5 * kappa * dx;
  for (std::size_t i = g.zero_index; i < g.n_cells; ++i)
    p.values[i + 1] = p.values[i] + p.noise[i] - drift;
  for (std::size_t i = g.zero_index; i-- > 0;)
    p.values[i] = p.values[i + 1] - (p.noise[i] - drift);
  return p;
}

}  // namespace

std::size_t PotentialPath::index_near(double x) const {
  if (x < x_min - 1e-9 || x > x_max + 1e-9)
    throw std::out_of_range("potential: x outside sampled window");
  const auto i = static_cast<long long>(std::llround((x - x_min) / dx));
  return static_cast<std::size_t>(std::clamp<long long>(i, 0, static_cast<long long>(values.size()) - 1));
}

double PotentialPath::value_at(double x) const {
  if (x < x_min - 1e-9 || x > x_max + 1e-9)
    throw std::out_of_range("potential: x outside sampled window");
  const double f = (x - x_min) / dx;
  const auto i = std::min(static_cast<std::size_t>(std::max(0.0, std::floor(f))), values.size() - 2);
  const double w = f - static_cast<double>(i);
  return values[i] * (1.0 - w) + values[i + 1] * w;
}

PotentialPath sample_potential(double kappa, double x_min, double x_max, double dx,
                               std::uint64_t seed, std::uint64_t replicate) {
  return build_path(kappa, x_min, x_max, dx, seed, replicate, false);
}

PotentialPath pure_drift_potential(double kappa, double x_min, double x_max, double dx) {
  return build_path(kappa, x_min, x_max, dx, 0, 0, true);
}

ScaleTable scale_table(const PotentialPath& path) {
  ScaleTable t;
  t.x_min = path.x_min;
  t.dx = path.dx;
  t.zero_index = path.zero_index;
  t.path = &path;
  const std::size_t n = path.values.size();
  t.a.assign(n, 0.0);
  for (std::size_t i = path.zero_index; i + 1 < n; ++i) {
    const double d = path.values[i + 1] - path.values[i];
    t.a[i + 1] = t.a[i] + path.dx * std::exp(path.values[i]) * expm1_over(d);
  }
  for (std::size_t i = path.zero_index; i-- > 0;) {
    const double d = path.values[i + 1] - path.values[i];
    t.a[i] = t.a[i + 1] - path.dx * std::exp(path.values[i]) * expm1_over(d);
  }
  t.em.resize(n - 1);
  t.slope.resize(n - 1);
  t.width.resize(n - 1);
  for (std::size_t i = 0; i + 1 < n; ++i) {
    t.em[i] = std::exp(-path.values[i]);
    t.slope[i] = (path.values[i + 1] - path.values[i]) / path.dx;
    t.width[i] = t.a[i + 1] - t.a[i];
  }
  return t;
}

double ScaleTable::at(double x) const {
  const double f = (x - x_min) / dx;
  if (f < -1e-9 || f > static_cast<double>(a.size() - 1) + 1e-9)
    throw std::out_of_range("scale_table: x outside sampled window");
  const auto i = std::min(static_cast<std::size_t>(std::max(0.0, std::floor(f))), a.size() - 2);
  const double h = (f - static_cast<double>(i)) * dx;
  const double wl = path->values[i];
  const double slope = (path->values[i + 1] - wl) / dx;
  return a[i] + h * std::exp(wl) * expm1_over(slope * h);
}

double ScaleTable::inverse(double value) const {
  if (value < a.front() || value > a.back())
    throw std::out_of_range("scale_table: value outside A range");
  auto it = std::upper_bound(a.begin(), a.end(), value);
  std::size_t i = (it == a.begin()) ? 0 : static_cast<std::size_t>(it - a.begin()) - 1;
  i = std::min(i, a.size() - 2);
  const double wl = path->values[i];
  const double slope = (path->values[i + 1] - wl) / dx;
  const double r = (value - a[i]) * std::exp(-wl);
  double h;
  if (std::fabs(slope) < 1e-12) {
    h = r;
  } else {
    h = std::log1p(slope * r) / slope;
  }
  return x_min + dx * static_cast<double>(i) + h;
}

ValleyDecomposition decompose_valleys(const PotentialPath& path, double t, double v,
                                      double right_window) {
  if (!(path.kappa > 0.0)) throw std::invalid_argument("decompose_valleys: kappa must be positive");
  if (!(t >= 1.0)) throw std::invalid_argument("decompose_valleys: t must be >= 1");
  const double t_floor = std::floor(t);
  const double k0 = -t_floor;
  if (k0 < path.x_min - 1e-9 || v > path.x_max + 1e-9)
    throw std::invalid_argument("decompose_valleys: window does not cover [-floor(t), v]");
  const double threshold = 3.0 / path.kappa * std::log(t_floor);
  if (right_window < 0.0) right_window = 10.0 * threshold;

  const std::size_t n = path.values.size();
  const std::size_t end = std::min(n - 1, path.index_near(std::min(path.x_max, v + right_window)));

  // suffix max over (j, end] and first index attaining it
  std::vector<double> suf_max(end + 2, -std::numeric_limits<double>::infinity());
  std::vector<std::size_t> suf_arg(end + 2, end);
  for (std::size_t j = end + 1; j-- > 0;) {
    if (j == end) {
      suf_max[j] = path.values[j];
      suf_arg[j] = j;
    } else if (path.values[j] >= suf_max[j + 1]) {
      suf_max[j] = path.values[j];
      suf_arg[j] = j;
    } else {
      suf_max[j] = suf_max[j + 1];
      suf_arg[j] = suf_arg[j + 1];
    }
  }

  ValleyDecomposition out;
  out.t = t;
  out.v = v;
  std::vector<std::size_t> k_idx;
  k_idx.push_back(path.index_near(k0));
  const std::size_t v_idx = path.index_near(v);

  for (;;) {
    const std::size_t start = k_idx.back();
    if (path.x_at(start) >= v) break;
    const double ref = path.values[start];
    double run_min = ref;
    bool found = false;
    for (std::size_t j = start + 1; j <= end; ++j) {
      run_min = std::min(run_min, path.values[j]);
      if (ref - run_min > threshold) {
        const double sup_right = (j + 1 <= end) ? suf_max[j + 1] : -std::numeric_limits<double>::infinity();
        if (path.values[j] >= sup_right - 1.0) {
          if (j + 1 <= end && suf_arg[j + 1] == end) out.certified = false;
          k_idx.push_back(j);
          found = true;
          break;
        }
      }
    }
    if (!found) {
      out.certified = false;
      break;
    }
    if (path.x_at(k_idx.back()) >= v) break;
  }

  // split stored breaks into K_0..K_{i1} (< v) and the optional overshoot
  std::vector<std::size_t> kept;
  for (std::size_t idx : k_idx) {
    if (path.x_at(idx) < v) {
      kept.push_back(idx);
    } else {
      out.next_break = path.x_at(idx);
    }
  }
  out.i1 = static_cast<int>(kept.size()) - 1;
  out.i0 = 0;
  for (std::size_t j = 0; j < kept.size(); ++j)
    if (path.x_at(kept[j]) < 0.0) out.i0 = static_cast<int>(j);

  for (std::size_t idx : kept) out.k.push_back(path.x_at(idx));
  out.k.push_back(v);  // K_{i1+1} = v by convention

  // depths: largest rise inside each valley, diagonal pairs included
  for (std::size_t j = 0; j + 1 < out.k.size(); ++j) {
    const std::size_t lo = (j < kept.size()) ? kept[j] : v_idx;
    const std::size_t hi = (j + 1 < kept.size()) ? kept[j + 1] : v_idx;
    double run = path.values[lo];
    double best = 0.0;
    for (std::size_t i = lo; i <= hi; ++i) {
      run = std::min(run, path.values[i]);
      best = std::max(best, path.values[i] - run);
    }
    out.depth.push_back(best);
  }
  return out;
}

IntervalDepths interval_depths(const PotentialPath& path, double a, double c) {
  if (!(a < c)) throw std::invalid_argument("interval_depths: need a < c");
  if (a < path.x_min - 1e-9 || c > path.x_max + 1e-9)
    throw std::out_of_range("interval_depths: interval outside grid");
  const std::size_t lo = path.index_near(a);
  const std::size_t hi = path.index_near(c);
  IntervalDepths r;
  double run_min = path.values[lo];
  double run_max = path.values[lo];
  double lo_val = path.values[lo], hi_val = path.values[lo];
  for (std::size_t i = lo; i <= hi; ++i) {
    const double w = path.values[i];
    run_min = std::min(run_min, w);
    run_max = std::max(run_max, w);
    r.d_plus = std::max(r.d_plus, w - run_min);   // rise ending at i
    r.d_minus = std::max(r.d_minus, run_max - w); // fall ending at i
    lo_val = std::min(lo_val, w);
    hi_val = std::max(hi_val, w);
  }
  r.d = std::min(r.d_plus, r.d_minus);
  r.m = hi_val - lo_val;
  return r;
}

bool EventReport::omega() const {
  bool all_b = true;
  for (bool x : b) all_b = all_b && x;
  return a && g_t && g_v && all_b && k && l;
}

namespace {

// max over j in [lo,hi] of (W[j] - min_{lo<=i<=j} W[i])
double max_rise(const PotentialPath& p, std::size_t lo, std::size_t hi) {
  double run = p.values[lo];
  double best = 0.0;
  for (std::size_t i = lo; i <= hi; ++i) {
    run = std::min(run, p.values[i]);
    best = std::max(best, p.values[i] - run);
  }
  return best;
}

// sup over pairs within window_len of |W(s2) - W(s1)|: sliding window range.
double max_window_range(const PotentialPath& p, std::size_t lo, std::size_t hi,
                        std::size_t window_cells) {
  std::deque<std::size_t> qmax, qmin;
  double best = 0.0;
  for (std::size_t i = lo; i <= hi; ++i) {
    while (!qmax.empty() && p.values[qmax.back()] <= p.values[i]) qmax.pop_back();
    qmax.push_back(i);
    while (!qmin.empty() && p.values[qmin.back()] >= p.values[i]) qmin.pop_back();
    qmin.push_back(i);
    const std::size_t cut = (i >= lo + window_cells) ? i - window_cells : lo;
    while (qmax.front() < cut) qmax.pop_front();
    while (qmin.front() < cut) qmin.pop_front();
    best = std::max(best, p.values[qmax.front()] - p.values[qmin.front()]);
  }
  return best;
}

}  // namespace

EventReport check_events(const PotentialPath& path, double t, int m, double nu,
                         double epsilon) {
  if (m < 2) throw std::invalid_argument("check_events: need m >= 2");
  if (-t < path.x_min - 1e-9 || t > path.x_max + 1e-9)
    throw std::invalid_argument("check_events: grid does not cover [-t, t]");
  const double v = std::pow(t, nu);
  const double kappa = path.kappa;
  const double log_t = std::log(t);
  EventReport rep;

  const ValleyDecomposition vd = decompose_valleys(path, t, v);

  // A(t): valley spacing
  double max_spacing = 0.0;
  for (std::size_t j = 0; j + 1 < vd.k.size(); ++j)
    max_spacing = std::max(max_spacing, vd.k[j + 1] - vd.k[j]);
  rep.a = max_spacing <= log_t * log_t;

  // G(u): largest rise over [-u, u]
  const auto g_event = [&](double u) {
    const double bound = (std::log(u) + 3.0 * std::log(std::log(u))) / kappa;
    return max_rise(path, path.index_near(-u), path.index_near(u)) <= bound;
  };
  rep.g_t = g_event(t);
  rep.g_v = g_event(v);

  // B(t,m): counts of deep valleys meeting [-v, v)
  const double loglog_v = std::log(std::log(v));
  for (int k = 1; k < m; ++k) {
    const double depth_cut = static_cast<double>(k) / (kappa * m) * std::log(v) + 4.0 * loglog_v;
    std::size_t count = 0;
    for (std::size_t i = 1; i + 1 < vd.k.size(); ++i) {
      const bool meets = vd.k[i] < v && vd.k[i + 1] > -v;
      if (meets && vd.depth[i] >= depth_cut) ++count;
    }
    rep.b.push_back(static_cast<double>(count) <=
                    std::pow(v, 1.0 - static_cast<double>(k) / m));
  }

  // K(t): modulus over windows of length <= 1
  const auto cells = static_cast<std::size_t>(std::llround(1.0 / path.dx));
  const double k_bound = std::sqrt(log_t) * std::log(log_t);
  rep.k = max_window_range(path, path.index_near(-t), path.index_near(t), cells) <= k_bound;

  // L(t): one rise of size (1-eps)/kappa log v on [0, v]
  rep.l = max_rise(path, path.zero_index, path.index_near(v)) >
          (1.0 - epsilon) / kappa * std::log(v);
  return rep;
}

std::vector<double> reflected_from_min(const PotentialPath& path) {
  std::vector<double> u(path.values.size());
  double run = path.values.empty() ? 0.0 : path.values[0];
  for (std::size_t i = 0; i < path.values.size(); ++i) {
    run = std::min(run, path.values[i]);
    u[i] = path.values[i] - run;
  }
  return u;
}

std::vector<Excursion> excursion_statistics(const PotentialPath& path) {
  if (!(path.kappa > 0.0))
    throw std::invalid_argument("excursion_statistics: kappa must be positive");
  std::vector<Excursion> out;
  double run = path.values.empty() ? 0.0 : path.values[0];
  std::size_t excursion_start = 0;
  bool open = false;
  double peak = 0.0;
  for (std::size_t i = 0; i < path.values.size(); ++i) {
    run = std::min(run, path.values[i]);
    const double u = path.values[i] - run;
    if (u > 0.0) {
      if (!open) {
        open = true;
        excursion_start = i - 1;  // previous zero
        peak = u;
      } else {
        peak = std::max(peak, u);
      }
    } else if (open) {
      out.push_back({path.dx * static_cast<double>(i - excursion_start), peak});
      open = false;
    }
  }
  return out;  // trailing incomplete excursion intentionally dropped
}

double excursion_max_tail(double kappa, double y) {
  if (y <= 0.0) return 1.0;
  const double z = kappa * y;
  const double em = -std::expm1(-z);  // 1 - e^{-z} without cancellation
  return 2.0 * std::exp(-z) * (z - em) / (em * em);
}

}  // namespace dbpot
