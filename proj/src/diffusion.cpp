#include "dbpot/diffusion.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "dbpot/rng.hpp"

namespace dbpot {

namespace {

// Walks the driving Brownian motion over the environment's scale-function
// range. Per cell of the piecewise-linear potential, both the inverse scale
// map and the clock density exp(-2 W_kappa(A^{-1}(y))) are rational in y, so
// the hot loop is transcendental-free apart from the normal draw.
class TimeChangeWalker {
 public:
  TimeChangeWalker(const PotentialPath& env, const ScaleTable& table,
                   const DiffusionConfig& cfg, double x0)
      : table_(table),
        cfg_(cfg),
        rng_(cfg.seed, cfg.replicate, Purpose::Driving),
        cell_em_(table.em.data()),
        cell_slope_(table.slope.data()),
        cell_width_(table.width.data()) {
    (void)env;
    sq_ds_ = std::sqrt(cfg.ds);
    y_ = table.at(x0);
    cell_ = locate_cell(y_);
  }

  double y() const { return y_; }

  // Steps shrink toward refine levels so first-passage detection does not
  // inherit the coarse step's overshoot bias. The floor defaults to sq_ds/8;
  // pass a tighter one when a neighbouring target sits closer than that.
  void add_refine_level(double y, double floor = -1.0) {
    if (floor <= 0.0) floor = 0.125 * sq_ds_;
    refine_.push_back({y, floor});
  }

  // Exit problems need the whole interval resolved even when it is thin in
  // the scale coordinate; steps are capped at a fraction of its width.
  void set_exit_interval(double lo, double hi) {
    exit_lo_ = lo;
    exit_hi_ = hi;
    has_exit_ = true;
  }
  double tau() const { return tau_; }
  double theta1() const { return theta1_; }
  double theta2() const { return theta2_; }

  // clock density at y inside the current cell estimate
  double phi(double y, std::size_t cell) const {
    const double em = cell_em_[cell];
    const double denom = 1.0 + cell_slope_[cell] * (y - table_.a[cell]) * em;
    return em * em / (denom * denom);
  }

  std::size_t locate_cell(double y) const {
    const auto& a = table_.a;
    auto it = std::upper_bound(a.begin(), a.end(), y);
    std::size_t i = (it == a.begin()) ? 0 : static_cast<std::size_t>(it - a.begin()) - 1;
    return std::min(i, a.size() - 2);
  }

  double x_of(double y, std::size_t cell) const {
    const double em = cell_em_[cell];
    const double m = cell_slope_[cell];
    const double r = (y - table_.a[cell]) * em;
    const double h = (std::fabs(m) < 1e-12) ? r : std::log1p(m * r) / m;
    return table_.x_min + table_.dx * static_cast<double>(cell) + h;
  }

  double x() const { return x_of(y_, cell_); }

  // One Brownian step; the proposal may land outside the table range, in
  // which case drivers first look for target crossings along the segment and
  // report the window only if none fired.
  bool step() {
    double sd = sq_ds_;
    if (cfg_.adaptive) sd = std::max(sd, cell_width_[cell_]);
    for (const auto& [ry, floor] : refine_) {
      const double d = std::fabs(y_ - ry);
      sd = std::min(sd, std::max(0.5 * d, floor));
    }
    if (has_exit_) {
      const double width = exit_hi_ - exit_lo_;
      const double d = std::min(std::fabs(y_ - exit_lo_), std::fabs(exit_hi_ - y_));
      sd = std::min(sd, std::max(0.5 * d, width / 64.0));
    }
    y_next_ = y_ + sd * rng_.normal();
    ds_eff_ = sd * sd;
    return y_next_ > table_.a_min() && y_next_ < table_.a_max();
  }

  // Accept the proposed step, accumulating the time change up to fraction
  // `frac` of the step (frac = 1 is the whole step). Returns the clock
  // increment.
  double advance(double frac = 1.0) {
    const double y_stop = y_ + (y_next_ - y_) * frac;
    const std::size_t cell_stop = locate_cell(y_stop);
    const double f0 = phi(y_, cell_);
    const double f1 = phi(y_stop, cell_stop);
    const double dtau = 0.5 * (f0 + f1) * ds_eff_ * frac;
    // occupation split with a linear cut at y = 0 (= A(0))
    if (y_ >= 0.0 && y_stop >= 0.0) {
      theta1_ += dtau;
    } else if (y_ < 0.0 && y_stop < 0.0) {
      theta2_ += dtau;
    } else {
      const double pos_frac = std::fabs(std::max(y_, y_stop)) /
                              (std::fabs(y_) + std::fabs(y_stop));
      theta1_ += dtau * pos_frac;
      theta2_ += dtau * (1.0 - pos_frac);
    }
    y_ = y_stop;
    cell_ = cell_stop;
    tau_ += dtau;
    return dtau;
  }

  double proposed_y() const { return y_next_; }

 private:
  const ScaleTable& table_;
  DiffusionConfig cfg_;
  RngStream rng_;
  const double* cell_em_;
  const double* cell_slope_;
  const double* cell_width_;
  std::vector<std::pair<double, double>> refine_;
  double exit_lo_ = 0.0;
  double exit_hi_ = 0.0;
  bool has_exit_ = false;
  double sq_ds_ = 0.0;
  double y_ = 0.0;
  double y_next_ = 0.0;
  double ds_eff_ = 0.0;
  std::size_t cell_ = 0;
  double tau_ = 0.0;
  double theta1_ = 0.0;
  double theta2_ = 0.0;
};

}  // namespace

DiffusionPath simulate_path(const PotentialPath& env, const ScaleTable& table, double T,
                            const DiffusionConfig& cfg, double x0) {
  if (!(T > 0.0)) throw std::invalid_argument("simulate_path: T must be positive");
  TimeChangeWalker w(env, table, cfg, x0);
  DiffusionPath out;
  out.dt = cfg.out_dt;
  out.x.push_back(w.x());
  double next_t = cfg.out_dt;
  double prev_tau = 0.0;
  double prev_x = w.x();
  for (std::uint64_t step = 0; step < cfg.max_steps; ++step) {
    if (!w.step()) {
      out.status = SimStatus::WindowExceeded;
      return out;
    }
    w.advance();
    const double cur_x = w.x();
    while (next_t <= w.tau() && next_t <= T + 1e-15) {
      const double f = (next_t - prev_tau) / (w.tau() - prev_tau);
      out.x.push_back(prev_x + f * (cur_x - prev_x));
      next_t += cfg.out_dt;
    }
    if (w.tau() >= T) return out;
    prev_tau = w.tau();
    prev_x = cur_x;
  }
  out.status = SimStatus::Budget;
  return out;
}

HitResult first_hitting(const PotentialPath& env, const ScaleTable& table, double v,
                        const DiffusionConfig& cfg, double x0) {
  HitResult out;
  if (v == x0) return out;
  const double a_v = table.at(v);
  const double a_0 = table.at(x0);
  const bool upward = a_v > a_0;
  TimeChangeWalker w(env, table, cfg, x0);
  w.add_refine_level(a_v);
  for (std::uint64_t step = 0; step < cfg.max_steps; ++step) {
    const bool in_range = w.step();
    const double yn = w.proposed_y();
    const bool crossed = upward ? (yn >= a_v) : (yn <= a_v);
    if (crossed) {
      const double frac = (a_v - w.y()) / (yn - w.y());
      w.advance(frac);
      out.h = w.tau();
      out.theta1 = w.theta1();
      out.theta2 = w.theta2();
      return out;
    }
    if (!in_range) {
      out.status = SimStatus::WindowExceeded;
      out.h = w.tau();
      out.theta1 = w.theta1();
      out.theta2 = w.theta2();
      return out;
    }
    w.advance();
    if (w.tau() >= cfg.h_cap) {
      out.status = SimStatus::Capped;
      out.h = w.tau();
      out.theta1 = w.theta1();
      out.theta2 = w.theta2();
      return out;
    }
  }
  out.status = SimStatus::Budget;
  out.h = w.tau();
  return out;
}

PositionResult simulate_position(const PotentialPath& env, const ScaleTable& table, double T,
                                 const DiffusionConfig& cfg, double x0) {
  PositionResult out;
  TimeChangeWalker w(env, table, cfg, x0);
  double sup_y = w.y();
  double prev_tau = 0.0;
  double prev_x = w.x();
  for (std::uint64_t step = 0; step < cfg.max_steps; ++step) {
    if (!w.step()) {
      out.status = SimStatus::WindowExceeded;
      out.x = prev_x;
      out.sup = table.inverse(sup_y);
      return out;
    }
    w.advance();
    sup_y = std::max(sup_y, w.y());
    if (w.tau() >= T) {
      const double f = (T - prev_tau) / (w.tau() - prev_tau);
      out.x = prev_x + f * (w.x() - prev_x);
      out.sup = table.inverse(sup_y);
      return out;
    }
    prev_tau = w.tau();
    prev_x = w.x();
  }
  out.status = SimStatus::Budget;
  out.x = prev_x;
  out.sup = table.inverse(sup_y);
  return out;
}

ExitResult first_exit(const PotentialPath& env, const ScaleTable& table, double a, double c,
                      double x0, const DiffusionConfig& cfg) {
  if (!(a < x0 && x0 < c)) throw std::invalid_argument("first_exit: need a < x0 < c");
  ExitResult out;
  const double y_a = table.at(a);
  const double y_c = table.at(c);
  TimeChangeWalker w(env, table, cfg, x0);
  w.set_exit_interval(y_a, y_c);
  for (std::uint64_t step = 0; step < cfg.max_steps; ++step) {
    const bool in_range = w.step();
    const double yn = w.proposed_y();
    if (!in_range && !(yn >= y_c || yn <= y_a)) {
      out.status = SimStatus::WindowExceeded;
      return out;
    }
    if (yn >= y_c || yn <= y_a) {
      const double target = (yn >= y_c) ? y_c : y_a;
      const double frac = (target - w.y()) / (yn - w.y());
      w.advance(frac);
      out.time = w.tau();
      out.exited_right = yn >= y_c;
      return out;
    }
    w.advance();
    if (w.tau() >= cfg.h_cap) {
      out.status = SimStatus::Capped;
      out.time = w.tau();
      return out;
    }
  }
  out.status = SimStatus::Budget;
  return out;
}

HittingBreakdown decompose_hitting(const PotentialPath& env, const ScaleTable& table,
                                   const ValleyDecomposition& valleys, double v,
                                   const DiffusionConfig& cfg) {
  HittingBreakdown out;
  out.tube = cfg.tube > 0.0 ? cfg.tube : env.dx;
  const int i0 = valleys.i0;
  const int i1 = valleys.i1;
  const int n_k = static_cast<int>(valleys.k.size());  // includes the conventional v
  if (n_k < 2) throw std::invalid_argument("decompose_hitting: empty decomposition");

  // Tube intervals in the Brownian (scale) coordinate. The last target is the
  // exact crossing of A(v), detected as a half-line.
  std::vector<double> lo(n_k), hi(n_k);
  for (int j = 0; j + 1 < n_k; ++j) {
    lo[j] = table.at(std::max(env.x_min, valleys.k[j] - out.tube));
    hi[j] = table.at(std::min(env.x_max, valleys.k[j] + out.tube));
  }
  lo[n_k - 1] = table.at(v);
  hi[n_k - 1] = table.a_max();

  out.xi.assign(std::max(0, n_k - 1), 0);
  std::vector<bool> first_up_done(n_k, false);

  TimeChangeWalker w(env, table, cfg, 0.0);
  {
    // resolve the race between the final level and its left neighbour
    double floor = -1.0;
    if (n_k >= 2) {
      const double gap = lo[n_k - 1] - hi[n_k - 2];
      if (gap > 0.0) floor = std::max(gap / 16.0, 1e-9 * std::sqrt(cfg.ds));
    }
    w.add_refine_level(lo[n_k - 1], floor);
  }
  int label = -1;           // last break point visited; -1 before the first one
  bool init_done = false;
  double seg_start = 0.0;   // clock time of the previous visit
  const int v_label = n_k - 1;

  for (std::uint64_t step = 0; step < cfg.max_steps; ++step) {
    const bool in_range = w.step();
    const double y0 = w.y();
    const double y1 = w.proposed_y();
    // collect tube crossings along this segment, ordered along the motion
    int hit_label = -1;
    double hit_frac = 2.0;
    const double seg_lo = std::min(y0, y1);
    const double seg_hi = std::max(y0, y1);
    for (int j = 0; j < n_k; ++j) {
      if (j == label) continue;
      if (hi[j] < seg_lo || lo[j] > seg_hi) continue;
      // entry point of the tube along the direction of motion
      double entry;
      if (y1 > y0) {
        entry = std::max(lo[j], y0);
      } else {
        entry = std::min(hi[j], y0);
      }
      const double frac = (entry - y0) / (y1 - y0);
      if (frac < hit_frac) {
        hit_frac = frac;
        hit_label = j;
      }
    }
    if (hit_label < 0) {
      if (!in_range) {
        out.status = SimStatus::WindowExceeded;
        break;
      }
      w.advance();
      if (w.tau() >= cfg.h_cap) {
        out.status = SimStatus::Capped;
        break;
      }
      continue;
    }
    // advance exactly to the first tube entry and emit a visit
    w.advance(std::clamp(hit_frac, 0.0, 1.0));
    const double s_cur = w.tau();
    const int p = label;
    const int q = hit_label;
    const double dt_seg = s_cur - seg_start;
    if (!init_done) {
      out.h_init += dt_seg;
      if (q == std::min(i0 + 1, v_label)) init_done = true;
    } else if (q == v_label) {
      out.h_right += dt_seg;
    } else if (p <= 1 && q <= 1) {
      out.h_left += dt_seg;
    } else if (q == p + 1) {
      if (p >= i0 + 1 && !first_up_done[p]) {
        out.h_dir += dt_seg;
      } else {
        out.h_back += dt_seg;
      }
    } else {
      out.h_back += dt_seg;
    }
    if (q == p + 1 && p >= 0) first_up_done[p] = true;
    if (q == p - 1 && q >= 0 && q < static_cast<int>(out.xi.size())) out.xi[q] += 1;
    label = q;
    seg_start = s_cur;
    if (q == v_label) {
      out.h_total = s_cur;
      for (int i = 1; i <= i1 - 1 && i < static_cast<int>(out.xi.size()); ++i)
        out.b_total += out.xi[i];
      return out;
    }
    if (w.tau() >= cfg.h_cap) {
      out.status = SimStatus::Capped;
      break;
    }
  }
  if (out.status == SimStatus::Ok) out.status = SimStatus::Budget;
  out.h_total = w.tau();
  for (int i = 1; i <= i1 - 1 && i < static_cast<int>(out.xi.size()); ++i)
    out.b_total += out.xi[i];
  return out;
}

OccupationSplit occupation_split(const DiffusionPath& path, double v) {
  OccupationSplit out;
  for (std::size_t i = 0; i + 1 < path.x.size(); ++i) {
    const double x0 = path.x[i];
    const double x1 = path.x[i + 1];
    double dt = path.dt;
    bool last = false;
    double x_end = x1;
    if (x1 >= v) {
      const double f = (v - x0) / (x1 - x0);
      dt *= std::clamp(f, 0.0, 1.0);
      x_end = v;
      last = true;
    }
    if (x0 >= 0.0 && x_end >= 0.0) {
      out.theta1 += dt;
    } else if (x0 < 0.0 && x_end < 0.0) {
      out.theta2 += dt;
    } else {
      const double pos = std::fabs(std::max(x0, x_end)) / (std::fabs(x0) + std::fabs(x_end));
      out.theta1 += dt * pos;
      out.theta2 += dt * (1.0 - pos);
    }
    if (last) {
      out.reached = true;
      return out;
    }
  }
  return out;
}

}  // namespace dbpot
