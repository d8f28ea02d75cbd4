// Command line front end: sampling, valley decomposition, diffusion runs,
// tail estimators, exponent fits, constants, and quick verification suites.
//
// Exit codes: 0 success, 1 runtime/simulation failure, 2 usage or config error.

#include <cmath>
#include <fstream>
#include <iostream>
#include <limits>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "dbpot/diffusion.hpp"
#include "dbpot/localtime.hpp"
#include "dbpot/parallel.hpp"
#include "dbpot/potential.hpp"
#include "dbpot/processes.hpp"
#include "dbpot/serialize.hpp"
#include "dbpot/spectral.hpp"
#include "dbpot/tails.hpp"

namespace {

using nlohmann::json;

struct Config {
  double kappa = 0.5;
  double dt = 1e-3;
  double dx = 0.01;
  double t = 100.0;
  double v = 5.0;
  double u = 2.0;
  double nu = 0.25;
  std::uint64_t n = 1000;
  std::uint64_t seed = 1;
  std::optional<std::uint64_t> env_seed;
  double window = -1.0;
  double x_min = -50.0;
  double x_max = 50.0;
  int workers = 1;
};

Config load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("cannot open config file: " + path);
  json j;
  in >> j;
  Config c;
  if (j.contains("kappa")) c.kappa = j["kappa"];
  if (j.contains("dt")) c.dt = j["dt"];
  if (j.contains("dx")) c.dx = j["dx"];
  if (j.contains("t")) c.t = j["t"];
  if (j.contains("v")) c.v = j["v"];
  if (j.contains("u")) c.u = j["u"];
  if (j.contains("nu")) c.nu = j["nu"];
  if (j.contains("n")) c.n = j["n"];
  if (j.contains("seed")) c.seed = j["seed"];
  if (j.contains("env_seed")) c.env_seed = j["env_seed"];
  if (j.contains("window")) c.window = j["window"];
  if (j.contains("x_min")) c.x_min = j["x_min"];
  if (j.contains("x_max")) c.x_max = j["x_max"];
  if (j.contains("workers")) c.workers = j["workers"];
  return c;
}

std::ostream& open_out(const std::string& path, std::ofstream& file) {
  if (path.empty()) return std::cout;
  file.open(path);
  if (!file) throw std::runtime_error("cannot open output file: " + path);
  return file;
}

int run_verify(const std::string& suite, const Config& cfg);

}  // namespace

int main(int argc, char** argv) {
  using namespace dbpot;

  // --config provides defaults, explicit flags override them
  Config cfg;
  for (int i = 1; i + 1 < argc; ++i) {
    if (std::string(argv[i]) == "--config") {
      try {
        cfg = load_config(argv[i + 1]);
      } catch (const std::exception& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
      }
    }
  }

  CLI::App app{"numerical laboratory for a diffusion in a drifted Brownian potential"};
  app.require_subcommand(1);
  std::string config_path, out_path, event_name = "speedup_H", mode_name = "log_vs_log";
  std::string fit_input, suite = "identities";
  double x0 = 0.0;
  app.add_option("--config", config_path, "JSON config with shared defaults");

  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--kappa", cfg.kappa, "drift parameter");
    sub->add_option("--seed", cfg.seed, "base RNG seed");
    sub->add_option("--out", out_path, "write CSV here instead of stdout");
    sub->add_option("--config", config_path, "JSON config (already applied)");
  };

  auto* sc_env = app.add_subcommand("sample-env", "sample the potential on a grid");
  add_common(sc_env);
  sc_env->add_option("--xmin", cfg.x_min);
  sc_env->add_option("--xmax", cfg.x_max);
  sc_env->add_option("--dx", cfg.dx);

  auto* sc_val = app.add_subcommand("valleys", "break points and depths for a horizon");
  add_common(sc_val);
  sc_val->add_option("--t", cfg.t);
  sc_val->add_option("--v", cfg.v);
  sc_val->add_option("--xmin", cfg.x_min);
  sc_val->add_option("--xmax", cfg.x_max);
  sc_val->add_option("--dx", cfg.dx);
  sc_val->add_option("--window", cfg.window);

  auto* sc_sim = app.add_subcommand("simulate", "diffusion path on a uniform clock");
  add_common(sc_sim);
  sc_sim->add_option("--t", cfg.t, "horizon");
  sc_sim->add_option("--x0", x0);
  sc_sim->add_option("--dt", cfg.dt, "driving clock step");
  sc_sim->add_option("--dx", cfg.dx);
  sc_sim->add_option("--xmin", cfg.x_min);
  sc_sim->add_option("--xmax", cfg.x_max);
  sc_sim->add_option("--env-seed", cfg.env_seed, "freeze the environment seed");

  auto* sc_hit = app.add_subcommand("hitting", "batch of hitting times with occupation split");
  add_common(sc_hit);
  sc_hit->add_option("--v", cfg.v);
  sc_hit->add_option("--n", cfg.n);
  sc_hit->add_option("--dt", cfg.dt);
  sc_hit->add_option("--dx", cfg.dx);
  sc_hit->add_option("--xmin", cfg.x_min);
  sc_hit->add_option("--xmax", cfg.x_max);
  sc_hit->add_option("--env-seed", cfg.env_seed);
  sc_hit->add_option("--workers", cfg.workers);

  auto* sc_ta = app.add_subcommand("tail-annealed", "annealed deviation probability");
  add_common(sc_ta);
  sc_ta->add_option("--t", cfg.t);
  sc_ta->add_option("--u", cfg.u);
  sc_ta->add_option("--v", cfg.v);
  sc_ta->add_option("--event", event_name, "speedup_X|slowdown_X|speedup_H|slowdown_H");
  sc_ta->add_option("--n", cfg.n);
  sc_ta->add_option("--dt", cfg.dt);
  sc_ta->add_option("--dx", cfg.dx);
  sc_ta->add_option("--workers", cfg.workers);

  auto* sc_tq = app.add_subcommand("tail-quenched", "quenched deviation probability");
  add_common(sc_tq);
  sc_tq->add_option("--env-seed", cfg.env_seed)->required();
  sc_tq->add_option("--t", cfg.t);
  sc_tq->add_option("--u", cfg.u);
  sc_tq->add_option("--nu", cfg.nu);
  sc_tq->add_option("--v", cfg.v);
  sc_tq->add_option("--event", event_name);
  sc_tq->add_option("--n", cfg.n);
  sc_tq->add_option("--dt", cfg.dt);
  sc_tq->add_option("--dx", cfg.dx);
  sc_tq->add_option("--workers", cfg.workers);

  auto* sc_fit = app.add_subcommand("fit", "least-squares exponent fit on (u,p) rows");
  add_common(sc_fit);
  sc_fit->add_option("--in", fit_input, "CSV file with a u,p header")->required();
  sc_fit->add_option("--mode", mode_name, "log_vs_log|loglog_vs_log|logp_vs_log");

  auto* sc_const = app.add_subcommand("constants", "closed-form constants with quadrature checks");
  add_common(sc_const);

  auto* sc_ver = app.add_subcommand("verify", "run a quick verification suite");
  sc_ver->add_option("suite", suite, "identities|closedforms|all");
  sc_ver->add_option("--seed", cfg.seed);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    std::ofstream file;
    if (sc_env->parsed()) {
      const auto p = sample_potential(cfg.kappa, cfg.x_min, cfg.x_max, cfg.dx, cfg.seed);
      write_potential_csv(p, open_out(out_path, file));
    } else if (sc_val->parsed()) {
      const auto p = sample_potential(cfg.kappa, cfg.x_min, cfg.x_max, cfg.dx, cfg.seed);
      const auto vd = decompose_valleys(p, cfg.t, cfg.v, cfg.window);
      std::cout << valley_json(vd) << "\n";
    } else if (sc_sim->parsed()) {
      const auto p = sample_potential(cfg.kappa, cfg.x_min, cfg.x_max, cfg.dx,
                                      cfg.env_seed.value_or(cfg.seed));
      const auto table = scale_table(p);
      DiffusionConfig dc;
      dc.ds = cfg.dt;
      dc.seed = cfg.seed;
      const auto path = simulate_path(p, table, cfg.t, dc, x0);
      if (path.status != SimStatus::Ok) {
        std::cerr << "simulation stopped early (window or budget)\n";
        return 1;
      }
      auto& os = open_out(out_path, file);
      os << "t,x\n";
      os.precision(12);
      for (std::size_t i = 0; i < path.x.size(); ++i)
        os << path.time_at(i) << "," << path.x[i] << "\n";
    } else if (sc_hit->parsed()) {
      const auto p = sample_potential(cfg.kappa, cfg.x_min, cfg.x_max, cfg.dx,
                                      cfg.env_seed.value_or(cfg.seed));
      const auto table = scale_table(p);
      std::vector<double> hs(cfg.n), t1(cfg.n), t2(cfg.n);
      const auto results = run_replicates(cfg.n, cfg.workers, [&](std::uint64_t i) {
        DiffusionConfig dc;
        dc.ds = cfg.dt;
        dc.seed = cfg.seed;
        dc.replicate = i;
        const auto r = first_hitting(p, table, cfg.v, dc);
        if (r.status != SimStatus::Ok) return std::numeric_limits<double>::quiet_NaN();
        hs[i] = r.h;
        t1[i] = r.theta1;
        t2[i] = r.theta2;
        return r.h;
      });
      if (!out_path.empty()) {
        auto& os = open_out(out_path, file);
        os << "replicate,H,theta1,theta2\n";
        os.precision(12);
        for (std::uint64_t i = 0; i < cfg.n; ++i)
          os << i << "," << hs[i] << "," << t1[i] << "," << t2[i] << "\n";
      }
      double mean = 0.0;
      std::uint64_t ok = 0;
      for (double h : results)
        if (!std::isnan(h)) {
          mean += h;
          ++ok;
        }
      mean /= ok ? static_cast<double>(ok) : 1.0;
      double var = 0.0;
      for (double h : results)
        if (!std::isnan(h)) var += (h - mean) * (h - mean);
      const double se = ok > 1 ? std::sqrt(var / (static_cast<double>(ok) - 1.0) /
                                           static_cast<double>(ok))
                               : 0.0;
      std::cout << batch_json(ok, mean, se, cfg.seed) << "\n";
    } else if (sc_ta->parsed() || sc_tq->parsed()) {
      TailSimConfig sim;
      sim.dx = cfg.dx;
      sim.ds = cfg.dt;
      sim.nu = cfg.nu;
      sim.workers = cfg.workers;
      if (sc_ta->count("--v") + sc_tq->count("--v") > 0) sim.v = cfg.v;
      const TailEvent event = tail_event_from_name(event_name);
      TailEstimate est;
      if (sc_ta->parsed()) {
        est = estimate_tail_annealed(cfg.kappa, cfg.t, cfg.u, event, cfg.n, cfg.seed, sim);
      } else {
        const double u_or_nu =
            (event == TailEvent::SlowdownH || event == TailEvent::SlowdownX) ? cfg.nu : cfg.u;
        est = estimate_tail_quenched(*cfg.env_seed, cfg.kappa, cfg.t, u_or_nu, event, cfg.n,
                                     cfg.seed, sim);
      }
      std::cout << tail_json(est) << "\n";
      if (!out_path.empty()) {
        auto& os = open_out(out_path, file);
        os << tail_csv_header() << "\n" << tail_csv_row(est) << "\n";
      }
    } else if (sc_fit->parsed()) {
      std::ifstream in(fit_input);
      if (!in) {
        std::cerr << "cannot open " << fit_input << "\n";
        return 2;
      }
      std::string line;
      std::getline(in, line);  // header
      std::vector<std::pair<double, double>> pts;
      while (std::getline(in, line)) {
        if (line.empty()) continue;
        const auto comma = line.find(',');
        if (comma == std::string::npos) continue;
        pts.push_back({std::stod(line.substr(0, comma)), std::stod(line.substr(comma + 1))});
      }
      FitMode mode;
      if (mode_name == "log_vs_log") {
        mode = FitMode::LogLogVsLogU;
      } else if (mode_name == "loglog_vs_log") {
        mode = FitMode::LogLogVsLogT;
      } else if (mode_name == "logp_vs_log") {
        mode = FitMode::LogPVsLogU;
      } else {
        std::cerr << "unknown fit mode: " << mode_name << "\n";
        return 2;
      }
      std::cout << fit_json(fit_exponent(pts, mode)) << "\n";
    } else if (sc_const->parsed()) {
      std::cout << constants_json(constants(cfg.kappa)) << "\n";
    } else if (sc_ver->parsed()) {
      return run_verify(suite, cfg);
    }
  } catch (const std::invalid_argument& e) {
    std::cerr << "invalid arguments: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "runtime failure: " << e.what() << "\n";
    return 1;
  }
  return 0;
}

namespace {

using namespace dbpot;

bool report(const char* name, bool ok) {
  std::cout << (ok ? "PASS  " : "FAIL  ") << name << "\n";
  return ok;
}

int run_verify(const std::string& suite, const Config& cfg) {
  bool all = true;
  const bool identities = suite == "identities" || suite == "all";
  const bool closedforms = suite == "closedforms" || suite == "all";
  if (!identities && !closedforms) {
    std::cerr << "unknown suite: " << suite << "\n";
    return 2;
  }
  if (identities) {
    const auto env = sample_potential(0.5, -60.0, 30.0, 0.01, cfg.seed);
    const auto table = scale_table(env);
    bool theta_ok = true;
    for (std::uint64_t i = 0; i < 20; ++i) {
      DiffusionConfig dc;
      dc.ds = 1e-3;
      dc.seed = cfg.seed;
      dc.replicate = i;
      const auto r = first_hitting(env, table, 3.0, dc);
      theta_ok = theta_ok && r.status == SimStatus::Ok &&
                 std::fabs(r.theta1 + r.theta2 - r.h) < 1e-8 * std::max(1.0, r.h);
    }
    all &= report("theta1 + theta2 equals H(v) pathwise", theta_ok);

    const auto vd = decompose_valleys(env, 8.0, 6.0);
    bool five_ok = true;
    for (std::uint64_t i = 0; i < 20; ++i) {
      DiffusionConfig dc;
      dc.ds = 1e-3;
      dc.seed = cfg.seed + 1;
      dc.replicate = i;
      const auto hb = decompose_hitting(env, table, vd, 6.0, dc);
      const double sum = hb.h_init + hb.h_dir + hb.h_back + hb.h_left + hb.h_right;
      five_ok = five_ok && hb.status == SimStatus::Ok &&
                std::fabs(sum - hb.h_total) < 1e-8 * std::max(1.0, hb.h_total);
    }
    all &= report("five-term split tiles H(v)", five_ok);

    bool occ_ok = true;
    for (std::uint64_t i = 0; i < 5; ++i) {
      SdeConfig sc;
      sc.dt = 1e-3;
      sc.seed = cfg.seed + 2;
      sc.replicate = i;
      const auto path = sample_bm(4.0, sc);
      const auto f = local_time_field(path, StopRule::fixed_time(4.0));
      occ_ok = occ_ok && std::fabs(f.integral() - 4.0) < 0.08;
    }
    all &= report("occupation identity on local-time fields", occ_ok);

    const auto u = reflected_from_min(env);
    double run = env.values.front();
    bool refl_ok = true;
    for (std::size_t i = 0; i < env.values.size(); ++i) {
      run = std::min(run, env.values[i]);
      refl_ok = refl_ok && u[i] == env.values[i] - run;
    }
    all &= report("reflected profile identity", refl_ok);
  }
  if (closedforms) {
    const auto rec = constants(0.5);
    all &= report("c_kappa(1/2) = 1/2", std::fabs(rec.c_kappa - 0.5) < 1e-12);
    all &= report("c_h quadrature matches the substitution",
                  std::fabs(rec.c_h_fullline_quadrature - rec.c_h_fullline) < 1e-6 &&
                      std::fabs(rec.c_h_halfline_quadrature - rec.c_h_halfline) < 1e-6);
    all &= report("laplace transform closed form",
                  std::fabs(pitman_yor_laplace(0.5, 1.0) - std::exp(-0.5)) < 1e-12);
    all &= report("deviation bound arithmetic",
                  std::fabs(besq_deviation_bound(1.0, 1.0) -
                            4.0 * std::sqrt(2.0) * std::exp(-1.0 / 16.0)) < 1e-12);
    const auto pe = predicted_exponents(0.5, 0.25);
    all &= report("predicted exponents",
                  std::fabs(pe.speedup - 2.0) < 1e-12 &&
                      std::fabs(pe.quenched_slowdown_doublelog - 1.0 / 3.0) < 1e-12);
  }
  return all ? 0 : 1;
}

}  // namespace
