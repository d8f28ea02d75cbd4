#include "dbpot/serialize.hpp"

#include <ostream>

#include "json.hpp"

namespace dbpot {

using nlohmann::json;

void write_potential_csv(const PotentialPath& path, std::ostream& os) {
  os << "# kappa=" << path.kappa << ",dx=" << path.dx << ",seed=" << path.seed << "\n";
  os << "x,W\n";
  os.precision(12);
  for (std::size_t i = 0; i < path.values.size(); ++i)
    os << path.x_at(i) << "," << path.values[i] << "\n";
}

void write_process_csv(const ProcessPath& path, std::ostream& os) {
  os << "t,value\n";
  os.precision(12);
  for (std::size_t i = 0; i < path.values.size(); ++i)
    os << path.time_at(i) << "," << path.values[i] << "\n";
}

void write_field_csv(const LocalTimeField& field, std::ostream& os) {
  os << "level,L\n";
  os.precision(12);
  for (std::size_t i = 0; i < field.levels.size(); ++i)
    os << field.levels[i] << "," << field.l[i] << "\n";
}

std::string valley_json(const ValleyDecomposition& vd) {
  json j;
  j["t"] = vd.t;
  j["K"] = vd.k;
  j["D"] = vd.depth;
  j["i0"] = vd.i0;
  j["i1"] = vd.i1;
  j["certified"] = vd.certified;
  return j.dump();
}

std::string breakdown_json(const HittingBreakdown& hb) {
  json j;
  j["H_total"] = hb.h_total;
  j["H_init"] = hb.h_init;
  j["H_dir"] = hb.h_dir;
  j["H_back"] = hb.h_back;
  j["H_left"] = hb.h_left;
  j["H_right"] = hb.h_right;
  j["xi"] = hb.xi;
  j["B"] = hb.b_total;
  j["tube"] = hb.tube;
  return j.dump();
}

std::string exit_bound_json(const ExitBound& eb) {
  json j;
  j["a"] = eb.a;
  j["c"] = eb.c;
  j["D_plus"] = eb.d_plus;
  j["M"] = eb.m;
  j["lambda_star"] = eb.lambda_star;
  j["bound"] = eb.bound;
  return j.dump();
}

std::string tail_json(const TailEstimate& te) {
  json j;
  j["event"] = te.event;
  j["kappa"] = te.kappa;
  j["t"] = te.t;
  j["u"] = te.u;
  j["n"] = te.n;
  j["p_hat"] = te.p_hat;
  j["se"] = te.se;
  j["upper95"] = te.upper95;
  j["seed"] = te.seed;
  if (te.env_seed) j["env_seed"] = *te.env_seed;
  j["regime_warning"] = te.regime_warning;
  j["n_incomplete"] = te.n_incomplete;
  return j.dump();
}

std::string tail_csv_header() { return "event,kappa,t,u,n,p_hat,se,seed,env_seed"; }

std::string tail_csv_row(const TailEstimate& te) {
  std::string env = te.env_seed ? std::to_string(*te.env_seed) : "";
  return te.event + "," + json(te.kappa).dump() + "," + json(te.t).dump() + "," +
         json(te.u).dump() + "," + std::to_string(te.n) + "," + json(te.p_hat).dump() + "," +
         json(te.se).dump() + "," + std::to_string(te.seed) + "," + env;
}

std::string fit_json(const ExponentFit& fit) {
  json j;
  j["slope"] = fit.slope;
  j["intercept"] = fit.intercept;
  j["r2"] = fit.r2;
  j["n_used"] = fit.n_used;
  j["n_rejected"] = fit.n_rejected;
  return j.dump();
}

std::string constants_json(const ConstantsRecord& rec) {
  json j;
  j["kappa"] = rec.kappa;
  j["c_kappa"] = rec.c_kappa;
  j["c_h_halfline"] = rec.c_h_halfline;
  j["c_h_fullline"] = rec.c_h_fullline;
  j["c_h_halfline_quadrature"] = rec.c_h_halfline_quadrature;
  j["c_h_fullline_quadrature"] = rec.c_h_fullline_quadrature;
  return j.dump();
}

std::string batch_json(std::uint64_t n, double mean, double se, std::uint64_t seed) {
  json j;
  j["n"] = n;
  j["mean"] = mean;
  j["se"] = se;
  j["seed"] = seed;
  return j.dump();
}

}  // namespace dbpot
