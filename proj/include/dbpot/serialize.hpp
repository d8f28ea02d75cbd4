#pragma once

#include <iosfwd>
#include <string>

#include "dbpot/diffusion.hpp"
#include "dbpot/localtime.hpp"
#include "dbpot/potential.hpp"
#include "dbpot/processes.hpp"
#include "dbpot/spectral.hpp"
#include "dbpot/tails.hpp"

namespace dbpot {

// CSV with a `# kappa=...,dx=...,seed=...` metadata line, then x,W rows.
void write_potential_csv(const PotentialPath& path, std::ostream& os);

// CSV (t,value).
void write_process_csv(const ProcessPath& path, std::ostream& os);

// CSV (level,L).
void write_field_csv(const LocalTimeField& field, std::ostream& os);

// JSON {t, K:[...], D:[...], i0, i1}.
std::string valley_json(const ValleyDecomposition& vd);

std::string breakdown_json(const HittingBreakdown& hb);

std::string exit_bound_json(const ExitBound& eb);

std::string tail_json(const TailEstimate& te);

// TailEstimate CSV: event,kappa,t,u,n,p_hat,se,seed,env_seed
std::string tail_csv_header();
std::string tail_csv_row(const TailEstimate& te);

std::string fit_json(const ExponentFit& fit);

std::string constants_json(const ConstantsRecord& rec);

// Monte Carlo batch summary {n, mean, se, seed}.
std::string batch_json(std::uint64_t n, double mean, double se, std::uint64_t seed);

}  // namespace dbpot
