#pragma once

#include <vector>

#include "dbpot/potential.hpp"

namespace dbpot {

// Nonnegative weight on [0, length], sampled on a uniform grid.
struct PotentialWeight {
  double length = 1.0;
  std::vector<double> v;  // values at uniform nodes, both ends included

  double at(double t) const;      // linear interpolation
  double vbar(double t) const;    // cumulative integral from 0 (trapezoid)
  bool is_zero() const;
};

// Largest lambda for which z'' = -lambda V z, z(0)=1, z'(0)=0 stays positive
// on [0, length). Shooting (RK4, 1e4 steps) with bisection bracketed by the
// two-sided integral bound below. Returns +infinity when V is identically 0.
double principal_lambda(const PotentialWeight& weight, double rel_tol = 1e-9);

struct BobkovBracket {
  double s = 0.0;        // sup (length - t) Vbar(t), the two-sided pivot
  double lambda = 0.0;   // principal_lambda(V)
  bool lower_ok = false; // s <= 1/lambda
  bool upper_ok = false; // 1/lambda <= 4 s
};

BobkovBracket bobkov_bracket(const PotentialWeight& weight);

// Certified exit-time Laplace bound on [a, c]: the weight
// V(x) = exp(-2 W_kappa(A^{-1}(A(c)-x))) extended flat out to c' with
// c' - a = 2(c - a) yields 1/lambda <= 64 (c-a) e^{D+} and
// E[exp(lambda (H(a) ^ H(c)))] <= 2 e^{M} for the diffusion started in [a, c].
struct ExitBound {
  double a = 0.0;
  double c = 0.0;
  double d_plus = 0.0;
  double m = 0.0;
  double lambda_star = 0.0;     // certified exponent 1/(64 (c-a) e^{D+})
  double bound = 0.0;           // 2 e^{M}
  double lambda_shooting = 0.0; // principal lambda of the constructed weight
};

ExitBound exit_laplace_bound(const PotentialPath& env, const ScaleTable& table, double a,
                             double c);

}  // namespace dbpot
