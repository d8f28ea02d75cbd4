#pragma once

#include <functional>

namespace dbpot {

// Adaptive Simpson on [a,b] with absolute/relative tolerance.
double adaptive_simpson(const std::function<double(double)>& f, double a, double b,
                        double tol = 1e-10, int max_depth = 40);

// Fixed-order Gauss-Legendre (16 nodes) on [a,b].
double gauss16(const std::function<double(double)>& f, double a, double b);

}  // namespace dbpot
