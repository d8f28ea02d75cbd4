#include "dbpot/quadrature.hpp"

#include <cmath>

namespace dbpot {

namespace {

double simpson_step(const std::function<double(double)>& f, double a, double b, double fa,
                    double fm, double fb, double whole, double tol, int depth) {
  const double m = 0.5 * (a + b);
  const double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
  const double flm = f(lm), frm = f(rm);
  const double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
  const double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
  const double delta = left + right - whole;
  if (depth <= 0 || std::fabs(delta) <= 15.0 * tol) {
    return left + right + delta / 15.0;
  }
  return simpson_step(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1) +
         simpson_step(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1);
}

// 16-point Gauss-Legendre abscissae/weights on [-1,1].
const double kGx[8] = {0.0950125098376374, 0.2816035507792589, 0.4580167776572274,
                       0.6178762444026438, 0.7554044083550030, 0.8656312023878318,
                       0.9445750230732326, 0.9894009349916499};
const double kGw[8] = {0.1894506104550685, 0.1826034150449236, 0.1691565193950025,
                       0.1495959888165767, 0.1246289712555339, 0.0951585116824928,
                       0.0622535239386479, 0.0271524594117541};

}  // namespace

double adaptive_simpson(const std::function<double(double)>& f, double a, double b, double tol,
                        int max_depth) {
  if (a == b) return 0.0;
  const double m = 0.5 * (a + b);
  const double fa = f(a), fm = f(m), fb = f(b);
  const double whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
  return simpson_step(f, a, b, fa, fm, fb, whole, tol, max_depth);
}

double gauss16(const std::function<double(double)>& f, double a, double b) {
  const double c = 0.5 * (a + b);
  const double h = 0.5 * (b - a);
  double sum = 0.0;
  for (int i = 0; i < 8; ++i) {
    sum += kGw[i] * (f(c + h * kGx[i]) + f(c - h * kGx[i]));
  }
  return sum * h;
}

}  // namespace dbpot
