#pragma once

#include <span>
#include <vector>

namespace rsim {

struct QuadratureRule {
  std::vector<double> nodes;
  std::vector<double> weights;
};

/// Gauss-Legendre rule on [0, 1]. Rules are computed once per node count and
/// cached; the returned reference stays valid for the life of the process.
const QuadratureRule& gauss_legendre_unit(int n);

/// Maximizes a unimodal function on [lo, hi] by golden-section search and
/// returns the best of the final bracket and both endpoints.
template <class F>
double golden_section_max(F&& f, double lo, double hi, double tol) {
  constexpr double inv_phi = 0.6180339887498949;
  double a = lo;
  double b = hi;
  double c = b - inv_phi * (b - a);
  double d = a + inv_phi * (b - a);
  double fc = f(c);
  double fd = f(d);
  while (b - a > tol) {
    if (fc < fd) {
      a = c;
      c = d;
      fc = fd;
      d = a + inv_phi * (b - a);
      fd = f(d);
    } else {
      b = d;
      d = c;
      fd = fc;
      c = b - inv_phi * (b - a);
      fc = f(c);
    }
  }
  double best = fc >= fd ? c : d;
  double fbest = fc >= fd ? fc : fd;
  const double flo = f(lo);
  if (flo > fbest) {
    best = lo;
    fbest = flo;
  }
  if (f(hi) > fbest) best = hi;
  return best;
}

}  // namespace rsim
