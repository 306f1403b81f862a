#pragma once

// Independent oracles for the test suites: kept free of the library's own
// computational paths (root isolation, adaptive quadrature, operator
// assembly) so they can arbitrate.

#include <cmath>
#include <functional>
#include <vector>

namespace oracle {

// Positive roots of J_ell' by scan + bisection on the standard library
// Bessel functions.
inline double bessel_deriv_root(int ell, int index) {
  auto f = [&](double x) {
    if (ell == 0) return -std::cyl_bessel_j(1.0, x);
    return 0.5 * (std::cyl_bessel_j(ell - 1.0, x) -
                  std::cyl_bessel_j(ell + 1.0, x));
  };
  int found = 0;
  double prev = 0.25, fprev = f(prev);
  for (double x = 0.30; x < 200.0; x += 0.05) {
    const double fx = f(x);
    if (fprev != 0.0 && (fprev < 0.0) != (fx < 0.0)) {
      double a = prev, b = x, fa = fprev;
      for (int it = 0; it < 200; ++it) {
        const double mid = 0.5 * (a + b), fm = f(mid);
        if ((fa < 0.0) == (fm < 0.0)) {
          a = mid;
          fa = fm;
        } else {
          b = mid;
        }
      }
      if (++found == index) return 0.5 * (a + b);
    }
    prev = x;
    fprev = fx;
  }
  return -1.0;
}

// Sign-change roots of a scalar function on [lo, hi] over a dense scan.
inline std::vector<double> bisection_roots(const std::function<double(double)>& f,
                                           double lo, double hi, int cells) {
  std::vector<double> roots;
  double prev = lo, fprev = f(lo);
  for (int i = 1; i <= cells; ++i) {
    const double x = lo + (hi - lo) * i / cells;
    const double fx = f(x);
    if (fprev == 0.0) roots.push_back(prev);
    if (fprev != 0.0 && fx != 0.0 && (fprev < 0.0) != (fx < 0.0)) {
      double a = prev, b = x, fa = fprev;
      for (int it = 0; it < 100; ++it) {
        const double mid = 0.5 * (a + b), fm = f(mid);
        if ((fa < 0.0) == (fm < 0.0)) {
          a = mid;
          fa = fm;
        } else {
          b = mid;
        }
      }
      roots.push_back(0.5 * (a + b));
    }
    prev = x;
    fprev = fx;
  }
  if (fprev == 0.0) roots.push_back(hi);
  return roots;
}

// Lebesgue measure of {r in [lo,hi] : pred(r)} by dense midpoint sampling.
inline double set_measure(const std::function<bool(double)>& pred, double lo,
                          double hi, long samples) {
  long count = 0;
  for (long i = 0; i < samples; ++i) {
    const double x = lo + (hi - lo) * (i + 0.5) / samples;
    if (pred(x)) ++count;
  }
  return (hi - lo) * static_cast<double>(count) / static_cast<double>(samples);
}

// Fixed-grid trapezoid rule.
inline double trapezoid(const std::function<double(double)>& f, double lo,
                        double hi, long cells) {
  double acc = 0.5 * (f(lo) + f(hi));
  for (long i = 1; i < cells; ++i) acc += f(lo + (hi - lo) * i / cells);
  return acc * (hi - lo) / cells;
}

}  // namespace oracle
