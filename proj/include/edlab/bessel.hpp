#pragma once

#include <cmath>

#include <edlab/errors.hpp>

namespace edlab {

// index-th positive root of J_ell' by bracketing scan + bisection. Reference
// values for the Neumann eigenvalues of the radial Laplacian: the ell = 0
// kernel (constant mode) corresponds to the trivial root and is excluded.
inline double bessel_deriv_root(int ell, int index) {
  if (index < 1) throw Error(ErrorCode::InvalidArgument, "index must be >= 1");
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
  throw Error(ErrorCode::NonConvergence, "root scan exhausted");
}

}  // namespace edlab
