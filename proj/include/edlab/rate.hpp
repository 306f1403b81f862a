#pragma once

#include <cmath>

#include <edlab/errors.hpp>

namespace edlab {

// Enhanced-dissipation rate scale for a profile of nondegeneracy order m:
//   nu^{m/(m+2)} |k|^{2/(m+2)}   when nu <= |k|   (advection-dominated)
//   k^2 / nu                     when |k| <= nu   (diffusion-dominated)
// Both branches agree at nu = |k|.
inline double lambda_rate(double nu, double k, int m) {
  if (nu <= 0.0) throw Error(ErrorCode::InvalidArgument, "nu must be positive");
  if (m < 1) throw Error(ErrorCode::InvalidArgument, "order must be >= 1");
  if (k == 0.0)
    throw Error(ErrorCode::InvalidMode, "k = 0 carries no advective enhancement");
  const double ak = std::abs(k);
  if (nu <= ak)
    return std::pow(nu, m / (m + 2.0)) * std::pow(ak, 2.0 / (m + 2.0));
  return k * k / nu;
}

}  // namespace edlab
