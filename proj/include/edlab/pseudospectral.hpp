#pragma once

#include <algorithm>
#include <cmath>
#include <limits>

#include <Eigen/SVD>

#include <edlab/mode_operator.hpp>
#include <edlab/profiles.hpp>
#include <edlab/rate.hpp>

namespace edlab {

// sigma_min(H - i k lambda) sampled over a uniform lambda grid, plus the
// refined minimizer.
struct SigmaCurve {
  VectorXd lambdas;
  VectorXd sigmas;
  double lambda_star = 0.0;  // refined minimizer
  double sigma_star = 0.0;   // refined minimum
};

struct PsaResult {
  double psi = 0.0;     // pseudospectral abscissa: inf over the imaginary axis
  double argmin = 0.0;  // lambda at the minimum
  SigmaCurve curve;
  double c1_effective = std::numeric_limits<double>::quiet_NaN();  // psi / Lambda
};

// Smallest singular value of H - i k lambda in the weighted inner product,
// computed from the weight-symmetrized matrix.
inline double sigma_min_at(const ModeOperator& op, double lambda) {
  MatrixXcd m = op.sym;
  m.diagonal().array() -= Complex(0.0, 1.0) * op.k * lambda;
  Eigen::BDCSVD<MatrixXcd> svd(m);
  if (svd.info() != Eigen::Success)
    throw Error(ErrorCode::DecompositionFailure, "SVD did not converge");
  return svd.singularValues()(svd.singularValues().size() - 1);
}

// Minimize sigma_min(H - i k lambda) over real lambda: coarse uniform grid
// over the range of v plus a quarter-range margin on each side, then
// golden-section refinement around the grid minimum. For shifts beyond the
// margin the imaginary-part bound sigma >= |k| dist(lambda, range v) makes
// the minimum interior. refine_tol <= 0 selects 1e-6 |k| range(v).
inline PsaResult pseudo_abscissa(const ModeOperator& op, int grid_count = 129,
                                 double refine_tol = -1.0, int order = 0) {
  if (grid_count < 33)
    throw Error(ErrorCode::InvalidArgument, "lambda grid needs >= 33 samples");

  const double vmin = op.v_nodes.minCoeff();
  const double vmax = op.v_nodes.maxCoeff();
  double range = vmax - vmin;
  const double margin = (range > 0.0) ? 0.25 * range : 0.25 * std::max(1.0, std::abs(vmax));
  const double lo = vmin - margin, hi = vmax + margin;

  PsaResult res;
  res.curve.lambdas.resize(grid_count);
  res.curve.sigmas.resize(grid_count);
  int ibest = 0;
  for (int i = 0; i < grid_count; ++i) {
    const double lam = lo + (hi - lo) * i / static_cast<double>(grid_count - 1);
    res.curve.lambdas(i) = lam;
    res.curve.sigmas(i) = sigma_min_at(op, lam);
    if (res.curve.sigmas(i) < res.curve.sigmas(ibest)) ibest = i;
  }

  double best_lam = res.curve.lambdas(ibest);
  double best_sig = res.curve.sigmas(ibest);

  if (op.k != 0.0) {
    if (refine_tol <= 0.0)
      refine_tol = 1e-6 * std::abs(op.k) * std::max(range, 1e-12);
    double a = res.curve.lambdas(std::max(0, ibest - 1));
    double b = res.curve.lambdas(std::min(grid_count - 1, ibest + 1));
    const double gr = 0.5 * (std::sqrt(5.0) - 1.0);
    double x1 = b - gr * (b - a), x2 = a + gr * (b - a);
    double f1 = sigma_min_at(op, x1), f2 = sigma_min_at(op, x2);
    for (int it = 0; it < 200 && (b - a) > refine_tol; ++it) {
      if (f1 <= f2) {
        b = x2;
        x2 = x1;
        f2 = f1;
        x1 = b - gr * (b - a);
        f1 = sigma_min_at(op, x1);
      } else {
        a = x1;
        x1 = x2;
        f1 = f2;
        x2 = a + gr * (b - a);
        f2 = sigma_min_at(op, x2);
      }
      if (f1 < best_sig) best_sig = f1, best_lam = x1;
      if (f2 < best_sig) best_sig = f2, best_lam = x2;
    }
  }

  res.curve.lambda_star = best_lam;
  res.curve.sigma_star = best_sig;
  res.psi = best_sig;
  res.argmin = best_lam;
  if (order >= 1 && op.k != 0.0)
    res.c1_effective = res.psi / lambda_rate(op.nu, op.k, order);
  return res;
}

// Effective resolvent constant min_lambda sigma_min(H - i k lambda) / Lambda.
inline double resolvent_lower_bound(const ModeOperator& op, int order,
                                    int grid_count = 129) {
  if (op.k == 0.0)
    throw Error(ErrorCode::InvalidMode,
                "resolvent constant is defined for k != 0 only");
  return pseudo_abscissa(op, grid_count, -1.0, order).c1_effective;
}

// Two-sided data for one inequality audit; the inequality holds when
// residual() is nonnegative (up to rounding).
struct BoundAudit {
  double lhs = 0.0;
  double rhs = 0.0;
  double chi_term = 0.0;  // multiplier-side bound on lhs (away audit only)
  double residual() const { return rhs - lhs; }
};

// Away-from-level-set audit:
//   integral over [0,R] \ E~ of |g|^2
//     <= 1/4 ||g||^2 + ( 1/(|k| d^m) + nu/(k^2 d^{2m+2}) ) ||H_l g|| ||g||.
// The cutoff multiplier chi(r) = clip(sign(v - lambda) dist(r, E)/d^m) feeds
// the diagnostic chi_term, which dominates the left side pointwise.
inline BoundAudit verify_away_bound(const ModeOperator& op,
                                    const VelocityProfile& profile,
                                    double lambda, double delta,
                                    const VectorXcd& g) {
  if (op.k == 0.0)
    throw Error(ErrorCode::InvalidMode, "away bound requires k != 0");
  if (delta <= 0.0) throw Error(ErrorCode::InvalidArgument, "delta must be positive");
  const RadialGrid& grid = *op.grid;
  if (g.size() != grid.r.size())
    throw Error(ErrorCode::SizeMismatch, "vector length does not match grid");

  const int m = profile.order;
  const double eps = std::pow(delta, m);
  auto [e, et] = neighborhood_sets(profile, lambda, delta);

  BoundAudit audit;
  for (int j = 0; j < grid.size(); ++j) {
    const double a2 = std::norm(g(j)) * grid.w(j);
    if (!et.contains(grid.r(j))) audit.lhs += a2;
    const double vml = op.v_nodes(j) - lambda;
    const double chi =
        e.empty() ? (vml >= 0.0 ? 1.0 : -1.0)
                  : std::clamp((vml >= 0.0 ? 1.0 : -1.0) * e.distance(grid.r(j)) / eps,
                               -1.0, 1.0);
    audit.chi_term += vml * chi * a2 / eps;
  }

  VectorXcd hg = op.matrix * g;
  hg -= Complex(0.0, 1.0) * op.k * lambda * g;
  const double ng = weighted_norm(g, grid);
  const double nhg = weighted_norm(hg, grid);
  const double coef = 1.0 / (std::abs(op.k) * eps) +
                      op.nu / (op.k * op.k * std::pow(delta, 2 * m + 2));
  audit.rhs = 0.25 * ng * ng + coef * nhg * ng;
  return audit;
}

// Near-level-set audit:
//   integral over E~ of |g|^2 <= 1/2 ||g||^2 + (2 C0^2 d^2 / nu) ||H_l g|| ||g||
// with C0 the profile's empirical covering constant (estimated when NaN).
inline BoundAudit verify_near_bound(const ModeOperator& op,
                                    const VelocityProfile& profile,
                                    double lambda, double delta,
                                    const VectorXcd& g,
                                    double c0 = std::numeric_limits<double>::quiet_NaN()) {
  if (delta <= 0.0) throw Error(ErrorCode::InvalidArgument, "delta must be positive");
  const RadialGrid& grid = *op.grid;
  if (g.size() != grid.r.size())
    throw Error(ErrorCode::SizeMismatch, "vector length does not match grid");
  if (std::isnan(c0)) c0 = estimate_covering_constant(profile);

  auto [e, et] = neighborhood_sets(profile, lambda, delta);
  BoundAudit audit;
  for (int j = 0; j < grid.size(); ++j)
    if (et.contains(grid.r(j))) audit.lhs += std::norm(g(j)) * grid.w(j);

  VectorXcd hg = op.matrix * g;
  hg -= Complex(0.0, 1.0) * op.k * lambda * g;
  const double ng = weighted_norm(g, grid);
  const double nhg = weighted_norm(hg, grid);
  audit.rhs = 0.5 * ng * ng + (2.0 * c0 * c0 * delta * delta / op.nu) * nhg * ng;
  return audit;
}

// Annulus mass against the Poincare-type product:
//   lhs = integral_{R1 <= r <= R2} |g|^2,  rhs = 2 (R2 - R1) ||g|| ||grad g||.
// The caller asserts lhs <= rhs only for admissible g; nonzero constants on
// the full disc violate the raw statement (rhs = 0) and are the documented
// counterexample.
inline std::pair<double, double> poincare_check(const RadialGrid& grid,
                                                const VectorXcd& g, double r1,
                                                double r2) {
  if (!(0.0 <= r1 && r1 <= r2 && r2 <= grid.radius + 1e-14))
    throw Error(ErrorCode::InvalidArgument, "need 0 <= R1 <= R2 <= R");
  if (g.size() != grid.r.size())
    throw Error(ErrorCode::SizeMismatch, "vector length does not match grid");
  double lhs = 0.0;
  for (int j = 0; j < grid.size(); ++j)
    if (grid.r(j) >= r1 && grid.r(j) <= r2) lhs += std::norm(g(j)) * grid.w(j);
  const double rhs = 2.0 * (r2 - r1) * weighted_norm(g, grid) *
                     std::sqrt(weighted_grad_norm_sq(g, grid));
  return {lhs, rhs};
}

}  // namespace edlab
