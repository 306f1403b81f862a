#pragma once

#include <cmath>
#include <complex>
#include <memory>
#include <utility>

#include <Eigen/Dense>

#include <edlab/errors.hpp>

namespace edlab {

using Complex = std::complex<double>;
using Eigen::MatrixXcd;
using Eigen::MatrixXd;
using Eigen::VectorXcd;
using Eigen::VectorXd;

namespace quadrature {

struct GaussRule {
  VectorXd nodes;    // in (-1, 1), increasing
  VectorXd weights;  // for the weight (1-x)^alpha (1+x)^beta
  VectorXd dpoly;    // derivative of the orthonormal polynomial at the nodes
};

// Gauss rule for the Jacobi weight (1-x)^alpha (1+x)^beta via Golub-Welsch;
// dpoly feeds the nodal differentiation matrix below.
inline GaussRule gauss_jacobi(int n, double alpha, double beta) {
  const double ab = alpha + beta;
  VectorXd a(n), b(n);  // b(0) unused
  a(0) = (beta - alpha) / (ab + 2.0);
  for (int k = 1; k < n; ++k) {
    const double t = 2.0 * k + ab;
    a(k) = (beta * beta - alpha * alpha) / (t * (t + 2.0));
    const double num = 4.0 * k * (k + alpha) * (k + beta) * (k + ab);
    const double den = t * t * (t + 1.0) * (t - 1.0);
    b(k) = std::sqrt(num / den);
  }
  const double mu0 =
      std::pow(2.0, ab + 1.0) * std::tgamma(alpha + 1.0) * std::tgamma(beta + 1.0) /
      std::tgamma(ab + 2.0);

  MatrixXd jac = MatrixXd::Zero(n, n);
  for (int k = 0; k < n; ++k) {
    jac(k, k) = a(k);
    if (k > 0) jac(k, k - 1) = jac(k - 1, k) = b(k);
  }
  Eigen::SelfAdjointEigenSolver<MatrixXd> es(jac);
  if (es.info() != Eigen::Success)
    throw Error(ErrorCode::DecompositionFailure, "Golub-Welsch eigensolve failed");

  GaussRule rule;
  rule.nodes = es.eigenvalues();
  rule.weights.resize(n);
  for (int j = 0; j < n; ++j) {
    const double v0 = es.eigenvectors()(0, j);
    rule.weights(j) = mu0 * v0 * v0;
  }

  // Orthonormal three-term recurrence b_{k+1} p_{k+1} = (x-a_k) p_k - b_k p_{k-1};
  // evaluate p_n' at each node (p_n vanishes there).
  const double bn_num = 4.0 * n * (n + alpha) * (n + beta) * (n + ab);
  const double t = 2.0 * n + ab;
  const double bn = std::sqrt(bn_num / (t * t * (t + 1.0) * (t - 1.0)));
  rule.dpoly.resize(n);
  for (int j = 0; j < n; ++j) {
    const double x = rule.nodes(j);
    double pm = 0.0, p = 1.0 / std::sqrt(mu0);
    double dpm = 0.0, dp = 0.0;
    for (int k = 0; k < n; ++k) {
      const double bk1 = (k + 1 < n) ? b(k + 1) : bn;
      const double pn = ((x - a(k)) * p - (k > 0 ? b(k) : 0.0) * pm) / bk1;
      const double dpn = (p + (x - a(k)) * dp - (k > 0 ? b(k) : 0.0) * dpm) / bk1;
      pm = p;
      p = pn;
      dpm = dp;
      dp = dpn;
    }
    rule.dpoly(j) = dp;
  }
  return rule;
}

// Differentiation matrix of the Lagrange interpolant through Gauss nodes.
// Diagonal by the negative-sum trick, so constants are annihilated exactly.
inline MatrixXd differentiation_matrix(const GaussRule& rule) {
  const int n = static_cast<int>(rule.nodes.size());
  MatrixXd d(n, n);
  for (int j = 0; j < n; ++j) {
    double rowsum = 0.0;
    for (int k = 0; k < n; ++k) {
      if (k == j) continue;
      d(j, k) = rule.dpoly(j) / (rule.dpoly(k) * (rule.nodes(j) - rule.nodes(k)));
      rowsum += d(j, k);
    }
    d(j, j) = -rowsum;
  }
  return d;
}

}  // namespace quadrature

// Quadrature grid on (0, R) for the measure r dr, together with the nodal
// radial-derivative operator and the stiffness form of the Fourier-mode
// Laplacian (1/r) d_r (r d_r) - ell^2 / r^2.
//
// The trial space depends on the angular mode:
//   ell == 0 : all polynomials in r on Gauss-Jacobi(0,1) nodes; the Neumann
//              condition at r = R is natural and nothing is imposed at 0.
//   ell != 0 : functions r^|ell| q(r^2) with q polynomial, on Gauss-Legendre
//              nodes in s = r^2; the prefactor encodes the r -> 0 regularity.
// In both cases the stiffness matrix is assembled as G^T W G plus the
// centrifugal diagonal, so the discrete operator is exactly symmetric and
// positive semidefinite in the weighted inner product.
struct RadialGrid {
  double radius = 1.0;
  int ell = 0;
  VectorXd r;          // nodes, strictly increasing in (0, R)
  VectorXd w;          // weights: sum w_j f(r_j) ~ integral_0^R f r dr
  VectorXd sqrt_w;
  MatrixXd deriv;      // nodal d/dr within the mode's trial space
  MatrixXd stiffness;  // K: g^H K g = ||g'||_w^2 + ell^2 ||g/r||_w^2

  int size() const { return static_cast<int>(r.size()); }
};

inline RadialGrid build_grid(double radius, int n, int ell) {
  if (radius <= 0.0) throw Error(ErrorCode::InvalidArgument, "radius must be positive");
  if (n < 8) throw Error(ErrorCode::InvalidSize, "grid size must be at least 8");

  RadialGrid g;
  g.radius = radius;
  g.ell = ell;
  const int p = std::abs(ell);

  if (ell == 0) {
    const auto rule = quadrature::gauss_jacobi(n, 0.0, 1.0);
    g.r = (radius / 2.0) * (rule.nodes.array() + 1.0);
    g.w = (radius * radius / 4.0) * rule.weights;
    g.deriv = (2.0 / radius) * quadrature::differentiation_matrix(rule);
  } else {
    const auto rule = quadrature::gauss_jacobi(n, 0.0, 0.0);
    const double s_len = radius * radius;
    const VectorXd s = (s_len / 2.0) * (rule.nodes.array() + 1.0);
    g.r = s.array().sqrt();
    g.w = (s_len / 4.0) * rule.weights;
    const MatrixXd ds = (2.0 / s_len) * quadrature::differentiation_matrix(rule);
    // d/dr of r^p q(r^2) is p g / r + 2 r^{p+1} (d_s q) with q = r^{-p} g
    const VectorXd rp = g.r.array().pow(p);
    g.deriv = 2.0 * (g.r.array() * rp.array()).matrix().asDiagonal() * ds *
              rp.array().inverse().matrix().asDiagonal();
    g.deriv.diagonal() += (p * g.r.array().inverse()).matrix();
  }
  g.sqrt_w = g.w.array().sqrt();

  MatrixXd k = g.deriv.transpose() * g.w.asDiagonal() * g.deriv;
  if (p != 0)
    k.diagonal() += (static_cast<double>(p) * static_cast<double>(p) *
                     (g.w.array() / (g.r.array() * g.r.array())))
                        .matrix();
  g.stiffness = 0.5 * (k + k.transpose());
  return g;
}

inline std::shared_ptr<const RadialGrid> make_grid(double radius, int n, int ell) {
  return std::make_shared<const RadialGrid>(build_grid(radius, n, ell));
}

// Weighted pairing sum_j conj(g1_j) g2_j w_j ~ integral conj(g1) g2 r dr.
// The angular 2*pi factor is omitted throughout; all norms are relative.
inline Complex weighted_inner(const VectorXcd& g1, const VectorXcd& g2,
                              const RadialGrid& grid) {
  if (g1.size() != grid.r.size() || g2.size() != grid.r.size())
    throw Error(ErrorCode::SizeMismatch, "vector length does not match grid");
  return (g1.conjugate().array() * g2.array() * grid.w.array().cast<Complex>()).sum();
}

inline double weighted_norm(const VectorXcd& g, const RadialGrid& grid) {
  if (g.size() != grid.r.size())
    throw Error(ErrorCode::SizeMismatch, "vector length does not match grid");
  return std::sqrt((g.array().abs2() * grid.w.array()).sum());
}

// ||grad g||_w^2 = ||d_r g||_w^2 + ell^2 ||g/r||_w^2, evaluated from the grid
// primitives (independent of any assembled operator matrix).
inline double weighted_grad_norm_sq(const VectorXcd& g, const RadialGrid& grid) {
  if (g.size() != grid.r.size())
    throw Error(ErrorCode::SizeMismatch, "vector length does not match grid");
  const VectorXcd dg = grid.deriv * g;
  double out = (dg.array().abs2() * grid.w.array()).sum();
  if (grid.ell != 0) {
    const double p2 = static_cast<double>(grid.ell) * static_cast<double>(grid.ell);
    out += p2 * (g.array().abs2() * grid.w.array() /
                 (grid.r.array() * grid.r.array()))
                    .sum();
  }
  return out;
}

inline double quadrature_integral(const VectorXd& f, const RadialGrid& grid) {
  if (f.size() != grid.r.size())
    throw Error(ErrorCode::SizeMismatch, "vector length does not match grid");
  return (f.array() * grid.w.array()).sum();
}

}  // namespace edlab
