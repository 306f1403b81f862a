#pragma once

#include <memory>
#include <ostream>

#include <edlab/grid.hpp>
#include <edlab/profiles.hpp>

namespace edlab {

// Dense discretization of H = -nu * Delta_{r,theta} + i k v(r) restricted to
// one Fourier mode, with the natural Neumann condition at r = R.
//
// `matrix` acts on nodal values; `sym` is the weight-symmetrized form
// W^{1/2} H W^{-1/2} whose plain 2-norm equals the weighted operator norm.
// Its numerical range lies in Re >= 0 by construction (accretivity).
struct ModeOperator {
  double nu = 0.0;
  double k = 0.0;
  int ell = 0;
  std::shared_ptr<const RadialGrid> grid;
  MatrixXd laplacian;  // discretized (1/r) d_r (r d_r) - ell^2/r^2, nodal
  MatrixXcd matrix;    // H
  MatrixXcd sym;       // W^{1/2} H W^{-1/2}
  VectorXd v_nodes;    // v at the grid nodes

  int size() const { return grid ? grid->size() : 0; }
};

// L = -W^{-1} K. Negative semidefinite in the weighted inner product; for
// ell = 0 it annihilates constants (Neumann kernel).
inline MatrixXd assemble_laplacian(const RadialGrid& grid, int ell) {
  if (ell != grid.ell)
    throw Error(ErrorCode::InvalidMode,
                "grid was built for a different angular mode");
  return (-grid.w.array().inverse()).matrix().asDiagonal() * grid.stiffness;
}

inline ModeOperator assemble_operator(std::shared_ptr<const RadialGrid> grid,
                                      const VelocityProfile& profile, double nu,
                                      double k, int ell) {
  if (!grid) throw Error(ErrorCode::InvalidArgument, "null grid");
  if (nu <= 0.0) throw Error(ErrorCode::InvalidArgument, "nu must be positive");

  ModeOperator op;
  op.nu = nu;
  op.k = k;
  op.ell = ell;
  op.grid = std::move(grid);
  op.laplacian = assemble_laplacian(*op.grid, ell);
  op.v_nodes = op.grid->r.unaryExpr([&](double r) { return profile.eval(r); });

  const int n = op.size();
  op.matrix = (-nu) * op.laplacian.cast<Complex>();
  op.matrix.diagonal() += Complex(0.0, 1.0) * k * op.v_nodes.cast<Complex>();

  // nu * W^{-1/2} K W^{-1/2} + i k diag(v), symmetrized so the Hermitian part
  // is exactly positive semidefinite.
  MatrixXd ks = op.grid->sqrt_w.array().inverse().matrix().asDiagonal() *
                op.grid->stiffness *
                op.grid->sqrt_w.array().inverse().matrix().asDiagonal();
  ks = 0.5 * (ks + ks.transpose()).eval();
  op.sym = nu * ks.cast<Complex>();
  op.sym.diagonal() += Complex(0.0, 1.0) * k * op.v_nodes.cast<Complex>();
  (void)n;
  return op;
}

inline ModeOperator assemble_operator(const VelocityProfile& profile, double nu,
                                      double k, int ell, int n) {
  return assemble_operator(make_grid(profile.radius, n, ell), profile, nu, k, ell);
}

// Coordinate-format text dump (1-based indices, "i j re im" per entry) for
// external cross-checks.
inline void export_matrix(std::ostream& os, const MatrixXcd& m) {
  os << m.rows() << " " << m.cols() << " " << m.size() << "\n";
  for (Eigen::Index i = 0; i < m.rows(); ++i)
    for (Eigen::Index j = 0; j < m.cols(); ++j)
      os << i + 1 << " " << j + 1 << " " << m(i, j).real() << " "
         << m(i, j).imag() << "\n";
}

}  // namespace edlab
