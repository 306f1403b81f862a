#pragma once

#include <random>

#include <edlab/grid.hpp>

namespace edlab {

// Unit-norm iid complex Gaussian nodal data (rough test vectors).
inline VectorXcd random_nodal(const RadialGrid& grid, std::mt19937_64& rng) {
  std::normal_distribution<double> nd;
  VectorXcd g(grid.size());
  for (int i = 0; i < grid.size(); ++i) g(i) = Complex(nd(rng), nd(rng));
  return g / weighted_norm(g, grid);
}

// Unit-norm smooth random field: a low-order Legendre expansion with 1/(1+j^2)
// coefficient decay, placed inside the mode's trial space (times r^|ell|).
inline VectorXcd random_smooth(const RadialGrid& grid, std::mt19937_64& rng,
                               int modes = 16) {
  std::normal_distribution<double> nd;
  const int n = grid.size();
  const int p = std::abs(grid.ell);

  // map node coordinate to [-1, 1]: r for ell = 0, s = r^2 otherwise
  VectorXd x(n);
  for (int i = 0; i < n; ++i) {
    const double c = (grid.ell == 0) ? grid.r(i) / grid.radius
                                     : (grid.r(i) * grid.r(i)) /
                                           (grid.radius * grid.radius);
    x(i) = 2.0 * c - 1.0;
  }

  VectorXcd g = VectorXcd::Zero(n);
  VectorXd pm = VectorXd::Zero(n), pk = VectorXd::Ones(n);
  for (int j = 0; j < modes; ++j) {
    const Complex cj(nd(rng), nd(rng));
    g += (cj / (1.0 + j * j)) * pk.cast<Complex>();
    VectorXd pn =
        ((2.0 * j + 1.0) * x.array() * pk.array() - j * pm.array()) / (j + 1.0);
    pm = pk;
    pk = pn;
  }
  if (p != 0) g.array() *= grid.r.array().pow(p).cast<Complex>();
  return g / weighted_norm(g, grid);
}

}  // namespace edlab
