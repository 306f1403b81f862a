#include <catch2/catch_amalgamated.hpp>

#include <random>
#include <sstream>

#include <edlab/fields.hpp>
#include <edlab/mode_operator.hpp>

#include "support.hpp"

using namespace edlab;

namespace {

// eigenvalues of -Laplacian as the symmetric pencil (K, W)
VectorXd laplacian_spectrum(const RadialGrid& grid) {
  MatrixXd ks = grid.sqrt_w.array().inverse().matrix().asDiagonal() *
                grid.stiffness *
                grid.sqrt_w.array().inverse().matrix().asDiagonal();
  ks = 0.5 * (ks + ks.transpose()).eval();
  Eigen::SelfAdjointEigenSolver<MatrixXd> es(ks);
  return es.eigenvalues();
}

}  // namespace

TEST_CASE("radial grid construction") {
  SECTION("rejects undersized grids") {
    REQUIRE_THROWS_AS(build_grid(1.0, 4, 0), Error);
  }
  SECTION("nodes are interior and increasing") {
    for (int ell : {0, 1, 3}) {
      const RadialGrid g = build_grid(2.0, 48, ell);
      REQUIRE(g.r(0) > 0.0);
      REQUIRE(g.r(g.size() - 1) < 2.0);
      for (int i = 1; i < g.size(); ++i) REQUIRE(g.r(i) > g.r(i - 1));
    }
  }
  SECTION("nodes scale affinely with the radius") {
    for (int ell : {0, 2}) {
      const RadialGrid g1 = build_grid(1.0, 40, ell);
      const RadialGrid g2 = build_grid(2.0, 40, ell);
      for (int i = 0; i < 40; ++i)
        REQUIRE(g2.r(i) == Catch::Approx(2.0 * g1.r(i)).margin(1e-14));
    }
  }
  SECTION("quadrature identities") {
    for (int ell : {0, 1}) {
      const RadialGrid g = build_grid(1.0, 32, ell);
      REQUIRE(g.w.sum() == Catch::Approx(0.5).epsilon(1e-12));
      const VectorXd r2 = g.r.array().square();
      REQUIRE(quadrature_integral(r2, g) == Catch::Approx(0.25).epsilon(1e-12));
    }
  }
}

TEST_CASE("weighted inner product") {
  const RadialGrid g = build_grid(1.0, 32, 0);
  const VectorXcd one = VectorXcd::Ones(32);
  const VectorXcd r = g.r.cast<Complex>();
  REQUIRE(weighted_inner(one, one, g).real() == Catch::Approx(0.5).epsilon(1e-12));
  REQUIRE(weighted_inner(r, r, g).real() == Catch::Approx(0.25).epsilon(1e-12));
  REQUIRE(weighted_inner(one, r, g).real() ==
          Catch::Approx(1.0 / 3.0).epsilon(1e-12));
  REQUIRE_THROWS_AS(weighted_inner(one, VectorXcd::Ones(31), g), Error);
}

TEST_CASE("mode laplacian against Bessel references") {
  SECTION("Neumann kernel: constants are annihilated") {
    const RadialGrid g = build_grid(1.0, 128, 0);
    const MatrixXd lap = assemble_laplacian(g, 0);
    const VectorXd res = lap * VectorXd::Ones(128);
    const double wres = std::sqrt((res.array().square() * g.w.array()).sum()) /
                        std::sqrt(g.w.sum());
    REQUIRE(wres <= 1e-8);
  }
  SECTION("ell = 0: second eigenvalue is the squared first derivative root") {
    const RadialGrid g = build_grid(1.0, 128, 0);
    const VectorXd mu = laplacian_spectrum(g);
    const double ref = std::pow(oracle::bessel_deriv_root(0, 1), 2);
    REQUIRE(ref == Catch::Approx(14.68).epsilon(1e-3));  // sanity on the oracle
    REQUIRE(std::abs(mu(0)) <= 1e-8);
    REQUIRE(mu(1) == Catch::Approx(ref).epsilon(1e-6));
  }
  SECTION("ell = 1: smallest eigenvalue is the squared first derivative root") {
    const RadialGrid g = build_grid(1.0, 128, 1);
    const VectorXd mu = laplacian_spectrum(g);
    const double ref = std::pow(oracle::bessel_deriv_root(1, 1), 2);
    REQUIRE(ref == Catch::Approx(3.39).epsilon(1e-3));
    REQUIRE(mu(0) == Catch::Approx(ref).epsilon(1e-6));
  }
  SECTION("refinement converges at least at 4th order") {
    for (int ell : {0, 1}) {
      const double ref = std::pow(oracle::bessel_deriv_root(ell, 2), 2);
      const int idx = (ell == 0) ? 2 : 1;
      const double e16 =
          std::abs(laplacian_spectrum(build_grid(1.0, 16, ell))(idx) - ref) / ref;
      const double e32 =
          std::abs(laplacian_spectrum(build_grid(1.0, 32, ell))(idx) - ref) / ref;
      REQUIRE(e16 <= 1e-4);
      REQUIRE(e32 <= std::max(e16 / 16.0, 1e-11));
    }
  }
  SECTION("negative semidefiniteness in the weighted product") {
    const RadialGrid g = build_grid(1.0, 48, 2);
    const VectorXd mu = laplacian_spectrum(g);  // eigenvalues of -L
    REQUIRE(mu(0) >= -1e-8 * mu(mu.size() - 1));
  }
  SECTION("grid built for another mode is rejected") {
    const RadialGrid g = build_grid(1.0, 32, 1);
    REQUIRE_THROWS_AS(assemble_laplacian(g, 0), Error);
  }
}

TEST_CASE("mode operator assembly") {
  const VelocityProfile quad = make_profile({1.0, 0.0, -1.0}, 1.0);

  SECTION("k = 0 gives the Hermitian diffusion operator") {
    const ModeOperator op = assemble_operator(quad, 1e-3, 0.0, 0, 64);
    const MatrixXcd wh = op.grid->w.cast<Complex>().asDiagonal() * op.matrix;
    const double asym = (wh - wh.adjoint()).cwiseAbs().maxCoeff();
    REQUIRE(asym <= 1e-10 * wh.cwiseAbs().maxCoeff());
    const MatrixXcd diff =
        op.matrix + 1e-3 * op.laplacian.cast<Complex>();
    REQUIRE(diff.cwiseAbs().maxCoeff() <= 1e-14);
  }
  SECTION("constants ride on the advection term only") {
    const ModeOperator op = assemble_operator(quad, 1e-3, 1.0, 0, 64);
    const VectorXcd one = VectorXcd::Ones(64);
    const VectorXcd hg = op.matrix * one;
    const VectorXcd ref =
        (Complex(0.0, 1.0) * op.v_nodes.array().cast<Complex>()).matrix();
    REQUIRE(weighted_norm(VectorXcd(hg - ref), *op.grid) <= 1e-8);
  }
  SECTION("accretivity identity against the quadrature oracle") {
    const ModeOperator op = assemble_operator(quad, 1e-3, 1.0, 0, 128);
    std::mt19937_64 rng(17);
    for (int trial = 0; trial < 50; ++trial) {
      const VectorXcd g = random_nodal(*op.grid, rng);
      const double lhs =
          weighted_inner(g, VectorXcd(op.matrix * g), *op.grid).real();
      const double rhs = op.nu * weighted_grad_norm_sq(g, *op.grid);
      REQUIRE(lhs == Catch::Approx(rhs).epsilon(1e-6));
      REQUIRE(lhs >= -1e-8);
    }
  }
  SECTION("shifts do not touch the real part") {
    const ModeOperator op = assemble_operator(quad, 1e-2, 1.0, 1, 64);
    std::mt19937_64 rng(23);
    for (double lam : {-0.3, 0.2, 0.8, 1.7}) {
      const VectorXcd g = random_smooth(*op.grid, rng);
      VectorXcd hg = op.matrix * g;
      hg -= Complex(0.0, 1.0) * op.k * lam * g;
      const double lhs = weighted_inner(g, hg, *op.grid).real();
      const double rhs = op.nu * weighted_grad_norm_sq(g, *op.grid);
      REQUIRE(lhs == Catch::Approx(rhs).epsilon(1e-6));
    }
  }
  SECTION("imaginary part equals the advective pairing") {
    const ModeOperator op = assemble_operator(quad, 1e-3, 2.5, 0, 96);
    std::mt19937_64 rng(29);
    for (int trial = 0; trial < 20; ++trial) {
      const VectorXcd g = random_nodal(*op.grid, rng);
      const double lhs =
          weighted_inner(g, VectorXcd(op.matrix * g), *op.grid).imag();
      const double rhs =
          op.k *
          (g.array().abs2() * op.v_nodes.array() * op.grid->w.array()).sum();
      REQUIRE(lhs == Catch::Approx(rhs).epsilon(1e-8));
    }
  }
  SECTION("rejects nonpositive viscosity") {
    REQUIRE_THROWS_AS(assemble_operator(quad, 0.0, 1.0, 0, 32), Error);
  }
}

TEST_CASE("operator export") {
  const VelocityProfile quad = make_profile({1.0, 0.0, -1.0}, 1.0);
  const ModeOperator op = assemble_operator(quad, 1e-2, 1.0, 0, 8);
  std::ostringstream os;
  export_matrix(os, op.matrix);
  std::istringstream in(os.str());
  int rows, cols;
  long nnz;
  in >> rows >> cols >> nnz;
  REQUIRE(rows == 8);
  REQUIRE(cols == 8);
  REQUIRE(nnz == 64);
  int i, j;
  double re, im;
  REQUIRE(static_cast<bool>(in >> i >> j >> re >> im));
  REQUIRE(i == 1);
  REQUIRE(j == 1);
  REQUIRE(re == Catch::Approx(op.matrix(0, 0).real()));
}
