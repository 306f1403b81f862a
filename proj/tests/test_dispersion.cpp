#include <catch2/catch_amalgamated.hpp>

#include <edlab/dispersion.hpp>

#include "support.hpp"

using namespace edlab;

TEST_CASE("split wavenumber integral") {
  SECTION("short-time limit of the low branch") {
    const auto [lo, hi] = k_integral(1e-3, 1e-9, 2, 1.0);
    REQUIRE(lo == Catch::Approx(2e-3).epsilon(1e-6));
    REQUIRE(hi > 0.0);
  }
  SECTION("long-time limit is the full Gaussian integral") {
    const double nu = 1e-3, c1 = 2.0, t = 1e9;
    const auto [lo, hi] = k_integral(nu, t, 2, c1);
    REQUIRE(lo == Catch::Approx(std::sqrt(M_PI * nu / (c1 * t))).epsilon(1e-6));
    (void)hi;
  }
  SECTION("low branch matches the error-function closed form") {
    for (double t : {0.01, 1.0, 100.0}) {
      for (double c1 : {0.5, 1.0, 2.0}) {
        const auto [lo, hi] = k_integral(1e-2, t, 1, c1);
        const double ref = std::sqrt(M_PI * 1e-2 / (c1 * t)) *
                           std::erf(std::sqrt(c1 * 1e-2 * t));
        REQUIRE(lo == Catch::Approx(ref).epsilon(1e-8));
        (void)hi;
      }
    }
  }
  SECTION("both branches against the fixed-grid trapezoid oracle") {
    const double nu = 1e-3, c1 = 1.0, t = 1.0;
    const int m = 2;
    const auto [lo, hi] = k_integral(nu, t, m, c1);
    const double ref_lo = 2.0 * oracle::trapezoid(
                                    [&](double k) {
                                      return std::exp(-c1 * k * k * t / nu);
                                    },
                                    0.0, nu, 10000000);
    REQUIRE(lo == Catch::Approx(ref_lo).epsilon(1e-6));
    const double beta = 2.0 / (m + 2.0);
    const double a = c1 * std::pow(nu, m / (m + 2.0)) * t;
    const double k_cut = std::pow((a * std::pow(nu, beta) + 37.0) / a, 1.0 / beta);
    const double ref_hi = 2.0 * oracle::trapezoid(
                                    [&](double k) {
                                      return std::exp(-a * std::pow(k, beta));
                                    },
                                    nu, k_cut, 10000000);
    REQUIRE(hi == Catch::Approx(ref_hi).epsilon(1e-6));
  }
  SECTION("strictly decreasing in time and in the rate constant") {
    const double nu = 1e-2;
    double prev = 1e300;
    for (double t : {0.1, 0.3, 1.0, 3.0, 10.0, 100.0}) {
      const auto [lo, hi] = k_integral(nu, t, 2, 1.0);
      REQUIRE(lo + hi < prev);
      prev = lo + hi;
    }
    prev = 1e300;
    for (double c1 : {0.25, 0.5, 1.0, 2.0, 4.0}) {
      const auto [lo, hi] = k_integral(nu, 1.0, 2, c1);
      REQUIRE(lo + hi < prev);
      prev = lo + hi;
    }
  }
  SECTION("high branch obeys the half-rate factorization") {
    for (double nu : {1e-2, 1e-3}) {
      for (double t : {0.5, 5.0, 50.0, 500.0}) {
        const auto [lo1, full] = k_integral(nu, t, 2, 1.0);
        const auto [lo2, half] = k_integral(nu, t, 2, 0.5);
        (void)lo1;
        (void)lo2;
        REQUIRE(full <= std::exp(-0.5 * nu * t) * half * (1.0 + 1e-10));
      }
    }
  }
  SECTION("rejects bad arguments") {
    REQUIRE_THROWS_AS(k_integral(-1.0, 1.0, 2, 1.0), Error);
    REQUIRE_THROWS_AS(k_integral(1e-3, 1.0, 0, 1.0), Error);
  }
}

TEST_CASE("dispersive envelope") {
  SECTION("pinned arithmetic value") {
    REQUIRE(dispersion_envelope(1e-2, 1.0, 1.0, 1.0) ==
            Catch::Approx(1.09005).margin(1e-4));
  }
  SECTION("long-time behaviour is the heat tail") {
    const double nu = 1e-3, c2 = 1.0, c2cap = 2.0;
    const double t = 1e9;
    REQUIRE(dispersion_envelope(nu, t, c2, c2cap) ==
            Catch::Approx(c2cap * std::sqrt(nu / t)).epsilon(1e-9));
  }
  SECTION("scaling identity (nu, t) -> (s nu, t/s)") {
    const double nu = 2e-3, t = 7.0, c2 = 0.4, c2cap = 1.3;
    for (double s : {0.5, 2.0, 10.0}) {
      REQUIRE(dispersion_envelope(s * nu, t / s, c2, c2cap) ==
              Catch::Approx(s * dispersion_envelope(nu, t, c2, c2cap))
                  .epsilon(1e-12));
    }
  }
}

TEST_CASE("envelope verification") {
  SECTION("ratios stay below 3 across orders and viscosities") {
    for (int m : {1, 2, 4}) {
      for (double nu : {1e-2, 1e-3}) {
        const auto grid = log_time_grid(0.1, 10.0 / nu, 40);
        const DispersionReport rep = verify_dispersion(nu, m, 1.0, 0.5, grid);
        REQUIRE(rep.max_ratio <= 3.0);
        REQUIRE(rep.c2_fit > 0.0);
        for (double v : rep.i_low) REQUIRE(v > 0.0);
        for (double v : rep.i_high) REQUIRE(v > 0.0);
      }
    }
  }
  SECTION("degenerate grids and inconsistent constants are rejected") {
    REQUIRE_THROWS_AS(verify_dispersion(1e-2, 2, 1.0, 0.5, {1.0}), Error);
    const auto grid = log_time_grid(0.1, 1000.0, 16);
    REQUIRE_THROWS_AS(verify_dispersion(1e-2, 2, 1.0, 0.9, grid), Error);
    REQUIRE_THROWS_AS(
        verify_dispersion(1e-2, 2, 1.0, 0.5, log_time_grid(1.0, 500.0, 8)),
        Error);  // span does not cover [0.1, 10/nu]
  }
  SECTION("dimensionless boundedness across the diffusive window") {
    // I(t) * min(sqrt(t/nu), t e^{c2 nu t}) stays below one constant; the
    // measured suprema sit near 4e2 and the bound is frozen with margin
    for (double nu : {1e-2, 1e-3}) {
      double bmax = 0.0;
      for (double t : log_time_grid(0.01 / nu, 100.0 / nu, 30)) {
        const auto [lo, hi] = k_integral(nu, t, 2, 1.0);
        const double b = (lo + hi) * std::min(std::sqrt(t / nu),
                                              t * std::exp(0.5 * nu * t));
        bmax = std::max(bmax, b);
      }
      REQUIRE(bmax <= 500.0);
    }
  }
}
