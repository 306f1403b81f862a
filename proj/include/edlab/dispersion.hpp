#pragma once

#include <cmath>
#include <functional>
#include <utility>
#include <vector>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include <edlab/errors.hpp>
#include <edlab/rate.hpp>

namespace edlab {

// Comparison of the mode-integrated decay factor against the dispersive
// envelope C2 (sqrt(nu/t) + exp(-c2 nu t)/t).
struct DispersionReport {
  std::vector<double> times;
  std::vector<double> i_low;     // |k| <= nu contribution
  std::vector<double> i_high;    // |k| > nu contribution
  std::vector<double> envelope;  // C2_fit (sqrt(nu/t) + exp(-c2 nu t)/t)
  std::vector<double> ratio;     // (i_low + i_high) / envelope
  double c1_used = 0.0;
  double c2_used = 0.0;
  double c2_fit = 0.0;       // C2 calibrated at the first grid time
  double max_ratio = 0.0;    // sup of ratio over the remaining grid
  double high_tail_max = 0.0;  // sup of i_high * t * exp(c1 nu t / 2)
};

namespace detail {

inline double adaptive_integral(const std::function<double(double)>& f,
                                double a, double b, double tol) {
  double err = 0.0;
  const double val =
      boost::math::quadrature::gauss_kronrod<double, 31>::integrate(
          f, a, b, 14, tol, &err);
  if (!(std::isfinite(val)) || (std::abs(val) > 0 && err > 1e3 * tol * std::abs(val) + 1e-300))
    throw Error(ErrorCode::QuadratureFailure, "adaptive quadrature did not converge");
  return val;
}

}  // namespace detail

// Split integral of exp(-c1 Lambda_{nu,k} t) over the real wavenumber line:
//   I_low  = integral over |k| <= nu of exp(-c1 k^2 t / nu) dk
//   I_high = integral over |k| > nu of exp(-c1 nu^{m/(m+2)} |k|^{2/(m+2)} t) dk
// by adaptive quadrature (relative tolerance 1e-8); the upper limit of the
// high branch is cut where the integrand falls below 1e-16 of its maximum.
inline std::pair<double, double> k_integral(double nu, double t, int m,
                                            double c1) {
  if (nu <= 0.0 || t <= 0.0 || c1 <= 0.0)
    throw Error(ErrorCode::InvalidArgument, "nu, t, c1 must be positive");
  if (m < 1) throw Error(ErrorCode::InvalidArgument, "order must be >= 1");
  const double tol = 1e-8;

  const double a_low = c1 * t / nu;
  const double i_low = 2.0 * detail::adaptive_integral(
                                 [&](double k) { return std::exp(-a_low * k * k); },
                                 0.0, nu, tol);

  // High branch in the variable xi = a |k|^beta, which compresses the domain
  // to a 37-unit window (the tail beyond it is below 1e-16 of the maximum):
  //   I_high = (2/beta) a^{-1/beta} integral_{x0}^{x0+37} e^{-xi} xi^{m/2} dxi
  const double beta = 2.0 / (m + 2.0);
  const double a_high = c1 * std::pow(nu, m / (m + 2.0)) * t;
  const double x0 = a_high * std::pow(nu, beta);
  const double q = 0.5 * m;
  const double i_high =
      (2.0 / beta) * std::pow(a_high, -1.0 / beta) *
      detail::adaptive_integral(
          [&](double x) { return std::exp(-x) * std::pow(x, q); }, x0,
          x0 + 37.0, tol);
  return {i_low, i_high};
}

// C2 (sqrt(nu/t) + exp(-c2 nu t)/t)
inline double dispersion_envelope(double nu, double t, double c2, double c2_cap) {
  if (nu <= 0.0 || t <= 0.0 || c2 <= 0.0 || c2_cap <= 0.0)
    throw Error(ErrorCode::InvalidArgument, "arguments must be positive");
  return c2_cap * (std::sqrt(nu / t) + std::exp(-c2 * nu * t) / t);
}

// Evaluate the split integral across t_grid, calibrate C2 at the first grid
// time, and check that the remaining ratios stay below 3. Throws
// EnvelopeViolation with the offending time otherwise.
inline DispersionReport verify_dispersion(double nu, int m, double c1,
                                          double c2,
                                          const std::vector<double>& t_grid) {
  if (t_grid.size() < 2)
    throw Error(ErrorCode::InvalidArgument, "time grid needs at least 2 points");
  for (std::size_t j = 1; j < t_grid.size(); ++j)
    if (t_grid[j] <= t_grid[j - 1])
      throw Error(ErrorCode::InvalidArgument, "time grid must be increasing");
  if (t_grid.front() > 0.1 * 1.05 || t_grid.back() < (10.0 / nu) * 0.95)
    throw Error(ErrorCode::InvalidArgument,
                "time grid must span [0.1, 10/nu]");
  if (c2 > 0.5 * c1 + 1e-12)
    throw Error(ErrorCode::InvalidArgument, "need c2 <= c1 / 2");

  DispersionReport rep;
  rep.c1_used = c1;
  rep.c2_used = c2;
  rep.times = t_grid;
  for (double t : t_grid) {
    const auto [lo, hi] = k_integral(nu, t, m, c1);
    rep.i_low.push_back(lo);
    rep.i_high.push_back(hi);
    rep.high_tail_max = std::max(
        rep.high_tail_max, hi * t * std::exp(0.5 * c1 * nu * t));
  }

  const double shape0 = std::sqrt(nu / t_grid[0]) +
                        std::exp(-c2 * nu * t_grid[0]) / t_grid[0];
  rep.c2_fit = (rep.i_low[0] + rep.i_high[0]) / shape0;

  for (std::size_t j = 0; j < t_grid.size(); ++j) {
    rep.envelope.push_back(
        dispersion_envelope(nu, t_grid[j], c2, rep.c2_fit));
    rep.ratio.push_back((rep.i_low[j] + rep.i_high[j]) / rep.envelope[j]);
    if (j > 0) rep.max_ratio = std::max(rep.max_ratio, rep.ratio[j]);
  }
  for (std::size_t j = 1; j < t_grid.size(); ++j)
    if (rep.ratio[j] > 3.0)
      throw Error(ErrorCode::EnvelopeViolation,
                  "integral exceeds 3 x envelope at t = " +
                      std::to_string(t_grid[j]));
  return rep;
}

// Log-spaced grid covering [t_lo, t_hi].
inline std::vector<double> log_time_grid(double t_lo, double t_hi, int count) {
  if (count < 2 || t_lo <= 0.0 || t_hi <= t_lo)
    throw Error(ErrorCode::InvalidArgument, "bad log grid parameters");
  std::vector<double> t(count);
  for (int i = 0; i < count; ++i)
    t[i] = t_lo * std::pow(t_hi / t_lo, i / static_cast<double>(count - 1));
  return t;
}

}  // namespace edlab
