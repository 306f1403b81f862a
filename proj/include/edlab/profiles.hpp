#pragma once

#include <algorithm>
#include <cmath>
#include <optional>
#include <utility>
#include <vector>

#include <edlab/errors.hpp>
#include <edlab/polynomial.hpp>

namespace edlab {

// Radial velocity profile v(r) on [0, R], given as a polynomial coefficient
// list in ascending powers of r. The nondegeneracy order m is the smallest
// integer such that v', ..., v^(m) have no common zero on [0, R].
struct VelocityProfile {
  poly::Poly coeffs;
  double radius = 1.0;
  int order = 0;      // nondegeneracy order m, cached at construction
  int order_cap = 8;  // largest m searched

  double eval(double r) const { return poly::eval(coeffs, r); }
  double deriv(double r, int n = 1) const {
    return poly::eval(poly::derivative(coeffs, n), r);
  }

  // Range of v over [0, R] (exact for polynomials: endpoints + critical points).
  std::pair<double, double> range() const {
    double lo = std::min(eval(0.0), eval(radius));
    double hi = std::max(eval(0.0), eval(radius));
    for (double rc : poly::roots_in(poly::derivative(coeffs), 0.0, radius)) {
      const double vc = eval(rc);
      lo = std::min(lo, vc);
      hi = std::max(hi, vc);
    }
    return {lo, hi};
  }
};

// Finite union of disjoint closed intervals inside [0, R], sorted by
// left endpoint, with its total length.
struct IntervalSet {
  std::vector<std::pair<double, double>> intervals;
  double measure = 0.0;

  bool empty() const { return intervals.empty(); }

  bool contains(double x, double slack = 0.0) const {
    for (const auto& [lo, hi] : intervals)
      if (x >= lo - slack && x <= hi + slack) return true;
    return false;
  }

  double distance(double x) const {
    double d = std::numeric_limits<double>::infinity();
    for (const auto& [lo, hi] : intervals) {
      if (x < lo)
        d = std::min(d, lo - x);
      else if (x > hi)
        d = std::min(d, x - hi);
      else
        return 0.0;
    }
    return d;
  }

  static IntervalSet from_sorted(std::vector<std::pair<double, double>> iv) {
    IntervalSet s;
    // merge touching/overlapping neighbours
    for (auto& [lo, hi] : iv) {
      if (!s.intervals.empty() && lo <= s.intervals.back().second + 1e-13) {
        s.intervals.back().second = std::max(s.intervals.back().second, hi);
      } else {
        s.intervals.push_back({lo, hi});
      }
    }
    for (const auto& [lo, hi] : s.intervals) s.measure += hi - lo;
    return s;
  }
};

// Interval covering of the inflated level-set neighbourhood: closed balls of
// radius R0*delta + delta^m around the level-set points r_i, clipped to [0, R].
struct CoveringResult {
  std::vector<std::pair<double, double>> family;
  double total_length = 0.0;          // sum of clipped interval lengths
  std::vector<double> roots;          // level-set points r_i
  std::vector<int> local_orders;      // dominating derivative order n_i at r_i
  double inflation_radius = 0.0;      // R0
  int count = 0;                      // number of intervals
};

// Smallest m <= order_cap such that the first m derivatives of v have no
// common zero on [0, radius]. Throws NoValidOrder when none exists (e.g. a
// constant profile).
inline int detect_order(const poly::Poly& coeffs, double radius,
                        int order_cap = 8) {
  if (radius <= 0.0) throw Error(ErrorCode::InvalidArgument, "radius must be positive");
  if (order_cap < 1) throw Error(ErrorCode::InvalidArgument, "order_cap must be >= 1");
  const poly::Poly d1 = poly::derivative(coeffs);
  if (poly::degree(d1) < 0)  // v' == 0: every derivative vanishes everywhere
    throw Error(ErrorCode::NoValidOrder, "all derivatives vanish identically");

  // Candidate common zeros are the zeros of v' (including endpoints when v'
  // vanishes there; roots_in covers [0, R] endpoints).
  const std::vector<double> zeros = poly::roots_in(d1, 0.0, radius);
  if (zeros.empty()) return 1;

  std::vector<poly::Poly> derivs{d1};
  for (int m = 2; m <= order_cap; ++m)
    derivs.push_back(poly::derivative(derivs.back()));

  for (int m = 1; m <= order_cap; ++m) {
    bool ok = true;
    for (double z : zeros) {
      bool nonzero = false;
      for (int n = 1; n <= m; ++n) {
        const double scale = poly::value_scale(derivs[n - 1], 0.0, radius);
        if (std::abs(poly::eval(derivs[n - 1], z)) > 1e-9 * scale) {
          nonzero = true;
          break;
        }
      }
      if (!nonzero) {
        ok = false;
        break;
      }
    }
    if (ok) return m;
  }
  throw Error(ErrorCode::NoValidOrder, "no order <= cap separates the derivatives");
}

inline VelocityProfile make_profile(poly::Poly coeffs, double radius,
                                    int order_cap = 8) {
  VelocityProfile p;
  p.coeffs = std::move(coeffs);
  p.radius = radius;
  p.order_cap = order_cap;
  p.order = detect_order(p.coeffs, radius, order_cap);
  return p;
}

// All r in [0, R] with v(r) = lambda, each located to absolute accuracy tol.
inline std::vector<double> level_set(const VelocityProfile& p, double lambda,
                                     double tol = 1e-12) {
  if (tol <= 0.0) throw Error(ErrorCode::InvalidArgument, "tol must be positive");
  poly::Poly q = p.coeffs;
  if (q.empty()) q.push_back(0.0);
  q[0] -= lambda;
  return poly::roots_in(q, 0.0, p.radius, tol);
}

namespace detail {

// Union of {r in [0,R] : |v(r) - lambda| < eps} as closed intervals, obtained
// by exact root isolation of v - lambda -+ eps and midpoint classification.
inline IntervalSet sublevel_band(const VelocityProfile& p, double lambda,
                                 double eps) {
  std::vector<double> cuts{0.0, p.radius};
  for (double s : {-eps, eps}) {
    poly::Poly q = p.coeffs;
    if (q.empty()) q.push_back(0.0);
    q[0] -= lambda + s;
    for (double r : poly::roots_in(q, 0.0, p.radius)) cuts.push_back(r);
  }
  std::sort(cuts.begin(), cuts.end());
  std::vector<std::pair<double, double>> iv;
  for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
    const double a = cuts[i], b = cuts[i + 1];
    if (b - a <= 1e-15) continue;
    if (std::abs(p.eval(0.5 * (a + b)) - lambda) < eps) {
      if (!iv.empty() && a <= iv.back().second + 1e-13)
        iv.back().second = b;
      else
        iv.push_back({a, b});
    }
  }
  return IntervalSet::from_sorted(std::move(iv));
}

inline IntervalSet inflate(const IntervalSet& s, double eps, double radius) {
  std::vector<std::pair<double, double>> iv;
  iv.reserve(s.intervals.size());
  for (const auto& [lo, hi] : s.intervals)
    iv.push_back({std::max(0.0, lo - eps), std::min(radius, hi + eps)});
  return IntervalSet::from_sorted(std::move(iv));
}

}  // namespace detail

// The value neighbourhood E = {r : |v(r) - lambda| < delta^m} and its radial
// inflation E~ = {r : dist(r, E) < delta^m}, both clipped to [0, R].
inline std::pair<IntervalSet, IntervalSet> neighborhood_sets(
    const VelocityProfile& p, double lambda, double delta) {
  if (delta <= 0.0) throw Error(ErrorCode::InvalidArgument, "delta must be positive");
  const double eps = std::pow(delta, p.order);
  IntervalSet e = detail::sublevel_band(p, lambda, eps);
  IntervalSet et = detail::inflate(e, eps, p.radius);
  return {std::move(e), std::move(et)};
}

struct CoveringOptions {
  double delta0 = 0.25;     // largest admissible delta
  int max_doublings = 14;   // R0 growth cap before CoverageFailure
  int samples_per_interval = 257;
};

// Covering of E~ by intervals of radius R0*delta + delta^m around the
// level-set points of clamp(lambda, range v). R0 starts from the local Taylor
// scale 2 * min_n (n!/|v^(n)(r_i)|)^{1/n} and doubles until sampled
// containment holds.
inline CoveringResult covering(const VelocityProfile& p, double lambda,
                               double delta, const CoveringOptions& opt = {}) {
  if (delta <= 0.0 || delta > opt.delta0)
    throw Error(ErrorCode::InvalidArgument, "delta must lie in (0, delta0]");
  const double eps = std::pow(delta, p.order);
  auto [e, et] = neighborhood_sets(p, lambda, delta);

  CoveringResult res;
  if (et.empty()) return res;

  const auto [vlo, vhi] = p.range();
  const double lam_c = std::clamp(lambda, vlo, vhi);
  res.roots = level_set(p, lam_c);
  if (res.roots.empty())  // cannot happen for attained values; guard anyway
    throw Error(ErrorCode::DegenerateProfile, "no level-set points for clamped level");

  double r0_seed = 0.0;
  for (double ri : res.roots) {
    double best = std::numeric_limits<double>::infinity();
    int best_n = p.order;
    double fact = 1.0;
    for (int n = 1; n <= p.order; ++n) {
      fact *= n;
      const double dn = std::abs(p.deriv(ri, n));
      if (dn < 1e-12) continue;
      const double scale = std::pow(fact / dn, 1.0 / n);
      if (scale < best) {
        best = scale;
        best_n = n;
      }
    }
    if (!std::isfinite(best)) best = 1.0;
    res.local_orders.push_back(best_n);
    r0_seed = std::max(r0_seed, 2.0 * best);
  }
  r0_seed = std::clamp(r0_seed, 1.0, 1e3);

  double r0 = r0_seed;
  for (int attempt = 0; attempt <= opt.max_doublings; ++attempt, r0 *= 2.0) {
    std::vector<std::pair<double, double>> fam;
    for (double ri : res.roots)
      fam.push_back({std::max(0.0, ri - r0 * delta - eps),
                     std::min(p.radius, ri + r0 * delta + eps)});
    std::sort(fam.begin(), fam.end());

    auto covered = [&](double x) {
      for (const auto& [lo, hi] : fam)
        if (x >= lo - 1e-12 && x <= hi + 1e-12) return true;
      return false;
    };
    bool ok = true;
    for (const auto& [lo, hi] : et.intervals) {
      for (int j = 0; j < opt.samples_per_interval && ok; ++j) {
        const double x =
            lo + (hi - lo) * j / static_cast<double>(opt.samples_per_interval - 1);
        ok = covered(x);
      }
      if (!ok) break;
    }
    if (ok) {
      res.family = std::move(fam);
      res.inflation_radius = r0;
      res.count = static_cast<int>(res.family.size());
      for (const auto& [lo, hi] : res.family) res.total_length += hi - lo;
      return res;
    }
  }
  throw Error(ErrorCode::CoverageFailure,
              "inflated covering failed sampled containment");
}

// Empirical covering constant: max over a (lambda, delta) grid of
// total_length / delta. The grid follows the covering-length property: lambda
// spans [min v - 1, max v + 1], delta runs over half-decades 1e-1 .. 1e-3.
inline double estimate_covering_constant(const VelocityProfile& p,
                                         int lambda_samples = 101) {
  const auto [vlo, vhi] = p.range();
  double c0 = 0.0;
  for (double ld = -1.0; ld >= -3.0 - 1e-9; ld -= 0.5) {
    const double delta = std::pow(10.0, ld);
    for (int i = 0; i < lambda_samples; ++i) {
      const double lam =
          (vlo - 1.0) + (vhi - vlo + 2.0) * i / static_cast<double>(lambda_samples - 1);
      const CoveringResult cov = covering(p, lam, delta);
      c0 = std::max(c0, cov.total_length / delta);
    }
  }
  return c0;
}

}  // namespace edlab
