#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <vector>

namespace edlab::poly {

// A polynomial is a coefficient list in ascending powers: p(x) = sum c[i] x^i.
using Poly = std::vector<double>;

inline double eval(const Poly& p, double x) {
  double acc = 0.0;
  for (std::size_t i = p.size(); i-- > 0;) acc = acc * x + p[i];
  return acc;
}

inline Poly derivative(const Poly& p) {
  if (p.size() <= 1) return {};
  Poly d(p.size() - 1);
  for (std::size_t i = 1; i < p.size(); ++i) d[i - 1] = p[i] * static_cast<double>(i);
  return d;
}

// n-th derivative, exact coefficient arithmetic.
inline Poly derivative(const Poly& p, int n) {
  Poly d = p;
  for (int i = 0; i < n; ++i) d = derivative(d);
  return d;
}

// Drops trailing coefficients that are negligible against the largest one,
// so that e.g. expanded products with cancelled leading terms get the right
// effective degree.
inline Poly trimmed(const Poly& p) {
  double scale = 0.0;
  for (double c : p) scale = std::max(scale, std::abs(c));
  if (scale == 0.0) return {};
  Poly q = p;
  while (!q.empty() && std::abs(q.back()) <= 1e-14 * scale) q.pop_back();
  return q;
}

inline int degree(const Poly& p) { return static_cast<int>(trimmed(p).size()) - 1; }

// Magnitude scale of p on [lo, hi], used for "is this value numerically zero"
// decisions during root isolation.
inline double value_scale(const Poly& p, double lo, double hi) {
  const double xm = std::max({1.0, std::abs(lo), std::abs(hi)});
  double s = 0.0, xp = 1.0;
  for (double c : p) {
    s += std::abs(c) * xp;
    xp *= xm;
  }
  return std::max(s, 1e-300);
}

namespace detail {

inline double bisect(const Poly& p, double a, double b, double fa, double tol) {
  // fa and f(b) have opposite signs on entry.
  for (int it = 0; it < 200 && (b - a) > tol; ++it) {
    const double m = 0.5 * (a + b);
    const double fm = eval(p, m);
    if (fm == 0.0) return m;
    if ((fa < 0.0) == (fm < 0.0)) {
      a = m;
      fa = fm;
    } else {
      b = m;
    }
  }
  return 0.5 * (a + b);
}

inline void roots_rec(const Poly& p, double lo, double hi, double tol,
                      double zero_tol, std::vector<double>& out) {
  const Poly q = trimmed(p);
  const int deg = static_cast<int>(q.size()) - 1;
  if (deg <= 0) return;  // constant (or identically ~0): no isolated roots
  if (deg == 1) {
    const double r = -q[0] / q[1];
    if (r >= lo - tol && r <= hi + tol) out.push_back(std::clamp(r, lo, hi));
    return;
  }
  // Subdivide at critical points; p is strictly monotone between them, so each
  // cell holds at most one root, found by sign change or by a (numerically)
  // vanishing cell endpoint. Multiple roots are roots of p' and are picked up
  // as vanishing endpoints.
  std::vector<double> crit;
  roots_rec(derivative(q), lo, hi, tol, zero_tol, crit);
  std::vector<double> pts;
  pts.push_back(lo);
  for (double c : crit)
    if (c > lo + tol && c < hi - tol) pts.push_back(c);
  pts.push_back(hi);
  std::sort(pts.begin(), pts.end());

  for (std::size_t i = 0; i + 1 < pts.size(); ++i) {
    const double a = pts[i], b = pts[i + 1];
    const double fa = eval(q, a), fb = eval(q, b);
    const bool za = std::abs(fa) <= zero_tol, zb = std::abs(fb) <= zero_tol;
    if (za) out.push_back(a);
    if (!za && !zb && (fa < 0.0) != (fb < 0.0))
      out.push_back(bisect(q, a, b, fa, tol));
    if (zb && i + 2 == pts.size()) out.push_back(b);  // right endpoint once
  }
}

}  // namespace detail

// All real roots of p on [lo, hi], sorted and deduplicated, each located to
// absolute accuracy tol. Roots of even multiplicity are found through the
// critical points of p.
inline std::vector<double> roots_in(const Poly& p, double lo, double hi,
                                    double tol = 1e-13) {
  std::vector<double> out;
  const double zero_tol = 1e-12 * value_scale(p, lo, hi);
  detail::roots_rec(p, lo, hi, tol, zero_tol, out);
  std::sort(out.begin(), out.end());
  std::vector<double> dedup;
  for (double r : out) {
    if (dedup.empty() || r - dedup.back() > std::max(tol, 1e-12 * (hi - lo)))
      dedup.push_back(r);
  }
  return dedup;
}

}  // namespace edlab::poly
