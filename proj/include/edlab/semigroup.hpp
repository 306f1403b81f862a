#pragma once

#include <atomic>
#include <cmath>
#include <cstdint>
#include <map>
#include <optional>
#include <thread>
#include <vector>

#include <Eigen/LU>
#include <unsupported/Eigen/MatrixFunctions>

#include <edlab/fields.hpp>
#include <edlab/mode_operator.hpp>
#include <edlab/pseudospectral.hpp>
#include <edlab/rate.hpp>

namespace edlab {

// Weighted-norm history of a mode under d_t g = -H g, with the fitted
// exponential envelope norm(t) ~ prefactor * norm(0) * exp(-rate * t).
struct DecayTrace {
  VectorXd times;
  VectorXd norms;
  double fit_rate = std::numeric_limits<double>::quiet_NaN();
  double fit_prefactor = std::numeric_limits<double>::quiet_NaN();
  double fit_residual = std::numeric_limits<double>::quiet_NaN();
  double window_lo = std::numeric_limits<double>::quiet_NaN();  // fit window in t
  double window_hi = std::numeric_limits<double>::quiet_NaN();
};

struct PropagateOptions {
  bool cross_check = true;  // verify norms against an eigendecomposition route
  double cross_check_tol = 1e-6;
  bool keep_states = false;
};

// Geometric time grid t_j = t0 * 2^{j/ppo} from t_min to t_max with a leading
// 0. Built so that gaps double exactly every ppo points, which lets the
// propagator reuse squared exponentials.
inline std::vector<double> decay_time_grid(double rate_scale,
                                           double t_min_factor = 1e-3,
                                           double t_max_factor = 200.0,
                                           int points_per_octave = 8) {
  if (rate_scale <= 0.0)
    throw Error(ErrorCode::InvalidArgument, "rate scale must be positive");
  const double t_min = t_min_factor / rate_scale;
  const double t_max = t_max_factor / rate_scale;
  std::vector<double> t{0.0};
  std::vector<double> seed;
  for (int j = 0; j < points_per_octave; ++j)
    seed.push_back(t_min * std::pow(2.0, j / static_cast<double>(points_per_octave)));
  std::size_t j = 0;
  double cur = seed[0];
  while (cur <= t_max) {
    t.push_back(cur);
    seed[j % seed.size()] *= 2.0;  // exact doubling
    ++j;
    cur = seed[j % seed.size()];
  }
  return t;
}

namespace detail {

// Propagator cache: exp(-gap * M) per distinct gap, reusing squares when a
// gap is exactly twice an earlier one. Entries smaller than half the current
// gap can never be needed again on an increasing grid and are evicted.
class ExpCache {
 public:
  explicit ExpCache(const MatrixXcd& m) : m_(m) {}

  const MatrixXcd& get(double gap) {
    auto it = cache_.find(gap);
    if (it == cache_.end()) {
      auto half = cache_.find(0.5 * gap);
      MatrixXcd e = (half != cache_.end()) ? MatrixXcd(half->second * half->second)
                                           : MatrixXcd(((-gap) * m_).exp());
      it = cache_.emplace(gap, std::move(e)).first;
    }
    for (auto jt = cache_.begin(); jt != cache_.end();) {
      if (jt->first < 0.5 * gap * (1.0 - 1e-12))
        jt = cache_.erase(jt);
      else
        ++jt;
    }
    return cache_.at(gap);
  }

 private:
  const MatrixXcd& m_;
  std::map<double, MatrixXcd> cache_;
};

// One pass of the 3-stage stiffly accurate L-stable SDIRK scheme (order 3)
// for u' = -M u over [0, t_end] hitting every grid time; returns the norms.
// Steps scale with elapsed time, which resolves every surviving decay mode;
// the advective phase limits its useful horizon to |k| range(v) t^(4/3) not
// too large, so it serves as a short-horizon reference.
inline VectorXd sdirk_norms(const MatrixXcd& m, const VectorXcd& u0,
                            const std::vector<double>& times, double step_scale) {
  static constexpr double kGamma = 0.4358665215084589994160194;
  const double b1 = -1.5 * kGamma * kGamma + 4.0 * kGamma - 0.25;
  const double b2 = 1.5 * kGamma * kGamma - 5.0 * kGamma + 1.25;
  const double a21 = 0.5 * (1.0 - kGamma);

  const Eigen::Index n = u0.size();
  VectorXd norms(static_cast<Eigen::Index>(times.size()));
  VectorXcd u = u0;
  norms(0) = u.norm();
  const MatrixXcd eye = MatrixXcd::Identity(n, n);

  for (std::size_t seg = 1; seg < times.size(); ++seg) {
    const double dt = times[seg] - times[seg - 1];
    const double scale = (times[seg - 1] > 0.0) ? times[seg - 1] : times[seg];
    const int steps = std::max(4, static_cast<int>(std::ceil(dt / (step_scale * scale))));
    const double h = dt / steps;
    Eigen::PartialPivLU<MatrixXcd> lu(eye + (h * kGamma) * m);
    for (int s = 0; s < steps; ++s) {
      const VectorXcd k1 = lu.solve(-(m * u));
      const VectorXcd k2 = lu.solve(-(m * (u + (h * a21) * k1)));
      const VectorXcd k3 = lu.solve(-(m * (u + h * (b1 * k1 + b2 * k2))));
      u += h * (b1 * k1 + b2 * k2 + kGamma * k3);
    }
    norms(static_cast<Eigen::Index>(seg)) = u.norm();
  }
  return norms;
}

struct EvolveResult {
  VectorXd times;
  MatrixXd norms;                  // times x columns
  std::vector<MatrixXcd> states;   // nodal states per time (when kept)
};

// Evolve a block of initial data through exp(-t H), tracking weighted norms.
// Works in the symmetrized frame, where the semigroup is a genuine 2-norm
// contraction, so squaring of cached exponentials cannot amplify.
inline EvolveResult evolve(const ModeOperator& op, const MatrixXcd& g0,
                           const std::vector<double>& t_grid,
                           bool include_axial, const PropagateOptions& opt) {
  if (t_grid.empty() || t_grid.front() != 0.0)
    throw Error(ErrorCode::InvalidArgument, "time grid must start at 0");
  for (std::size_t j = 1; j < t_grid.size(); ++j)
    if (t_grid[j] <= t_grid[j - 1])
      throw Error(ErrorCode::InvalidArgument, "time grid must be increasing");
  if (g0.rows() != op.size())
    throw Error(ErrorCode::SizeMismatch, "initial data does not match grid");

  const RadialGrid& grid = *op.grid;
  const Eigen::Index t_count = static_cast<Eigen::Index>(t_grid.size());
  const Eigen::Index cols = g0.cols();

  MatrixXcd u = grid.sqrt_w.cast<Complex>().asDiagonal() * g0;
  EvolveResult res;
  res.times = Eigen::Map<const VectorXd>(t_grid.data(), t_count);
  res.norms.resize(t_count, cols);
  for (Eigen::Index c = 0; c < cols; ++c) res.norms(0, c) = u.col(c).norm();
  if (opt.keep_states) {
    res.states.reserve(t_count);
    res.states.push_back(g0);
  }

  ExpCache cache(op.sym);
  for (Eigen::Index j = 1; j < t_count; ++j) {
    const double gap = t_grid[j] - t_grid[j - 1];
    u = cache.get(gap) * u;
    for (Eigen::Index c = 0; c < cols; ++c) res.norms(j, c) = u.col(c).norm();
    if (opt.keep_states)
      res.states.push_back(grid.sqrt_w.cast<Complex>().asDiagonal().inverse() * u);
  }

  if (opt.cross_check && cols > 0) {
    // Second route: spectral decomposition of the symmetrized matrix. Its
    // intrinsic accuracy is limited by the conditioning of the eigenbasis
    // (severe for strongly non-normal small-nu operators), so the effective
    // tolerance carries a measured conditioning floor.
    Eigen::ComplexEigenSolver<MatrixXcd> es(op.sym);
    if (es.info() != Eigen::Success)
      throw Error(ErrorCode::DecompositionFailure, "eigendecomposition failed");
    const VectorXcd u0 = grid.sqrt_w.cast<Complex>().asDiagonal() * g0.col(0);
    const VectorXcd coef = es.eigenvectors().partialPivLu().solve(u0);
    const double blowup = coef.norm() / u0.norm();
    const double floor = 10.0 * blowup * op.size() *
                         std::numeric_limits<double>::epsilon();
    const double tol_eff = std::max(opt.cross_check_tol, floor);
    const double n0 = res.norms(0, 0);
    double worst = 0.0;
    for (Eigen::Index j = 0; j < t_count; ++j) {
      const VectorXcd uj =
          es.eigenvectors() *
          (coef.array() * (-res.times(j) * es.eigenvalues().array()).exp())
              .matrix();
      const double a = res.norms(j, 0), b = uj.norm();
      if (std::max(a, b) <= 1e-9 * n0) continue;  // both negligible
      worst = std::max(worst, std::abs(a - b) / std::max(a, b));
    }
    if (worst > tol_eff)
      throw Error(ErrorCode::NonConvergence,
                  "exponential and eigendecomposition routes disagree (rel " +
                      std::to_string(worst) + ", tolerance " +
                      std::to_string(tol_eff) + ")");
  }

  if (include_axial) {
    for (Eigen::Index j = 0; j < t_count; ++j) {
      const double ax = std::exp(-op.nu * op.k * op.k * res.times(j));
      res.norms.row(j) *= ax;
      if (opt.keep_states) res.states[static_cast<std::size_t>(j)] *= ax;
    }
  }
  return res;
}

}  // namespace detail

// Weighted-norm trace of exp(-t H) g0; with include_axial the extra axial
// diffusion factor exp(-nu k^2 t) multiplies every norm.
inline DecayTrace propagate(const ModeOperator& op, const VectorXcd& g0,
                            const std::vector<double>& t_grid,
                            bool include_axial = false,
                            const PropagateOptions& opt = {}) {
  if (weighted_norm(g0, *op.grid) == 0.0)
    throw Error(ErrorCode::InvalidArgument, "initial data must be nonzero");
  const auto res = detail::evolve(op, g0, t_grid, include_axial, opt);
  DecayTrace trace;
  trace.times = res.times;
  trace.norms = res.norms.col(0);
  return trace;
}

// Weighted norms of exp(-t H) g0 from L-stable implicit stepping; an
// independent reference for short horizons.
inline VectorXd implicit_reference_norms(const ModeOperator& op,
                                         const VectorXcd& g0,
                                         const std::vector<double>& t_grid,
                                         double step_scale = 1e-3) {
  const VectorXcd u0 = op.grid->sqrt_w.cast<Complex>().asDiagonal() * g0;
  return detail::sdirk_norms(op.sym, u0, t_grid, step_scale);
}

struct FitResult {
  double rate = 0.0;
  double prefactor = 0.0;
  double residual = 0.0;
};

// Log-linear least squares on the window where norm/norm(0) lies in
// [1e-6, 1e-2] (the transient-free decades). drop_fraction > 0 instead drops
// that fraction of the total decayed decades from the top. A trace that never
// decays below the window top (e.g. a conserved mode) is fitted on its
// trailing half, giving rate 0 for constant norms.
inline FitResult fit_decay(DecayTrace& trace, double drop_fraction = -1.0) {
  const Eigen::Index n = trace.norms.size();
  if (n < 2) throw Error(ErrorCode::WindowTooSmall, "trace too short");
  const double n0 = trace.norms(0);
  double hi = 1e-2 * n0, lo = 1e-6 * n0;
  if (drop_fraction > 0.0) {
    const double decades = std::log10(n0 / trace.norms.minCoeff());
    hi = n0 * std::pow(10.0, -drop_fraction * decades);
    lo = 1e-6 * n0;
  }

  std::vector<Eigen::Index> idx;
  for (Eigen::Index j = 0; j < n; ++j)
    if (trace.norms(j) <= hi && trace.norms(j) >= lo) idx.push_back(j);
  if (idx.size() < 10) {
    if (trace.norms(n - 1) > hi) {
      idx.clear();
      for (Eigen::Index j = n / 2; j < n; ++j) idx.push_back(j);
    }
    if (idx.size() < 10)
      throw Error(ErrorCode::WindowTooSmall,
                  "fewer than 10 samples in the fit window");
  }

  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (auto j : idx) {
    const double x = trace.times(j), y = std::log(trace.norms(j));
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
  }
  const double count = static_cast<double>(idx.size());
  const double denom = count * sxx - sx * sx;
  if (denom <= 0.0) throw Error(ErrorCode::WindowTooSmall, "degenerate fit window");
  const double slope = (count * sxy - sx * sy) / denom;
  const double intercept = (sy - slope * sx) / count;

  FitResult fit;
  fit.rate = -slope;
  fit.prefactor = std::exp(intercept);  // fitted envelope level at t = 0
  for (auto j : idx) {
    const double model = std::exp(intercept + slope * trace.times(j));
    fit.residual = std::max(fit.residual,
                            std::abs(model / trace.norms(j) - 1.0));
  }
  trace.fit_rate = fit.rate;
  trace.fit_prefactor = fit.prefactor;
  trace.fit_residual = fit.residual;
  trace.window_lo = trace.times(idx.front());
  trace.window_hi = trace.times(idx.back());
  return fit;
}

enum class FlowGeometry { pipe, disc };

struct SweepOptions {
  int grid_size = 192;
  int samples = 20;  // random initial data per operator; the slowest fitted
                     // rate is reported (uniform-over-data envelope)
  std::uint64_t seed = 42;
  bool with_psi = true;
  int psa_samples = 129;
  int points_per_octave = 8;
  double t_min_factor = 1e-3;
  double t_max_factor = 200.0;
  bool cross_check = true;  // applied to the first sample of each row
  int jobs = 1;
};

struct SweepRow {
  double nu = 0.0;
  double k = 0.0;
  int ell = 0;
  int m = 0;
  double lambda = 0.0;        // rate scale
  double fit_rate = 0.0;      // slowest fitted rate over the sample set
  double c_effective = 0.0;   // fit_rate / lambda
  double psi = std::numeric_limits<double>::quiet_NaN();
  double fit_residual = 0.0;
};

struct SweepReport {
  std::vector<SweepRow> rows;
  double exponent_alpha = 0.0;  // slope of log fit_rate against log nu
  double alpha_stderr = 0.0;
};

namespace detail {

inline SweepRow sweep_row(const VelocityProfile& profile,
                          std::shared_ptr<const RadialGrid> grid, double nu,
                          double k, int ell, std::uint64_t row_seed,
                          const SweepOptions& opt) {
  SweepRow row;
  row.nu = nu;
  row.k = k;
  row.ell = ell;
  row.m = profile.order;
  row.lambda = lambda_rate(nu, k, profile.order);

  const ModeOperator op = assemble_operator(grid, profile, nu, k, ell);
  std::mt19937_64 rng(row_seed);
  MatrixXcd g0(grid->size(), opt.samples);
  for (int c = 0; c < opt.samples; ++c) g0.col(c) = random_nodal(*grid, rng);

  PropagateOptions popt;
  popt.cross_check = opt.cross_check;

  double t_max_factor = opt.t_max_factor;
  detail::EvolveResult res;
  for (int attempt = 0;; ++attempt) {
    const auto t_grid = decay_time_grid(row.lambda, opt.t_min_factor,
                                        t_max_factor, opt.points_per_octave);
    res = detail::evolve(op, g0, t_grid, false, popt);
    double worst_final = 0.0;
    for (int c = 0; c < opt.samples; ++c)
      worst_final = std::max(worst_final, res.norms(res.norms.rows() - 1, c) /
                                              res.norms(0, c));
    if (worst_final <= 0.9e-6 || attempt >= 2) break;
    t_max_factor *= 8.0;  // trace has not decayed through the fit window yet
  }

  double slowest = std::numeric_limits<double>::infinity();
  for (int c = 0; c < opt.samples; ++c) {
    DecayTrace trace;
    trace.times = res.times;
    trace.norms = res.norms.col(c);
    const FitResult fit = fit_decay(trace);
    if (fit.rate < slowest) {
      slowest = fit.rate;
      row.fit_residual = fit.residual;
    }
  }
  row.fit_rate = slowest;
  row.c_effective = row.fit_rate / row.lambda;
  if (opt.with_psi)
    row.psi = pseudo_abscissa(op, opt.psa_samples, -1.0, profile.order).psi;
  return row;
}

}  // namespace detail

// Fitted decay rates across a viscosity sweep in the advection-dominated
// branch, with the scaling exponent alpha from regressing log(rate) on
// log(nu). In disc geometry the angular wavenumber doubles as the advective
// one, so k must be a nonzero integer and ell is tied to it.
inline SweepReport scaling_sweep(const VelocityProfile& profile, double k,
                                 int ell, const std::vector<double>& nu_list,
                                 FlowGeometry geometry,
                                 const SweepOptions& opt = {}) {
  if (nu_list.size() < 4)
    throw Error(ErrorCode::WindowTooSmall, "need at least 4 viscosities");
  const auto [lo_it, hi_it] = std::minmax_element(nu_list.begin(), nu_list.end());
  if (*hi_it / *lo_it < 99.0)
    throw Error(ErrorCode::WindowTooSmall, "viscosities must span >= 2 decades");
  if (k == 0.0) throw Error(ErrorCode::InvalidMode, "k must be nonzero");
  for (double nu : nu_list)
    if (nu > std::abs(k))
      throw Error(ErrorCode::InvalidMode,
                  "sweep is restricted to the enhanced branch nu <= |k|");
  if (geometry == FlowGeometry::disc) {
    if (std::abs(k - std::round(k)) > 0.0)
      throw Error(ErrorCode::InvalidMode, "disc mode needs integer k");
    ell = static_cast<int>(std::llround(k));
  }

  auto grid = make_grid(profile.radius, opt.grid_size, ell);
  SweepReport report;
  report.rows.resize(nu_list.size());

  auto work = [&](std::size_t i) {
    const std::uint64_t row_seed = opt.seed ^ (0x9E3779B97F4A7C15ULL * (i + 1));
    report.rows[i] =
        detail::sweep_row(profile, grid, nu_list[i], k, ell, row_seed, opt);
  };
  if (opt.jobs <= 1) {
    for (std::size_t i = 0; i < nu_list.size(); ++i) work(i);
  } else {
    std::vector<std::thread> pool;
    std::atomic<std::size_t> next{0};
    for (int t = 0; t < opt.jobs; ++t)
      pool.emplace_back([&] {
        for (std::size_t i = next.fetch_add(1); i < nu_list.size();
             i = next.fetch_add(1))
          work(i);
      });
    for (auto& th : pool) th.join();
  }

  // log-log regression for the exponent
  const std::size_t n = report.rows.size();
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (const auto& row : report.rows) {
    const double x = std::log(row.nu), y = std::log(row.fit_rate);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
  }
  const double count = static_cast<double>(n);
  const double denom = count * sxx - sx * sx;
  report.exponent_alpha = (count * sxy - sx * sy) / denom;
  const double intercept = (sy - report.exponent_alpha * sx) / count;
  double ss_res = 0.0;
  for (const auto& row : report.rows) {
    const double pred = intercept + report.exponent_alpha * std::log(row.nu);
    ss_res += std::pow(std::log(row.fit_rate) - pred, 2);
  }
  report.alpha_stderr =
      std::sqrt(ss_res / (count - 2.0) / (sxx - sx * sx / count));
  return report;
}

// Decay of one angular mode of the disc problem: identical to the pipe
// operator at k = ell (same code path, so the identification is exact).
inline DecayTrace disc_decay(const VelocityProfile& profile, double nu, int ell,
                             const std::vector<double>& t_grid,
                             const VectorXcd& g0, int grid_size = 192,
                             const PropagateOptions& opt = {}) {
  if (ell == 0)
    throw Error(ErrorCode::InvalidMode,
                "the angular mean obeys plain heat decay; no enhancement");
  if (!(nu < 1.0 && 1.0 <= std::abs(ell)))
    throw Error(ErrorCode::InvalidMode, "regime requires nu < 1 <= |ell|");
  const ModeOperator op = assemble_operator(
      make_grid(profile.radius, grid_size, ell), profile, nu,
      static_cast<double>(ell), ell);
  return propagate(op, g0, t_grid, false, opt);
}

struct WeiCheck {
  double max_violation = 0.0;  // max over t of ratio - exp(-t psi + pi/2)
  double max_relative = 0.0;   // same, relative to the bound
};

// Semigroup norms against the pseudospectral bound exp(-t psi + pi/2).
inline WeiCheck wei_bound_check(const DecayTrace& trace, double psi) {
  WeiCheck chk;
  chk.max_violation = -std::numeric_limits<double>::infinity();
  chk.max_relative = -std::numeric_limits<double>::infinity();
  const double n0 = trace.norms(0);
  for (Eigen::Index j = 0; j < trace.times.size(); ++j) {
    const double bound = std::exp(-trace.times(j) * psi + M_PI / 2.0);
    const double ratio = trace.norms(j) / n0;
    chk.max_violation = std::max(chk.max_violation, ratio - bound);
    chk.max_relative = std::max(chk.max_relative, (ratio - bound) / bound);
  }
  return chk;
}

}  // namespace edlab
