// Acceptance suite: one test case per criterion, each printing a PASS/FAIL
// line with the measured quantity next to its threshold.

#include <catch2/catch_amalgamated.hpp>

#include <chrono>
#include <cstdio>
#include <random>

#include <edlab/dispersion.hpp>
#include <edlab/fields.hpp>
#include <edlab/pseudospectral.hpp>
#include <edlab/semigroup.hpp>

#include "support.hpp"

using namespace edlab;
using Clock = std::chrono::steady_clock;

namespace {

const VelocityProfile kQuad = make_profile({1.0, 0.0, -1.0}, 1.0);
const VelocityProfile kLin = make_profile({0.0, 1.0}, 1.0);
const VelocityProfile kQuart = make_profile({1.0, 0.0, 0.0, 0.0, -1.0}, 1.0);

void report(const std::string& tag, bool ok, const std::string& detail) {
  std::printf("[%s] %s: %s\n", ok ? "PASS" : "FAIL", tag.c_str(),
              detail.c_str());
  std::fflush(stdout);
}

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

std::vector<double> half_decade_viscosities(double from_exp, double to_exp) {
  std::vector<double> nus;
  for (double e = from_exp; e >= to_exp - 1e-9; e -= 0.5)
    nus.push_back(std::pow(10.0, e));
  return nus;
}

// Slowest fitted rate over a batch of random initial data, with the horizon
// extended until every trace has decayed through the fit window.
double slowest_rate(const ModeOperator& op, double rate_scale, int samples,
                    std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  MatrixXcd g0(op.size(), samples);
  for (int c = 0; c < samples; ++c) g0.col(c) = random_nodal(*op.grid, rng);
  PropagateOptions popt;
  popt.cross_check = false;
  double t_max_factor = 200.0;
  detail::EvolveResult res;
  for (int attempt = 0;; ++attempt) {
    res = detail::evolve(op, g0, decay_time_grid(rate_scale, 1e-3, t_max_factor, 8),
                         false, popt);
    double worst = 0.0;
    for (int c = 0; c < samples; ++c)
      worst = std::max(worst, res.norms(res.norms.rows() - 1, c) / res.norms(0, c));
    if (worst <= 0.9e-6 || attempt >= 4) break;
    t_max_factor *= 8.0;
  }
  double slowest = std::numeric_limits<double>::infinity();
  for (int c = 0; c < samples; ++c) {
    DecayTrace tr;
    tr.times = res.times;
    tr.norms = res.norms.col(c);
    slowest = std::min(slowest, fit_decay(tr).rate);
  }
  return slowest;
}

}  // namespace

TEST_CASE("criterion 1: quadratic profile exponent") {
  const auto t0 = Clock::now();
  SweepOptions opt;
  opt.grid_size = 192;
  opt.samples = 20;
  opt.seed = 42;
  opt.with_psi = false;
  const SweepReport rep =
      scaling_sweep(kQuad, 1.0, 0, half_decade_viscosities(-3.0, -6.0),
                    FlowGeometry::pipe, opt);
  const double elapsed = seconds_since(t0);
  const bool ok_alpha = std::abs(rep.exponent_alpha - 0.5) <= 0.07;
  const bool ok_time = elapsed <= 300.0;
  report("C1 exponent m=2",
         ok_alpha && ok_time,
         "alpha = " + std::to_string(rep.exponent_alpha) +
             " (target 0.5 +- 0.07), runtime " + std::to_string(elapsed) +
             " s <= 300 s");
  CHECK(ok_alpha);
  CHECK(ok_time);
}

TEST_CASE("criterion 2: linear profile exponent") {
  const auto t0 = Clock::now();
  SweepOptions opt;
  opt.grid_size = 192;
  opt.samples = 20;
  opt.seed = 42;
  opt.with_psi = false;
  const SweepReport rep =
      scaling_sweep(kLin, 1.0, 0, half_decade_viscosities(-3.0, -6.0),
                    FlowGeometry::pipe, opt);
  const double elapsed = seconds_since(t0);
  const bool ok_alpha = std::abs(rep.exponent_alpha - 1.0 / 3.0) <= 0.07;
  const bool ok_time = elapsed <= 300.0;
  report("C2 exponent m=1",
         ok_alpha && ok_time,
         "alpha = " + std::to_string(rep.exponent_alpha) +
             " (target 0.3333 +- 0.07), runtime " + std::to_string(elapsed) +
             " s <= 300 s");
  CHECK(ok_alpha);
  CHECK(ok_time);
}

TEST_CASE("criterion 3: crossover branch") {
  const double nu_c = 0.1, k_c = 0.01;
  const double lam_c = lambda_rate(nu_c, k_c, 2);  // k^2/nu = 1e-3
  const ModeOperator op_c = assemble_operator(kQuad, nu_c, k_c, 0, 96);
  const double rate_c = slowest_rate(op_c, lam_c, 20, 42);

  const ModeOperator op_e = assemble_operator(kQuad, 1e-4, 1.0, 0, 192);
  const double rate_e = slowest_rate(op_e, lambda_rate(1e-4, 1.0, 2), 20, 42);

  const bool ok_factor = rate_c >= lam_c / 5.0 && rate_c <= 5.0 * lam_c;
  // the enhanced-branch rate transported to the crossover point by the ratio
  // of the rate scales; the crossover rate must sit at least 10x below it
  const double transported = rate_e * lam_c / lambda_rate(1e-4, 1.0, 2);
  const bool ok_slower = 10.0 * rate_c <= transported;
  report("C3a crossover rate within factor 5 of k^2/nu", ok_factor,
         "rate = " + std::to_string(rate_c) + ", k^2/nu = " +
             std::to_string(lam_c) + " (ratio " +
             std::to_string(rate_c / lam_c) + ")");
  report("C3b crossover at least 10x slower than the transported enhanced rate",
         ok_slower,
         "rate = " + std::to_string(rate_c) + " vs bound " +
             std::to_string(transported / 10.0));
  CHECK(ok_factor);
  CHECK(ok_slower);
}

TEST_CASE("criterion 4: uniform pseudospectral constant") {
  double cmin = 1e300, cmax = 0.0;
  for (double nu : {1e-3, 1e-4, 1e-5}) {
    const ModeOperator op = assemble_operator(kQuad, nu, 1.0, 0, 192);
    const double c1 = resolvent_lower_bound(op, 2);
    cmin = std::min(cmin, c1);
    cmax = std::max(cmax, c1);
  }
  const bool ok = cmax / cmin <= 3.0;
  report("C4 resolvent constant uniformity", ok,
         "spread = " + std::to_string(cmax / cmin) + " <= 3 (c1 in [" +
             std::to_string(cmin) + ", " + std::to_string(cmax) + "])");
  CHECK(ok);
}

TEST_CASE("criterion 5: semigroup bound") {
  const ModeOperator op = assemble_operator(kQuad, 1e-3, 1.0, 0, 128);
  const PsaResult psa = pseudo_abscissa(op, 129, -1.0, 2);
  const auto t_grid =
      decay_time_grid(lambda_rate(1e-3, 1.0, 2), 1e-1, 100.0, 8);
  std::mt19937_64 rng(42);
  PropagateOptions popt;
  popt.cross_check = false;
  double worst = -1e300;
  for (int trial = 0; trial < 20; ++trial) {
    const DecayTrace tr =
        propagate(op, random_nodal(*op.grid, rng), t_grid, false, popt);
    worst = std::max(worst, wei_bound_check(tr, psa.psi).max_relative);
  }
  const bool ok = worst <= 1e-8;
  report("C5 pseudospectral semigroup bound", ok,
         "max relative violation = " + std::to_string(worst) + " <= 1e-8");
  CHECK(ok);
}

TEST_CASE("criterion 6: covering-length bound") {
  for (const VelocityProfile& prof : {kQuad, kLin}) {
    const auto [vlo, vhi] = prof.range();
    double m_min = 1e300, m_max = 0.0;
    for (double delta : {1e-1, 1e-2, 1e-3}) {
      double level_max = 0.0;
      for (int i = 0; i < 101; ++i) {
        const double lam = (vlo - 1.0) + (vhi - vlo + 2.0) * i / 100.0;
        level_max =
            std::max(level_max, covering(prof, lam, delta).total_length / delta);
      }
      m_min = std::min(m_min, level_max);
      m_max = std::max(m_max, level_max);
    }
    const bool ok = m_max / m_min <= 3.0;
    report("C6 covering bound (degree " +
               std::to_string(prof.coeffs.size() - 1) + " profile)",
           ok,
           "sup total/delta in [" + std::to_string(m_min) + ", " +
               std::to_string(m_max) + "], spread <= 3");
    CHECK(ok);
  }
}

TEST_CASE("criterion 7: inequality audits") {
  const double c0 = estimate_covering_constant(kQuad);
  double worst_away = 1e300, worst_near = 1e300;
  for (double nu : {1e-3, 1e-4}) {
    const ModeOperator op = assemble_operator(kQuad, nu, 1.0, 0, 128);
    std::mt19937_64 rng(42);
    for (int trial = 0; trial < 100; ++trial) {
      const VectorXcd g = random_smooth(*op.grid, rng);
      for (double delta : {0.05, 0.1}) {
        for (double lam : {-0.2, 0.25, 0.6, 0.9, 1.1}) {
          worst_away = std::min(
              worst_away, verify_away_bound(op, kQuad, lam, delta, g).residual());
          worst_near = std::min(
              worst_near,
              verify_near_bound(op, kQuad, lam, delta, g, c0).residual());
        }
      }
    }
  }
  const bool ok = worst_away >= -1e-8 && worst_near >= -1e-8;
  report("C7 resolvent inequality audits", ok,
         "min residuals: away " + std::to_string(worst_away) + ", near " +
             std::to_string(worst_near) + " >= -1e-8");
  CHECK(worst_away >= -1e-8);
  CHECK(worst_near >= -1e-8);
}

TEST_CASE("criterion 8: dispersion envelope") {
  const auto t0 = Clock::now();
  bool all_ok = true;
  std::string detail;
  for (const VelocityProfile* prof : {&kLin, &kQuad, &kQuart}) {
    const ModeOperator op = assemble_operator(*prof, 1e-3, 1.0, 0, 128);
    const double c1 = resolvent_lower_bound(op, prof->order);
    for (double nu : {1e-2, 1e-3}) {
      double max_ratio = std::numeric_limits<double>::infinity();
      try {
        const DispersionReport rep = verify_dispersion(
            nu, prof->order, c1, 0.5 * c1, log_time_grid(0.1, 10.0 / nu, 40));
        max_ratio = rep.max_ratio;
      } catch (const Error&) {
      }
      const bool ok = max_ratio <= 3.0;
      all_ok = all_ok && ok;
      detail += "m" + std::to_string(prof->order) + "/nu" +
                std::to_string(nu) + ": " + std::to_string(max_ratio) + "  ";
    }
  }
  const double elapsed = seconds_since(t0);
  const bool ok_time = elapsed <= 120.0;
  report("C8 dispersion envelope", all_ok && ok_time,
         "max ratios (<= 3): " + detail + "runtime " + std::to_string(elapsed) +
             " s <= 120 s");
  CHECK(all_ok);
  CHECK(ok_time);
}

TEST_CASE("criterion 9: discretization against Bessel roots") {
  double worst = 0.0;
  for (int ell : {0, 1}) {
    const RadialGrid grid = build_grid(1.0, 128, ell);
    MatrixXd ks = grid.sqrt_w.array().inverse().matrix().asDiagonal() *
                  grid.stiffness *
                  grid.sqrt_w.array().inverse().matrix().asDiagonal();
    ks = 0.5 * (ks + ks.transpose()).eval();
    Eigen::SelfAdjointEigenSolver<MatrixXd> es(ks);
    for (int j = 1; j <= 3; ++j) {
      const double ref = std::pow(oracle::bessel_deriv_root(ell, j), 2);
      const double mu =
          (ell == 0) ? es.eigenvalues()(j) : es.eigenvalues()(j - 1);
      worst = std::max(worst, std::abs(mu - ref) / ref);
    }
  }
  const bool ok = worst <= 1e-6;
  report("C9 Neumann Laplacian eigenvalues", ok,
         "max relative deviation = " + std::to_string(worst) + " <= 1e-6");
  CHECK(ok);
}

TEST_CASE("criterion 10: disc/pipe identification") {
  bool identical = true;
  for (int ell : {1, 2}) {
    auto grid = make_grid(1.0, 128, ell);
    std::mt19937_64 rng(42 + ell);
    const VectorXcd g0 = random_nodal(*grid, rng);
    const auto t_grid = decay_time_grid(lambda_rate(1e-4, ell, 2));
    PropagateOptions popt;
    popt.cross_check = false;
    const DecayTrace disc = disc_decay(kQuad, 1e-4, ell, t_grid, g0, 128, popt);
    const ModeOperator pipe_op =
        assemble_operator(grid, kQuad, 1e-4, static_cast<double>(ell), ell);
    const DecayTrace pipe = propagate(pipe_op, g0, t_grid, false, popt);
    identical = identical && disc.norms.size() == pipe.norms.size();
    for (Eigen::Index j = 0; identical && j < disc.norms.size(); ++j)
      identical = disc.norms(j) == pipe.norms(j);
  }
  report("C10 disc/pipe identification", identical,
         identical ? "traces agree bit for bit at ell = 1, 2"
                   : "traces differ");
  CHECK(identical);
}
