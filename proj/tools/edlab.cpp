// Command-line front end: reads flat key = value configs, runs the analyses,
// and writes CSV reports (and optional SVG plots) under the output directory.
// Data goes to files; diagnostics go to standard error.

#include <CLI11.hpp>

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <random>
#include <string>
#include <vector>

#include <edlab/bessel.hpp>
#include <edlab/config.hpp>
#include <edlab/csv.hpp>
#include <edlab/dispersion.hpp>
#include <edlab/fields.hpp>
#include <edlab/mode_operator.hpp>
#include <edlab/profiles.hpp>
#include <edlab/pseudospectral.hpp>
#include <edlab/semigroup.hpp>
#include <edlab/svg.hpp>

namespace fs = std::filesystem;
using namespace edlab;

namespace {

struct CliArgs {
  std::string config_path;
  std::string out_dir = "out";
  int jobs = 1;
  std::int64_t seed = -1;  // < 0: use the config's seed
  bool plot = false;
  std::string dump_operator;
};

VelocityProfile profile_from(const Config& cfg) {
  const std::vector<double> coeffs = cfg.require_list("coeffs");
  const double radius = cfg.require_double("radius");
  const int cap = cfg.get_int("order_cap", 8);
  return make_profile(coeffs, radius, cap);
}

std::uint64_t seed_from(const Config& cfg, const CliArgs& args) {
  if (args.seed >= 0) return static_cast<std::uint64_t>(args.seed);
  return cfg.get_seed("seed", 42);
}

bool flag_from(const Config& cfg, const std::string& key, bool dflt) {
  const std::string v = cfg.get_string(key, dflt ? "true" : "false");
  if (v == "true" || v == "1" || v == "yes") return true;
  if (v == "false" || v == "0" || v == "no") return false;
  throw Error(ErrorCode::ConfigError, "key '" + key + "' is not a boolean");
}

double single_nu(const Config& cfg) {
  if (cfg.has("nu")) return cfg.require_double("nu");
  const auto list = cfg.require_list("nu_list");
  return list.front();
}

void dump_operator_if_requested(const CliArgs& args, const ModeOperator& op) {
  if (args.dump_operator.empty()) return;
  std::ofstream out(args.dump_operator);
  if (!out)
    throw Error(ErrorCode::ConfigError, "cannot open " + args.dump_operator);
  export_matrix(out, op.matrix);
}

// ---------------------------------------------------------------- order ----

void cmd_order(const Config& cfg, const CliArgs& args) {
  const VelocityProfile prof = profile_from(cfg);
  std::ofstream out(fs::path(args.out_dir) / "order.txt");
  out << "m=" << prof.order << "\n";
}

// ------------------------------------------------------------- levelset ----

void cmd_levelset(const Config& cfg, const CliArgs& args) {
  const VelocityProfile prof = profile_from(cfg);
  std::vector<double> lambdas;
  if (cfg.has("lambda_list"))
    lambdas = cfg.require_list("lambda_list");
  else
    lambdas.push_back(cfg.require_double("lambda"));
  const std::vector<double> deltas = cfg.get_list("delta_list", {1e-1, 1e-2, 1e-3});

  CsvWriter csv(fs::path(args.out_dir) / "levelset.csv");
  csv.row({"lambda", "delta", "measure_E", "measure_Etilde",
           "total_cover_length", "cover_count"});
  for (double lam : lambdas) {
    for (double delta : deltas) {
      const auto [e, et] = neighborhood_sets(prof, lam, delta);
      const CoveringResult cov = covering(prof, lam, delta);
      csv.row({fmt_g(lam), fmt_g(delta), fmt_g(e.measure), fmt_g(et.measure),
               fmt_g(cov.total_length), fmt_g(cov.count)});
    }
  }
}

// ------------------------------------------------------------------ psa ----

void cmd_psa(const Config& cfg, const CliArgs& args) {
  const VelocityProfile prof = profile_from(cfg);
  const double nu = single_nu(cfg);
  const double k = cfg.get_double("k", 1.0);
  const int ell = cfg.get_int("ell", 0);
  const int n = cfg.get_int("grid_size", 192);
  const int samples = cfg.get_int("lambda_samples", 129);
  const double refine_tol = cfg.get_double("refine_tol", -1.0);

  const ModeOperator op = assemble_operator(prof, nu, k, ell, n);
  dump_operator_if_requested(args, op);
  const PsaResult psa = pseudo_abscissa(op, samples, refine_tol, prof.order);

  CsvWriter curve(fs::path(args.out_dir) / "psa_curve.csv");
  curve.row({"lambda", "sigma_min"});
  for (Eigen::Index i = 0; i < psa.curve.lambdas.size(); ++i)
    curve.row({fmt_g(psa.curve.lambdas(i)), fmt_g(psa.curve.sigmas(i))});

  CsvWriter summary(fs::path(args.out_dir) / "psa_summary.csv");
  summary.row({"nu", "k", "ell", "m", "psi", "lambda_star", "c1_effective"});
  summary.row({fmt_g(nu), fmt_g(k), fmt_g(ell), fmt_g(prof.order), fmt_g(psa.psi),
               fmt_g(psa.argmin), fmt_g(psa.c1_effective)});

  if (args.plot) {
    LinePlot plot("smallest singular value of the shifted operator", "lambda",
                  "sigma_min", false, true);
    PlotSeries s;
    s.x.assign(psa.curve.lambdas.data(),
               psa.curve.lambdas.data() + psa.curve.lambdas.size());
    s.y.assign(psa.curve.sigmas.data(),
               psa.curve.sigmas.data() + psa.curve.sigmas.size());
    s.label = "sigma_min";
    plot.add(std::move(s));
    plot.write(fs::path(args.out_dir) / "psa.svg");
  }
}

// ---------------------------------------------------------------- decay ----

void cmd_decay(const Config& cfg, const CliArgs& args) {
  const VelocityProfile prof = profile_from(cfg);
  const double nu = single_nu(cfg);
  const double k = cfg.get_double("k", 1.0);
  const int ell = cfg.get_int("ell", 0);
  const int n = cfg.get_int("grid_size", 192);
  const bool axial = flag_from(cfg, "include_axial", false);

  const ModeOperator op = assemble_operator(prof, nu, k, ell, n);
  dump_operator_if_requested(args, op);

  const double rate_scale = (k != 0.0) ? lambda_rate(nu, k, prof.order) : nu;
  const auto t_grid =
      decay_time_grid(rate_scale, cfg.get_double("t_min_factor", 1e-3),
                      cfg.get_double("t_max_factor", 200.0),
                      cfg.get_int("points_per_octave", 8));

  std::mt19937_64 rng(seed_from(cfg, args));
  const VectorXcd g0 = random_nodal(*op.grid, rng);
  PropagateOptions popt;
  popt.cross_check = flag_from(cfg, "cross_check", true);
  DecayTrace trace = propagate(op, g0, t_grid, axial, popt);
  const FitResult fit = fit_decay(trace, cfg.get_double("fit_drop", -1.0));

  CsvWriter csv(fs::path(args.out_dir) / "decay.csv");
  csv.row({"t", "norm"});
  for (Eigen::Index j = 0; j < trace.times.size(); ++j)
    csv.row({fmt_g(trace.times(j)), fmt_g(trace.norms(j))});

  CsvWriter summary(fs::path(args.out_dir) / "decay_summary.csv");
  summary.row({"nu", "k", "ell", "m", "rate", "prefactor", "residual",
               "window_lo", "window_hi"});
  summary.row({fmt_g(nu), fmt_g(k), fmt_g(ell), fmt_g(prof.order), fmt_g(fit.rate),
               fmt_g(fit.prefactor), fmt_g(fit.residual), fmt_g(trace.window_lo),
               fmt_g(trace.window_hi)});

  if (args.plot) {
    LinePlot plot("mode norm decay", "t", "norm", false, true);
    PlotSeries s;
    for (Eigen::Index j = 0; j < trace.times.size(); ++j) {
      if (trace.norms(j) <= 0) continue;
      s.x.push_back(trace.times(j));
      s.y.push_back(trace.norms(j));
    }
    s.label = "norm";
    plot.add(std::move(s));
    plot.write(fs::path(args.out_dir) / "decay.svg");
  }
}

// ---------------------------------------------------------------- sweep ----

void cmd_sweep(const Config& cfg, const CliArgs& args) {
  const VelocityProfile prof = profile_from(cfg);
  const std::string mode = cfg.get_string("mode", "pipe");
  if (mode != "pipe" && mode != "disc")
    throw Error(ErrorCode::ConfigError, "mode must be pipe or disc");
  const double k = cfg.get_double("k", 1.0);
  const int ell = cfg.get_int("ell", 0);

  SweepOptions opt;
  opt.grid_size = cfg.get_int("grid_size", 192);
  opt.samples = cfg.get_int("samples", 20);
  opt.seed = seed_from(cfg, args);
  opt.with_psi = flag_from(cfg, "with_psi", true);
  opt.psa_samples = cfg.get_int("lambda_samples", 129);
  opt.points_per_octave = cfg.get_int("points_per_octave", 8);
  opt.cross_check = flag_from(cfg, "cross_check", true);
  opt.jobs = args.jobs;

  const SweepReport rep = scaling_sweep(
      prof, k, ell, cfg.require_list("nu_list"),
      mode == "pipe" ? FlowGeometry::pipe : FlowGeometry::disc, opt);

  CsvWriter csv(fs::path(args.out_dir) / "sweep.csv");
  csv.row({"nu", "k", "ell", "m", "lambda", "rate", "c_effective", "psi",
           "alpha", "alpha_stderr"});
  for (const auto& row : rep.rows)
    csv.row({fmt_g(row.nu), fmt_g(row.k), fmt_g(row.ell), fmt_g(row.m),
             fmt_g(row.lambda), fmt_g(row.fit_rate), fmt_g(row.c_effective),
             fmt_g(row.psi), "", ""});
  csv.row({"", "", "", "", "", "", "", "", fmt_g(rep.exponent_alpha),
           fmt_g(rep.alpha_stderr)});

  if (args.plot) {
    LinePlot plot("decay rate against viscosity", "nu", "rate", true, true);
    PlotSeries rate, scale;
    for (const auto& row : rep.rows) {
      rate.x.push_back(row.nu);
      rate.y.push_back(row.fit_rate);
      scale.x.push_back(row.nu);
      scale.y.push_back(row.lambda);
    }
    rate.label = "fitted rate";
    scale.label = "rate scale";
    scale.color = "#c03425";
    plot.add(std::move(rate));
    plot.add(std::move(scale));
    plot.write(fs::path(args.out_dir) / "sweep.svg");
  }
}

// ----------------------------------------------------------- dispersion ----

void cmd_dispersion(const Config& cfg, const CliArgs& args) {
  const double nu = single_nu(cfg);
  int m = cfg.get_int("m", 0);
  double c1 = 0.0;
  const std::string c1_key = cfg.get_string("c1", "auto");
  if (c1_key == "auto") {
    // import the effective resolvent constant of the configured profile
    const VelocityProfile prof = profile_from(cfg);
    if (m == 0) m = prof.order;
    const double nu_ref = cfg.get_double("nu_ref", 1e-3);
    const double k = cfg.get_double("k", 1.0);
    const ModeOperator op =
        assemble_operator(prof, nu_ref, k, cfg.get_int("ell", 0),
                          cfg.get_int("grid_size", 128));
    c1 = resolvent_lower_bound(op, prof.order,
                               cfg.get_int("lambda_samples", 129));
  } else {
    c1 = Config::parse("c1 = " + c1_key).require_double("c1");
    if (m == 0)
      throw Error(ErrorCode::ConfigError, "explicit c1 requires the order m");
  }
  const double c2 = cfg.get_double("c2", 0.5 * c1);

  const double t_lo = cfg.get_double("t_lo", 0.1);
  const double t_hi = cfg.get_double("t_hi", 10.0 / nu);
  const auto t_grid = log_time_grid(t_lo, t_hi, cfg.get_int("t_points", 48));
  const DispersionReport rep = verify_dispersion(nu, m, c1, c2, t_grid);

  CsvWriter csv(fs::path(args.out_dir) / "dispersion.csv");
  csv.row({"t", "I_low", "I_high", "envelope", "ratio"});
  for (std::size_t j = 0; j < rep.times.size(); ++j)
    csv.row({fmt_g(rep.times[j]), fmt_g(rep.i_low[j]), fmt_g(rep.i_high[j]),
             fmt_g(rep.envelope[j]), fmt_g(rep.ratio[j])});

  CsvWriter summary(fs::path(args.out_dir) / "dispersion_summary.csv");
  summary.row({"nu", "m", "c1", "c2", "C2_fit", "max_ratio"});
  summary.row({fmt_g(nu), fmt_g(m), fmt_g(rep.c1_used), fmt_g(rep.c2_used),
               fmt_g(rep.c2_fit), fmt_g(rep.max_ratio)});

  if (args.plot) {
    LinePlot plot("mode integral against the dispersive envelope", "t",
                  "integral", true, true);
    PlotSeries total, env;
    for (std::size_t j = 0; j < rep.times.size(); ++j) {
      total.x.push_back(rep.times[j]);
      total.y.push_back(rep.i_low[j] + rep.i_high[j]);
      env.x.push_back(rep.times[j]);
      env.y.push_back(rep.envelope[j]);
    }
    total.label = "I(t)";
    env.label = "envelope";
    env.color = "#c03425";
    plot.add(std::move(total));
    plot.add(std::move(env));
    plot.write(fs::path(args.out_dir) / "dispersion.svg");
  }
}

// --------------------------------------------------------------- verify ----

class VerifySuite {
 public:
  VerifySuite(const fs::path& out) : csv_(out / "verify.csv") {
    csv_.row({"check", "status", "value", "threshold"});
  }

  void check(const std::string& name, double value, double threshold) {
    const bool ok = value <= threshold;
    csv_.row({name, ok ? "pass" : "fail", fmt_g(value), fmt_g(threshold)});
    std::cerr << (ok ? "pass  " : "FAIL  ") << name << " (" << fmt_g(value)
              << " <= " << fmt_g(threshold) << ")\n";
    if (!ok) failures_++;
  }

  void check_true(const std::string& name, bool ok) {
    csv_.row({name, ok ? "pass" : "fail", "", ""});
    std::cerr << (ok ? "pass  " : "FAIL  ") << name << "\n";
    if (!ok) failures_++;
  }

  int failures() const { return failures_; }

 private:
  CsvWriter csv_;
  int failures_ = 0;
};

void cmd_verify(const Config& cfg, const CliArgs& args) {
  const VelocityProfile prof = profile_from(cfg);
  const double nu = cfg.get_double("nu", 1e-3);
  const double k = cfg.get_double("k", 1.0);
  const int n = cfg.get_int("verify_grid_size", 96);
  std::mt19937_64 rng(seed_from(cfg, args));
  VerifySuite suite(args.out_dir);

  {  // quadrature identities
    const RadialGrid grid = build_grid(prof.radius, n, 0);
    const double r2 = prof.radius * prof.radius;
    suite.check("quadrature constant", std::abs(grid.w.sum() - 0.5 * r2) / r2, 1e-10);
    const VectorXd rr = grid.r.array().square();
    suite.check("quadrature r^2",
                std::abs(quadrature_integral(rr, grid) - 0.25 * r2 * r2) /
                    (r2 * r2),
                1e-10);
  }
  {  // Neumann Laplacian against squared Bessel-derivative roots
    for (int ell : {0, 1}) {
      const RadialGrid grid = build_grid(prof.radius, n, ell);
      MatrixXd ks = grid.sqrt_w.array().inverse().matrix().asDiagonal() *
                    grid.stiffness *
                    grid.sqrt_w.array().inverse().matrix().asDiagonal();
      ks = 0.5 * (ks + ks.transpose()).eval();
      Eigen::SelfAdjointEigenSolver<MatrixXd> es(ks);
      const double mu = (ell == 0) ? es.eigenvalues()(1) : es.eigenvalues()(0);
      const double root = bessel_deriv_root(ell, ell == 0 ? 1 : 1);
      const double ref = root * root / (prof.radius * prof.radius);
      suite.check("laplacian eigenvalue ell=" + std::to_string(ell),
                  std::abs(mu - ref) / ref, 1e-6);
    }
  }
  {  // order detection invariances
    VelocityProfile scaled = prof;
    for (auto& c : scaled.coeffs) c *= -3.5;
    scaled.coeffs[0] += 7.0;
    suite.check_true("order invariance",
                     detect_order(scaled.coeffs, prof.radius) == prof.order);
  }
  {  // covering: containment sampled inside covering(); length ratio spread
    double worst = 0.0, best = 1e300;
    for (double delta : {1e-1, 1e-2, 1e-3}) {
      double m = 0.0;
      const auto [vlo, vhi] = prof.range();
      for (int i = 0; i <= 40; ++i) {
        const double lam = (vlo - 1.0) + (vhi - vlo + 2.0) * i / 40.0;
        m = std::max(m, covering(prof, lam, delta).total_length / delta);
      }
      worst = std::max(worst, m);
      best = std::min(best, m);
    }
    suite.check("covering length ratio spread", worst / best, 3.0);
  }
  {  // accretivity and imaginary-part identities
    const ModeOperator op = assemble_operator(prof, nu, k, 0, n);
    double worst = 0.0;
    for (int t = 0; t < 10; ++t) {
      const VectorXcd g = random_nodal(*op.grid, rng);
      const Complex ip = weighted_inner(g, VectorXcd(op.matrix * g), *op.grid);
      const double rhs = op.nu * weighted_grad_norm_sq(g, *op.grid);
      worst = std::max(worst, std::abs(ip.real() - rhs) / rhs);
      const double im_ref =
          op.k * (g.array().abs2() * op.v_nodes.array() * op.grid->w.array()).sum();
      worst = std::max(worst, std::abs(ip.imag() - im_ref) / std::abs(im_ref));
    }
    suite.check("accretivity identity", worst, 1e-6);
  }
  {  // pseudospectral scaling symmetry (s nu, s k) -> s psi
    const ModeOperator op1 = assemble_operator(prof, nu, k, 0, 64);
    const ModeOperator op2 = assemble_operator(prof, 2 * nu, 2 * k, 0, 64);
    const double p1 = pseudo_abscissa(op1, 65).psi;
    const double p2 = pseudo_abscissa(op2, 65).psi;
    suite.check("psa scaling symmetry", std::abs(p2 - 2 * p1) / (2 * p1), 1e-8);
  }
  {  // propagation: monotone norms, axial factor, built-in cross-check
    const ModeOperator op = assemble_operator(prof, nu, k, 0, n);
    const auto t_grid = decay_time_grid(lambda_rate(nu, k, prof.order));
    const VectorXcd g0 = random_nodal(*op.grid, rng);
    const DecayTrace plain = propagate(op, g0, t_grid);
    PropagateOptions popt;
    popt.cross_check = false;
    const DecayTrace axial = propagate(op, g0, t_grid, true, popt);
    double mono = 0.0, ax = 0.0;
    for (Eigen::Index j = 1; j < plain.times.size(); ++j)
      mono = std::max(mono, plain.norms(j) / plain.norms(j - 1) - 1.0);
    for (Eigen::Index j = 0; j < plain.times.size(); ++j)
      ax = std::max(ax, std::abs(axial.norms(j) -
                                 plain.norms(j) *
                                     std::exp(-nu * k * k * plain.times(j))));
    suite.check("norm monotonicity", mono, 1e-10);
    suite.check("axial factor consistency", ax, 0.0);

    const PsaResult psa = pseudo_abscissa(op, 65, -1.0, prof.order);
    double wei = -1e300;
    for (int trial = 0; trial < 5; ++trial) {
      DecayTrace tr = (trial == 0) ? plain : propagate(op, random_nodal(*op.grid, rng), t_grid, false, popt);
      wei = std::max(wei, wei_bound_check(tr, psa.psi).max_relative);
    }
    suite.check("semigroup bound", wei, 1e-8);
  }
  {  // dispersion quadrature against the closed low-branch form
    double worst = 0.0;
    for (double t : {0.1, 10.0, 1e3}) {
      const auto [lo, hi] = k_integral(nu, t, prof.order, 1.0);
      const double ref =
          std::sqrt(M_PI * nu / t) * std::erf(std::sqrt(nu * t));
      worst = std::max(worst, std::abs(lo - ref) / ref);
      (void)hi;
    }
    suite.check("low-branch closed form", worst, 1e-8);
    const auto rep = verify_dispersion(
        nu, prof.order, 1.0, 0.5, log_time_grid(0.1, 10.0 / nu, 32));
    suite.check("dispersion envelope ratio", rep.max_ratio, 3.0);
  }
  {  // disc trace equals the pipe trace at k = ell, bit for bit
    const int ell = 1;
    auto grid = make_grid(prof.radius, 64, ell);
    const VectorXcd g0 = random_nodal(*grid, rng);
    const auto t_grid = decay_time_grid(lambda_rate(1e-3, ell, prof.order));
    PropagateOptions popt;
    popt.cross_check = false;
    const DecayTrace disc = disc_decay(prof, 1e-3, ell, t_grid, g0, 64, popt);
    const ModeOperator pipe_op =
        assemble_operator(grid, prof, 1e-3, static_cast<double>(ell), ell);
    const DecayTrace pipe = propagate(pipe_op, g0, t_grid, false, popt);
    bool identical = disc.norms.size() == pipe.norms.size();
    for (Eigen::Index j = 0; identical && j < disc.norms.size(); ++j)
      identical = disc.norms(j) == pipe.norms(j);
    suite.check_true("disc/pipe identification", identical);
  }

  if (suite.failures() > 0)
    throw Error(ErrorCode::VerificationFailure,
                std::to_string(suite.failures()) + " checks failed");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"numerical laboratory for advection-diffusion mode decay in "
               "discs and pipes"};
  app.require_subcommand(1);
  app.fallthrough();

  CliArgs args;
  app.add_option("--config", args.config_path, "path to a key = value config file");
  app.add_option("--out", args.out_dir, "output directory (default: out)");
  app.add_option("--jobs", args.jobs, "worker threads for sweeps");
  app.add_option("--seed", args.seed, "override the config's random seed");
  app.add_flag("--plot", args.plot, "also write SVG plots");
  app.add_option("--dump-operator", args.dump_operator,
                 "write the assembled operator matrix to this path");

  auto* c_order = app.add_subcommand("order", "profile nondegeneracy order report");
  auto* c_level = app.add_subcommand("levelset", "level-set neighbourhoods and coverings");
  auto* c_psa = app.add_subcommand("psa", "pseudospectral abscissa scan");
  auto* c_decay = app.add_subcommand("decay", "single-mode norm decay trace");
  auto* c_sweep = app.add_subcommand("sweep", "viscosity sweep with exponent regression");
  auto* c_disp = app.add_subcommand("dispersion", "split wavenumber integral against the envelope");
  auto* c_verify = app.add_subcommand("verify", "run the invariant suite");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() != 0) {
      std::cerr << "error: ConfigError: " << e.what() << "\n";
      return 2;
    }
    return app.exit(e);  // help/version
  }

  try {
    if (args.config_path.empty())
      throw Error(ErrorCode::ConfigError, "--config is required");
    const Config cfg = Config::parse_file(args.config_path);
    fs::create_directories(args.out_dir);

    if (c_order->parsed()) cmd_order(cfg, args);
    if (c_level->parsed()) cmd_levelset(cfg, args);
    if (c_psa->parsed()) cmd_psa(cfg, args);
    if (c_decay->parsed()) cmd_decay(cfg, args);
    if (c_sweep->parsed()) cmd_sweep(cfg, args);
    if (c_disp->parsed()) cmd_dispersion(cfg, args);
    if (c_verify->parsed()) cmd_verify(cfg, args);
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    switch (e.code()) {
      case ErrorCode::ConfigError:
        return 2;
      case ErrorCode::VerificationFailure:
        return 4;
      default:
        return 3;
    }
  } catch (const std::exception& e) {
    std::cerr << "error: Internal: " << e.what() << "\n";
    return 3;
  }
  return 0;
}
