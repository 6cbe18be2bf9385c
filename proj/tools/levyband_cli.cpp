// Command line front end: estimate a Levy density from simulated increments,
// wrap it in a bootstrap confidence band, inspect the bandwidth rule, run
// the Monte Carlo coverage study, or dump figure data. All outputs are CSV.

#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include "levyband/levyband.hpp"

namespace {

using namespace levyband;

struct CommonArgs {
  std::string model = "bcn:sigma=0,v=0.5,lambda=10";
  std::size_t n = 50000;
  double delta = 0.01;
  std::optional<double> h;
  std::string interval;
  std::string kernel = "flattop:b=1,c=0.05";
  std::string sigma2 = "auto";
  std::size_t n_u = 4097;
  std::size_t points = 101;
  std::uint64_t seed = 1;
  std::string out;
};

void add_common(CLI::App* cmd, CommonArgs& a, bool with_h)
{
  cmd->add_option("--model", a.model, "model spec, e.g. bcn:sigma=1,v=0.5,lambda=10 or gamma:c=0.2,lambda=1");
  cmd->add_option("--n", a.n, "number of increments");
  cmd->add_option("--delta", a.delta, "time span of one increment");
  if (with_h) {
    cmd->add_option("--h", a.h, "bandwidth (omit to use the adjacent-estimate rule)");
  }
  cmd->add_option("--interval", a.interval, "evaluation set a:b[,c:d]; default depends on the model");
  cmd->add_option("--kernel", a.kernel, "kernel spec: flattop:b=1,c=0.05 or poly:k=6");
  cmd->add_option("--sigma2", a.sigma2, "volatility pilot: auto | zero | trv | trv:alpha0=..,theta0=.. | fixed=V");
  cmd->add_option("--nu", a.n_u, "frequency nodes (odd)");
  cmd->add_option("--points", a.points, "grid points per interval");
  cmd->add_option("--seed", a.seed, "simulation seed");
  cmd->add_option("--out", a.out, "output CSV path (default stdout)");
}

void write_output(const std::string& path, const std::string& text)
{
  if (path.empty()) {
    std::cout << text;
    return;
  }
  std::ofstream os(path);
  if (!os) throw std::runtime_error("cannot open output file: " + path);
  os << text;
}

struct Prepared {
  LevyModel model;
  KernelSpec kernel;
  IncrementSample sample;
  EstimatorConfig est_cfg;
};

Prepared prepare(const CommonArgs& a)
{
  Prepared p{LevyModel::parse(a.model), KernelSpec::parse(a.kernel), {}, {}};
  p.sample = simulate_increments(p.model, a.n, a.delta, SeedStream{a.seed}.child("simulate"));
  std::vector<Interval> intervals;
  if (!a.interval.empty())
    intervals = parse_intervals(a.interval);
  else if (p.model.kind == ModelKind::GammaProc)
    intervals = {{0.25, 0.75}};
  else
    intervals = {{-0.75, -0.25}, {0.25, 0.75}};
  p.est_cfg.x_grid = make_grid(intervals, a.points);
  p.est_cfg.n_u = a.n_u;
  p.est_cfg.sigma2 = a.sigma2 == "auto"
                         ? (p.model.has_diffusion() ? Sigma2Spec::trv() : Sigma2Spec::zero())
                         : Sigma2Spec::parse(a.sigma2);
  p.est_cfg.h = a.h ? *a.h
                    : select_bandwidth(p.sample, SelectionConfig{}, p.est_cfg, p.kernel).chosen_h;
  return p;
}

int cmd_estimate(const CommonArgs& a)
{
  Prepared p = prepare(a);
  const DensityEstimate est = spectral_estimate(p.sample, p.est_cfg, p.kernel);
  std::ostringstream os;
  os.precision(10);
  os << "x,rho_hat,rho_true\n";
  for (std::size_t m = 0; m < est.x.size(); ++m)
    os << est.x[m] << ',' << est.rho_hat[m] << ',' << p.model.true_density(est.x[m]) << '\n';
  write_output(a.out, os.str());
  std::cerr << "estimate: h=" << p.est_cfg.h << " sigma2=" << p.est_cfg.sigma2.to_string() << '\n';
  return 0;
}

int cmd_band(const CommonArgs& a, double tau, const std::string& method_name, std::size_t B)
{
  Prepared p = prepare(a);
  const BootMethod method = parse_boot_method(method_name);
  const CfEvaluation cf = ecf_eval(p.sample, symmetric_grid(1.0 / p.est_cfg.h, p.est_cfg.n_u));
  const DensityEstimate est = spectral_estimate(p.sample, p.est_cfg, p.kernel, cf);
  BootstrapOptions opts;
  opts.threads = resolve_threads(0);
  auto [s2, wm] = variance_fn(p.sample, p.est_cfg.h, p.kernel, p.est_cfg.x_grid, cf, opts);
  std::vector<double> s_hat(s2.size());
  for (std::size_t m = 0; m < s2.size(); ++m) s_hat[m] = std::sqrt(std::max(s2[m], 0.0));
  const SeedStream stream = SeedStream{a.seed}.child(to_string(method));
  const double c_hat =
      quantile_from_sups(bootstrap_sup_stats(wm, s_hat, B, method, stream, opts), tau);
  const ConfidenceBand band = build_band(est, s_hat, c_hat, tau, method);

  std::ostringstream os;
  os.precision(10);
  os << "x,rho_hat,lower,upper,rho_true\n";
  for (std::size_t m = 0; m < band.x.size(); ++m)
    os << band.x[m] << ',' << est.rho_hat[m] << ',' << band.lower[m] << ',' << band.upper[m] << ','
       << p.model.true_density(band.x[m]) << '\n';
  write_output(a.out, os.str());
  std::cerr << "band: h=" << p.est_cfg.h << " c_hat=" << c_hat << " mean_width=" << mean_width(band)
            << '\n';
  return 0;
}

int cmd_bandwidth(const CommonArgs& a, double M, std::size_t J, double kappa)
{
  CommonArgs base = a;
  base.h.reset();
  Prepared p = prepare(base);
  SelectionConfig sel_cfg{M, J, kappa};
  const BandwidthSelection sel = select_bandwidth(p.sample, sel_cfg, p.est_cfg, p.kernel);
  std::ostringstream os;
  os.precision(10);
  os << "h,d\n";
  for (std::size_t j = 0; j < sel.candidates.size(); ++j)
    if (!std::isnan(sel.distances[j])) os << sel.candidates[j] << ',' << sel.distances[j] << '\n';
  write_output(a.out, os.str());
  std::cerr << "bandwidth: pilot=" << sel.pilot_h << " chosen h=" << sel.chosen_h << " (candidate "
            << sel.chosen_index + 1 << " of " << sel.candidates.size() << ")\n";
  return 0;
}

int cmd_coverage(const std::string& config_path, const std::string& out,
                 std::optional<std::uint64_t> seed)
{
  std::ifstream in(config_path);
  if (!in) throw std::runtime_error("cannot open config file: " + config_path);
  ExperimentConfig cfg = ExperimentConfig::parse(in);
  if (seed) cfg.seed = *seed;
  const CoverageReport report = run_coverage_experiment(cfg);
  write_output(out, report.to_csv());
  for (const auto& cell : report.cells) {
    std::cerr << "coverage: " << cell.model << " n=" << cell.n << " delta=" << cell.delta
              << " tau=" << cell.tau << " " << cell.method << " -> " << cell.coverage << " +- "
              << cell.coverage_se << " width " << cell.mean_width << " (invalid "
              << cell.invalid_count << ", " << cell.runtime_sec << " s)\n";
  }
  return 0;
}

} // namespace

int main(int argc, char** argv)
{
  CLI::App app{"Spectral Levy density estimation with bootstrap confidence bands"};
  app.require_subcommand(1);

  CommonArgs est_args;
  CLI::App* estimate = app.add_subcommand("estimate", "spectral density estimate on a grid");
  add_common(estimate, est_args, true);

  CommonArgs band_args;
  double tau = 0.10;
  std::string method = "mb";
  std::size_t B = 1500;
  CLI::App* band = app.add_subcommand("band", "estimate plus a bootstrap confidence band");
  add_common(band, band_args, true);
  band->add_option("--tau", tau, "band level complement (level = 1 - tau)");
  band->add_option("--boot", method, "bootstrap method: mb or eb");
  band->add_option("--B", B, "bootstrap replicates");

  CommonArgs bw_args;
  double sel_M = 2.0, sel_kappa = 20.0;
  std::size_t sel_J = 20;
  CLI::App* bandwidth = app.add_subcommand("bandwidth", "adjacent-estimate bandwidth selection");
  add_common(bandwidth, bw_args, false);
  bandwidth->add_option("--M", sel_M, "pilot bandwidth multiplier (pilot = M sqrt(delta))");
  bandwidth->add_option("--J", sel_J, "number of candidate bandwidths");
  bandwidth->add_option("--kappa", sel_kappa, "distance threshold factor");

  std::string cov_config, cov_out;
  std::optional<std::uint64_t> cov_seed;
  CLI::App* coverage = app.add_subcommand("coverage", "Monte Carlo coverage study from a config file");
  coverage->add_option("--config", cov_config, "key=value experiment config")->required();
  coverage->add_option("--out", cov_out, "report CSV path (default stdout)");
  coverage->add_option("--seed", cov_seed, "override the config seed");

  CommonArgs fig_args;
  std::string fig_kind = "estimates-overlay";
  std::size_t fig_series = 25;
  bool fig_direct = false;
  double fig_tau = 0.10;
  std::string fig_method = "mb";
  std::size_t fig_B = 500;
  CLI::App* figure = app.add_subcommand("figure", "CSV data for estimate overlays, bandwidth profiles, band plots");
  add_common(figure, fig_args, true);
  figure->add_option("--kind", fig_kind, "estimates-overlay | bandwidth-profile | band-plot");
  figure->add_option("--series", fig_series, "number of overlay realizations");
  figure->add_flag("--direct", fig_direct, "overlay the direct kernel estimator instead");
  figure->add_option("--tau", fig_tau, "band level complement (band-plot)");
  figure->add_option("--boot", fig_method, "bootstrap method (band-plot)");
  figure->add_option("--B", fig_B, "bootstrap replicates (band-plot)");

  CLI11_PARSE(app, argc, argv);

  try {
    if (estimate->parsed()) return cmd_estimate(est_args);
    if (band->parsed()) return cmd_band(band_args, tau, method, B);
    if (bandwidth->parsed()) return cmd_bandwidth(bw_args, sel_M, sel_J, sel_kappa);
    if (coverage->parsed()) return cmd_coverage(cov_config, cov_out, cov_seed);
    if (figure->parsed()) {
      FigureRequest req;
      if (fig_kind == "estimates-overlay")
        req.kind = FigureKind::EstimatesOverlay;
      else if (fig_kind == "bandwidth-profile")
        req.kind = FigureKind::BandwidthProfile;
      else if (fig_kind == "band-plot")
        req.kind = FigureKind::BandPlot;
      else
        throw std::invalid_argument("unknown figure kind: " + fig_kind);
      req.model = LevyModel::parse(fig_args.model);
      req.n = fig_args.n;
      req.delta = fig_args.delta;
      req.h = fig_args.h;
      req.kernel = KernelSpec::parse(fig_args.kernel);
      if (fig_args.sigma2 != "auto") req.sigma2 = Sigma2Spec::parse(fig_args.sigma2);
      if (!fig_args.interval.empty()) req.intervals = parse_intervals(fig_args.interval);
      req.series = fig_series;
      req.direct_estimator = fig_direct;
      req.tau = fig_tau;
      req.method = parse_boot_method(fig_method);
      req.bootstrap_replicates = fig_B;
      req.n_u = fig_args.n_u;
      req.points_per_interval = fig_args.points;
      req.seed = fig_args.seed;
      write_output(fig_args.out, emit_figure_data(req));
      return 0;
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
