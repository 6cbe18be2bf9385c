#pragma once

#include <algorithm>
#include <cctype>
#include <chrono>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <iomanip>
#include <istream>
#include <optional>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "levyband/bandwidth.hpp"
#include "levyband/bootstrap.hpp"
#include "levyband/estimator.hpp"
#include "levyband/models.hpp"
#include "levyband/numerics.hpp"

namespace levyband {

struct NDeltaPair {
  std::size_t n;
  double delta;
};

//! Everything a coverage run needs, parsable from key=value text.
struct ExperimentConfig {
  LevyModel model;
  std::vector<NDeltaPair> designs;
  std::vector<Interval> intervals;             // empty = model default
  std::vector<double> taus{0.10};
  std::vector<BootMethod> methods{BootMethod::MB};
  std::size_t bootstrap_replicates = 500;      // B
  std::size_t repetitions = 100;               // R
  std::optional<double> fixed_h;               // empty = adjacent-estimate rule
  bool select_per_repetition = true;
  SelectionConfig selection;
  std::optional<Sigma2Spec> sigma2;            // empty = TRV if sigma > 0 else zero
  std::size_t n_u = 4097;
  std::size_t points_per_interval = 101;
  std::uint64_t seed = 1;
  std::size_t threads = 0;                     // 0 = LEVYBAND_THREADS or hardware
  std::size_t memory_cap_bytes = std::size_t{1} << 30;

  std::vector<Interval> resolved_intervals() const
  {
    if (!intervals.empty()) return intervals;
    if (model.kind == ModelKind::GammaProc) return {{0.25, 0.75}};
    return {{-0.75, -0.25}, {0.25, 0.75}};
  }

  Sigma2Spec resolved_sigma2() const
  {
    if (sigma2) return *sigma2;
    return model.has_diffusion() ? Sigma2Spec::trv() : Sigma2Spec::zero();
  }

  void validate() const
  {
    model.validate();
    if (designs.empty()) throw std::invalid_argument("experiment: no (n, delta) designs");
    for (const auto& d : designs) {
      if (d.n < 1) throw std::invalid_argument("experiment: n must be >= 1");
      if (!(d.delta > 0.0)) throw std::invalid_argument("experiment: delta must be positive");
    }
    if (taus.empty()) throw std::invalid_argument("experiment: no coverage levels");
    for (double t : taus)
      if (!(t > 0.0 && t < 1.0)) throw std::invalid_argument("experiment: tau must lie in (0,1)");
    if (methods.empty()) throw std::invalid_argument("experiment: no bootstrap methods");
    if (repetitions < 1) throw std::invalid_argument("experiment: R must be >= 1");
    if (bootstrap_replicates < 100) throw std::invalid_argument("experiment: B must be >= 100");
    if (fixed_h && !(*fixed_h > 0.0))
      throw std::invalid_argument("experiment: fixed bandwidth must be positive");
  }

  static ExperimentConfig parse(std::istream& in);
  std::string h_mode() const
  {
    if (!fixed_h) return select_per_repetition ? "auto" : "auto-once";
    std::ostringstream os;
    os << "fixed=" << *fixed_h;
    return os.str();
  }
};

struct CoverageCell {
  std::string model;
  std::size_t n = 0;
  double delta = 0.0;
  double tau = 0.0;
  std::string method;
  std::string h_mode;
  double coverage = 0.0;
  double coverage_se = 0.0;
  double mean_width = 0.0;
  std::size_t invalid_count = 0;
  std::uint64_t seed = 0;
  double runtime_sec = 0.0; // not part of the CSV schema
};

struct CoverageReport {
  std::vector<CoverageCell> cells;

  void write_csv(std::ostream& os) const
  {
    os << "model,n,delta,tau,method,h_mode,coverage,coverage_se,mean_width,invalid_count,seed\n";
    for (const auto& c : cells) {
      os << c.model << ',' << c.n << ',' << c.delta << ',' << c.tau << ',' << c.method << ','
         << c.h_mode << ',' << std::setprecision(10) << c.coverage << ',' << c.coverage_se << ','
         << c.mean_width << ',' << c.invalid_count << ',' << c.seed << '\n';
    }
  }

  std::string to_csv() const
  {
    std::ostringstream os;
    write_csv(os);
    return os.str();
  }
};

//! Average band width (1/|I|) int_I (upper - lower) dx by trapezoid.
//! Interval pieces are recovered from spacing jumps in the grid.
inline double mean_width(const ConfidenceBand& band)
{
  const std::size_t npts = band.x.size();
  if (npts < 2) throw std::invalid_argument("mean_width: need at least 2 grid points");
  double integral = 0.0;
  double length = 0.0;
  double first_step = band.x[1] - band.x[0];
  for (std::size_t i = 0; i + 1 < npts; ++i) {
    const double step = band.x[i + 1] - band.x[i];
    if (step > 1.5 * first_step) { // gap between intervals
      if (i + 2 < npts) first_step = band.x[i + 2] - band.x[i + 1];
      continue;
    }
    integral +=
        0.5 * ((band.upper[i] - band.lower[i]) + (band.upper[i + 1] - band.lower[i + 1])) * step;
    length += step;
  }
  if (!(length > 0.0)) throw std::invalid_argument("mean_width: degenerate grid");
  return integral / length;
}

inline double sup_width(const ConfidenceBand& band)
{
  double w = 0.0;
  for (std::size_t i = 0; i < band.x.size(); ++i) w = std::max(w, band.upper[i] - band.lower[i]);
  return w;
}

namespace detail {

struct RepetitionOutcome {
  bool valid = false;
  std::string error;
  double h = 0.0;
  // indexed by method-major, tau-minor
  std::vector<char> covered;
  std::vector<double> mean_widths;
  std::vector<double> sup_widths;
};

//! One Monte Carlo repetition: simulate, pick the bandwidth, estimate,
//! bootstrap, and test band coverage against the true density. Coverage is
//! evaluated both through the normalized sup statistic and through band
//! containment; the two must agree.
inline RepetitionOutcome run_repetition(const ExperimentConfig& cfg, NDeltaPair design,
                                        SeedStream rep_stream, std::optional<double> preselected_h,
                                        const KernelSpec& kernel, const std::vector<double>& x_grid)
{
  RepetitionOutcome out;
  out.covered.assign(cfg.methods.size() * cfg.taus.size(), 0);
  out.mean_widths.assign(cfg.methods.size() * cfg.taus.size(), 0.0);
  out.sup_widths.assign(cfg.methods.size() * cfg.taus.size(), 0.0);
  try {
    const IncrementSample sample =
        simulate_increments(cfg.model, design.n, design.delta, rep_stream.child("simulate"));

    EstimatorConfig est_cfg;
    est_cfg.x_grid = x_grid;
    est_cfg.n_u = cfg.n_u;
    est_cfg.sigma2 = cfg.resolved_sigma2();

    if (cfg.fixed_h)
      est_cfg.h = *cfg.fixed_h;
    else if (preselected_h)
      est_cfg.h = *preselected_h;
    else
      est_cfg.h = select_bandwidth(sample, cfg.selection, est_cfg, kernel).chosen_h;
    out.h = est_cfg.h;

    const CfEvaluation cf = ecf_eval(sample, symmetric_grid(1.0 / est_cfg.h, est_cfg.n_u));
    const DensityEstimate est = spectral_estimate(sample, est_cfg, kernel, cf);

    BootstrapOptions boot_opts;
    boot_opts.threads = 1; // repetitions are already parallel
    boot_opts.memory_cap_bytes = cfg.memory_cap_bytes;
    auto [s2, wm] = variance_fn(sample, est_cfg.h, kernel, x_grid, cf, boot_opts);
    std::vector<double> s_hat(s2.size());
    for (std::size_t m = 0; m < s2.size(); ++m) s_hat[m] = std::sqrt(std::max(s2[m], 0.0));

    // normalized sup deviation, shared by every (tau, method)
    const double scale = std::sqrt(static_cast<double>(est.n)) * est.delta * est.h;
    double sup_stat = 0.0;
    std::vector<double> truth(x_grid.size());
    for (std::size_t m = 0; m < x_grid.size(); ++m) {
      truth[m] = cfg.model.true_density(x_grid[m]);
      if (!(s_hat[m] > 0.0)) throw ZeroVariance("variance function vanishes on the grid");
      const double dev =
          scale * x_grid[m] * x_grid[m] * std::abs(est.rho_hat[m] - truth[m]) / s_hat[m];
      sup_stat = std::max(sup_stat, dev);
    }

    DensityEstimate est_with_s = est;
    est_with_s.s_hat = s_hat;

    for (std::size_t mi = 0; mi < cfg.methods.size(); ++mi) {
      const BootMethod method = cfg.methods[mi];
      const SeedStream stream = rep_stream.child(to_string(method));
      const std::vector<double> sups =
          bootstrap_sup_stats(wm, s_hat, cfg.bootstrap_replicates, method, stream, boot_opts);
      for (std::size_t ti = 0; ti < cfg.taus.size(); ++ti) {
        const double tau = cfg.taus[ti];
        const double c_hat = quantile_from_sups(sups, tau);
        const ConfidenceBand band = build_band(est_with_s, s_hat, c_hat, tau, method);

        bool covered_band = true;
        for (std::size_t m = 0; m < x_grid.size(); ++m)
          covered_band = covered_band && band.lower[m] <= truth[m] && truth[m] <= band.upper[m];
        const bool covered_sup = sup_stat <= c_hat;
        if (covered_band != covered_sup)
          throw std::logic_error("coverage check mismatch between band and sup-statistic forms");

        const std::size_t slot = mi * cfg.taus.size() + ti;
        out.covered[slot] = covered_band ? 1 : 0;
        out.mean_widths[slot] = mean_width(band);
        out.sup_widths[slot] = sup_width(band);
      }
    }
    out.valid = true;
  } catch (const std::exception& e) {
    out.valid = false;
    out.error = e.what();
  }
  return out;
}

} // namespace detail

//! Coverage/width study over all configured designs, taus, and methods.
//! Repetition r of design d draws everything from seed.child(d).child(r),
//! so reports are reproducible for a fixed seed no matter the thread count.
inline CoverageReport run_coverage_experiment(const ExperimentConfig& cfg)
{
  cfg.validate();
  const KernelSpec kernel = KernelSpec::flat_top();
  const std::vector<Interval> intervals = cfg.resolved_intervals();
  const std::vector<double> x_grid = make_grid(intervals, cfg.points_per_interval);
  const std::size_t threads = resolve_threads(cfg.threads);

  CoverageReport report;
  for (std::size_t d = 0; d < cfg.designs.size(); ++d) {
    const NDeltaPair design = cfg.designs[d];
    const SeedStream design_stream = SeedStream{cfg.seed}.child(d);
    const auto started = std::chrono::steady_clock::now();

    std::optional<double> shared_h;
    if (!cfg.fixed_h && !cfg.select_per_repetition) {
      // one selection per configuration, on the first repetition's data
      const IncrementSample pilot_sample = simulate_increments(
          cfg.model, design.n, design.delta, design_stream.child(0).child("simulate"));
      EstimatorConfig est_cfg;
      est_cfg.x_grid = x_grid;
      est_cfg.n_u = cfg.n_u;
      est_cfg.sigma2 = cfg.resolved_sigma2();
      shared_h = select_bandwidth(pilot_sample, cfg.selection, est_cfg, kernel).chosen_h;
    }

    std::vector<detail::RepetitionOutcome> outcomes(cfg.repetitions);
    parallel_for(cfg.repetitions, threads, [&](std::size_t r) {
      outcomes[r] =
          detail::run_repetition(cfg, design, design_stream.child(r), shared_h, kernel, x_grid);
    });

    const double elapsed =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();

    std::size_t invalid = 0;
    for (const auto& o : outcomes)
      if (!o.valid) ++invalid;
    const std::size_t valid = cfg.repetitions - invalid;

    for (std::size_t mi = 0; mi < cfg.methods.size(); ++mi) {
      for (std::size_t ti = 0; ti < cfg.taus.size(); ++ti) {
        const std::size_t slot = mi * cfg.taus.size() + ti;
        double hits = 0.0, width_sum = 0.0;
        for (const auto& o : outcomes) {
          if (!o.valid) continue;
          hits += o.covered[slot];
          width_sum += o.mean_widths[slot];
        }
        CoverageCell cell;
        cell.model = cfg.model.to_string();
        cell.n = design.n;
        cell.delta = design.delta;
        cell.tau = cfg.taus[ti];
        cell.method = to_string(cfg.methods[mi]);
        cell.h_mode = cfg.h_mode();
        cell.coverage = valid > 0 ? hits / static_cast<double>(valid) : 0.0;
        cell.coverage_se =
            valid > 0 ? std::sqrt(cell.coverage * (1.0 - cell.coverage) / static_cast<double>(valid))
                      : 0.0;
        cell.mean_width = valid > 0 ? width_sum / static_cast<double>(valid) : 0.0;
        cell.invalid_count = invalid;
        cell.seed = cfg.seed;
        cell.runtime_sec = elapsed;
        report.cells.push_back(std::move(cell));
      }
    }
  }
  return report;
}

inline ExperimentConfig ExperimentConfig::parse(std::istream& in)
{
  ExperimentConfig cfg;
  cfg.model = LevyModel::bcn(0.0, 0.5, 10.0);
  bool have_model = false, have_design = false;
  std::string line;
  while (std::getline(in, line)) {
    const std::size_t hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    const auto notspace = [](unsigned char c) { return !std::isspace(c); };
    line.erase(line.begin(), std::find_if(line.begin(), line.end(), notspace));
    line.erase(std::find_if(line.rbegin(), line.rend(), notspace).base(), line.end());
    if (line.empty()) continue;
    const std::size_t eq = line.find('=');
    if (eq == std::string::npos)
      throw std::invalid_argument("experiment config: expected key = value, got: " + line);
    std::string key = line.substr(0, eq);
    std::string value = line.substr(eq + 1);
    key.erase(std::find_if(key.rbegin(), key.rend(), notspace).base(), key.end());
    value.erase(value.begin(), std::find_if(value.begin(), value.end(), notspace));

    auto split_list = [](const std::string& s) {
      std::vector<std::string> items;
      std::size_t pos = 0;
      while (pos <= s.size()) {
        std::size_t comma = s.find(',', pos);
        std::string item = s.substr(pos, comma == std::string::npos ? std::string::npos : comma - pos);
        item.erase(item.begin(), std::find_if(item.begin(), item.end(),
                                              [](unsigned char c) { return !std::isspace(c); }));
        item.erase(std::find_if(item.rbegin(), item.rend(),
                                [](unsigned char c) { return !std::isspace(c); })
                       .base(),
                   item.end());
        if (!item.empty()) items.push_back(item);
        if (comma == std::string::npos) break;
        pos = comma + 1;
      }
      return items;
    };

    if (key == "model") {
      cfg.model = LevyModel::parse(value);
      have_model = true;
    } else if (key == "n_delta") {
      cfg.designs.clear();
      for (const auto& item : split_list(value)) {
        const std::size_t colon = item.find(':');
        if (colon == std::string::npos)
          throw std::invalid_argument("n_delta entries must look like 50000:0.01");
        cfg.designs.push_back({static_cast<std::size_t>(std::stoull(item.substr(0, colon))),
                               std::stod(item.substr(colon + 1))});
      }
      have_design = true;
    } else if (key == "interval") {
      cfg.intervals = parse_intervals(value);
    } else if (key == "tau") {
      cfg.taus.clear();
      for (const auto& item : split_list(value)) cfg.taus.push_back(std::stod(item));
    } else if (key == "method") {
      cfg.methods.clear();
      for (const auto& item : split_list(value)) cfg.methods.push_back(parse_boot_method(item));
    } else if (key == "B") {
      cfg.bootstrap_replicates = std::stoull(value);
    } else if (key == "R") {
      cfg.repetitions = std::stoull(value);
    } else if (key == "bandwidth") {
      if (value == "auto")
        cfg.fixed_h.reset();
      else
        cfg.fixed_h = std::stod(value);
    } else if (key == "select_per_rep") {
      cfg.select_per_repetition = value == "true" || value == "1";
    } else if (key == "selection_M") {
      cfg.selection.pilot_multiplier = std::stod(value);
    } else if (key == "selection_J") {
      cfg.selection.candidate_count = std::stoull(value);
    } else if (key == "selection_kappa") {
      cfg.selection.threshold = std::stod(value);
    } else if (key == "sigma2") {
      if (value == "auto")
        cfg.sigma2.reset();
      else
        cfg.sigma2 = Sigma2Spec::parse(value);
    } else if (key == "n_u") {
      cfg.n_u = std::stoull(value);
    } else if (key == "points_per_interval") {
      cfg.points_per_interval = std::stoull(value);
    } else if (key == "seed") {
      cfg.seed = std::stoull(value);
    } else if (key == "threads") {
      cfg.threads = std::stoull(value);
    } else {
      throw std::invalid_argument("experiment config: unknown key: " + key);
    }
  }
  if (!have_model) throw std::invalid_argument("experiment config: model is required");
  if (!have_design) throw std::invalid_argument("experiment config: n_delta is required");
  return cfg;
}

// ---------------------------------------------------------------------------
// Figure data

enum class FigureKind { EstimatesOverlay, BandwidthProfile, BandPlot };

struct FigureRequest {
  FigureKind kind = FigureKind::EstimatesOverlay;
  LevyModel model;
  std::size_t n = 50000;
  double delta = 0.01;
  std::optional<double> h;              // empty = adjacent-estimate rule
  KernelSpec kernel = KernelSpec::flat_top();
  std::optional<Sigma2Spec> sigma2;     // empty = by model
  std::vector<Interval> intervals;      // empty = by model
  std::size_t series = 25;              // overlay realizations
  bool direct_estimator = false;        // overlay: direct kernel instead of spectral
  double tau = 0.10;                    // band plot
  BootMethod method = BootMethod::MB;
  std::size_t bootstrap_replicates = 500;
  SelectionConfig selection;
  std::size_t n_u = 4097;
  std::size_t points_per_interval = 101;
  std::uint64_t seed = 1;
};

//! Tidy CSV for the three figure families: estimate overlays over many
//! seeds, the bandwidth distance profile, and a single band plot.
inline std::string emit_figure_data(const FigureRequest& req)
{
  req.model.validate();
  std::vector<Interval> intervals = req.intervals;
  if (intervals.empty())
    intervals = req.model.kind == ModelKind::GammaProc
                    ? std::vector<Interval>{{0.25, 0.75}}
                    : std::vector<Interval>{{-0.75, -0.25}, {0.25, 0.75}};
  const std::vector<double> x_grid = make_grid(intervals, req.points_per_interval);

  EstimatorConfig est_cfg;
  est_cfg.x_grid = x_grid;
  est_cfg.n_u = req.n_u;
  est_cfg.sigma2 = req.sigma2 ? *req.sigma2
                              : (req.model.has_diffusion() ? Sigma2Spec::trv() : Sigma2Spec::zero());

  std::ostringstream os;
  os << std::setprecision(10);

  auto bandwidth_for = [&](const IncrementSample& sample) {
    if (req.h) return *req.h;
    return select_bandwidth(sample, req.selection, est_cfg, req.kernel).chosen_h;
  };

  switch (req.kind) {
    case FigureKind::EstimatesOverlay: {
      os << "series_id,x,value\n";
      for (std::size_t s = 0; s < req.series; ++s) {
        const IncrementSample sample = simulate_increments(
            req.model, req.n, req.delta, SeedStream{req.seed}.child(s).child("simulate"));
        est_cfg.h = bandwidth_for(sample);
        std::vector<double> values;
        if (req.direct_estimator) {
          values = direct_kernel_estimate(sample, est_cfg.h, x_grid);
        } else {
          values = spectral_estimate(sample, est_cfg, req.kernel).rho_hat;
        }
        for (std::size_t m = 0; m < x_grid.size(); ++m)
          os << 's' << s << ',' << x_grid[m] << ',' << values[m] << '\n';
      }
      if (req.series > 0) {
        for (std::size_t m = 0; m < x_grid.size(); ++m)
          os << "truth," << x_grid[m] << ',' << req.model.true_density(x_grid[m]) << '\n';
      }
      break;
    }
    case FigureKind::BandwidthProfile: {
      os << "h,d\n";
      const IncrementSample sample = simulate_increments(
          req.model, req.n, req.delta, SeedStream{req.seed}.child(0).child("simulate"));
      for (const auto& [h, d] : distance_profile(sample, req.selection, est_cfg, req.kernel))
        os << h << ',' << d << '\n';
      break;
    }
    case FigureKind::BandPlot: {
      os << "x,rho_hat,lower,upper,rho_true\n";
      const SeedStream rep = SeedStream{req.seed}.child(0);
      const IncrementSample sample =
          simulate_increments(req.model, req.n, req.delta, rep.child("simulate"));
      est_cfg.h = bandwidth_for(sample);
      const CfEvaluation cf = ecf_eval(sample, symmetric_grid(1.0 / est_cfg.h, est_cfg.n_u));
      const DensityEstimate est = spectral_estimate(sample, est_cfg, req.kernel, cf);
      auto [s2, wm] = variance_fn(sample, est_cfg.h, req.kernel, x_grid, cf);
      std::vector<double> s_hat(s2.size());
      for (std::size_t m = 0; m < s2.size(); ++m) s_hat[m] = std::sqrt(std::max(s2[m], 0.0));
      const std::vector<double> sups =
          bootstrap_sup_stats(wm, s_hat, req.bootstrap_replicates, req.method,
                              rep.child(to_string(req.method)));
      const ConfidenceBand band =
          build_band(est, s_hat, quantile_from_sups(sups, req.tau), req.tau, req.method);
      for (std::size_t m = 0; m < x_grid.size(); ++m) {
        os << x_grid[m] << ',' << est.rho_hat[m] << ',' << band.lower[m] << ',' << band.upper[m]
           << ',' << req.model.true_density(x_grid[m]) << '\n';
      }
      break;
    }
  }
  return os.str();
}

} // namespace levyband
