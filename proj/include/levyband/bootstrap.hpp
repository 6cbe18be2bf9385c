#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <cstdint>
#include <numbers>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "levyband/estimator.hpp"
#include "levyband/numerics.hpp"
#include "levyband/rng.hpp"

namespace levyband {

class ZeroVariance : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

enum class BootMethod { MB, EB };

inline std::string to_string(BootMethod m) { return m == BootMethod::MB ? "mb" : "eb"; }

inline BootMethod parse_boot_method(std::string_view s)
{
  if (s == "mb") return BootMethod::MB;
  if (s == "eb") return BootMethod::EB;
  throw std::invalid_argument("bootstrap method must be mb or eb");
}

//! Deconvolution kernel K_hat(t) = (1/2pi) int e^{-iut} phi_W(u) / phi_hat(u/h) du
//! evaluated by trapezoid over the support of phi_W. The ECF evaluation must
//! live on the symmetric grid over [-1/h, 1/h]; substituting v = u/h turns the
//! integral into (h/2pi) int e^{-ivht} phi_W(vh)/phi_hat(v) dv on that grid.
inline std::vector<double> khat_eval(const CfEvaluation& cf, const KernelSpec& kernel, double h,
                                     std::span<const double> t_grid, double guard = 1e-10,
                                     double delta_for_error = 0.0)
{
  detail::check_cf_guard(cf, guard, h, delta_for_error);
  const std::size_t nu = cf.u.size();
  std::vector<std::complex<double>> f(nu);
  for (std::size_t m = 0; m < nu; ++m)
    f[m] = kernel.phi_w(cf.u[m] * h) / cf.phi[m];

  // e^{-i v h t} over the v grid is e^{-i v x} with x = h t
  std::vector<double> scaled(t_grid.size());
  for (std::size_t j = 0; j < t_grid.size(); ++j) scaled[j] = h * t_grid[j];
  std::vector<double> values = detail::invert_integrand(cf.u, f, scaled, 1e-8);
  for (double& v : values) v *= h;
  return values;
}

//! Convenience overload computing the ECF internally.
inline std::vector<double> khat_eval(const IncrementSample& sample, double h,
                                     const KernelSpec& kernel, std::span<const double> t_grid,
                                     std::size_t n_u = 4097, double guard = 1e-10)
{
  if (!(h > 0.0)) throw std::invalid_argument("khat_eval: bandwidth must be positive");
  const CfEvaluation cf = ecf_eval(sample, symmetric_grid(1.0 / h, n_u));
  return khat_eval(cf, kernel, h, t_grid, guard, sample.delta);
}

//! K_hat tabulated on a uniform t grid with 4-point Lagrange interpolation.
//! K_hat oscillates on scale ~1 (its spectrum lives in [-1,1]), so a step of
//! a few hundredths already reproduces it to ~1e-8.
class KhatTable {
public:
  KhatTable() = default;

  KhatTable(const CfEvaluation& cf, const KernelSpec& kernel, double h, double t_lo, double t_hi,
            double guard = 1e-10)
  {
    const double target_dt = 0.02;
    const std::size_t max_nodes = 400000;
    std::size_t count = static_cast<std::size_t>(std::ceil((t_hi - t_lo) / target_dt)) + 4;
    count = std::min(count, max_nodes);
    count = std::max<std::size_t>(count, 8);
    t_lo_ = t_lo - 2.0 * target_dt;
    dt_ = (t_hi + 2.0 * target_dt - t_lo_) / static_cast<double>(count - 1);
    std::vector<double> nodes(count);
    for (std::size_t k = 0; k < count; ++k) nodes[k] = t_lo_ + dt_ * static_cast<double>(k);
    values_ = khat_eval(cf, kernel, h, nodes, guard);
  }

  double operator()(double t) const
  {
    const double pos = (t - t_lo_) / dt_;
    std::ptrdiff_t i = static_cast<std::ptrdiff_t>(std::floor(pos));
    i = std::clamp<std::ptrdiff_t>(i, 1, static_cast<std::ptrdiff_t>(values_.size()) - 3);
    const double s = pos - static_cast<double>(i);
    const double vm = values_[static_cast<std::size_t>(i - 1)];
    const double v0 = values_[static_cast<std::size_t>(i)];
    const double v1 = values_[static_cast<std::size_t>(i + 1)];
    const double v2 = values_[static_cast<std::size_t>(i + 2)];
    // cubic through the four surrounding nodes
    const double a = (-s * (s - 1.0) * (s - 2.0)) / 6.0;
    const double b = ((s + 1.0) * (s - 1.0) * (s - 2.0)) / 2.0;
    const double c = (-(s + 1.0) * s * (s - 2.0)) / 2.0;
    const double d = ((s + 1.0) * s * (s - 1.0)) / 6.0;
    return a * vm + b * v0 + c * v1 + d * v2;
  }

private:
  double t_lo_ = 0.0;
  double dt_ = 1.0;
  std::vector<double> values_;
};

struct BootstrapOptions {
  std::size_t threads = 1;
  std::size_t memory_cap_bytes = std::size_t{1} << 30;
};

//! The n x N_x array g[j][m] = Y_j^2 K_hat((x_m - Y_j)/h) together with its
//! column means. Rows with Y_j^2 == 0 contribute nothing and are not stored.
//! When the array would exceed the memory cap it is not materialized;
//! consumers then stream it in column chunks, recomputing blocks on the fly.
class WeightMatrix {
public:
  WeightMatrix(const IncrementSample& sample, double h, const KernelSpec& kernel,
               std::vector<double> x_grid, const CfEvaluation& cf,
               const BootstrapOptions& opts = {})
      : n_total_(sample.n()), x_(std::move(x_grid)), h_(h)
  {
    if (x_.empty()) throw std::invalid_argument("WeightMatrix: empty evaluation grid");
    keep_.reserve(sample.n());
    y_.reserve(sample.n());
    for (std::size_t j = 0; j < sample.n(); ++j) {
      const double y = sample.y[j];
      if (y * y > 0.0) {
        keep_.push_back(static_cast<std::uint32_t>(j));
        y_.push_back(y);
      }
    }
    double y_min = 0.0, y_max = 0.0;
    for (double y : y_) {
      y_min = std::min(y_min, y);
      y_max = std::max(y_max, y);
    }
    const auto [x_min, x_max] = std::minmax_element(x_.begin(), x_.end());
    khat_ = KhatTable(cf, kernel, h, (*x_min - y_max) / h, (*x_max - y_min) / h);

    materialized_ = rows() * cols() * sizeof(double) <= opts.memory_cap_bytes;
    if (materialized_) {
      g_.resize(rows() * cols());
      for (std::size_t r = 0; r < rows(); ++r) fill_row(r, 0, cols(), &g_[r * cols()]);
    }

    // column moments: (1/n) sum g and (1/n) sum g^2 over all n rows
    col_mean_.assign(cols(), 0.0);
    col_mean_sq_.assign(cols(), 0.0);
    std::vector<double> row(cols());
    for (std::size_t r = 0; r < rows(); ++r) {
      const double* vals = materialized_ ? &g_[r * cols()] : row.data();
      if (!materialized_) fill_row(r, 0, cols(), row.data());
      for (std::size_t m = 0; m < cols(); ++m) {
        col_mean_[m] += vals[m];
        col_mean_sq_[m] += vals[m] * vals[m];
      }
    }
    const double inv_n = 1.0 / static_cast<double>(n_total_);
    for (std::size_t m = 0; m < cols(); ++m) {
      col_mean_[m] *= inv_n;
      col_mean_sq_[m] *= inv_n;
    }
  }

  std::size_t n_total() const { return n_total_; }
  std::size_t rows() const { return y_.size(); }       // retained (nonzero) rows
  std::size_t cols() const { return x_.size(); }
  bool materialized() const { return materialized_; }
  const std::vector<double>& x_grid() const { return x_; }
  const std::vector<std::uint32_t>& row_indices() const { return keep_; }
  const std::vector<double>& col_means() const { return col_mean_; }

  //! Variance function s_hat_n^2 by the exact two-moment formula.
  std::vector<double> variance() const
  {
    std::vector<double> v(cols());
    for (std::size_t m = 0; m < cols(); ++m)
      v[m] = col_mean_sq_[m] - col_mean_[m] * col_mean_[m];
    return v;
  }

  void fill_row(std::size_t r, std::size_t col_begin, std::size_t col_count, double* out) const
  {
    const double y = y_[r];
    const double y2 = y * y;
    for (std::size_t m = 0; m < col_count; ++m)
      out[m] = y2 * khat_((x_[col_begin + m] - y) / h_);
  }

  //! Largest column-chunk width that fits the cap when streaming.
  std::size_t chunk_cols(std::size_t cap_bytes) const
  {
    const std::size_t per_col = std::max<std::size_t>(rows(), 1) * sizeof(double);
    return std::clamp<std::size_t>(cap_bytes / per_col, 1, cols());
  }

  const std::vector<double>& dense() const
  {
    if (!materialized_) throw std::logic_error("WeightMatrix: not materialized");
    return g_;
  }

private:
  std::size_t n_total_;
  std::vector<std::uint32_t> keep_;
  std::vector<double> y_;
  std::vector<double> x_;
  double h_;
  KhatTable khat_;
  bool materialized_ = false;
  std::vector<double> g_;
  std::vector<double> col_mean_;
  std::vector<double> col_mean_sq_;
};

//! s_hat_n^2 on x_grid plus the cached weight matrix for bootstrap reuse.
inline std::pair<std::vector<double>, WeightMatrix> variance_fn(
    const IncrementSample& sample, double h, const KernelSpec& kernel,
    std::vector<double> x_grid, const CfEvaluation& cf, const BootstrapOptions& opts = {})
{
  WeightMatrix wm(sample, h, kernel, std::move(x_grid), cf, opts);
  return {wm.variance(), std::move(wm)};
}

namespace detail {

//! Per-replicate weights in original sample order. MB: i.i.d. standard
//! normals. EB: multinomial redraw counts minus one.
inline void replicate_weights(BootMethod method, std::size_t n, SeedStream replicate_stream,
                              std::vector<double>& w, double& weight_sum)
{
  auto g = replicate_stream.engine();
  w.resize(n);
  if (method == BootMethod::MB) {
    double s = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
      w[j] = normal_draw(g);
      s += w[j];
    }
    weight_sum = s;
  } else {
    std::fill(w.begin(), w.end(), -1.0);
    for (std::size_t j = 0; j < n; ++j) {
      const std::size_t idx = std::min(static_cast<std::size_t>(uniform01(g) * static_cast<double>(n)),
                                       n - 1);
      w[idx] += 1.0;
    }
    weight_sum = 0.0; // multinomial counts sum to n exactly
  }
}

} // namespace detail

//! Supremum statistics ||Z_hat||_I of B bootstrap replicates. Each replicate
//! owns the substream stream.child(b), so results are independent of thread
//! count and of whether the matrix is materialized or streamed in chunks.
inline std::vector<double> bootstrap_sup_stats(const WeightMatrix& wm,
                                               std::span<const double> s_hat, std::size_t B,
                                               BootMethod method, SeedStream stream,
                                               const BootstrapOptions& opts = {})
{
  if (B < 100) throw std::invalid_argument("bootstrap: need at least 100 replicates");
  if (s_hat.size() != wm.cols())
    throw std::invalid_argument("bootstrap: s_hat does not match the grid");
  for (double s : s_hat)
    if (!(s > 0.0)) throw ZeroVariance("bootstrap: s_hat vanishes on the grid (degenerate sample)");

  const std::size_t n = wm.n_total();
  const double inv_sqrt_n = 1.0 / std::sqrt(static_cast<double>(n));
  std::vector<double> sups(B, 0.0);

  const std::size_t n_chunks =
      wm.materialized() ? 1 : (wm.cols() + wm.chunk_cols(opts.memory_cap_bytes) - 1) /
                                  wm.chunk_cols(opts.memory_cap_bytes);
  const std::size_t chunk_width = wm.materialized() ? wm.cols() : wm.chunk_cols(opts.memory_cap_bytes);

  std::vector<double> block; // streamed chunk storage, rows x chunk_width
  for (std::size_t chunk = 0; chunk < n_chunks; ++chunk) {
    const std::size_t col_begin = chunk * chunk_width;
    const std::size_t col_count = std::min(chunk_width, wm.cols() - col_begin);
    const double* data = nullptr;
    std::size_t stride = 0;
    if (wm.materialized()) {
      data = wm.dense().data();
      stride = wm.cols();
    } else {
      block.resize(wm.rows() * col_count);
      for (std::size_t r = 0; r < wm.rows(); ++r)
        wm.fill_row(r, col_begin, col_count, &block[r * col_count]);
      data = block.data();
      stride = col_count;
    }

    parallel_for(B, opts.threads, [&](std::size_t b) {
      thread_local std::vector<double> weights;
      thread_local std::vector<double> acc;
      double weight_sum = 0.0;
      detail::replicate_weights(method, n, stream.child(b), weights, weight_sum);

      acc.assign(col_count, 0.0);
      const auto& rows = wm.row_indices();
      for (std::size_t r = 0; r < wm.rows(); ++r) {
        const double w = weights[rows[r]];
        if (w == 0.0) continue;
        const double* row = data + r * stride;
        for (std::size_t m = 0; m < col_count; ++m) acc[m] += w * row[m];
      }
      double sup = sups[b];
      for (std::size_t m = 0; m < col_count; ++m) {
        const double centered =
            method == BootMethod::MB ? acc[m] - weight_sum * wm.col_means()[col_begin + m] : acc[m];
        sup = std::max(sup, std::abs(centered * inv_sqrt_n / s_hat[col_begin + m]));
      }
      sups[b] = sup;
    });
  }
  return sups;
}

//! (1-tau) conditional quantile by the order statistic of rank
//! ceil(B(1-tau)), 1-based.
inline double quantile_from_sups(std::vector<double> sups, double tau)
{
  if (!(tau > 0.0 && tau < 1.0)) throw std::invalid_argument("tau must lie in (0,1)");
  std::sort(sups.begin(), sups.end());
  const double bf = static_cast<double>(sups.size());
  std::size_t rank = static_cast<std::size_t>(std::ceil(bf * (1.0 - tau)));
  rank = std::clamp<std::size_t>(rank, 1, sups.size());
  return sups[rank - 1];
}

inline double mb_critical_value(const WeightMatrix& wm, std::span<const double> s_hat,
                                std::size_t B, double tau, SeedStream stream,
                                const BootstrapOptions& opts = {})
{
  return quantile_from_sups(bootstrap_sup_stats(wm, s_hat, B, BootMethod::MB, stream, opts), tau);
}

inline double eb_critical_value(const WeightMatrix& wm, std::span<const double> s_hat,
                                std::size_t B, double tau, SeedStream stream,
                                const BootstrapOptions& opts = {})
{
  return quantile_from_sups(bootstrap_sup_stats(wm, s_hat, B, BootMethod::EB, stream, opts), tau);
}

//! Uniform confidence band [rho_hat -+ s_hat c_hat / (x^2 sqrt(n) h delta)].
struct ConfidenceBand {
  std::vector<double> x;
  std::vector<double> lower;
  std::vector<double> upper;
  double level = 0.0; // 1 - tau
  double c_hat = 0.0;
  BootMethod method = BootMethod::MB;
  double h = 0.0;
  double delta = 0.0;
  std::size_t n = 0;
};

inline ConfidenceBand build_band(const DensityEstimate& est, std::span<const double> s_hat,
                                 double c_hat, double tau, BootMethod method)
{
  if (s_hat.size() != est.x.size())
    throw std::invalid_argument("build_band: s_hat does not match the estimate grid");
  ConfidenceBand band;
  band.x = est.x;
  band.lower.resize(est.x.size());
  band.upper.resize(est.x.size());
  band.level = 1.0 - tau;
  band.c_hat = c_hat;
  band.method = method;
  band.h = est.h;
  band.delta = est.delta;
  band.n = est.n;
  const double root_n = std::sqrt(static_cast<double>(est.n));
  for (std::size_t m = 0; m < est.x.size(); ++m) {
    const double x2 = est.x[m] * est.x[m];
    const double half = s_hat[m] * c_hat / (x2 * root_n * est.h * est.delta);
    band.lower[m] = est.rho_hat[m] - half;
    band.upper[m] = est.rho_hat[m] + half;
  }
  return band;
}

} // namespace levyband
