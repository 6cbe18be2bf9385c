#pragma once

#include <cmath>
#include <complex>
#include <cstddef>
#include <limits>
#include <numbers>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "levyband/char_fn.hpp"
#include "levyband/kernel.hpp"
#include "levyband/models.hpp"
#include "levyband/numerics.hpp"

namespace levyband {

//! Raised when min |phi_hat| on the working frequency grid falls below the
//! guard. The empirical CF is bounded away from 0 on [-1/h, 1/h] whenever
//! h is of order sqrt(delta) or larger, so hitting the guard signals a
//! misconfigured bandwidth rather than sampling noise.
class CharFnTooSmall : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

//! Truncated realized volatility: mean of Y^2/delta over increments below
//! the threshold alpha0 * delta^theta0.
inline double trv_sigma2(const IncrementSample& sample, double alpha0 = 3.0, double theta0 = 0.48)
{
  if (!(alpha0 > 0.0)) throw std::invalid_argument("trv_sigma2: alpha0 must be positive");
  if (!(theta0 > 0.0 && theta0 < 0.5))
    throw std::invalid_argument("trv_sigma2: theta0 must lie in (0, 1/2)");
  const double threshold = alpha0 * std::pow(sample.delta, theta0);
  double acc = 0.0;
  for (double y : sample.y)
    if (std::abs(y) <= threshold) acc += y * y;
  return acc / (static_cast<double>(sample.n()) * sample.delta);
}

//! Power variation estimator with power alpha in (0, 2).
inline double pv_sigma2(const IncrementSample& sample, double alpha)
{
  if (!(alpha > 0.0 && alpha < 2.0)) throw std::invalid_argument("pv_sigma2: alpha must lie in (0,2)");
  const double m_alpha =
      std::pow(2.0, alpha / 2.0) * std::tgamma((alpha + 1.0) / 2.0) / std::sqrt(std::numbers::pi);
  double acc = 0.0;
  for (double y : sample.y) acc += std::pow(std::abs(y), alpha);
  const double mean_p =
      acc / (static_cast<double>(sample.n()) * std::pow(sample.delta, alpha / 2.0) * m_alpha);
  return std::pow(mean_p, 2.0 / alpha);
}

inline double default_jr_frequency(std::size_t n, double delta)
{
  return std::sqrt(std::log(static_cast<double>(n)) / delta);
}

//! Log-ECF volatility estimator evaluated at a single frequency u_n.
inline double jr_sigma2(const IncrementSample& sample, double u_n)
{
  if (!(u_n > 0.0)) throw std::invalid_argument("jr_sigma2: u_n must be positive");
  double re = 0.0, im = 0.0;
  for (double y : sample.y) {
    re += std::cos(u_n * y);
    im += std::sin(u_n * y);
  }
  const double mod = std::hypot(re, im) / static_cast<double>(sample.n());
  if (mod == 0.0) return 0.0;
  return -2.0 * std::log(mod) / (sample.delta * u_n * u_n);
}

struct Sigma2Spec {
  enum class Mode { Zero, Fixed, Trv };

  Mode mode = Mode::Zero;
  double value = 0.0;  // Fixed mode
  double alpha0 = 3.0; // TRV threshold scale
  double theta0 = 0.48;

  static Sigma2Spec zero() { return {}; }
  static Sigma2Spec fixed(double v) { return {Mode::Fixed, v, 3.0, 0.48}; }
  static Sigma2Spec trv(double alpha0 = 3.0, double theta0 = 0.48)
  {
    return {Mode::Trv, 0.0, alpha0, theta0};
  }

  double resolve(const IncrementSample& sample) const
  {
    switch (mode) {
      case Mode::Zero: return 0.0;
      case Mode::Fixed: return value;
      case Mode::Trv: return trv_sigma2(sample, alpha0, theta0);
    }
    return 0.0;
  }

  std::string to_string() const
  {
    switch (mode) {
      case Mode::Zero: return "zero";
      case Mode::Fixed: return "fixed=" + std::to_string(value);
      case Mode::Trv: return "trv";
    }
    return {};
  }

  //! Parses "zero", "trv", "trv:alpha0=3,theta0=0.48", "fixed=0.5".
  static Sigma2Spec parse(std::string_view text)
  {
    if (text == "zero") return zero();
    if (text == "trv") return trv();
    if (text.rfind("trv:", 0) == 0) {
      Sigma2Spec s = trv();
      std::size_t pos = 4;
      while (pos < text.size()) {
        std::size_t comma = text.find(',', pos);
        std::string_view item =
            text.substr(pos, comma == std::string_view::npos ? std::string_view::npos : comma - pos);
        const std::size_t eq = item.find('=');
        if (eq == std::string_view::npos)
          throw std::invalid_argument("sigma2 parameter must be key=value");
        const std::string_view key = item.substr(0, eq);
        const double v = std::stod(std::string(item.substr(eq + 1)));
        if (key == "alpha0")
          s.alpha0 = v;
        else if (key == "theta0")
          s.theta0 = v;
        else
          throw std::invalid_argument("unknown trv parameter: " + std::string(key));
        if (comma == std::string_view::npos) break;
        pos = comma + 1;
      }
      return s;
    }
    if (text.rfind("fixed=", 0) == 0) return fixed(std::stod(std::string(text.substr(6))));
    throw std::invalid_argument("sigma2 spec must be zero | trv[:...] | fixed=V");
  }
};

struct EstimatorConfig {
  double h = 0.1;              // bandwidth
  std::vector<double> x_grid;  // evaluation points, all away from 0
  std::size_t n_u = 4097;      // frequency nodes on [-1/h, 1/h], odd
  Sigma2Spec sigma2;
  double cf_guard = 1e-10;

  void validate() const
  {
    if (!(h > 0.0)) throw std::invalid_argument("estimator: bandwidth must be positive");
    if (n_u < 129 || n_u % 2 == 0)
      throw std::invalid_argument("estimator: n_u must be odd and >= 129");
    if (x_grid.empty()) throw std::invalid_argument("estimator: empty evaluation grid");
    for (double x : x_grid)
      if (!(std::abs(x) > 0.0) || !std::isfinite(x))
        throw std::invalid_argument("estimator: evaluation points must be finite and nonzero");
  }
};

struct DensityEstimate {
  std::vector<double> x;
  std::vector<double> rho_hat;
  std::vector<double> s_hat; // filled by the band construction, may be empty
  double h = 0.0;
  double delta = 0.0;
  std::size_t n = 0;
};

namespace detail {

inline void check_cf_guard(const CfEvaluation& cf, double guard, double h, double delta)
{
  double min_mod = std::numeric_limits<double>::infinity();
  for (const auto& p : cf.phi) min_mod = std::min(min_mod, std::abs(p));
  if (!(min_mod > guard)) {
    throw CharFnTooSmall("empirical characteristic function too small on the grid (min " +
                         std::to_string(min_mod) + "); bandwidth h=" + std::to_string(h) +
                         " is likely too small relative to sqrt(delta)=" +
                         std::to_string(std::sqrt(delta)));
  }
}

//! Fourier-inverts tabulated integrand values over a symmetric uniform
//! frequency grid at each point of x_grid: out[j] = (du/2pi) sum_m w_m
//! e^{-i u_m x_j} f_m. Returns real parts; |imag| must stay below
//! residual_tol * scale_j.
inline std::vector<double> invert_integrand(const std::vector<double>& u,
                                            const std::vector<std::complex<double>>& f,
                                            std::span<const double> x_grid, double residual_tol,
                                            std::span<const double> residual_scale = {})
{
  const std::size_t nu = u.size();
  const double du = (u.back() - u.front()) / static_cast<double>(nu - 1);
  std::vector<double> out(x_grid.size());
  constexpr std::size_t kResync = 256;
  for (std::size_t j = 0; j < x_grid.size(); ++j) {
    const double x = x_grid[j];
    const double zr = std::cos(du * x), zi = -std::sin(du * x);
    double wr = std::cos(u.front() * x), wi = -std::sin(u.front() * x);
    double acc_r = 0.0, acc_i = 0.0;
    std::size_t since_sync = 0;
    for (std::size_t m = 0; m < nu; ++m) {
      double fr = f[m].real(), fi = f[m].imag();
      if (m == 0 || m == nu - 1) {
        fr *= 0.5;
        fi *= 0.5;
      }
      acc_r += fr * wr - fi * wi;
      acc_i += fr * wi + fi * wr;
      const double nwr = wr * zr - wi * zi;
      wi = wr * zi + wi * zr;
      wr = nwr;
      if (++since_sync == kResync && m + 1 < nu) {
        wr = std::cos(u[m + 1] * x);
        wi = -std::sin(u[m + 1] * x);
        since_sync = 0;
      }
    }
    const double scale = du / (2.0 * std::numbers::pi);
    acc_r *= scale;
    acc_i *= scale;
    const double tol_scale = residual_scale.empty() ? 1.0 : residual_scale[j];
    if (!(std::abs(acc_i * tol_scale) < residual_tol))
      throw QuadratureResidual("Fourier inversion: imaginary residual " +
                               std::to_string(acc_i * tol_scale));
    out[j] = acc_r;
  }
  return out;
}

} // namespace detail

//! Spectral estimator on cfg.x_grid, reusing a precomputed ECF evaluation.
//! The ECF grid must be the symmetric grid on [-1/h, 1/h] with cfg.n_u nodes.
inline DensityEstimate spectral_estimate(const IncrementSample& sample, const EstimatorConfig& cfg,
                                         const KernelSpec& kernel, const CfEvaluation& cf)
{
  cfg.validate();
  if (sample.n() == 0) throw std::invalid_argument("spectral_estimate: empty sample");
  if (cf.u.size() != cfg.n_u || std::abs(cf.u.back() - 1.0 / cfg.h) > 1e-9 / cfg.h)
    throw std::invalid_argument("spectral_estimate: ECF grid does not match the configuration");

  detail::check_cf_guard(cf, cfg.cf_guard, cfg.h, sample.delta);
  const double sigma2 = cfg.sigma2.resolve(sample);

  // integrand ((phi')^2 - phi'' phi) / (delta phi^2) - sigma^2, tapered by phi_W(uh)
  const std::size_t nu = cfg.n_u;
  std::vector<std::complex<double>> f(nu);
  for (std::size_t m = 0; m < nu; ++m) {
    const std::complex<double> phi = cf.phi[m];
    const std::complex<double> num = cf.dphi[m] * cf.dphi[m] - cf.d2phi[m] * phi;
    const std::complex<double> core = num / (sample.delta * phi * phi) - sigma2;
    f[m] = core * kernel.phi_w(cf.u[m] * cfg.h);
  }

  // residual tolerance 1e-8 applies on the rho_hat scale, i.e. after 1/(2pi x^2)
  std::vector<double> inv_x2(cfg.x_grid.size());
  for (std::size_t j = 0; j < cfg.x_grid.size(); ++j)
    inv_x2[j] = 1.0 / (cfg.x_grid[j] * cfg.x_grid[j]);
  std::vector<double> raw = detail::invert_integrand(cf.u, f, cfg.x_grid, 1e-8, inv_x2);

  DensityEstimate est;
  est.x = cfg.x_grid;
  est.rho_hat.resize(raw.size());
  for (std::size_t j = 0; j < raw.size(); ++j) est.rho_hat[j] = raw[j] * inv_x2[j];
  est.h = cfg.h;
  est.delta = sample.delta;
  est.n = sample.n();
  return est;
}

inline DensityEstimate spectral_estimate(const IncrementSample& sample, const EstimatorConfig& cfg,
                                         const KernelSpec& kernel)
{
  cfg.validate();
  const CfEvaluation cf = ecf_eval(sample, symmetric_grid(1.0 / cfg.h, cfg.n_u));
  return spectral_estimate(sample, cfg, kernel, cf);
}

//! Plain kernel density estimate of the increment law scaled by 1/delta,
//! with the Epanechnikov kernel. Kept for bias comparisons against the
//! spectral estimator.
inline std::vector<double> direct_kernel_estimate(const IncrementSample& sample, double h,
                                                  std::span<const double> x_grid)
{
  if (!(h > 0.0)) throw std::invalid_argument("direct_kernel_estimate: bandwidth must be positive");
  if (sample.n() == 0) throw std::invalid_argument("direct_kernel_estimate: empty sample");
  std::vector<double> out(x_grid.size(), 0.0);
  const double norm = 1.0 / (static_cast<double>(sample.n()) * sample.delta * h);
  for (std::size_t j = 0; j < x_grid.size(); ++j) {
    double acc = 0.0;
    for (double y : sample.y) acc += epanechnikov((x_grid[j] - y) / h);
    out[j] = acc * norm;
  }
  return out;
}

} // namespace levyband
