#pragma once

#include <cmath>
#include <cstddef>
#include <numbers>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "levyband/numerics.hpp"

namespace levyband {

class QuadratureResidual : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

//! A smoothing kernel W given through its Fourier transform phi_W, which is
//! even, equals 1 at 0, and vanishes outside [-1, 1]. Two families:
//!
//!   FlatTop(b, c): phi_W = 1 on [-c, c], a smooth roll-off on c < |u| < 1,
//!                  0 outside; infinitely differentiable, so W has vanishing
//!                  moments of every order.
//!   Poly(k):       phi_W(u) = (1 - u^2)^k on [-1, 1], k >= 5.
struct KernelSpec {
  enum class Family { FlatTop, Poly };

  Family family = Family::FlatTop;
  double b = 1.0;
  double c = 0.05;
  int k = 6;

  static KernelSpec flat_top(double b = 1.0, double c = 0.05)
  {
    if (!(b > 0.0)) throw std::invalid_argument("flat-top kernel: b must be positive");
    if (!(c > 0.0 && c < 1.0)) throw std::invalid_argument("flat-top kernel: c must lie in (0,1)");
    KernelSpec s;
    s.family = Family::FlatTop;
    s.b = b;
    s.c = c;
    return s;
  }

  static KernelSpec poly(int k)
  {
    if (k < 5) throw std::invalid_argument("poly kernel: need k >= 5 for C^4 smoothness");
    KernelSpec s;
    s.family = Family::Poly;
    s.k = k;
    return s;
  }

  //! Fourier transform phi_W(u).
  double phi_w(double u) const
  {
    const double a = std::abs(u);
    if (a >= 1.0) return 0.0;
    if (family == Family::Poly) {
      const double base = (1.0 - u) * (1.0 + u);
      return std::pow(base, k);
    }
    if (a <= c) return 1.0;
    const double s = a - c;
    const double t = a - 1.0;
    return std::exp(-b * std::exp(-b / (s * s)) / (t * t));
  }

  std::string to_string() const
  {
    auto fmt = [](double v) {
      std::string s = std::to_string(v);
      s.erase(s.find_last_not_of('0') + 1);
      if (!s.empty() && s.back() == '.') s.pop_back();
      return s;
    };
    if (family == Family::Poly) return "poly:k=" + std::to_string(k);
    return "flattop:b=" + fmt(b) + ",c=" + fmt(c);
  }

  //! Parses "flattop:b=1,c=0.05" or "poly:k=6".
  static KernelSpec parse(std::string_view text)
  {
    const std::size_t colon = text.find(':');
    const std::string_view head = text.substr(0, colon);
    if (head == "flattop") {
      double b = 1.0, c = 0.05;
      if (colon != std::string_view::npos) {
        std::size_t pos = colon + 1;
        while (pos < text.size()) {
          std::size_t comma = text.find(',', pos);
          std::string_view item =
              text.substr(pos, comma == std::string_view::npos ? std::string_view::npos : comma - pos);
          const std::size_t eq = item.find('=');
          if (eq == std::string_view::npos)
            throw std::invalid_argument("kernel parameter must be key=value");
          const std::string_view key = item.substr(0, eq);
          const double value = std::stod(std::string(item.substr(eq + 1)));
          if (key == "b")
            b = value;
          else if (key == "c")
            c = value;
          else
            throw std::invalid_argument("unknown flattop parameter: " + std::string(key));
          if (comma == std::string_view::npos) break;
          pos = comma + 1;
        }
      }
      return flat_top(b, c);
    }
    if (head == "poly") {
      if (colon == std::string_view::npos)
        throw std::invalid_argument("poly kernel needs k=<int>");
      std::string_view rest = text.substr(colon + 1);
      const std::size_t eq = rest.find('=');
      if (eq == std::string_view::npos || rest.substr(0, eq) != "k")
        throw std::invalid_argument("poly kernel needs k=<int>");
      return poly(std::stoi(std::string(rest.substr(eq + 1))));
    }
    throw std::invalid_argument("unknown kernel family: " + std::string(head));
  }
};

//! Pointwise kernel value W(x) = (1/2pi) int e^{-iux} phi_W(u) du by
//! composite trapezoid on [-1, 1] with n_inv nodes. The imaginary residual
//! must stay below 1e-10 (it cancels exactly for symmetric grids).
inline double kernel_w(const KernelSpec& spec, double x, std::size_t n_inv = 20001)
{
  if (n_inv < 3) throw std::invalid_argument("kernel_w: need at least 3 inversion nodes");
  const double du = 2.0 / static_cast<double>(n_inv - 1);
  double re = 0.0, im = 0.0;
  for (std::size_t m = 0; m < n_inv; ++m) {
    const double u = -1.0 + du * static_cast<double>(m);
    const double w = (m == 0 || m == n_inv - 1) ? 0.5 : 1.0;
    const double pw = spec.phi_w(u) * w;
    re += pw * std::cos(u * x);
    im -= pw * std::sin(u * x);
  }
  im *= du / (2.0 * std::numbers::pi);
  re *= du / (2.0 * std::numbers::pi);
  if (std::abs(im) >= 1e-10)
    throw QuadratureResidual("kernel_w: imaginary residual " + std::to_string(im));
  return re;
}

//! W precomputed on a uniform grid over [-span, span] and interpolated
//! linearly; 0 beyond the span. The heavy lifting happens once: per
//! frequency node, the cosines advance over the x grid by a three-term
//! recurrence.
class KernelTable {
public:
  KernelTable(const KernelSpec& spec, double span = 200.0, std::size_t nodes = 100001,
              std::size_t n_inv = 4097)
      : span_(span)
  {
    if (nodes < 3 || nodes % 2 == 0)
      throw std::invalid_argument("KernelTable: nodes must be odd and >= 3");
    const std::size_t half = nodes / 2;
    dx_ = span / static_cast<double>(half);
    std::vector<double> positive(half + 1, 0.0);

    const double du = 2.0 / static_cast<double>(n_inv - 1);
    for (std::size_t m = n_inv / 2; m < n_inv; ++m) {
      const double u = -1.0 + du * static_cast<double>(m);
      double pw = spec.phi_w(u);
      if (pw == 0.0) continue;
      if (u > 0.0) pw *= 2.0; // even integrand, fold negative frequencies
      if (m == n_inv - 1) pw *= 0.5;
      // cos(u*(k+1)*dx) = 2cos(u*dx)cos(u*k*dx) - cos(u*(k-1)*dx)
      const double c1 = std::cos(u * dx_);
      double prev = std::cos(-u * dx_);
      double cur = 1.0;
      for (std::size_t k = 0; k <= half; ++k) {
        positive[k] += pw * cur;
        const double nxt = 2.0 * c1 * cur - prev;
        prev = cur;
        cur = nxt;
      }
    }
    const double scale = du / (2.0 * std::numbers::pi);
    values_.resize(nodes);
    for (std::size_t k = 0; k <= half; ++k) {
      values_[half + k] = positive[k] * scale;
      values_[half - k] = positive[k] * scale;
    }
  }

  double operator()(double x) const
  {
    const double a = std::abs(x);
    if (a >= span_) return 0.0;
    const double pos = (x + span_) / dx_;
    const std::size_t idx = std::min(static_cast<std::size_t>(pos), values_.size() - 2);
    const double frac = pos - static_cast<double>(idx);
    return values_[idx] + frac * (values_[idx + 1] - values_[idx]);
  }

  double span() const { return span_; }
  double step() const { return dx_; }

private:
  double span_;
  double dx_ = 0.0;
  std::vector<double> values_;
};

//! Compactly supported kernel for the direct (non-spectral) estimator.
inline double epanechnikov(double t)
{
  return std::abs(t) <= 1.0 ? 0.75 * (1.0 - t * t) : 0.0;
}

} // namespace levyband
