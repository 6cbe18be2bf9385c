#pragma once

#include <cmath>
#include <complex>
#include <cstddef>
#include <map>
#include <numbers>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "levyband/rng.hpp"

namespace levyband {

enum class ModelKind { BCN, BCL, GammaProc };

//! Simulated data-generating processes: Brownian motion plus a compound
//! Poisson process with normal (BCN) or Laplace (BCL) jumps, and the Gamma
//! subordinator. Each model knows its exact increment law, its Levy density,
//! and its characteristic exponent.
struct LevyModel {
  ModelKind kind = ModelKind::BCN;
  double sigma = 0.0;       // diffusion coefficient (BCN/BCL)
  double jump_scale = 0.0;  // jump size scale: normal sd, or Laplace scale
  double jump_rate = 0.0;   // compound Poisson intensity
  double gamma_shape = 0.0; // Gamma process shape per unit time
  double gamma_rate = 0.0;  // Gamma process exponential decay rate

  static LevyModel bcn(double sigma, double jump_scale, double jump_rate)
  {
    LevyModel m;
    m.kind = ModelKind::BCN;
    m.sigma = sigma;
    m.jump_scale = jump_scale;
    m.jump_rate = jump_rate;
    m.validate();
    return m;
  }

  static LevyModel bcl(double sigma, double jump_scale, double jump_rate)
  {
    LevyModel m = bcn(sigma, jump_scale, jump_rate);
    m.kind = ModelKind::BCL;
    return m;
  }

  static LevyModel gamma_process(double shape, double rate)
  {
    LevyModel m;
    m.kind = ModelKind::GammaProc;
    m.gamma_shape = shape;
    m.gamma_rate = rate;
    m.validate();
    return m;
  }

  void validate() const
  {
    if (kind == ModelKind::GammaProc) {
      if (!(gamma_shape > 0.0) || !(gamma_rate > 0.0))
        throw std::invalid_argument("gamma process parameters must be positive");
    } else {
      if (!(sigma >= 0.0)) throw std::invalid_argument("sigma must be >= 0");
      if (!(jump_scale > 0.0)) throw std::invalid_argument("jump scale must be positive");
      if (!(jump_rate > 0.0)) throw std::invalid_argument("jump intensity must be positive");
    }
  }

  bool has_diffusion() const { return kind != ModelKind::GammaProc && sigma > 0.0; }

  //! Levy density at x. Total on x != 0; one-sided models return 0 off
  //! their support.
  double true_density(double x) const
  {
    switch (kind) {
      case ModelKind::BCN:
        return jump_rate *
               std::exp(-x * x / (2.0 * jump_scale * jump_scale)) /
               std::sqrt(2.0 * std::numbers::pi * jump_scale * jump_scale);
      case ModelKind::BCL:
        return jump_rate * std::exp(-std::abs(x) / jump_scale) / (2.0 * jump_scale);
      case ModelKind::GammaProc:
        return x > 0.0 ? gamma_shape * std::exp(-gamma_rate * x) / x : 0.0;
    }
    return 0.0;
  }

  //! Characteristic exponent psi with E[e^{iuL_t}] = e^{t psi(u)}.
  std::complex<double> char_exponent(double u) const
  {
    const std::complex<double> i(0.0, 1.0);
    switch (kind) {
      case ModelKind::BCN: {
        const double jump_cf = std::exp(-0.5 * jump_scale * jump_scale * u * u);
        return -0.5 * sigma * sigma * u * u + jump_rate * (jump_cf - 1.0);
      }
      case ModelKind::BCL: {
        const double jump_cf = 1.0 / (1.0 + jump_scale * jump_scale * u * u);
        return -0.5 * sigma * sigma * u * u + jump_rate * (jump_cf - 1.0);
      }
      case ModelKind::GammaProc:
        return -gamma_shape * std::log(1.0 - i * u / gamma_rate);
    }
    return 0.0;
  }

  double mean_rate() const // E[L_1]
  {
    return kind == ModelKind::GammaProc ? gamma_shape / gamma_rate : 0.0;
  }

  double variance_rate() const // Var[L_1] = sigma^2 + int x^2 rho
  {
    switch (kind) {
      case ModelKind::BCN:
        return sigma * sigma + jump_rate * jump_scale * jump_scale;
      case ModelKind::BCL:
        return sigma * sigma + 2.0 * jump_rate * jump_scale * jump_scale;
      case ModelKind::GammaProc:
        return gamma_shape / (gamma_rate * gamma_rate);
    }
    return 0.0;
  }

  double fourth_moment_rate() const // int x^4 rho
  {
    switch (kind) {
      case ModelKind::BCN:
        return 3.0 * jump_rate * std::pow(jump_scale, 4);
      case ModelKind::BCL:
        return 24.0 * jump_rate * std::pow(jump_scale, 4);
      case ModelKind::GammaProc:
        return 6.0 * gamma_shape / std::pow(gamma_rate, 4);
    }
    return 0.0;
  }

  std::string to_string() const
  {
    auto fmt = [](double v) {
      std::string s = std::to_string(v);
      s.erase(s.find_last_not_of('0') + 1);
      if (!s.empty() && s.back() == '.') s.pop_back();
      return s;
    };
    switch (kind) {
      case ModelKind::BCN:
        return "bcn:sigma=" + fmt(sigma) + ",v=" + fmt(jump_scale) + ",lambda=" + fmt(jump_rate);
      case ModelKind::BCL:
        return "bcl:sigma=" + fmt(sigma) + ",v=" + fmt(jump_scale) + ",lambda=" + fmt(jump_rate);
      case ModelKind::GammaProc:
        return "gamma:c=" + fmt(gamma_shape) + ",lambda=" + fmt(gamma_rate);
    }
    return {};
  }

  //! Parses "bcn:sigma=1,v=0.5,lambda=10", "bcl:...", "gamma:c=0.2,lambda=1".
  static LevyModel parse(std::string_view text)
  {
    const std::size_t colon = text.find(':');
    if (colon == std::string_view::npos)
      throw std::invalid_argument("model spec must look like kind:key=value,...");
    const std::string_view head = text.substr(0, colon);
    std::map<std::string, double, std::less<>> kv;
    std::size_t pos = colon + 1;
    while (pos < text.size()) {
      std::size_t comma = text.find(',', pos);
      std::string_view item = text.substr(pos, comma == std::string_view::npos ? std::string_view::npos : comma - pos);
      const std::size_t eq = item.find('=');
      if (eq == std::string_view::npos)
        throw std::invalid_argument("model parameter must be key=value");
      kv[std::string(item.substr(0, eq))] = std::stod(std::string(item.substr(eq + 1)));
      if (comma == std::string_view::npos) break;
      pos = comma + 1;
    }
    auto need = [&](std::string_view key) {
      auto it = kv.find(key);
      if (it == kv.end())
        throw std::invalid_argument("missing model parameter: " + std::string(key));
      return it->second;
    };
    if (head == "bcn") return bcn(kv.count("sigma") ? kv["sigma"] : 0.0, need("v"), need("lambda"));
    if (head == "bcl") return bcl(kv.count("sigma") ? kv["sigma"] : 0.0, need("v"), need("lambda"));
    if (head == "gamma") return gamma_process(need("c"), need("lambda"));
    throw std::invalid_argument("unknown model kind: " + std::string(head));
  }
};

//! Observed increments Y_j over time span delta.
struct IncrementSample {
  std::vector<double> y;
  double delta = 0.0;

  std::size_t n() const { return y.size(); }
};

//! Draws n i.i.d. increments of the model over time span delta. Compound
//! Poisson increments are sampled exactly by Poisson-count plus jump-sum
//! composition; Gamma increments have the exact Gamma(shape*delta, 1/rate)
//! marginal.
inline IncrementSample simulate_increments(const LevyModel& model, std::size_t n, double delta,
                                           SeedStream stream)
{
  if (n < 1) throw std::invalid_argument("simulate_increments: n must be >= 1");
  if (!(delta > 0.0)) throw std::invalid_argument("simulate_increments: delta must be positive");
  model.validate();

  IncrementSample sample;
  sample.delta = delta;
  sample.y.resize(n);
  auto g = stream.engine();

  switch (model.kind) {
    case ModelKind::BCN:
    case ModelKind::BCL: {
      const double diffusion_sd = model.sigma * std::sqrt(delta);
      const double mean_jumps = model.jump_rate * delta;
      for (std::size_t j = 0; j < n; ++j) {
        double value = diffusion_sd > 0.0 ? diffusion_sd * normal_draw(g) : 0.0;
        const std::uint64_t count = poisson_draw(g, mean_jumps);
        for (std::uint64_t k = 0; k < count; ++k) {
          value += model.kind == ModelKind::BCN
                       ? model.jump_scale * normal_draw(g)
                       : laplace_draw(g, model.jump_scale);
        }
        sample.y[j] = value;
      }
      break;
    }
    case ModelKind::GammaProc: {
      const double shape = model.gamma_shape * delta;
      const double scale = 1.0 / model.gamma_rate;
      for (std::size_t j = 0; j < n; ++j) sample.y[j] = gamma_draw(g, shape, scale);
      break;
    }
  }
  return sample;
}

} // namespace levyband
