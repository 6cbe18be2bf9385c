#pragma once

#include <cmath>
#include <cstddef>
#include <limits>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "levyband/estimator.hpp"

namespace levyband {

class SelectionError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

//! Adjacent-estimate bandwidth rule: candidates h_j = j * pilot / J with
//! pilot = M sqrt(delta); pick the smallest j >= 2 whose adjacent sup
//! distance d_j = ||rho_hat_{h_j} - rho_hat_{h_{j-1}}||_I falls below
//! kappa * min_k d_k.
struct SelectionConfig {
  double pilot_multiplier = 2.0; // M
  std::size_t candidate_count = 20; // J
  double threshold = 20.0; // kappa

  void validate() const
  {
    if (!(pilot_multiplier > 1.0))
      throw std::invalid_argument("bandwidth selection: M must exceed 1");
    if (candidate_count < 3)
      throw std::invalid_argument("bandwidth selection: need at least 3 candidates");
    if (!(threshold > 1.0)) throw std::invalid_argument("bandwidth selection: kappa must exceed 1");
  }
};

struct BandwidthSelection {
  double pilot_h = 0.0;
  std::vector<double> candidates;
  std::vector<char> feasible;     // candidates rejected by the CF guard are marked infeasible
  std::vector<double> distances;  // aligned with candidates; NaN where undefined
  std::size_t chosen_index = 0;   // into candidates
  double chosen_h = 0.0;
};

//! The selection rule on a precomputed distance sequence. NaN entries are
//! skipped. Returns the index of the first usable entry at or below
//! kappa * min.
inline std::size_t select_index_from_distances(std::span<const double> distances, double kappa)
{
  double min_d = std::numeric_limits<double>::infinity();
  for (double d : distances)
    if (!std::isnan(d)) min_d = std::min(min_d, d);
  if (!std::isfinite(min_d))
    throw SelectionError("bandwidth selection: no usable adjacent distances");
  for (std::size_t j = 0; j < distances.size(); ++j)
    if (!std::isnan(distances[j]) && distances[j] <= kappa * min_d) return j;
  throw SelectionError("bandwidth selection: no candidate passed the threshold");
}

inline std::vector<double> candidate_bandwidths(const SelectionConfig& cfg, double delta)
{
  cfg.validate();
  const double pilot = cfg.pilot_multiplier * std::sqrt(delta);
  std::vector<double> h(cfg.candidate_count);
  for (std::size_t j = 0; j < h.size(); ++j)
    h[j] = static_cast<double>(j + 1) * pilot / static_cast<double>(h.size());
  return h;
}

namespace detail {

inline BandwidthSelection candidate_scan(const IncrementSample& sample,
                                         std::vector<double> candidates, double pilot_h,
                                         EstimatorConfig est_cfg, const KernelSpec& kernel)
{
  BandwidthSelection sel;
  sel.pilot_h = pilot_h;
  sel.candidates = std::move(candidates);
  const std::size_t J = sel.candidates.size();
  sel.feasible.assign(J, 0);
  sel.distances.assign(J, std::numeric_limits<double>::quiet_NaN());

  std::vector<double> prev_estimate;
  bool have_prev = false;
  for (std::size_t j = 0; j < J; ++j) {
    est_cfg.h = sel.candidates[j];
    try {
      DensityEstimate est = spectral_estimate(sample, est_cfg, kernel);
      sel.feasible[j] = 1;
      if (have_prev) {
        double d = 0.0;
        for (std::size_t m = 0; m < est.rho_hat.size(); ++m)
          d = std::max(d, std::abs(est.rho_hat[m] - prev_estimate[m]));
        sel.distances[j] = d;
      }
      prev_estimate = std::move(est.rho_hat);
      have_prev = true;
    } catch (const CharFnTooSmall&) {
      // excluded from both the minimum and the scan; the distance slot for
      // the next feasible candidate pairs it with the previous feasible one
    }
  }
  return sel;
}

} // namespace detail

inline BandwidthSelection select_bandwidth(const IncrementSample& sample,
                                           const SelectionConfig& cfg,
                                           const EstimatorConfig& est_cfg,
                                           const KernelSpec& kernel)
{
  const double pilot = cfg.pilot_multiplier * std::sqrt(sample.delta);
  BandwidthSelection sel =
      detail::candidate_scan(sample, candidate_bandwidths(cfg, sample.delta), pilot, est_cfg, kernel);
  sel.chosen_index = select_index_from_distances(sel.distances, cfg.threshold);
  sel.chosen_h = sel.candidates[sel.chosen_index];
  return sel;
}

//! The (h_j, d_j) profile behind the rule, for inspection and plotting.
inline std::vector<std::pair<double, double>> distance_profile(const IncrementSample& sample,
                                                               std::span<const double> candidates,
                                                               const EstimatorConfig& est_cfg,
                                                               const KernelSpec& kernel)
{
  std::vector<double> h(candidates.begin(), candidates.end());
  const double pilot = h.empty() ? 0.0 : h.back();
  BandwidthSelection sel = detail::candidate_scan(sample, std::move(h), pilot, est_cfg, kernel);
  std::vector<std::pair<double, double>> profile;
  for (std::size_t j = 0; j < sel.candidates.size(); ++j)
    if (!std::isnan(sel.distances[j])) profile.emplace_back(sel.candidates[j], sel.distances[j]);
  return profile;
}

inline std::vector<std::pair<double, double>> distance_profile(const IncrementSample& sample,
                                                               const SelectionConfig& cfg,
                                                               const EstimatorConfig& est_cfg,
                                                               const KernelSpec& kernel)
{
  return distance_profile(sample, candidate_bandwidths(cfg, sample.delta), est_cfg, kernel);
}

} // namespace levyband
