#pragma once

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstddef>
#include <cstdlib>
#include <functional>
#include <mutex>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <thread>
#include <vector>

namespace levyband {

//! Uniform grid on [-max_abs, max_abs] with an odd point count, so that 0 is
//! a node and the grid is exactly symmetric (u[i] == -u[n-1-i] bitwise).
inline std::vector<double> symmetric_grid(double max_abs, std::size_t n_points)
{
  if (n_points < 3 || n_points % 2 == 0)
    throw std::invalid_argument("symmetric_grid: point count must be odd and >= 3");
  if (!(max_abs > 0.0))
    throw std::invalid_argument("symmetric_grid: max_abs must be positive");
  const std::ptrdiff_t half = static_cast<std::ptrdiff_t>(n_points / 2);
  std::vector<double> u(n_points);
  for (std::ptrdiff_t m = 0; m <= half; ++m) {
    const double v = max_abs * static_cast<double>(m) / static_cast<double>(half);
    u[static_cast<std::size_t>(half + m)] = v;
    u[static_cast<std::size_t>(half - m)] = -v;
  }
  u[static_cast<std::size_t>(half)] = 0.0;
  return u;
}

inline double trapezoid(std::span<const double> values, double dx)
{
  if (values.size() < 2) return 0.0;
  double s = 0.5 * (values.front() + values.back());
  for (std::size_t i = 1; i + 1 < values.size(); ++i) s += values[i];
  return s * dx;
}

struct Interval {
  double lo;
  double hi;
};

//! Parses "a:b" or "a:b,c:d" into intervals with lo < hi.
inline std::vector<Interval> parse_intervals(std::string_view text)
{
  std::vector<Interval> out;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    std::size_t comma = text.find(',', pos);
    std::string_view part = text.substr(pos, comma == std::string_view::npos ? std::string_view::npos : comma - pos);
    std::size_t colon = part.find(':');
    if (colon == std::string_view::npos)
      throw std::invalid_argument("interval must be of the form a:b");
    double lo = std::stod(std::string(part.substr(0, colon)));
    double hi = std::stod(std::string(part.substr(colon + 1)));
    if (!(lo < hi)) throw std::invalid_argument("interval endpoints must satisfy a < b");
    out.push_back({lo, hi});
    if (comma == std::string_view::npos) break;
    pos = comma + 1;
  }
  if (out.empty()) throw std::invalid_argument("no intervals given");
  return out;
}

inline std::string format_intervals(std::span<const Interval> ivs)
{
  std::string s;
  for (std::size_t i = 0; i < ivs.size(); ++i) {
    if (i) s += ',';
    s += std::to_string(ivs[i].lo) + ':' + std::to_string(ivs[i].hi);
  }
  return s;
}

inline double total_length(std::span<const Interval> ivs)
{
  double len = 0.0;
  for (const auto& iv : ivs) len += iv.hi - iv.lo;
  return len;
}

//! Equispaced evaluation grid, points_per_interval nodes on each interval
//! (endpoints included). Intervals must not contain 0: the estimand is a
//! density on a compact set away from the origin.
inline std::vector<double> make_grid(std::span<const Interval> ivs, std::size_t points_per_interval)
{
  if (points_per_interval < 2)
    throw std::invalid_argument("make_grid: need at least 2 points per interval");
  std::vector<double> x;
  x.reserve(ivs.size() * points_per_interval);
  for (const auto& iv : ivs) {
    if (iv.lo <= 0.0 && iv.hi >= 0.0)
      throw std::invalid_argument("make_grid: interval must not contain 0");
    for (std::size_t i = 0; i < points_per_interval; ++i) {
      const double t = static_cast<double>(i) / static_cast<double>(points_per_interval - 1);
      x.push_back(iv.lo + t * (iv.hi - iv.lo));
    }
  }
  return x;
}

inline std::size_t resolve_threads(std::size_t requested)
{
  if (requested > 0) return requested;
  if (const char* env = std::getenv("LEVYBAND_THREADS")) {
    const long v = std::atol(env);
    if (v > 0) return static_cast<std::size_t>(v);
  }
  const unsigned hw = std::thread::hardware_concurrency();
  return hw > 0 ? hw : 1;
}

//! Runs fn(i) for i in [0, count) on up to `threads` workers. Work items are
//! claimed from a shared counter; callers must write results into
//! index-addressed storage so the outcome does not depend on scheduling.
inline void parallel_for(std::size_t count, std::size_t threads, const std::function<void(std::size_t)>& fn)
{
  threads = std::min(std::max<std::size_t>(threads, 1), count);
  if (threads <= 1) {
    for (std::size_t i = 0; i < count; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr error;
  std::mutex error_mutex;
  auto worker = [&] {
    for (;;) {
      const std::size_t i = next.fetch_add(1);
      if (i >= count) return;
      try {
        fn(i);
      } catch (...) {
        std::lock_guard<std::mutex> lock(error_mutex);
        if (!error) error = std::current_exception();
      }
    }
  };
  std::vector<std::thread> pool;
  pool.reserve(threads);
  for (std::size_t t = 0; t < threads; ++t) pool.emplace_back(worker);
  for (auto& th : pool) th.join();
  if (error) std::rethrow_exception(error);
}

} // namespace levyband
