#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <complex>
#include <numbers>
#include <sstream>

#include "levyband/char_fn.hpp"
#include "levyband/numerics.hpp"

using namespace levyband;

TEST_CASE("degenerate all-zero sample", "[char_fn]")
{
  IncrementSample s{std::vector<double>(100, 0.0), 0.01};
  const auto cf = ecf_eval(s, symmetric_grid(5.0, 129));
  for (std::size_t m = 0; m < cf.u.size(); ++m) {
    CHECK(cf.phi[m] == std::complex<double>(1.0, 0.0));
    CHECK(cf.dphi[m] == std::complex<double>(0.0, 0.0));
    CHECK(cf.d2phi[m] == std::complex<double>(0.0, 0.0));
  }
}

TEST_CASE("two-point sample at u = pi", "[char_fn]")
{
  IncrementSample s{{1.0, -1.0}, 1.0};
  const auto cf = ecf_eval_naive(s, {std::numbers::pi});
  CHECK(cf.phi[0].real() == Catch::Approx(-1.0).margin(1e-15));
  CHECK(std::abs(cf.dphi[0]) < 1e-15);
  CHECK(cf.d2phi[0].real() == Catch::Approx(1.0).margin(1e-15));
  CHECK(std::abs(cf.phi[0].imag()) < 1e-15);
}

TEST_CASE("values at u = 0 and modulus bound", "[char_fn]")
{
  const LevyModel m = LevyModel::bcn(1.0, 0.5, 4.0);
  const auto s = simulate_increments(m, 5000, 0.01, SeedStream{3});
  const auto cf = ecf_eval(s, symmetric_grid(20.0, 257));
  const std::size_t mid = cf.u.size() / 2;

  double mean = 0, mean_sq = 0;
  for (double y : s.y) {
    mean += y;
    mean_sq += y * y;
  }
  mean /= double(s.n());
  mean_sq /= double(s.n());

  CHECK(cf.phi[mid] == std::complex<double>(1.0, 0.0));
  CHECK(cf.dphi[mid].imag() == Catch::Approx(mean).epsilon(1e-12));
  CHECK(std::abs(cf.dphi[mid].real()) < 1e-15);
  CHECK(cf.d2phi[mid].real() == Catch::Approx(-mean_sq).epsilon(1e-12));
  for (std::size_t i = 0; i < cf.u.size(); ++i) CHECK(std::abs(cf.phi[i]) <= 1.0 + 1e-12);
}

TEST_CASE("conjugate symmetry holds to 1e-14", "[char_fn]")
{
  const LevyModel m = LevyModel::bcl(0.0, 0.5, 10.0);
  const auto s = simulate_increments(m, 4000, 0.01, SeedStream{4});
  const auto grid = symmetric_grid(30.0, 513);
  for (const auto& cf : {ecf_eval(s, grid), ecf_eval_naive(s, grid)}) {
    double worst = 0;
    for (std::size_t i = 0; i < grid.size(); ++i) {
      const std::size_t j = grid.size() - 1 - i;
      worst = std::max(worst, std::abs(cf.phi[i] - std::conj(cf.phi[j])));
      worst = std::max(worst, std::abs(cf.dphi[i] + std::conj(cf.dphi[j])));
      worst = std::max(worst, std::abs(cf.d2phi[i] - std::conj(cf.d2phi[j])));
    }
    CHECK(worst <= 1e-14);
  }
}

TEST_CASE("accelerated path matches naive double-loop summation", "[char_fn]")
{
  const LevyModel m = LevyModel::bcn(0.0, 0.5, 10.0); // ~90% exact zeros
  const auto s = simulate_increments(m, 3000, 0.01, SeedStream{5});
  const auto grid = symmetric_grid(40.0, 1025);
  const auto fast = ecf_eval(s, grid);
  const auto naive = ecf_eval_naive(s, grid);
  double worst = 0;
  for (std::size_t i = 0; i < grid.size(); ++i) {
    worst = std::max(worst, std::abs(fast.phi[i] - naive.phi[i]));
    worst = std::max(worst, std::abs(fast.dphi[i] - naive.dphi[i]));
    worst = std::max(worst, std::abs(fast.d2phi[i] - naive.d2phi[i]));
  }
  CHECK(worst <= 1e-12);
}

TEST_CASE("non-uniform grids take the pointwise path and agree too", "[char_fn]")
{
  const LevyModel m = LevyModel::gamma_process(0.2, 1.0);
  const auto s = simulate_increments(m, 2000, 0.01, SeedStream{6});
  const std::vector<double> grid{-7.3, -2.0, -0.5, 0.0, 1.0, 1.5, 8.0};
  const auto fast = ecf_eval(s, grid);
  const auto naive = ecf_eval_naive(s, grid);
  for (std::size_t i = 0; i < grid.size(); ++i)
    CHECK(std::abs(fast.phi[i] - naive.phi[i]) <= 1e-12);
}

TEST_CASE("empty inputs are rejected", "[char_fn]")
{
  IncrementSample empty{{}, 0.01};
  CHECK_THROWS_AS(ecf_eval(empty, symmetric_grid(1.0, 129)), std::invalid_argument);
  IncrementSample ok{{1.0}, 0.01};
  CHECK_THROWS_AS(ecf_eval(ok, std::vector<double>{}), std::invalid_argument);
}

TEST_CASE("ECF of a Gaussian sample tracks the analytic CF", "[char_fn]")
{
  const std::size_t n = 10000;
  std::vector<double> y(n);
  auto g = SeedStream{7}.engine();
  for (auto& v : y) v = normal_draw(g);
  IncrementSample s{std::move(y), 1.0};
  const auto cf = ecf_eval(s, {1.0});
  CHECK(std::abs(cf.phi[0] - std::exp(-0.5)) <= 4.0 / std::sqrt(double(n)));
}

TEST_CASE("sup ECF error shrinks as n grows", "[char_fn]")
{
  const LevyModel m = LevyModel::bcn(0.0, 0.5, 10.0);
  const double delta = 0.01;
  const auto grid = symmetric_grid(10.0, 513);
  auto sup_err = [&](std::size_t n, std::uint64_t seed) {
    const auto s = simulate_increments(m, n, delta, SeedStream{seed});
    const auto cf = ecf_eval(s, grid);
    double worst = 0;
    for (std::size_t i = 0; i < grid.size(); ++i)
      worst = std::max(worst, std::abs(cf.phi[i] - analytic_cf(m, delta, grid[i])));
    return worst;
  };
  // three seeds, medians; a factor-16 sample size gap should show clearly
  std::vector<double> small, large;
  for (std::uint64_t seed : {21, 22, 23}) {
    small.push_back(sup_err(2000, seed));
    large.push_back(sup_err(32000, seed));
  }
  std::sort(small.begin(), small.end());
  std::sort(large.begin(), large.end());
  CHECK(large[1] < 0.6 * small[1]);
}

TEST_CASE("analytic CF closed forms", "[char_fn]")
{
  for (const char* spec : {"bcn:sigma=1,v=0.5,lambda=4", "bcl:sigma=0,v=0.5,lambda=10",
                           "gamma:c=0.2,lambda=1"}) {
    const LevyModel m = LevyModel::parse(spec);
    CHECK(std::abs(analytic_cf(m, 0.01, 0.0) - 1.0) < 1e-15);
  }

  // Gamma: (1 - iu/lambda)^{-c delta}
  const LevyModel gp = LevyModel::gamma_process(0.2, 1.0);
  const std::complex<double> expected =
      std::pow(std::complex<double>(1.0, -1.0), std::complex<double>(-0.002, 0.0));
  CHECK(std::abs(analytic_cf(gp, 0.01, 1.0) - expected) < 1e-12);

  // compound Poisson with normal jumps: exp(lambda delta (e^{-v^2 u^2 / 2} - 1))
  const LevyModel bcn = LevyModel::bcn(0.0, 0.5, 10.0);
  const double plug = std::exp(0.1 * (std::exp(-0.5) - 1.0));
  CHECK(analytic_cf(bcn, 0.01, 2.0).real() == Catch::Approx(plug).epsilon(1e-12));
  CHECK(std::abs(analytic_cf(bcn, 0.01, 2.0).imag()) < 1e-15);
}

TEST_CASE("CSV dump has the documented columns", "[char_fn]")
{
  IncrementSample s{{0.5, -0.25, 1.0}, 0.01};
  const auto cf = ecf_eval(s, symmetric_grid(2.0, 129));
  std::ostringstream os;
  cf.write_csv(os);
  const std::string text = os.str();
  CHECK(text.rfind("u,re_phi,im_phi,re_dphi,im_dphi,re_d2phi,im_d2phi\n", 0) == 0);
  CHECK(std::count(text.begin(), text.end(), '\n') == 130);
}
