#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <numbers>

#include "levyband/models.hpp"

using namespace levyband;

namespace {

double sample_mean(const std::vector<double>& y)
{
  double s = 0;
  for (double v : y) s += v;
  return s / double(y.size());
}

double sample_var(const std::vector<double>& y)
{
  const double m = sample_mean(y);
  double s = 0;
  for (double v : y) s += (v - m) * (v - m);
  return s / double(y.size());
}

} // namespace

TEST_CASE("model parsing round-trips and rejects bad input", "[models]")
{
  const LevyModel bcn = LevyModel::parse("bcn:sigma=1,v=0.5,lambda=10");
  CHECK(bcn.kind == ModelKind::BCN);
  CHECK(bcn.sigma == 1.0);
  CHECK(bcn.jump_scale == 0.5);
  CHECK(bcn.jump_rate == 10.0);
  CHECK(LevyModel::parse(bcn.to_string()).jump_rate == 10.0);

  const LevyModel gp = LevyModel::parse("gamma:c=0.2,lambda=1");
  CHECK(gp.kind == ModelKind::GammaProc);
  CHECK(gp.gamma_shape == 0.2);

  CHECK_THROWS_AS(LevyModel::parse("weibull:k=1"), std::invalid_argument);
  CHECK_THROWS_AS(LevyModel::parse("bcn:v=0.5"), std::invalid_argument);
  CHECK_THROWS_AS(LevyModel::bcn(-1.0, 0.5, 10.0), std::invalid_argument);
  CHECK_THROWS_AS(LevyModel::bcn(0.0, 0.0, 10.0), std::invalid_argument);
  CHECK_THROWS_AS(LevyModel::gamma_process(0.2, 0.0), std::invalid_argument);
}

TEST_CASE("true density closed forms", "[models]")
{
  const LevyModel bcn = LevyModel::bcn(0.0, 0.5, 10.0);
  CHECK(bcn.true_density(0.0) ==
        Catch::Approx(10.0 / std::sqrt(2.0 * std::numbers::pi * 0.25)).epsilon(1e-12));

  const LevyModel bcl = LevyModel::bcl(0.0, 0.5, 4.0);
  CHECK(bcl.true_density(0.5) == Catch::Approx(4.0 * std::exp(-1.0)).epsilon(1e-12));
  CHECK(bcl.true_density(-0.5) == bcl.true_density(0.5));

  const LevyModel gp = LevyModel::gamma_process(0.2, 1.0);
  CHECK(gp.true_density(-0.5) == 0.0);
  CHECK(gp.true_density(0.5) == Catch::Approx(0.2 * std::exp(-0.5) / 0.5).epsilon(1e-12));
}

TEST_CASE("simulation rejects invalid arguments", "[models]")
{
  const LevyModel m = LevyModel::bcn(0.0, 0.5, 10.0);
  CHECK_THROWS_AS(simulate_increments(m, 0, 0.01, SeedStream{1}), std::invalid_argument);
  CHECK_THROWS_AS(simulate_increments(m, 10, 0.0, SeedStream{1}), std::invalid_argument);
  CHECK_THROWS_AS(simulate_increments(m, 10, -0.5, SeedStream{1}), std::invalid_argument);
}

TEST_CASE("simulation is deterministic in (model, n, delta, seed)", "[models]")
{
  const LevyModel m = LevyModel::bcl(1.0, 0.5, 4.0);
  const auto a = simulate_increments(m, 1000, 0.01, SeedStream{42});
  const auto b = simulate_increments(m, 1000, 0.01, SeedStream{42});
  REQUIRE(a.y == b.y);
  const auto c = simulate_increments(m, 1000, 0.01, SeedStream{43});
  REQUIRE(a.y != c.y);
}

TEST_CASE("gamma increments: strictly positive, mean matches", "[models]")
{
  const LevyModel gp = LevyModel::gamma_process(0.2, 1.0);
  const auto s = simulate_increments(gp, 1000000, 0.01, SeedStream{5}.child("simulate"));
  for (double y : s.y) REQUIRE(y > 0.0);
  // mean c*delta/lambda = 0.002, SE = sqrt(c*delta/lambda^2)/sqrt(n)
  const double se = std::sqrt(0.2 * 0.01) / std::sqrt(1e6);
  CHECK(std::abs(sample_mean(s.y) - 0.002) < 4.0 * se);
}

TEST_CASE("compound Poisson variance matches the moment identity", "[models]")
{
  // Var(L_delta) = delta (sigma^2 + lambda v^2) for normal jumps
  const LevyModel m = LevyModel::bcn(0.0, 0.5, 10.0);
  const auto s = simulate_increments(m, 1000000, 0.01, SeedStream{6}.child("simulate"));
  const double target = 0.01 * (0.0 + 10.0 * 0.25);
  double se = 0.0; // empirical SE of the variance via fourth moments
  {
    const double m2 = sample_var(s.y);
    double m4 = 0.0;
    for (double y : s.y) m4 += std::pow(y - sample_mean(s.y), 4);
    m4 /= double(s.n());
    se = std::sqrt((m4 - m2 * m2) / double(s.n()));
  }
  CHECK(std::abs(sample_var(s.y) - target) < 4.0 * se);
}

TEST_CASE("empirical mean tracks delta * E[L_1] across models", "[models]")
{
  int seed = 100;
  for (const char* spec : {"bcn:sigma=1,v=0.5,lambda=4", "bcl:sigma=0,v=0.5,lambda=10",
                           "gamma:c=0.2,lambda=1"}) {
    const LevyModel m = LevyModel::parse(spec);
    const auto s = simulate_increments(m, 200000, 0.01, SeedStream{std::uint64_t(seed++)});
    const double target = 0.01 * m.mean_rate();
    const double sd = std::sqrt(sample_var(s.y));
    CHECK(std::abs(sample_mean(s.y) - target) <= 5.0 * sd / std::sqrt(double(s.n())));
  }
}

TEST_CASE("BCN fourth moment matches the cumulant expansion", "[models]")
{
  // E[Y^4] = delta int x^4 rho + 3 (delta Var rate)^2
  const LevyModel m = LevyModel::bcn(1.0, 0.5, 4.0);
  const auto s = simulate_increments(m, 100000, 0.01, SeedStream{77}.child("simulate"));
  const double expected = 0.01 * m.fourth_moment_rate() + 3.0 * std::pow(0.01 * m.variance_rate(), 2);
  double m4 = 0, m8 = 0;
  for (double y : s.y) {
    const double y4 = y * y * y * y;
    m4 += y4;
    m8 += y4 * y4;
  }
  m4 /= double(s.n());
  m8 /= double(s.n());
  const double se = std::sqrt((m8 - m4 * m4) / double(s.n()));
  CHECK(std::abs(m4 - expected) < 5.0 * se);
}

TEST_CASE("zero-jump atom fraction for small lambda*delta", "[models]")
{
  const LevyModel m = LevyModel::bcn(0.0, 0.5, 10.0);
  const std::size_t n = 200000;
  const auto s = simulate_increments(m, n, 0.01, SeedStream{8}.child("simulate"));
  std::size_t zeros = 0;
  for (double y : s.y)
    if (y == 0.0) ++zeros;
  const double p = std::exp(-10.0 * 0.01);
  const double se = std::sqrt(p * (1.0 - p) / double(n));
  CHECK(std::abs(double(zeros) / double(n) - p) < 4.0 * se);
}
