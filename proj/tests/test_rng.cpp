#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <vector>

#include "levyband/rng.hpp"

using namespace levyband;

TEST_CASE("seed streams are deterministic and path-dependent", "[rng]")
{
  SeedStream root{12345};
  CHECK(root.child(3).state == root.child(3).state);
  CHECK(root.child("simulate").state == root.child("simulate").state);
  CHECK(root.child(0).state != root.child(1).state);
  CHECK(root.child("mb").state != root.child("eb").state);
  CHECK(root.child(2).state != root.child("2").state);

  auto g1 = root.child(7).engine();
  auto g2 = root.child(7).engine();
  for (int i = 0; i < 16; ++i) CHECK(g1() == g2());
}

TEST_CASE("uniform01 stays in [0,1)", "[rng]")
{
  auto g = SeedStream{9}.engine();
  for (int i = 0; i < 10000; ++i) {
    const double u = uniform01(g);
    REQUIRE(u >= 0.0);
    REQUIRE(u < 1.0);
  }
}

TEST_CASE("normal draws have the right first two moments", "[rng]")
{
  auto g = SeedStream{11}.engine();
  const int n = 200000;
  double s = 0, s2 = 0;
  for (int i = 0; i < n; ++i) {
    const double x = normal_draw(g);
    s += x;
    s2 += x * x;
  }
  CHECK(std::abs(s / n) < 5.0 / std::sqrt(double(n)));
  CHECK(std::abs(s2 / n - 1.0) < 5.0 * std::sqrt(2.0 / n));
}

TEST_CASE("laplace draws match the target scale", "[rng]")
{
  auto g = SeedStream{13}.engine();
  const int n = 200000;
  const double scale = 0.5;
  double s = 0, s2 = 0;
  for (int i = 0; i < n; ++i) {
    const double x = laplace_draw(g, scale);
    s += x;
    s2 += x * x;
  }
  // mean 0, variance 2 scale^2
  CHECK(std::abs(s / n) < 5.0 * std::sqrt(2.0 * scale * scale / n));
  CHECK(s2 / n == Catch::Approx(2.0 * scale * scale).margin(0.02));
}

TEST_CASE("gamma draws: small shapes stay positive with the right mean", "[rng]")
{
  auto g = SeedStream{17}.engine();
  const int n = 100000;
  const double shape = 0.002, scale = 1.0;
  double s = 0;
  for (int i = 0; i < n; ++i) {
    const double x = gamma_draw(g, shape, scale);
    REQUIRE(x > 0.0);
    s += x;
  }
  // mean shape*scale; sd of the mean is sqrt(shape)/sqrt(n)
  CHECK(std::abs(s / n - shape * scale) < 6.0 * std::sqrt(shape / n));
  CHECK_THROWS_AS(gamma_draw(g, -1.0, 1.0), std::invalid_argument);
}

TEST_CASE("poisson draws: small and chunked-large means", "[rng]")
{
  auto g = SeedStream{19}.engine();
  for (double mean : {0.1, 3.0, 75.0}) {
    const int n = 40000;
    double s = 0;
    for (int i = 0; i < n; ++i) s += double(poisson_draw(g, mean));
    CHECK(std::abs(s / n - mean) < 6.0 * std::sqrt(mean / n));
  }
  CHECK(poisson_draw(g, 0.0) == 0);
}
