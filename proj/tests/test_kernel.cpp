#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <vector>

#include "levyband/kernel.hpp"

using namespace levyband;

TEST_CASE("flat-top transform: plateau, support, middle branch", "[kernel]")
{
  const KernelSpec k = KernelSpec::flat_top(1.0, 0.05);
  CHECK(k.phi_w(0.0) == 1.0);
  CHECK(k.phi_w(0.03) == 1.0);
  CHECK(k.phi_w(-0.05) == 1.0);
  CHECK(k.phi_w(1.2) == 0.0);
  CHECK(k.phi_w(-3.0) == 0.0);
  CHECK(k.phi_w(1.0) == 0.0);

  // exp(-exp(-1/0.2025)/0.25), cross-checked against a scripted evaluation
  CHECK(k.phi_w(0.5) == Catch::Approx(0.971739125303147).epsilon(1e-13));
  CHECK(k.phi_w(-0.5) == k.phi_w(0.5));
}

TEST_CASE("flat-top transform is continuous at the plateau edge and support edge", "[kernel]")
{
  const KernelSpec k = KernelSpec::flat_top(1.0, 0.05);
  CHECK(k.phi_w(0.05 + 1e-7) == Catch::Approx(1.0).margin(1e-6));
  CHECK(k.phi_w(1.0 - 1e-4) == Catch::Approx(0.0).margin(1e-6));
}

TEST_CASE("poly transform and parameter validation", "[kernel]")
{
  const KernelSpec p = KernelSpec::poly(6);
  CHECK(p.phi_w(0.0) == 1.0);
  CHECK(p.phi_w(0.5) == Catch::Approx(std::pow(0.75, 6)).epsilon(1e-14));
  CHECK(p.phi_w(1.0) == 0.0);
  CHECK(p.phi_w(1.5) == 0.0);
  CHECK_THROWS_AS(KernelSpec::poly(4), std::invalid_argument);
  CHECK_THROWS_AS(KernelSpec::flat_top(0.0, 0.05), std::invalid_argument);
  CHECK_THROWS_AS(KernelSpec::flat_top(1.0, 1.0), std::invalid_argument);
}

TEST_CASE("kernel spec parsing", "[kernel]")
{
  const KernelSpec k = KernelSpec::parse("flattop:b=1,c=0.05");
  CHECK(k.family == KernelSpec::Family::FlatTop);
  CHECK(k.b == 1.0);
  CHECK(k.c == 0.05);
  CHECK(KernelSpec::parse("poly:k=7").k == 7);
  CHECK(KernelSpec::parse(k.to_string()).c == 0.05);
  CHECK_THROWS_AS(KernelSpec::parse("box:w=1"), std::invalid_argument);
  CHECK_THROWS_AS(KernelSpec::parse("poly:q=7"), std::invalid_argument);
}

TEST_CASE("poly transform is four-times continuously differentiable at the edge", "[kernel]")
{
  // central fourth difference straddling u = 1; the inside limit is 0
  const KernelSpec p = KernelSpec::poly(6);
  const double s = 2e-4;
  auto fd4 = [&](double u) {
    return (p.phi_w(u - 2 * s) - 4 * p.phi_w(u - s) + 6 * p.phi_w(u) - 4 * p.phi_w(u + s) +
            p.phi_w(u + 2 * s)) /
           (s * s * s * s);
  };
  CHECK(std::abs(fd4(1.0)) <= 1e-3);
  CHECK(std::abs(fd4(-1.0)) <= 1e-3);
}

TEST_CASE("pointwise inversion: evenness and refinement", "[kernel]")
{
  const KernelSpec k = KernelSpec::flat_top(1.0, 0.05);
  for (double x : {0.0, 0.7, 2.5, 17.0}) {
    CHECK(std::abs(kernel_w(k, x) - kernel_w(k, -x)) <= 1e-12);
    CHECK(std::abs(kernel_w(k, x, 20001) - kernel_w(k, x, 40001)) < 1e-8);
  }
  CHECK_THROWS_AS(kernel_w(k, 0.0, 2), std::invalid_argument);
}

TEST_CASE("flat-top W at the origin against a high-order quadrature oracle", "[kernel]")
{
  // (1/2pi) int phi_W = 0.211163301697, frozen from an independent
  // 200001-node evaluation
  const KernelSpec k = KernelSpec::flat_top(1.0, 0.05);
  const double w0 = kernel_w(k, 0.0, 100001);
  CHECK(w0 > 0.0);
  CHECK(w0 == Catch::Approx(0.211163301697).epsilon(1e-8));
}

TEST_CASE("tabulated W: unit mass over the truncation window", "[kernel]")
{
  const KernelTable table(KernelSpec::flat_top(1.0, 0.05));
  CHECK(table.span() == 200.0);
  double mass = 0.0;
  const std::size_t nodes = 100001;
  for (std::size_t i = 0; i < nodes; ++i) {
    const double x = -200.0 + 400.0 * double(i) / double(nodes - 1);
    const double w = (i == 0 || i == nodes - 1) ? 0.5 : 1.0;
    mass += w * table(x);
  }
  mass *= 400.0 / double(nodes - 1);
  CHECK(mass == Catch::Approx(1.0).margin(1e-4));
  CHECK(table(250.0) == 0.0);
  CHECK(table(0.3) == Catch::Approx(table(-0.3)).margin(1e-12));
}

TEST_CASE("flat-top moments vanish through order four", "[kernel]")
{
  // The x^4 tail integral decays slowly (~0.56 when truncating at 200), so
  // the moment checks integrate over |x| <= 400.
  const double span = 400.0;
  const std::size_t nodes = 160001;
  const KernelTable table(KernelSpec::flat_top(1.0, 0.05), span, nodes, 8193);
  const double dx = 2.0 * span / double(nodes - 1);
  double m1 = 0, m2 = 0, m3 = 0, m4 = 0;
  for (std::size_t i = 0; i < nodes; ++i) {
    const double x = -span + dx * double(i);
    const double w = ((i == 0 || i == nodes - 1) ? 0.5 : 1.0) * table(x);
    m1 += w * x;
    m2 += w * x * x;
    m3 += w * x * x * x;
    m4 += w * x * x * x * x;
  }
  CHECK(std::abs(m1 * dx) <= 1e-3);
  CHECK(std::abs(m2 * dx) <= 1e-3);
  CHECK(std::abs(m3 * dx) <= 1e-3);
  CHECK(std::abs(m4 * dx) <= 1e-3);
}

TEST_CASE("epanechnikov kernel", "[kernel]")
{
  CHECK(epanechnikov(0.0) == 0.75);
  CHECK(epanechnikov(1.0) == 0.0);
  CHECK(epanechnikov(-2.0) == 0.0);
  CHECK(epanechnikov(0.5) == Catch::Approx(0.75 * 0.75));
}
