#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "bem2d/geometry.hpp"
#include "bem2d/kernels.hpp"
#include "test_domains.hpp"

using namespace bem2d;

namespace {
constexpr double kPi = std::numbers::pi;
}

TEST_CASE("fundamental solution values") {
  CHECK(std::abs(fund_solution({0.0, 0.0}, {1.0, 0.0})) < 1e-15);
  CHECK(fund_solution({0.0, 0.0}, {std::numbers::e, 0.0}) ==
        doctest::Approx(1.0 / (2.0 * kPi)).epsilon(1e-14));
  CHECK_THROWS_AS(fund_solution({1.0, 2.0}, {1.0, 2.0}), std::invalid_argument);

  std::mt19937 rng(7);
  std::uniform_real_distribution<double> u(-3.0, 3.0);
  for (int it = 0; it < 50; ++it) {
    const Vec2 x{u(rng), u(rng)}, y{u(rng), u(rng)};
    if (distance(x, y) < 1e-6) continue;
    CHECK(fund_solution(x, y) == doctest::Approx(fund_solution(y, x)).epsilon(1e-15));
  }
}

TEST_CASE("fundamental solution grows like log|x|/(2 pi)") {
  const Vec2 y{0.3, -0.4};
  for (double r : {1e3, 1e6}) {
    const Vec2 x{r, 0.0};
    const double ratio = fund_solution(x, y) / (std::log(r) / (2.0 * kPi));
    CHECK(std::abs(ratio - 1.0) < 0.01);
  }
}

TEST_CASE("normal derivative kernels on a circle give 1/(4 pi R)") {
  std::mt19937 rng(11);
  std::uniform_real_distribution<double> angle(0.0, 2.0 * kPi);
  for (double radius : {0.5, 1.0, 3.0}) {
    for (int it = 0; it < 40; ++it) {
      const double a = angle(rng), b = angle(rng);
      if (std::abs(std::sin(0.5 * (a - b))) < 1e-4) continue;
      const Vec2 x{radius * std::cos(a), radius * std::sin(a)};
      const Vec2 y{radius * std::cos(b), radius * std::sin(b)};
      const Vec2 nu_y{std::cos(b), std::sin(b)};
      const Vec2 nu_x{std::cos(a), std::sin(a)};
      CHECK(dnu_y_s(x, y, nu_y) == doctest::Approx(1.0 / (4.0 * kPi * radius)).epsilon(1e-12));
      CHECK(dnu_x_s(x, y, nu_x) == doctest::Approx(1.0 / (4.0 * kPi * radius)).epsilon(1e-12));
    }
  }
}

TEST_CASE("dnu_y_s vanishes when the normal is perpendicular to the chord") {
  const Vec2 x{0.0, 0.0}, y{2.0, 0.0};
  CHECK(std::abs(dnu_y_s(x, y, {0.0, 1.0})) < 1e-16);
  CHECK(std::abs(dnu_x_s(y, x, {0.0, -1.0})) < 1e-16);
}

TEST_CASE("kernel symmetry under swapping the point carrying the normal") {
  std::mt19937 rng(3);
  std::uniform_real_distribution<double> u(-2.0, 2.0);
  for (int it = 0; it < 50; ++it) {
    const Vec2 x{u(rng), u(rng)}, y{u(rng), u(rng)};
    if (distance(x, y) < 1e-6) continue;
    Vec2 nu{u(rng), u(rng)};
    nu = nu / norm(nu);
    CHECK(dnu_x_s(x, y, nu) == doctest::Approx(dnu_y_s(y, x, nu)).epsilon(1e-15));
  }
}

TEST_CASE("directional derivatives match finite differences of the kernel") {
  std::mt19937 rng(19);
  std::uniform_real_distribution<double> u(-2.0, 2.0);
  const double step = 1e-5;
  for (int it = 0; it < 25; ++it) {
    const Vec2 x{u(rng), u(rng)}, y{u(rng), u(rng)};
    if (distance(x, y) < 0.3) continue;
    Vec2 nu{u(rng), u(rng)};
    nu = nu / norm(nu);
    const double fd_y =
        (fund_solution(x, y + step * nu) - fund_solution(x, y - step * nu)) / (2.0 * step);
    CHECK(std::abs(dnu_y_s(x, y, nu) - fd_y) < 1e-8);
    const double fd_x =
        (fund_solution(x + step * nu, y) - fund_solution(x - step * nu, y)) / (2.0 * step);
    CHECK(std::abs(dnu_x_s(x, y, nu) - fd_x) < 1e-8);
  }
}

TEST_CASE("double-layer kernel has the curvature diagonal limit") {
  // approach along the curve and compare against the stored signed curvature
  struct Probe {
    CurveSpec spec;
    CurveComponent comp;
  };
  const auto kite_spec = testdom::kite({0.0, 0.0}, 1.0);
  const auto circ_spec = testdom::circle({0.0, 0.0}, 2.0);
  Probe probes[] = {{circ_spec, circ_spec.build(64, CurveRole::Outer)},
                    {kite_spec, kite_spec.build(64, CurveRole::Outer)}};
  for (const auto& pr : probes) {
    for (int j : {0, 9, 23}) {
      const double target = pr.comp.curvature[j] / (4.0 * kPi);
      const double tj = pr.comp.t[j];
      double prev_err = 1e100;
      for (double eps : {1e-2, 1e-3, 1e-4}) {
        const Vec2 ynear = pr.spec.point(tj + eps);
        const Vec2 v = pr.spec.velocity(tj + eps);
        const Vec2 nunear = Vec2{v.y, -v.x} / norm(v);
        const double err = std::abs(dnu_y_s(pr.comp.point[j], ynear, nunear) - target);
        CHECK(err < prev_err + 1e-12);  // approaches the limit
        prev_err = err;
      }
      CHECK(prev_err < 1e-3 * std::max(1.0, std::abs(target)));
    }
  }
}
