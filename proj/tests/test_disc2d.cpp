#include "oracles.hpp"

#include <radsym/disc2d.hpp>

#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

using namespace radsym;

TEST_CASE("disc-rectangle areas") {
  const double R = 1.3;
  CHECK(disc_rectangle_area(R, -2.0, 2.0, -2.0, 2.0) == doctest::Approx(std::numbers::pi * R * R).epsilon(1e-14));
  CHECK(disc_rectangle_area(R, 0.0, 5.0, 0.0, 5.0) == doctest::Approx(std::numbers::pi * R * R / 4.0).epsilon(1e-14));
  CHECK(disc_rectangle_area(R, -0.1, 0.1, -0.2, 0.2) == doctest::Approx(0.08));
  CHECK(disc_rectangle_area(R, 1.3, 2.0, 0.0, 1.0) == 0.0);
  CHECK(disc_rectangle_area(R, 1.0, 0.0, 0.0, 1.0) == 0.0);
  std::mt19937_64 rng(31);
  for (int trial = 0; trial < 50; ++trial) {
    double x0 = uniform(rng, -1.6, 1.6), x1 = uniform(rng, -1.6, 1.6);
    double y0 = uniform(rng, -1.6, 1.6), y1 = uniform(rng, -1.6, 1.6);
    if (x0 > x1) std::swap(x0, x1);
    if (y0 > y1) std::swap(y0, y1);
    CHECK(disc_rectangle_area(R, x0, x1, y0, y1) ==
          doctest::Approx(oracle::disc_rectangle_area_quadrature(R, x0, x1, y0, y1)).epsilon(1e-7).scale(1.0));
  }
}

TEST_CASE("field construction zeroes the exterior and validates size") {
  const auto f = DiscField::from_function(33, 1.0, [](double, double) { return 1.0; });
  CHECK(f.at(0, 0) == 0.0);
  CHECK(f.at(16, 16) == 1.0);
  CHECK(f.inside(16, 16));
  CHECK_FALSE(f.inside(0, 16));
  CHECK_THROWS_AS(DiscField::from_function(34, 1.0, [](double, double) { return 0.0; }), std::invalid_argument);
  CHECK_THROWS_AS(DiscField::from_function(31, 1.0, [](double, double) { return 0.0; }), std::invalid_argument);
  CHECK_THROWS_AS(DiscField(33, 1.0, std::vector<double>(10, 0.0)), std::invalid_argument);
}

TEST_CASE("energy of the cone field converges to -pi/6") {
  const auto spec = prototype_spec();
  double prev = 1.0;
  for (int n : {65, 129, 257}) {
    const auto cone = DiscField::from_function(n, 1.0, [](double x, double y) { return 1.0 - std::hypot(x, y); });
    const double err = std::abs(energy_2d(cone, spec) - oracle::kConeEnergy);
    CHECK(err < prev);
    prev = err;
  }
  CHECK(prev < 2e-3);
}

TEST_CASE("energy is invariant under the grid rotation") {
  const auto spec = prototype_spec();
  const auto env = convexify(spec.W);
  const auto f = random_smooth_field(65, 1.0, 4);
  const auto g = f.rotated90().rotated90().rotated90().rotated90();
  CHECK(g.values() == f.values());
  CHECK(energy_2d(f.rotated90(), spec, env) == doctest::Approx(energy_2d(f, spec, env)).epsilon(1e-11));
}

TEST_CASE("energy_2d checks the problem") {
  auto spec = prototype_spec();
  const auto f = random_smooth_field(33, 1.0, 1);
  spec.dimension = 3;
  CHECK_THROWS_AS(energy_2d(f, spec), std::invalid_argument);
  spec = prototype_spec();
  spec.radius = 2.0;
  CHECK_THROWS_AS(energy_2d(f, spec), std::invalid_argument);
}

TEST_CASE("ray profiles of a radial field coincide with the profile") {
  const auto f = DiscField::from_function(129, 1.0, [](double x, double y) { return std::cos(1.5 * std::hypot(x, y)) * (1.0 - x * x - y * y); });
  for (double theta : {0.0, 0.7, 2.0}) {
    const auto p = ray_profile(f, theta);
    CHECK(p.cells() == 129);
    for (int i = 0; i <= p.cells(); i += 16) {
      const double r = p.grid.node(i);
      CHECK(p.u[i] == doctest::Approx(std::cos(1.5 * r) * (1.0 - r * r)).epsilon(2e-3).scale(1.0));
    }
  }
}

TEST_CASE("averaged ray energy: inequality on random fields, equality on radial ones") {
  const auto spec = prototype_spec();
  const auto env = convexify(spec.W);
  for (std::uint64_t seed : {1u, 2u, 3u}) {
    const auto rep = averaged_ray_energy_check(random_smooth_field(65, 1.0, seed), spec, env, 32);
    CHECK(rep.passes);
    CHECK(rep.thetas.size() == 32);
    CHECK(rep.per_theta_energies.size() == 32);
  }
  const auto radial = DiscField::from_function(129, 1.0, [](double x, double y) { return 1.0 - std::hypot(x, y); });
  const auto rep = averaged_ray_energy_check(radial, spec, env);
  CHECK(std::abs(rep.lhs - rep.rhs) <= rep.tol);
  CHECK_THROWS_AS(averaged_ray_energy_check(radial, spec, env, 0), std::invalid_argument);
}

TEST_CASE("strict gap for a planar field under a strictly convex W") {
  ProblemSpec spec = prototype_spec();
  spec.W = Potential1D::even_polynomial({0.0, 1.0});
  const auto env = convexify(spec.W);
  const auto planar = DiscField::from_function(129, 1.0, [](double x, double y) { return x * (1.0 - std::hypot(x, y)); });
  const auto rep = averaged_ray_energy_check(planar, spec, env);
  CHECK(rep.passes);
  CHECK(rep.rhs - rep.lhs > 2.0 * rep.tol);
}

TEST_CASE("colinearity defect") {
  const auto radial = DiscField::from_function(129, 1.0, [](double x, double y) { return 1.0 - std::hypot(x, y); });
  CHECK(colinearity_defect(radial) <= 5.0 * radial.h());
  const auto planar = DiscField::from_function(129, 1.0, [](double x, double) { return x; });
  CHECK(colinearity_defect(planar) >= 0.5);
  CHECK(colinearity_defect(DiscField::from_function(33, 1.0, [](double, double) { return 0.0; })) == 0.0);
}

TEST_CASE("angular average is radial and keeps radial fields") {
  const auto f = random_smooth_field(65, 1.0, 8);
  const auto a = angular_average(f);
  CHECK(colinearity_defect(a) <= 5.0 * a.h());
  const auto radial = DiscField::from_function(65, 1.0, [](double x, double y) { return 1.0 - x * x - y * y; });
  const auto b = angular_average(radial);
  for (std::size_t k = 0; k < radial.values().size(); ++k) CHECK(b.values()[k] == doctest::Approx(radial.values()[k]).scale(1.0).epsilon(5e-3));
}

TEST_CASE("random smooth fields are seeded and vanish on the circle") {
  const auto a = random_smooth_field(65, 1.0, 42);
  const auto b = random_smooth_field(65, 1.0, 42);
  const auto c = random_smooth_field(65, 1.0, 43);
  CHECK(a.values() == b.values());
  CHECK(a.values() != c.values());
  for (int k = 0; k < 64; ++k) {
    const double th = 2.0 * std::numbers::pi * k / 64;
    CHECK(std::abs(a.sample(std::cos(th), std::sin(th))) < 0.05);
  }
}

TEST_CASE("asymmetric unit-slope field has near-zero energy without a lower-order term") {
  ProblemSpec spec = prototype_spec();
  spec.G = Potential1D::polynomial({0.0});
  const auto env = convexify(spec.W);
  // min(R - |x|, c + |x1|) vanishes on the circle and has |grad u| = 1 off two curves.
  const auto fold = DiscField::from_function(129, 1.0, [](double x, double y) { return std::min(1.0 - std::hypot(x, y), 0.3 + std::abs(x)); });
  const double e = energy_2d(fold, spec);
  CHECK(e >= 0.0);
  CHECK(e < 0.05);
  CHECK(energy_2d(fold, spec, env) <= e);
  CHECK(averaged_ray_energy_check(fold, spec, env).passes);
  CHECK(colinearity_defect(fold) > 0.1);
}
