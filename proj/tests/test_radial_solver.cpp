#include "oracles.hpp"

#include <radsym/radial_solver.hpp>

#include <doctest.h>

#include <cmath>
#include <random>

using namespace radsym;

namespace {

ProblemSpec quadratic_linear() {
  ProblemSpec spec;
  spec.dimension = 2;
  spec.radius = 1.0;
  spec.p = 2.0;
  spec.W = Potential1D::even_polynomial({0.0, 1.0});
  spec.G = Potential1D::polynomial({0.0, -1.0});
  spec.shape = ShapeFlag::G2_strict;
  spec.growth.rho = 1.0;
  return spec;
}

}  // namespace

TEST_CASE("solver recovers the closed-form minimizer of a convex problem") {
  const auto spec = quadratic_linear();
  const auto env = convexify(spec.W);
  const auto rep = minimize_relaxed(spec, env, RadialGrid::uniform(1.0, 256));
  CHECK(rep.converged);
  CHECK(rep.relaxed_energy == doctest::Approx(oracle::kQuadraticLinearEnergy).epsilon(1e-4));
  double worst = 0.0;
  for (int i = 0; i <= 256; ++i)
    worst = std::max(worst, std::abs(rep.profile.u[i] - oracle::quadratic_linear_minimizer(rep.profile.grid.node(i))));
  CHECK(worst < 1e-4);
  CHECK(rep.start_energies.size() == 8);
}

TEST_CASE("solver beats the cone on the prototype and is seed-deterministic") {
  const auto spec = prototype_spec();
  const auto env = convexify(spec.W);
  const auto grid = RadialGrid::uniform(1.0, 256);
  SolveOptions o;
  o.seed = 17;
  o.threads = 1;
  const auto a = minimize_relaxed(spec, env, grid, o);
  o.threads = 4;
  const auto b = minimize_relaxed(spec, env, grid, o);
  CHECK(a.converged);
  CHECK(a.relaxed_energy <= oracle::kConeEnergy);
  CHECK(a.profile.u == b.profile.u);
  CHECK(a.relaxed_energy == b.relaxed_energy);
  CHECK(a.start_energies == b.start_energies);
  CHECK(a.start_energies[a.best_start] == *std::min_element(a.start_energies.begin(), a.start_energies.end()));
  CHECK(a.relaxed_energy == doctest::Approx(a.start_energies[a.best_start]).epsilon(1e-12));
}

TEST_CASE("solver argument checks") {
  const auto spec = prototype_spec();
  const auto env = convexify(spec.W);
  CHECK_THROWS_AS(minimize_relaxed(spec, env, RadialGrid::uniform(2.0, 32)), std::invalid_argument);
  SolveOptions o;
  o.max_iters = 0;
  CHECK_THROWS_AS(minimize_relaxed(spec, env, RadialGrid::uniform(1.0, 32), o), std::invalid_argument);
}

TEST_CASE("dp oracle approaches the closed form and enforces its guards") {
  const auto spec = quadratic_linear();
  const auto env = convexify(spec.W);
  OracleOptions o;
  o.r_levels = 64;
  o.u_levels = 120;
  o.slope_levels = 120;
  const auto rep = dp_oracle(spec, env, o);
  CHECK(rep.solve.relaxed_energy == doctest::Approx(oracle::kQuadraticLinearEnergy).epsilon(0.02));
  CHECK(rep.solve.relaxed_energy >= oracle::kQuadraticLinearEnergy - 1e-3);
  CHECK(rep.solve.profile.u.back() == 0.0);
  CHECK(rep.solve.relaxed_energy == doctest::Approx(energy_reduced(rep.solve.profile, spec, env)));
  o.r_levels = 8;
  CHECK_THROWS_AS(dp_oracle(spec, env, o), std::invalid_argument);
  o.r_levels = 64;
  o.u_levels = 1000;
  CHECK_THROWS_AS(dp_oracle(spec, env, o), std::invalid_argument);
  o.u_levels = 100;
  o.slope_levels = 1;
  CHECK_THROWS_AS(dp_oracle(spec, env, o), std::invalid_argument);
}

TEST_CASE("level-set index of the double well") {
  const auto W = Potential1D::even_polynomial({1.0, -2.0, 1.0});
  const LevelSetIndex idx([&](double t) { return W(t); }, 3.0);
  CHECK(idx.outermost(0.0) == doctest::Approx(std::sqrt(2.0)).epsilon(1e-10));
  CHECK(idx.outermost(0.5) == doctest::Approx(std::sqrt(1.75)).epsilon(1e-10));
  CHECK(idx.outermost(1.0) == doctest::Approx(1.0).epsilon(1e-10));
  CHECK(idx.outermost(2.0) == doctest::Approx(2.0).epsilon(1e-10));
}

TEST_CASE("monotone rearrangement laws on random profiles") {
  const auto spec = prototype_spec();
  const auto env = convexify(spec.W);
  const auto grid = RadialGrid::uniform(1.0, 128);
  std::mt19937_64 rng(123);
  for (int trial = 0; trial < 20; ++trial) {
    std::vector<double> s(128);
    for (auto& x : s) x = uniform(rng, -2.0, 2.0);
    const auto u = RadialProfile::from_slopes(grid, s);
    const auto v = monotone_rearrange(u, env, spec.W);
    for (int c = 0; c < 128; ++c) {
      CHECK(spec.W(v.slope(c)) == doctest::Approx(spec.W(u.slope(c))).epsilon(1e-8));
      CHECK(v.slope(c) <= 0.0);
    }
    for (int i = 0; i <= 128; ++i) CHECK(v.u[i] >= std::abs(u.u[i]) - 1e-12);
    CHECK(energy_reduced(v, spec) <= energy_reduced(u, spec) + 1e-9);
  }
}

TEST_CASE("pipeline on the prototype") {
  PipelineOptions o;
  o.grid_cells = 256;
  o.run_oracle = true;
  o.oracle.r_levels = 50;
  o.oracle.u_levels = 100;
  o.oracle.slope_levels = 100;
  const auto rep = solve_pipeline(prototype_spec(), o);
  CHECK(rep.validation.passes);
  CHECK(rep.rearranged);
  CHECK(rep.overall);
  CHECK(rep.energy_consistent);
  REQUIRE(rep.oracle);
  REQUIRE(rep.solve.oracle_gap);
  CHECK(*rep.solve.oracle_gap <= 1e-3);
  CHECK(rep.warnings.empty());
}

TEST_CASE("pipeline warns when G lacks a declared shape") {
  auto spec = prototype_spec();
  spec.shape = ShapeFlag::none;
  PipelineOptions o;
  o.grid_cells = 128;
  const auto rep = solve_pipeline(spec, o);
  CHECK_FALSE(rep.rearranged);
  CHECK_FALSE(rep.warnings.empty());
  CHECK(rep.verify.check("slope_and_sign").informational);
}
