#include <radsym/radial_solver.hpp>

#include <radsym/random.hpp>

#include <cmath>
#include <limits>
#include <stdexcept>
#include <thread>

namespace radsym {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Second derivative of G, by central difference of G' for the sampled kind.
double g_second(const Potential1D& G, double m) {
  if (G.has_second_derivative()) return G.derivative(m, 2);
  const double h = 1e-5 * std::max(1.0, std::abs(m));
  return (G.derivative(m + h, 1) - G.derivative(m - h, 1)) / (2.0 * h);
}

// Discretized relaxed energy as a function of u_0..u_{K-1}, with u_K = 0.
class ReducedObjective {
 public:
  ReducedObjective(const ProblemSpec& spec, const EnvelopeResult& env, const RadialGrid& grid)
      : spec_(spec), env_(env), grid_(grid) {
    const double area = sphere_area(spec.dimension);
    weight_.resize(static_cast<std::size_t>(grid.cells()));
    min_width_ = grid.width(0);
    for (int c = 0; c < grid.cells(); ++c) {
      weight_[c] = area * std::pow(grid.mid(c), spec.dimension - 1) * grid.width(c);
      min_width_ = std::min(min_width_, grid.width(c));
    }
    for (double t : {0.5, 1.0, 2.0, 4.0}) slope_scale_ = std::max(slope_scale_, std::abs(env.slope(std::max(t, env.M))));
  }

  int size() const { return grid_.cells(); }

  // Quadrature weight attached to node i: half of each adjacent cell.
  double node_weight(int i) const { return 0.5 * (weight_[i] + (i > 0 ? weight_[i - 1] : 0.0)) + 1e-300; }

  // Gradient entries divided by node weights are a discrete Euler-Lagrange residual; its
  // rounding floor scales like max |W'| / dr.
  double stationarity_tol() const { return 1e-9 * (1.0 + slope_scale_ / min_width_); }

  double value(const std::vector<double>& x) const {
    const int K = size();
    double sum = 0.0;
    for (int c = 0; c < K; ++c) {
      const double a = x[c];
      const double b = c + 1 < K ? x[c + 1] : 0.0;
      sum += weight_[c] * (env_.value((b - a) / grid_.width(c)) + spec_.G(0.5 * (a + b)));
    }
    return sum;
  }

  // Gradient and tridiagonal Hessian (diag, off[i] couples i and i+1).
  void derivatives(const std::vector<double>& x, std::vector<double>& g, std::vector<double>& diag,
                   std::vector<double>& off) const {
    const int K = size();
    g.assign(static_cast<std::size_t>(K), 0.0);
    diag.assign(static_cast<std::size_t>(K), 0.0);
    off.assign(static_cast<std::size_t>(K), 0.0);
    for (int c = 0; c < K; ++c) {
      const double h = grid_.width(c);
      const double a = x[c];
      const double b = c + 1 < K ? x[c + 1] : 0.0;
      const double s = (b - a) / h;
      const double m = 0.5 * (a + b);
      const double d1 = env_.slope(s) / h;
      const double d2 = env_.curvature(s) / (h * h);
      const double g1 = spec_.G.derivative(m, 1) * 0.5;
      const double g2 = g_second(spec_.G, m) * 0.25;
      const double w = weight_[c];
      g[c] += w * (-d1 + g1);
      diag[c] += w * (d2 + g2);
      if (c + 1 < K) {
        g[c + 1] += w * (d1 + g1);
        diag[c + 1] += w * (d2 + g2);
        off[c] += w * (-d2 + g2);
      }
    }
  }

 private:
  const ProblemSpec& spec_;
  const EnvelopeResult& env_;
  const RadialGrid& grid_;
  std::vector<double> weight_;
  double min_width_ = 1.0;
  double slope_scale_ = 0.0;
};

// Solves (T + shift I) d = -g for tridiagonal T; false if a pivot is not positive.
bool shifted_newton_step(const std::vector<double>& diag, const std::vector<double>& off,
                         const std::vector<double>& g, double shift, std::vector<double>& d) {
  const std::size_t n = diag.size();
  std::vector<double> pivot(n), lower(n, 0.0);
  d.assign(n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    double p = diag[i] + shift;
    if (i > 0) {
      lower[i] = off[i - 1] / pivot[i - 1];
      p -= lower[i] * off[i - 1];
    }
    if (!(p > 0.0) || !std::isfinite(p)) return false;
    pivot[i] = p;
  }
  for (std::size_t i = 0; i < n; ++i) d[i] = -g[i] - (i > 0 ? lower[i] * d[i - 1] : 0.0);
  for (std::size_t i = n; i-- > 0;) {
    d[i] /= pivot[i];
    if (i + 1 < n) d[i] -= lower[i + 1] * d[i + 1];
  }
  return true;
}

struct Descent {
  std::vector<double> x;
  double energy = 0.0;
  int iterations = 0;
  bool converged = false;
};

// Levenberg-Marquardt: Newton steps on the tridiagonal Hessian shifted by lambda * max|diag|,
// with the shift adapted by the ratio of actual to predicted decrease.
Descent newton_descent(const ReducedObjective& obj, std::vector<double> x, int max_iters) {
  Descent out;
  const int K = obj.size();
  double F = obj.value(x);
  double lambda = 0.0;
  std::vector<double> g, diag, off, d, trial(x.size());
  bool fresh = true;
  int flat_steps = 0;
  int it = 0;
  for (; it < max_iters; ++it) {
    if (fresh) {
      obj.derivatives(x, g, diag, off);
      double residual = 0.0;
      for (int i = 0; i < K; ++i) residual = std::max(residual, std::abs(g[i]) / obj.node_weight(i));
      if (residual <= obj.stationarity_tol()) {
        out.converged = true;
        break;
      }
      fresh = false;
    }
    double dmax = 0.0;
    for (double v : diag) dmax = std::max(dmax, std::abs(v));
    const double scale = dmax > 0.0 ? dmax : 1.0;
    while (!shifted_newton_step(diag, off, g, lambda * scale, d)) {
      lambda = std::max(lambda * 4.0, 1e-10);
      if (lambda > 1e14) break;
    }
    if (lambda > 1e14) break;
    double gd = 0.0;
    for (int i = 0; i < K; ++i) gd += g[i] * d[i];
    const double predicted = -0.5 * gd;
    if (!(predicted > 0.0)) {
      out.converged = true;
      break;
    }
    for (int i = 0; i < K; ++i) trial[i] = x[i] + d[i];
    const double Fnew = obj.value(trial);
    const double rho = (F - Fnew) / predicted;
    if (Fnew < F && rho > 1e-4) {
      x.swap(trial);
      const double change = F - Fnew;
      F = Fnew;
      fresh = true;
      if (rho > 0.75) lambda = lambda < 1e-12 ? 0.0 : lambda / 3.0;
      else if (rho < 0.25) lambda = std::max(lambda * 2.0, 1e-10);
      // Progress below rounding level for several steps: stationary to working precision.
      flat_steps = change <= 1e-15 * (1.0 + std::abs(F)) ? flat_steps + 1 : 0;
      if (flat_steps >= 3) {
        out.converged = true;
        ++it;
        break;
      }
    } else {
      if (predicted <= 1e-15 * (1.0 + std::abs(F))) {
        out.converged = true;
        break;
      }
      lambda = std::max(lambda * 4.0, 1e-8);
    }
  }
  out.x = std::move(x);
  out.energy = F;
  out.iterations = it;
  return out;
}

// Coarse-to-fine: descend on the grid with every other node first (while it keeps at least
// 32 cells), then prolong linearly. Moving a slope discontinuity costs a few iterations per
// cell, so starting near its final position matters.
Descent multilevel_descent(const ProblemSpec& spec, const EnvelopeResult& env, const RadialGrid& grid,
                           std::vector<double> x, int max_iters) {
  const int K = grid.cells();
  int coarse_iterations = 0;
  if (K >= 64 && K % 2 == 0) {
    std::vector<double> nodes, xc;
    for (int i = 0; i <= K; i += 2) nodes.push_back(grid.node(i));
    for (int i = 0; i < K; i += 2) xc.push_back(x[i]);
    const RadialGrid coarse(std::move(nodes), grid.hint());
    const Descent dc = multilevel_descent(spec, env, coarse, std::move(xc), max_iters);
    coarse_iterations = dc.iterations;
    for (int i = 0; i < K; i += 2) x[i] = dc.x[i / 2];
    for (int i = 1; i < K; i += 2) {
      const double right = i + 1 < K ? x[i + 1] : 0.0;
      const double f = (grid.node(i) - grid.node(i - 1)) / (grid.node(i + 1) - grid.node(i - 1));
      x[i] = (1.0 - f) * x[i - 1] + f * right;
    }
  }
  const ReducedObjective obj(spec, env, grid);
  Descent out = newton_descent(obj, std::move(x), max_iters);
  out.iterations += coarse_iterations;
  return out;
}

std::vector<std::vector<double>> starting_profiles(const RadialGrid& grid, double M, int count, std::uint64_t seed) {
  const int K = grid.cells();
  const double R = grid.radius();
  const double base = std::max(M, 0.5);
  std::vector<std::vector<double>> starts;
  starts.emplace_back(static_cast<std::size_t>(K), 0.0);
  for (double c : {1.0, 1.5, 2.0}) {
    std::vector<double> x(static_cast<std::size_t>(K));
    for (int i = 0; i < K; ++i) x[i] = c * base * (R - grid.node(i));
    starts.push_back(std::move(x));
  }
  int idx = 0;
  while (static_cast<int>(starts.size()) < count) {
    std::uint64_t state = seed ^ (0xA0761D6478BD642Full * static_cast<std::uint64_t>(++idx));
    // Random slopes in [-2.5 base, 0.5 base], integrated inward from u(R) = 0.
    std::vector<double> slopes(static_cast<std::size_t>(K));
    for (int c = 0; c < K; ++c) slopes[c] = base * (-2.5 + 3.0 * unit_double(splitmix64(state)));
    const RadialProfile p = RadialProfile::from_slopes(grid, slopes);
    starts.emplace_back(p.u.begin(), p.u.end() - 1);
  }
  starts.resize(static_cast<std::size_t>(std::max(count, 1)));
  return starts;
}

}  // namespace

SolveReport minimize_relaxed(const ProblemSpec& spec, const EnvelopeResult& env, const RadialGrid& grid,
                             const SolveOptions& options) {
  if (std::abs(grid.radius() - spec.radius) > 1e-12 * spec.radius)
    throw std::invalid_argument("minimize_relaxed: grid radius does not match the problem radius");
  if (options.max_iters < 1) throw std::invalid_argument("minimize_relaxed: max_iters must be positive");
  const auto starts = starting_profiles(grid, env.M, options.multistarts, options.seed);
  std::vector<Descent> results(starts.size());

  const unsigned hw = std::max(1u, std::thread::hardware_concurrency());
  const std::size_t workers =
      std::min<std::size_t>(starts.size(), options.threads > 0 ? static_cast<std::size_t>(options.threads) : hw);
  auto work = [&](std::size_t first) {
    for (std::size_t i = first; i < starts.size(); i += workers)
      results[i] = multilevel_descent(spec, env, grid, starts[i], options.max_iters);
  };
  if (workers <= 1) {
    work(0);
  } else {
    std::vector<std::thread> pool;
    for (std::size_t w = 0; w < workers; ++w) pool.emplace_back(work, w);
    for (auto& t : pool) t.join();
  }

  std::size_t best = 0;
  for (std::size_t i = 1; i < results.size(); ++i) {
    const Descent& a = results[i];
    const Descent& b = results[best];
    if (a.energy < b.energy || (a.energy == b.energy && a.x < b.x)) best = i;
  }

  std::vector<double> u = results[best].x;
  u.push_back(0.0);
  SolveReport report;
  report.profile = RadialProfile(grid, std::move(u));
  report.relaxed_energy = energy_reduced(report.profile, spec, env);
  report.original_energy = energy_reduced(report.profile, spec);
  report.iterations = results[best].iterations;
  report.multistart_seed = options.seed;
  report.converged = results[best].converged;
  report.best_start = static_cast<int>(best);
  for (const auto& r : results) report.start_energies.push_back(r.energy);
  return report;
}

OracleReport dp_oracle(const ProblemSpec& spec, const EnvelopeResult& env, const OracleOptions& options) {
  if (options.r_levels < 16 || options.r_levels > 200)
    throw std::invalid_argument("dp_oracle: r_levels must lie in [16, 200] (state-space guard)");
  if (options.u_levels < 2 || options.u_levels > 400)
    throw std::invalid_argument("dp_oracle: u_levels must lie in [2, 400] (state-space guard)");
  if (options.slope_levels < 2 || options.slope_levels > 400)
    throw std::invalid_argument("dp_oracle: slope_levels must lie in [2, 400] (state-space guard)");

  const int K = options.r_levels;
  const int J = options.u_levels;
  const double R = spec.radius;
  const double M = env.M;
  const bool monotone = spec.shape != ShapeFlag::none;
  const double S = options.slope_max.value_or(2.5 * std::max(M, 1.0));
  const double umax = options.u_max.value_or(1.5 * M * R + R * std::max(M, 1.0));
  const double umin = monotone ? 0.0 : -umax;
  if (!(S > 0.0) || !(umax > 0.0)) throw std::invalid_argument("dp_oracle: windows must be positive");

  std::vector<double> slopes;
  for (int k = 0; k < options.slope_levels; ++k) {
    const double f = static_cast<double>(k) / (options.slope_levels - 1);
    slopes.push_back(monotone ? -S + S * f : -S + 2.0 * S * f);
  }
  if (M > 0.0 && M <= S) {
    slopes.push_back(-M);
    std::sort(slopes.begin(), slopes.end());
    slopes.erase(std::unique(slopes.begin(), slopes.end()), slopes.end());
  }
  const int L = static_cast<int>(slopes.size());

  const RadialGrid grid = RadialGrid::uniform(R, K);
  const double dr = R / K;
  const double area = sphere_area(spec.dimension);
  std::vector<double> weight(static_cast<std::size_t>(K));
  for (int c = 0; c < K; ++c) weight[c] = area * std::pow(grid.mid(c), spec.dimension - 1) * grid.width(c);
  std::vector<double> phi(static_cast<std::size_t>(L));
  for (int k = 0; k < L; ++k) phi[k] = env.value(slopes[k]);

  // Value window of u_c. In the monotone case admissible profiles satisfy
  // M (R - r) <= u(r) <= S (R - r), which keeps the value grids narrow near the boundary.
  std::vector<double> lo(static_cast<std::size_t>(K)), hi(static_cast<std::size_t>(K));
  for (int c = 0; c < K; ++c) {
    const double rest = R - grid.node(c);
    lo[c] = monotone ? std::min(M * rest, umax) : umin;
    hi[c] = monotone ? std::min(S * rest, umax) : umax;
    if (!(hi[c] > lo[c])) hi[c] = lo[c] + 1e-12;
  }
  auto level = [&](int c, int j) { return lo[c] + (hi[c] - lo[c]) * j / (J - 1); };

  // Cost-to-go rows with monotone cubic Hermite slopes (Fritsch-Carlson).
  struct Row {
    std::vector<double> v, m;
  };
  std::vector<Row> value(static_cast<std::size_t>(K));
  auto finish_row = [&](int c) {
    Row& row = value[c];
    const double h = (hi[c] - lo[c]) / (J - 1);
    std::vector<double> delta(static_cast<std::size_t>(J - 1));
    for (int j = 0; j + 1 < J; ++j) delta[j] = (row.v[j + 1] - row.v[j]) / h;
    row.m.assign(static_cast<std::size_t>(J), 0.0);
    row.m[0] = delta[0];
    row.m[J - 1] = delta[J - 2];
    for (int j = 1; j + 1 < J; ++j)
      row.m[j] = delta[j - 1] * delta[j] > 0.0 ? 2.0 / (1.0 / delta[j - 1] + 1.0 / delta[j]) : 0.0;
  };
  auto interp = [&](int c, double x) {
    const Row& row = value[c];
    const double h = (hi[c] - lo[c]) / (J - 1);
    const double pos = (x - lo[c]) / h;
    if (pos < -1e-9 || pos > (J - 1) + 1e-9) return kInf;
    const int j = std::clamp(static_cast<int>(std::floor(pos)), 0, J - 2);
    const double f = std::clamp(pos - j, 0.0, 1.0);
    const double f2 = f * f, f3 = f2 * f;
    return (2 * f3 - 3 * f2 + 1) * row.v[j] + (f3 - 2 * f2 + f) * h * row.m[j] + (-2 * f3 + 3 * f2) * row.v[j + 1] +
           (f3 - f2) * h * row.m[j + 1];
  };

  value[K - 1].v.resize(static_cast<std::size_t>(J));
  for (int j = 0; j < J; ++j) {
    const double u = level(K - 1, j);
    value[K - 1].v[j] = weight[K - 1] * (env.value(-u / dr) + spec.G(0.5 * u));
  }
  finish_row(K - 1);
  auto step_cost = [&](int c, double u, int k) {
    const double rest = interp(c + 1, u + slopes[k] * grid.width(c));
    if (rest == kInf) return kInf;
    return weight[c] * (phi[k] + spec.G(u + 0.5 * slopes[k] * grid.width(c))) + rest;
  };
  for (int c = K - 2; c >= 0; --c) {
    value[c].v.resize(static_cast<std::size_t>(J));
    for (int j = 0; j < J; ++j) {
      double best = kInf;
      for (int k = 0; k < L; ++k) best = std::min(best, step_cost(c, level(c, j), k));
      if (best == kInf) throw std::runtime_error("dp_oracle: value window admits no control");
      value[c].v[j] = best;
    }
    finish_row(c);
  }

  OracleReport out;
  int j0 = 0;
  for (int j = 1; j < J; ++j)
    if (value[0].v[j] < value[0].v[j0]) j0 = j;
  out.table_value = value[0].v[j0];
  std::vector<double> u(static_cast<std::size_t>(K) + 1, 0.0);
  u[0] = level(0, j0);
  bool hit = (j0 == J - 1 && hi[0] >= umax) || (!monotone && j0 == 0);
  for (int c = 0; c + 1 < K; ++c) {
    int bk = 0;
    double best = kInf;
    for (int k = 0; k < L; ++k) {
      const double v = step_cost(c, u[c], k);
      if (v < best) {
        best = v;
        bk = k;
      }
    }
    if (best == kInf) throw std::runtime_error("dp_oracle: no admissible control during reconstruction");
    u[c + 1] = u[c] + slopes[bk] * grid.width(c);
    if (bk == 0 || (!monotone && bk == L - 1)) hit = true;
  }
  if (-u[K - 1] / dr <= -S) hit = true;

  out.solve.profile = RadialProfile(grid, std::move(u));
  out.solve.relaxed_energy = energy_reduced(out.solve.profile, spec, env);
  out.solve.original_energy = energy_reduced(out.solve.profile, spec);
  out.solve.iterations = K;
  out.solve.converged = true;
  out.u_min = umin;
  out.u_max = umax;
  out.slope_min = slopes.front();
  out.slope_max = slopes.back();
  out.window_hit = hit;
  return out;
}

double LevelSetIndex::outermost(double nu) const {
  nu = std::abs(nu);
  if (nu >= t_.back()) return nu;
  const double w = f_(nu);
  const auto it = std::upper_bound(suffix_min_.begin(), suffix_min_.end(), w);
  const std::ptrdiff_t j = (it - suffix_min_.begin()) - 1;
  if (j < 0) return nu;
  const std::size_t i = static_cast<std::size_t>(j);
  if (t_[i] <= nu) return nu;
  if (i + 1 >= t_.size()) return t_.back();
  double lo = t_[i], hi = t_[i + 1];
  for (int k = 0; k < 200 && hi - lo > 1e-15 * std::max(1.0, hi); ++k) {
    const double mid = 0.5 * (lo + hi);
    if (f_(mid) <= w)
      lo = mid;
    else
      hi = mid;
  }
  return lo;
}

RadialProfile monotone_rearrange(const RadialProfile& profile, const EnvelopeResult& env, const Potential1D& W,
                                 LevelFunction level) {
  double window = std::max(env.window, 2.0 * env.M);
  for (int c = 0; c < profile.cells(); ++c) window = std::max(window, 1.01 * std::abs(profile.slope(c)));
  std::function<double(double)> f;
  if (level == LevelFunction::original)
    f = [&W](double t) { return W(t); };
  else
    f = [&env](double t) { return env.value(t); };
  const LevelSetIndex index(f, window);
  std::vector<double> slopes(static_cast<std::size_t>(profile.cells()));
  for (int c = 0; c < profile.cells(); ++c) slopes[c] = -index.outermost(profile.slope(c));
  return RadialProfile::from_slopes(profile.grid, slopes);
}

PipelineReport solve_pipeline(const ProblemSpec& spec, const PipelineOptions& options) {
  PipelineReport report;
  report.validation = validate_spec(spec);
  if (!report.validation.passes)
    for (const auto& c : report.validation.checks)
      if (!c.passed) report.warnings.push_back("hypothesis check failed: " + c.name + " (" + c.detail + ")");

  report.envelope = convexify(spec.W, options.envelope_points);
  const EnvelopeResult& env = report.envelope;
  if (env.M > 0.0) {
    if (spec.shape == ShapeFlag::none)
      report.warnings.push_back("M > 0 but G carries no G2 shape flag: the monotone structure is not predicted");
    const ShapeReport shape = check_G_shape(spec.G, false);
    if (!shape.passes)
      report.warnings.push_back(
          "G2 hypothesis violated (G nonincreasing on [0, inf) with G(mu) <= G(-mu)): " + (shape.witness ? shape.witness->reason : std::string()));
  }

  const RadialGrid grid = options.grid_kind == GridKind::uniform ? RadialGrid::uniform(spec.radius, options.grid_cells)
                                                                 : RadialGrid::graded(spec.radius, options.grid_cells);
  report.solve = minimize_relaxed(spec, env, grid, options.solve);
  if (!report.solve.converged) report.warnings.push_back("minimize_relaxed did not converge within max_iters");
  report.minimizer = report.solve.profile;
  if (spec.shape != ShapeFlag::none) {
    report.solve.profile = monotone_rearrange(report.minimizer, env, spec.W, LevelFunction::envelope);
    report.rearranged = true;
    report.solve.relaxed_energy = energy_reduced(report.solve.profile, spec, env);
    report.solve.original_energy = energy_reduced(report.solve.profile, spec);
  }

  VerifyOptions vopts = options.verify;
  // Without a shape hypothesis the sign and slope structure is not predicted.
  vopts.expect_monotone = vopts.expect_monotone && spec.shape != ShapeFlag::none;
  report.verify_minimizer = verify_all(report.minimizer, spec, env, vopts);
  report.verify = verify_all(report.solve.profile, spec, env, vopts);
  const double gap = std::abs(report.solve.original_energy - report.solve.relaxed_energy);
  report.energy_consistent = gap <= vopts.consistency_tol * (1.0 + std::abs(report.solve.original_energy));

  if (options.run_oracle) {
    OracleReport oracle = dp_oracle(spec, env, options.oracle);
    const SolveReport same_grid = minimize_relaxed(spec, env, oracle.solve.profile.grid, options.solve);
    const double ref = oracle.solve.relaxed_energy;
    report.solve.oracle_gap = (same_grid.relaxed_energy - ref) / std::max(std::abs(ref), 1e-300);
    if (oracle.window_hit) report.warnings.push_back("dp_oracle profile touches its value or slope window");
    report.oracle = std::move(oracle);
  }
  report.overall = report.verify.overall && report.energy_consistent;
  return report;
}

}  // namespace radsym
