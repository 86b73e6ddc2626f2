#include <radsym/envelope.hpp>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <stdexcept>

namespace radsym {

namespace {

struct GridRun {
  int left = 0;   // contact node before the run
  int right = 0;  // contact node after the run
  double alpha = 0.0;
  double beta = 0.0;
};

struct InnerMin {
  double t;
  double g;
};

// min of W(t) - alpha t over [lo, hi]
InnerMin tilted_min(const Potential1D& W, double alpha, double lo, double hi) {
  auto g = [&](double t) { return W(t) - alpha * t; };
  constexpr int kSamples = 65;
  int best = 0;
  double gbest = std::numeric_limits<double>::infinity();
  const double h = (hi - lo) / (kSamples - 1);
  for (int k = 0; k < kSamples; ++k) {
    const double gv = g(lo + k * h);
    if (gv < gbest) {
      gbest = gv;
      best = k;
    }
  }
  double a = lo + std::max(0, best - 1) * h;
  double b = lo + std::min(kSamples - 1, best + 1) * h;
  // Prefer an exact stationary point of g when the derivative brackets one.
  if (W.is_polynomial_kind()) {
    auto dg = [&](double t) { return W.derivative(t, 1) - alpha; };
    if (dg(a) < 0.0 && dg(b) > 0.0) {
      for (int it = 0; it < 200 && (b - a) > 1e-15 * std::max(1.0, std::abs(a)); ++it) {
        const double m = 0.5 * (a + b);
        (dg(m) < 0.0 ? a : b) = m;
      }
      const double t = 0.5 * (a + b);
      const double gv = g(t);
      if (gv <= gbest) return {t, gv};
      return {lo + best * h, gbest};
    }
  }
  const double phi = (std::sqrt(5.0) - 1.0) / 2.0;
  double c = b - phi * (b - a), d = a + phi * (b - a);
  double fc = g(c), fd = g(d);
  for (int it = 0; it < 200 && (b - a) > 1e-14 * std::max(1.0, std::abs(a)); ++it) {
    if (fc <= fd) {
      b = d; d = c; fd = fc; c = b - phi * (b - a); fc = g(c);
    } else {
      a = c; c = d; fc = fd; d = a + phi * (b - a); fd = g(d);
    }
  }
  const double t = fc <= fd ? c : d;
  const double gv = std::min(fc, fd);
  if (gv <= gbest) return {t, gv};
  return {lo + best * h, gbest};
}

// Exact bitangent between a left and a right contact bracket.
DetachmentComponent refine_bitangent(const Potential1D& W, double l_lo, double l_hi, double r_lo, double r_hi,
                                     double alpha0) {
  auto f = [&](double alpha) {
    return tilted_min(W, alpha, l_lo, l_hi).g - tilted_min(W, alpha, r_lo, r_hi).g;
  };
  double step = 1e-6 * std::max(1.0, std::abs(alpha0));
  double lo = alpha0 - step, hi = alpha0 + step;
  for (int it = 0; it < 60 && f(lo) > 0.0; ++it) {
    lo -= step;
    step *= 2.0;
  }
  step = 1e-6 * std::max(1.0, std::abs(alpha0));
  for (int it = 0; it < 60 && f(hi) < 0.0; ++it) {
    hi += step;
    step *= 2.0;
  }
  for (int it = 0; it < 200 && (hi - lo) > 1e-15 * std::max(1.0, std::abs(lo)); ++it) {
    const double m = 0.5 * (lo + hi);
    (f(m) < 0.0 ? lo : hi) = m;
  }
  const double alpha = 0.5 * (lo + hi);
  const InnerMin left = tilted_min(W, alpha, l_lo, l_hi);
  const InnerMin right = tilted_min(W, alpha, r_lo, r_hi);
  DetachmentComponent c;
  c.a = left.t;
  c.b = right.t;
  c.alpha = alpha;
  c.beta = 0.5 * (left.g + right.g);
  c.is_constant = false;
  return c;
}

std::vector<GridRun> grid_runs(const std::vector<double>& t, const std::vector<double>& values,
                               const std::vector<double>& w, double tol) {
  const int n = static_cast<int>(t.size());
  std::vector<GridRun> runs;
  int i = 0;
  while (i < n) {
    if (w[i] - values[i] <= tol) {
      ++i;
      continue;
    }
    int j = i;
    while (j + 1 < n && w[j + 1] - values[j + 1] > tol) ++j;
    GridRun run;
    run.left = std::max(0, i - 1);
    run.right = std::min(n - 1, j + 1);
    run.alpha = (values[run.right] - values[run.left]) / (t[run.right] - t[run.left]);
    run.beta = values[run.left] - run.alpha * t[run.left];
    runs.push_back(run);
    i = j + 1;
  }
  // Merge runs separated by a single contact node with agreeing affine data.
  std::vector<GridRun> merged;
  for (const auto& run : runs) {
    if (!merged.empty()) {
      GridRun& prev = merged.back();
      const bool touching = prev.right == run.left;
      const bool same_alpha = std::abs(prev.alpha - run.alpha) <= 1e-8 * std::max(1.0, std::abs(run.alpha));
      const bool same_beta = std::abs(prev.beta - run.beta) <= 1e-8 * std::max(1.0, std::abs(run.beta));
      if (touching && same_alpha && same_beta) {
        prev.right = run.right;
        prev.alpha = (values[prev.right] - values[prev.left]) / (t[prev.right] - t[prev.left]);
        prev.beta = values[prev.left] - prev.alpha * t[prev.left];
        continue;
      }
    }
    merged.push_back(run);
  }
  return merged;
}

std::string note(const char* format, double a) {
  char buf[160];
  std::snprintf(buf, sizeof buf, format, a);
  return buf;
}

}  // namespace

std::vector<double> lower_hull_values(std::span<const double> t, std::span<const double> y) {
  const std::size_t n = t.size();
  if (y.size() != n) throw std::invalid_argument("lower_hull_values: size mismatch");
  if (n == 0) return {};
  std::vector<std::size_t> hull;
  hull.reserve(n);
  for (std::size_t k = 0; k < n; ++k) {
    while (hull.size() >= 2) {
      const std::size_t o = hull[hull.size() - 2];
      const std::size_t a = hull.back();
      const double cross = (t[a] - t[o]) * (y[k] - y[o]) - (y[a] - y[o]) * (t[k] - t[o]);
      if (cross > 0.0) break;
      hull.pop_back();
    }
    hull.push_back(k);
  }
  std::vector<double> out(n);
  for (std::size_t h = 0; h + 1 < hull.size(); ++h) {
    const std::size_t i = hull[h], j = hull[h + 1];
    out[i] = y[i];
    const double slope = (y[j] - y[i]) / (t[j] - t[i]);
    for (std::size_t k = i + 1; k < j; ++k) out[k] = y[i] + (t[k] - t[i]) * slope;
  }
  out[hull.back()] = y[hull.back()];
  return out;
}

bool wcaffine_holds(const std::vector<DetachmentComponent>& components, double M) {
  const double eps = 1e-9 * std::max(1.0, M);
  return std::all_of(components.begin(), components.end(),
                     [&](const DetachmentComponent& c) { return c.a >= -M - eps && c.b <= M + eps; });
}

std::vector<DetachmentComponent> detachment_components(const EnvelopeResult& env) {
  const auto& t = env.grid;
  const int n = static_cast<int>(t.size());
  std::vector<double> w(t.size());
  double wmin = std::numeric_limits<double>::infinity(), wmax = -wmin;
  for (int i = 0; i < n; ++i) {
    w[i] = env.W(t[i]);
    wmin = std::min(wmin, w[i]);
    wmax = std::max(wmax, w[i]);
  }
  const double tol = env.detach_tol > 0.0 ? env.detach_tol : 1e-9 * std::max(wmax - wmin, 1e-300);
  const auto runs = grid_runs(t, env.values, w, tol);

  std::vector<DetachmentComponent> out;
  if (!env.W.is_polynomial_kind()) {
    for (const auto& run : runs) {
      DetachmentComponent c{t[run.left], t[run.right], run.alpha, run.beta, false};
      if (t[run.left] < 0.0 && t[run.right] > 0.0 && std::abs(t[run.left] + t[run.right]) <= 1e-12 * t[run.right])
        c.alpha = 0.0;
      c.is_constant = c.alpha == 0.0;
      out.push_back(c);
    }
    return out;
  }

  std::vector<DetachmentComponent> positive;
  bool central = false;
  for (const auto& run : runs) {
    const double tl = t[run.left], tr = t[run.right];
    if (tl < 0.0 && tr > 0.0) {
      central = true;
    } else if (tl >= 0.0) {
      const int L = run.left, R = run.right;
      const double l_lo = t[std::max(0, L - 2)], l_hi = t[std::min(n - 1, L + 2)];
      const double r_lo = t[std::max(0, R - 2)], r_hi = t[std::min(n - 1, R + 2)];
      DetachmentComponent c = refine_bitangent(env.W, l_lo, l_hi, r_lo, r_hi, run.alpha);
      c.is_constant = std::abs(c.alpha) <= 1e-12;
      positive.push_back(c);
    }
  }
  for (auto it = positive.rbegin(); it != positive.rend(); ++it)
    out.push_back({-it->b, -it->a, -it->alpha, it->beta, it->is_constant});
  if (central && env.M > 0.0) out.push_back({-env.M, env.M, 0.0, env.W(env.M), true});
  out.insert(out.end(), positive.begin(), positive.end());
  return out;
}

EnvelopeResult convexify(const Potential1D& W, int grid_points) {
  if (grid_points < 64) throw std::invalid_argument("convexify: grid_points must be at least 64");
  if (!W.is_coercive()) throw std::invalid_argument("convexify: potential is not coercive");
  if (!W.declared_even()) throw std::invalid_argument("convexify: potential must be even");

  EnvelopeResult env;
  env.W = W;

  auto finish = [&env] {
    double wmin = std::numeric_limits<double>::infinity(), wmax = -wmin;
    for (double s : env.grid) {
      wmin = std::min(wmin, env.W(s));
      wmax = std::max(wmax, env.W(s));
    }
    env.detach_tol = 1e-9 * std::max(wmax - wmin, 1e-300);
  };

  if (W.kind() == PotentialKind::sampled) {
    const auto& ts = W.sample_t();
    const std::size_t n = ts.size();
    for (std::size_t i = 0; i < n; ++i)
      if (std::abs(ts[i] + ts[n - 1 - i]) > 1e-12 * std::max(1.0, std::abs(ts[i])))
        throw std::invalid_argument("convexify: sampled potential grid must be symmetric about 0");
    env.window = W.halfwidth();
    env.grid = ts;
    env.values = lower_hull_values(ts, W.sample_v());
    env.M = compute_M(W, env.window, 10000);
    finish();
    env.components = detachment_components(env);
  } else {
    const int half = std::max(32, grid_points / 2);
    const int n = 2 * half + 1;
    double T = std::max(W.halfwidth(), 1.25 * W.convexity_radius());
    for (int attempt = 0; attempt < 12; ++attempt) {
      env.M = compute_M(W, T, 10000);
      if (1.25 * env.M > T) {
        T = 2.0 * env.M;
        continue;
      }
      env.window = T;
      env.grid.assign(n, 0.0);
      for (int k = 1; k <= half; ++k) {
        const double s = T * k / half;
        env.grid[half + k] = s;
        env.grid[half - k] = -s;
      }
      std::vector<double> y(n);
      for (int i = 0; i < n; ++i) y[i] = W(env.grid[i]);
      env.values = lower_hull_values(env.grid, y);
      finish();
      env.components = detachment_components(env);
      const bool touches_edge = std::any_of(env.components.begin(), env.components.end(),
                                            [&](const DetachmentComponent& c) { return c.b >= env.grid[n - 3]; });
      if (!touches_edge) break;
      T *= 2.0;
    }
    for (int i = 0; i < n; ++i) {
      const double s = env.grid[i];
      const DetachmentComponent* c = env.component_at(s);
      env.values[i] = c ? c->line(s) : W(s);
    }
  }

  env.constant_radius_M0 = env.M;
  env.wcaffine_holds = wcaffine_holds(env.components, env.M);

  // Contact along a whole interval next to a component (W~ affine there).
  const double tol = env.detach_tol;
  for (const auto& c : env.components) {
    if (c.b <= 0.0) continue;
    int run = 0;
    for (std::size_t i = 0; i < env.grid.size(); ++i) {
      const double s = env.grid[i];
      if (s <= c.b) continue;
      if (std::abs(W(s) - c.line(s)) <= tol) {
        ++run;
      } else {
        break;
      }
    }
    if (run >= 2) env.notes.push_back(note("plateau contact: W~ coincides with the affine envelope beyond t = %.10g", c.b));
  }
  return env;
}

const DetachmentComponent* EnvelopeResult::component_at(double t) const {
  for (const auto& c : components)
    if (c.contains(t)) return &c;
  return nullptr;
}

double EnvelopeResult::value(double t) const {
  if (const DetachmentComponent* c = component_at(t)) return c->line(t);
  if (W.kind() == PotentialKind::sampled && t > grid.front() && t < grid.back()) {
    const auto it = std::upper_bound(grid.begin(), grid.end(), t);
    const std::size_t j = static_cast<std::size_t>(it - grid.begin());
    const std::size_t i = j - 1;
    return values[i] + (t - grid[i]) * ((values[j] - values[i]) / (grid[j] - grid[i]));
  }
  return W(t);
}

double EnvelopeResult::slope(double t) const {
  for (const auto& c : components)
    if (c.contains_closed(t)) return c.alpha;
  if (W.kind() == PotentialKind::sampled) {
    if (t <= grid.front()) return (values[1] - values[0]) / (grid[1] - grid[0]);
    if (t >= grid.back()) {
      const std::size_t n = grid.size();
      return (values[n - 1] - values[n - 2]) / (grid[n - 1] - grid[n - 2]);
    }
    const auto it = std::upper_bound(grid.begin(), grid.end(), t);
    const std::size_t j = static_cast<std::size_t>(it - grid.begin());
    return (values[j] - values[j - 1]) / (grid[j] - grid[j - 1]);
  }
  return W.derivative(t, 1);
}

double EnvelopeResult::curvature(double t) const {
  for (const auto& c : components)
    if (c.contains_closed(t)) return 0.0;
  if (!W.has_second_derivative()) return 0.0;
  return W.derivative(t, 2);
}

}  // namespace radsym
