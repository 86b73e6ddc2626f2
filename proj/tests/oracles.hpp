#pragma once

// Reference computations used only by the tests. None of them shares code with the library.

#include <radsym/random.hpp>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <numbers>
#include <random>
#include <vector>

namespace oracle {

// Lower convex hull at every node by gift wrapping: from each vertex, the next vertex is the
// point to its right reached by the smallest chord slope (farthest on ties). O(n^2) worst case.
inline std::vector<double> chord_hull(const std::vector<double>& t, const std::vector<double>& y) {
  const std::size_t n = t.size();
  std::vector<double> out(n);
  std::size_t i = 0;
  out[0] = y[0];
  while (i + 1 < n) {
    std::size_t best = i + 1;
    double best_slope = (y[i + 1] - y[i]) / (t[i + 1] - t[i]);
    for (std::size_t k = i + 2; k < n; ++k) {
      // Compare slopes by cross product so that ties are detected without division.
      const double cross = (t[best] - t[i]) * (y[k] - y[i]) - (y[best] - y[i]) * (t[k] - t[i]);
      if (cross <= 0.0) {
        best = k;
        best_slope = (y[k] - y[i]) / (t[k] - t[i]);
      }
    }
    for (std::size_t k = i + 1; k < best; ++k) out[k] = y[i] + (t[k] - t[i]) * best_slope;
    out[best] = y[best];
    i = best;
  }
  return out;
}

// Golden-section minimum of f on [a, b].
inline double golden_argmin(const std::function<double(double)>& f, double a, double b) {
  const double g = 0.5 * (std::sqrt(5.0) - 1.0);
  double c = b - g * (b - a), d = a + g * (b - a);
  double fc = f(c), fd = f(d);
  while (b - a > 1e-13 * (1.0 + std::abs(a) + std::abs(b))) {
    if (fc <= fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - g * (b - a);
      fc = f(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + g * (b - a);
      fd = f(d);
    }
  }
  return 0.5 * (a + b);
}

// Largest global minimizer of f on [0, T]: dense scan, then golden refinement around every
// scan point whose value is within `band` of the scan minimum.
inline double brute_argmin(const std::function<double(double)>& f, double T, int points = 200001) {
  const double h = T / (points - 1);
  std::vector<double> v(static_cast<std::size_t>(points));
  double lo = std::numeric_limits<double>::infinity();
  for (int i = 0; i < points; ++i) lo = std::min(lo, v[i] = f(h * i));
  double best_t = 0.0, best_v = std::numeric_limits<double>::infinity();
  for (int i = 0; i < points; ++i) {
    if (v[i] > lo + 1e-6 * (1.0 + std::abs(lo))) continue;
    const double t = golden_argmin(f, std::max(0.0, h * (i - 1)), std::min(T, h * (i + 1)));
    const double ft = f(t);
    if (ft < best_v - 1e-12 || (std::abs(ft - best_v) <= 1e-12 && t > best_t)) {
      best_v = std::min(best_v, ft);
      best_t = t;
    }
  }
  return best_t;
}

// Bitangent of two wells given as separate branches: the slope alpha at which the Legendre
// intercepts min_t (f(t) - alpha t) of both branches agree. Returns {a, b, alpha, beta}.
struct Bitangent {
  double a, b, alpha, beta;
};

inline Bitangent bitangent(const std::function<double(double)>& inner, double inner_lo, double inner_hi,
                           const std::function<double(double)>& outer, double outer_lo, double outer_hi,
                           double alpha_lo, double alpha_hi) {
  auto intercept = [](const std::function<double(double)>& f, double lo, double hi, double alpha, double* at) {
    const auto g = [&](double t) { return f(t) - alpha * t; };
    // Scan first so the golden search starts in the right basin.
    const int n = 4000;
    int best = 0;
    double bv = g(lo);
    for (int i = 1; i <= n; ++i) {
      const double v = g(lo + (hi - lo) * i / n);
      if (v < bv) {
        bv = v;
        best = i;
      }
    }
    const double h = (hi - lo) / n;
    const double t = golden_argmin(g, std::max(lo, lo + h * (best - 1)), std::min(hi, lo + h * (best + 1)));
    if (at) *at = t;
    return g(t);
  };
  auto gap = [&](double alpha) {
    return intercept(inner, inner_lo, inner_hi, alpha, nullptr) - intercept(outer, outer_lo, outer_hi, alpha, nullptr);
  };
  double lo = alpha_lo, hi = alpha_hi;
  const double glo = gap(lo);
  for (int it = 0; it < 200 && hi - lo > 1e-14; ++it) {
    const double mid = 0.5 * (lo + hi);
    if ((gap(mid) > 0.0) == (glo > 0.0))
      lo = mid;
    else
      hi = mid;
  }
  Bitangent r{};
  r.alpha = 0.5 * (lo + hi);
  r.beta = intercept(inner, inner_lo, inner_hi, r.alpha, &r.a);
  intercept(outer, outer_lo, outer_hi, r.alpha, &r.b);
  return r;
}

// Random even sampled potential: symmetric nonuniform nodes containing 0, values of a
// coercive quartic plus seeded noise, with the outermost value raised above all others so
// the linear extension increases. 2 half + 1 nodes.
struct Samples {
  std::vector<double> t, v;
};

inline Samples random_even_samples(std::uint64_t seed, int half) {
  std::mt19937_64 rng(seed);
  std::vector<double> pos(static_cast<std::size_t>(half) + 1, 0.0);
  for (int k = 1; k <= half; ++k) pos[k] = pos[k - 1] + radsym::uniform(rng, 0.2, 1.8) / half * 2.0;
  const double a = radsym::uniform(rng, 0.5, 2.0), b = radsym::uniform(rng, 0.0, 4.0);
  const double noise = radsym::uniform(rng, 0.0, 0.5);
  std::vector<double> val(pos.size());
  for (std::size_t k = 0; k < pos.size(); ++k) {
    const double x = pos[k];
    val[k] = a * x * x * x * x - b * x * x + noise * radsym::uniform(rng, -1.0, 1.0);
  }
  // Coercive: the linear extension beyond the last node must increase.
  val[half] = *std::max_element(val.begin(), val.end()) + 1.0;
  Samples s;
  for (int k = half; k >= 1; --k) {
    s.t.push_back(-pos[k]);
    s.v.push_back(val[k]);
  }
  for (int k = 0; k <= half; ++k) {
    s.t.push_back(pos[k]);
    s.v.push_back(val[k]);
  }
  return s;
}

// Closed forms on the unit disc (N = 2, R = 1).
// Cone u = 1 - r with W = (t^2 - 1)^2, G = -mu^2: E = -2 pi int_0^1 r (1 - r)^2 dr.
inline constexpr double kConeEnergy = -std::numbers::pi / 6.0;
// W = t^2, G = -mu: minimizer u = (1 - r^2) / 8 and E = -pi / 32.
inline constexpr double kQuadraticLinearEnergy = -std::numbers::pi / 32.0;
inline double quadratic_linear_minimizer(double r) { return (1.0 - r * r) / 8.0; }

// Area of the disc of radius R inside [x0, x1] x [y0, y1] by midpoint integration of the
// vertical chord length.
inline double disc_rectangle_area_quadrature(double R, double x0, double x1, double y0, double y1,
                                             int points = 200000) {
  const double lo = std::max(x0, -R), hi = std::min(x1, R);
  if (hi <= lo) return 0.0;
  const double h = (hi - lo) / points;
  double s = 0.0;
  for (int i = 0; i < points; ++i) {
    const double x = lo + (i + 0.5) * h;
    const double c = std::sqrt(std::max(0.0, R * R - x * x));
    s += std::max(0.0, std::min(y1, c) - std::max(y0, -c));
  }
  return s * h;
}

}  // namespace oracle
