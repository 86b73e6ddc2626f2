#include <radsym/disc2d.hpp>

#include <radsym/random.hpp>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace radsym {

DiscField::DiscField(int n, double R, std::vector<double> values) : n_(n), R_(R), values_(std::move(values)) {
  if (n < 33 || n % 2 == 0) throw std::invalid_argument("DiscField: n must be odd and >= 33");
  if (!(R > 0.0)) throw std::invalid_argument("DiscField: radius must be positive");
  if (values_.size() != static_cast<std::size_t>(n) * n) throw std::invalid_argument("DiscField: need n*n values");
  for (int j = 0; j < n; ++j)
    for (int i = 0; i < n; ++i)
      if (!inside(i, j)) values_[static_cast<std::size_t>(j) * n + i] = 0.0;
  // Ghosts: u(p) ~ u(q) (R - |p|) / (2h) with q on the same ray at radius R - 2h. The cell
  // around q has all corners inside the disc, so only true values are read.
  extended_ = values_;
  const double band = 2.0 * h();
  for (int j = 0; j < n; ++j) {
    for (int i = 0; i < n; ++i) {
      if (inside(i, j)) continue;
      const double x = coord(i), y = coord(j);
      const double rho = std::hypot(x, y);
      if (rho >= R + band) continue;
      const double scale = (R - band) / rho;
      const double px = (x * scale + R) / h(), py = (y * scale + R) / h();
      const int a = static_cast<int>(px), b = static_cast<int>(py);
      const double fx = px - a, fy = py - b;
      const double uq = (1 - fx) * (1 - fy) * at(a, b) + fx * (1 - fy) * at(a + 1, b) + (1 - fx) * fy * at(a, b + 1) +
                        fx * fy * at(a + 1, b + 1);
      extended_[static_cast<std::size_t>(j) * n + i] = uq * (R - rho) / band;
    }
  }
}

DiscField DiscField::from_function(int n, double R, const std::function<double(double, double)>& f) {
  if (n < 33 || n % 2 == 0) throw std::invalid_argument("DiscField: n must be odd and >= 33");
  const double h = 2.0 * R / (n - 1);
  std::vector<double> v(static_cast<std::size_t>(n) * n);
  for (int j = 0; j < n; ++j)
    for (int i = 0; i < n; ++i) v[static_cast<std::size_t>(j) * n + i] = f(-R + h * i, -R + h * j);
  return DiscField(n, R, std::move(v));
}

bool DiscField::inside(int i, int j) const {
  const double x = coord(i), y = coord(j);
  return x * x + y * y < R_ * R_;
}

double DiscField::sample(double x, double y) const {
  const double px = (x + R_) / h(), py = (y + R_) / h();
  if (px < 0.0 || py < 0.0 || px > n_ - 1 || py > n_ - 1) return 0.0;
  const int i = std::min(static_cast<int>(px), n_ - 2);
  const int j = std::min(static_cast<int>(py), n_ - 2);
  const double fx = px - i, fy = py - j;
  return (1 - fx) * (1 - fy) * extended(i, j) + fx * (1 - fy) * extended(i + 1, j) +
         (1 - fx) * fy * extended(i, j + 1) + fx * fy * extended(i + 1, j + 1);
}

DiscField DiscField::rotated90() const {
  // New value at (x, y) is the old value at (y, -x).
  std::vector<double> v(values_.size());
  for (int j = 0; j < n_; ++j)
    for (int i = 0; i < n_; ++i) v[static_cast<std::size_t>(j) * n_ + i] = at(j, n_ - 1 - i);
  return DiscField(n_, R_, std::move(v));
}

namespace {

// Area of the disc intersected with [0, x] x [0, y] for 0 <= x, y.
double quadrant_area(double R, double x, double y) {
  x = std::min(x, R);
  y = std::min(y, R);
  if (x * x + y * y <= R * R) return x * y;
  const auto primitive = [R](double t) { return 0.5 * (t * std::sqrt(std::max(0.0, R * R - t * t)) + R * R * std::asin(t / R)); };
  const double xa = std::sqrt(R * R - y * y);
  return y * xa + primitive(x) - primitive(xa);
}

double signed_quadrant_area(double R, double x, double y) {
  const double s = (x < 0.0 ? -1.0 : 1.0) * (y < 0.0 ? -1.0 : 1.0);
  return s * quadrant_area(R, std::abs(x), std::abs(y));
}

template <class GradientTerm>
double energy_2d_impl(const DiscField& field, const ProblemSpec& spec, GradientTerm&& w) {
  if (spec.dimension != 2) throw std::invalid_argument("energy_2d: spec.dimension must be 2");
  if (std::abs(field.radius() - spec.radius) > 1e-12 * spec.radius)
    throw std::invalid_argument("energy_2d: field radius does not match the problem radius");
  const int n = field.n();
  const double h = field.h();
  double sum = 0.0;
  for (int j = 0; j + 1 < n; ++j) {
    for (int i = 0; i + 1 < n; ++i) {
      const double x0 = field.coord(i), y0 = field.coord(j);
      const double area = disc_rectangle_area(field.radius(), x0, x0 + h, y0, y0 + h);
      if (area <= 0.0) continue;
      const double a = field.extended(i, j), b = field.extended(i + 1, j), c = field.extended(i, j + 1),
                   d = field.extended(i + 1, j + 1);
      const double gx = ((b - a) + (d - c)) / (2.0 * h);
      const double gy = ((c - a) + (d - b)) / (2.0 * h);
      sum += area * (w(std::hypot(gx, gy)) + spec.G(0.25 * (a + b + c + d)));
    }
  }
  return sum;
}

}  // namespace

double disc_rectangle_area(double R, double x0, double x1, double y0, double y1) {
  if (!(x1 > x0) || !(y1 > y0)) return 0.0;
  const double a = signed_quadrant_area(R, x1, y1) - signed_quadrant_area(R, x0, y1) - signed_quadrant_area(R, x1, y0) +
                   signed_quadrant_area(R, x0, y0);
  return std::max(0.0, a);
}

double energy_2d(const DiscField& field, const ProblemSpec& spec) {
  return energy_2d_impl(field, spec, [&](double t) { return spec.W(t); });
}

double energy_2d(const DiscField& field, const ProblemSpec& spec, const EnvelopeResult& envelope) {
  return energy_2d_impl(field, spec, [&](double t) { return envelope.value(t); });
}

RadialProfile ray_profile(const DiscField& field, double theta) {
  const RadialGrid grid = RadialGrid::uniform(field.radius(), field.n());
  const double c = std::cos(theta), s = std::sin(theta);
  return RadialProfile::from_function(grid, [&](double r) { return field.sample(r * c, r * s); });
}

RayEnergyReport averaged_ray_energy_check(const DiscField& field, const ProblemSpec& spec, const EnvelopeResult& envelope,
                                          int n_thetas, double tol_constant) {
  if (n_thetas < 1) throw std::invalid_argument("averaged_ray_energy_check: need at least one ray");
  RayEnergyReport report;
  double sum = 0.0;
  for (int k = 0; k < n_thetas; ++k) {
    const double theta = 2.0 * std::numbers::pi * k / n_thetas;
    const double e = energy_reduced(ray_profile(field, theta), spec, envelope);
    report.thetas.push_back(theta);
    report.per_theta_energies.push_back(e);
    sum += e;
  }
  report.lhs = sum / n_thetas;
  report.rhs = energy_2d(field, spec, envelope);
  report.tol = tol_constant * field.h() * (1.0 + std::abs(report.rhs));
  report.passes = report.lhs <= report.rhs + report.tol;
  return report;
}

double colinearity_defect(const DiscField& field) {
  const int n = field.n();
  const double h = field.h();
  double tangential = 0.0, total = 0.0;
  for (int j = 0; j + 1 < n; ++j) {
    for (int i = 0; i + 1 < n; ++i) {
      if (!field.inside(i, j) || !field.inside(i + 1, j) || !field.inside(i, j + 1) || !field.inside(i + 1, j + 1))
        continue;
      const double a = field.at(i, j), b = field.at(i + 1, j), c = field.at(i, j + 1), d = field.at(i + 1, j + 1);
      const double gx = ((b - a) + (d - c)) / (2.0 * h);
      const double gy = ((c - a) + (d - b)) / (2.0 * h);
      const double x = field.coord(i) + 0.5 * h, y = field.coord(j) + 0.5 * h;
      const double rho = std::hypot(x, y);
      const double radial = (gx * x + gy * y) / rho;
      const double tx = gx - radial * x / rho, ty = gy - radial * y / rho;
      tangential += tx * tx + ty * ty;
      total += gx * gx + gy * gy;
    }
  }
  return total > 0.0 ? std::sqrt(tangential / total) : 0.0;
}

DiscField angular_average(const DiscField& field, int n_thetas) {
  if (n_thetas < 1) throw std::invalid_argument("angular_average: need at least one ray");
  const int K = 2 * field.n();
  const double R = field.radius();
  std::vector<double> mean(static_cast<std::size_t>(K) + 1, 0.0);
  for (int k = 0; k < n_thetas; ++k) {
    const double theta = 2.0 * std::numbers::pi * k / n_thetas;
    const double c = std::cos(theta), s = std::sin(theta);
    for (int m = 0; m <= K; ++m) mean[m] += field.sample(R * m / K * c, R * m / K * s) / n_thetas;
  }
  return DiscField::from_function(field.n(), R, [&](double x, double y) {
    const double pos = std::min(std::hypot(x, y) / R * K, static_cast<double>(K));
    const int m = std::min(static_cast<int>(pos), K - 1);
    const double f = pos - m;
    return (1.0 - f) * mean[m] + f * mean[m + 1];
  });
}

DiscField random_smooth_field(int n, double R, std::uint64_t seed, int bumps) {
  std::mt19937_64 rng(seed);
  struct Bump {
    double cx, cy, width, amp;
  };
  std::vector<Bump> bs;
  for (int b = 0; b < bumps; ++b) {
    Bump bump;
    bump.cx = uniform(rng, -0.6 * R, 0.6 * R);
    bump.cy = uniform(rng, -0.6 * R, 0.6 * R);
    bump.width = uniform(rng, 0.2 * R, 0.6 * R);
    bump.amp = uniform(rng, -1.5, 1.5);
    bs.push_back(bump);
  }
  return DiscField::from_function(n, R, [&](double x, double y) {
    double v = 0.0;
    for (const auto& b : bs) {
      const double dx = x - b.cx, dy = y - b.cy;
      v += b.amp * std::exp(-(dx * dx + dy * dy) / (b.width * b.width));
    }
    return v * (R * R - x * x - y * y) / (R * R);
  });
}

}  // namespace radsym
