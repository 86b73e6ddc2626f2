#include <radsym/potentials.hpp>

#include <algorithm>
#include <cmath>

// pchip.hpp calls isnan unqualified.
using std::isnan;
#include <boost/math/interpolators/pchip.hpp>
#include <cstdio>
#include <limits>
#include <numbers>
#include <stdexcept>

namespace radsym {

namespace {

std::string fmt(const char* format, double a, double b = 0.0, double c = 0.0) {
  char buf[256];
  std::snprintf(buf, sizeof buf, format, a, b, c);
  return buf;
}

// Bisection for a sign change of f on [a, b]; returns the midpoint of the final bracket.
template <class F>
double bisect_sign(F&& f, double a, double b, double width = 1e-14) {
  double fa = f(a);
  for (int it = 0; it < 200 && (b - a) > width * std::max(1.0, std::abs(a)); ++it) {
    const double m = 0.5 * (a + b);
    const double fm = f(m);
    if (fm == 0.0) return m;
    if ((fm < 0.0) == (fa < 0.0)) {
      a = m;
      fa = fm;
    } else {
      b = m;
    }
  }
  return 0.5 * (a + b);
}

template <class F>
double golden_min(F&& f, double a, double b, double tol = 1e-12) {
  const double g = (std::sqrt(5.0) - 1.0) / 2.0;
  double c = b - g * (b - a);
  double d = a + g * (b - a);
  double fc = f(c), fd = f(d);
  for (int it = 0; it < 300 && (b - a) > tol; ++it) {
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
  return fc <= fd ? c : d;
}

}  // namespace

// ---------------------------------------------------------------------------
// Polynomial

double Polynomial::operator()(double x) const {
  double acc = 0.0;
  for (auto it = coeffs.rbegin(); it != coeffs.rend(); ++it) acc = acc * x + *it;
  return acc;
}

Polynomial Polynomial::derivative() const {
  Polynomial d;
  for (std::size_t k = 1; k < coeffs.size(); ++k) d.coeffs.push_back(static_cast<double>(k) * coeffs[k]);
  return d;
}

int Polynomial::degree() const {
  for (int k = static_cast<int>(coeffs.size()) - 1; k >= 0; --k)
    if (coeffs[k] != 0.0) return k;
  return -1;
}

double Polynomial::leading() const {
  const int d = degree();
  return d < 0 ? 0.0 : coeffs[d];
}

std::optional<double> largest_real_root(const Polynomial& p) {
  const int d = p.degree();
  if (d < 1) return std::nullopt;
  double bound = 0.0;
  for (int k = 0; k < d; ++k) bound = std::max(bound, std::abs(p.coeffs[k] / p.coeffs[d]));
  bound += 1.0;
  constexpr int kScan = 100000;
  const double h = 2.0 * bound / kScan;
  double right = bound;
  double fr = p(right);
  for (int i = kScan - 1; i >= 0; --i) {
    const double left = -bound + i * h;
    const double fl = p(left);
    if (fl == 0.0) return left;
    if ((fl < 0.0) != (fr < 0.0)) return bisect_sign(p, left, right);
    right = left;
    fr = fl;
  }
  return std::nullopt;
}

// ---------------------------------------------------------------------------
// Potential1D

struct Potential1D::SampledData {
  std::vector<double> t, v;
  boost::math::interpolators::pchip<std::vector<double>> interp;
  double left_slope, right_slope;

  SampledData(std::vector<double> tt, std::vector<double> vv)
      : t(tt), v(vv), interp(std::move(tt), std::move(vv)) {
    left_slope = (v[1] - v[0]) / (t[1] - t[0]);
    const std::size_t n = t.size();
    right_slope = (v[n - 1] - v[n - 2]) / (t[n - 1] - t[n - 2]);
  }
};

const char* to_string(PotentialKind kind) {
  switch (kind) {
    case PotentialKind::poly_in_t_squared: return "poly_in_t_squared";
    case PotentialKind::piecewise_poly: return "piecewise_poly";
    case PotentialKind::sampled: return "sampled";
  }
  return "?";
}

Potential1D Potential1D::even_polynomial(std::vector<double> coeffs, double halfwidth) {
  if (coeffs.empty()) throw std::invalid_argument("even polynomial needs at least one coefficient");
  if (!(halfwidth > 0.0)) throw std::invalid_argument("halfwidth must be positive");
  Potential1D p;
  p.kind_ = PotentialKind::poly_in_t_squared;
  p.coeffs_ = std::move(coeffs);
  p.halfwidth_ = halfwidth;
  p.even_ = true;
  return p;
}

Potential1D Potential1D::polynomial(std::vector<double> coeffs, double halfwidth) {
  if (coeffs.empty()) throw std::invalid_argument("polynomial needs at least one coefficient");
  return piecewise({}, {Polynomial{std::move(coeffs)}}, false, halfwidth);
}

Potential1D Potential1D::piecewise(std::vector<double> breakpoints, std::vector<Polynomial> pieces,
                                   bool even, double halfwidth) {
  if (pieces.size() != breakpoints.size() + 1)
    throw std::invalid_argument("piecewise potential needs one more piece than breakpoints");
  if (!std::is_sorted(breakpoints.begin(), breakpoints.end()) ||
      std::adjacent_find(breakpoints.begin(), breakpoints.end()) != breakpoints.end())
    throw std::invalid_argument("breakpoints must be strictly increasing");
  if (even && !breakpoints.empty() && breakpoints.front() <= 0.0)
    throw std::invalid_argument("breakpoints of an even piecewise potential must be positive");
  for (const auto& piece : pieces)
    if (piece.coeffs.empty()) throw std::invalid_argument("empty polynomial piece");
  if (!(halfwidth > 0.0)) throw std::invalid_argument("halfwidth must be positive");
  Potential1D p;
  p.kind_ = PotentialKind::piecewise_poly;
  p.breaks_ = std::move(breakpoints);
  p.pieces_ = std::move(pieces);
  p.even_ = even;
  p.halfwidth_ = halfwidth;
  return p;
}

Potential1D Potential1D::sampled(std::vector<double> t, std::vector<double> v) {
  if (t.size() != v.size()) throw std::invalid_argument("sample grids differ in length");
  if (t.size() < 4) throw std::invalid_argument("sampled potential needs at least 4 samples");
  for (std::size_t i = 1; i < t.size(); ++i)
    if (!(t[i] > t[i - 1])) throw std::invalid_argument("sample grid must be strictly increasing");
  if (std::find(t.begin(), t.end(), 0.0) == t.end())
    throw std::invalid_argument("sample grid must contain t = 0");
  Potential1D p;
  p.kind_ = PotentialKind::sampled;
  p.halfwidth_ = std::max(std::abs(t.front()), std::abs(t.back()));
  p.even_ = t.front() == -t.back();
  p.sampled_ = std::make_shared<const SampledData>(std::move(t), std::move(v));
  return p;
}

const std::vector<double>& Potential1D::sample_t() const {
  static const std::vector<double> empty;
  return sampled_ ? sampled_->t : empty;
}

const std::vector<double>& Potential1D::sample_v() const {
  static const std::vector<double> empty;
  return sampled_ ? sampled_->v : empty;
}

const Polynomial& Potential1D::piece_for(double x) const {
  const auto idx = std::upper_bound(breaks_.begin(), breaks_.end(), x) - breaks_.begin();
  return pieces_[static_cast<std::size_t>(idx)];
}

double Potential1D::eval(double t) const {
  switch (kind_) {
    case PotentialKind::poly_in_t_squared: {
      const double s = t * t;
      double acc = 0.0;
      for (auto it = coeffs_.rbegin(); it != coeffs_.rend(); ++it) acc = acc * s + *it;
      return acc;
    }
    case PotentialKind::piecewise_poly: {
      const double x = even_ ? std::abs(t) : t;
      return piece_for(x)(x);
    }
    case PotentialKind::sampled: {
      const auto& d = *sampled_;
      if (t <= d.t.front()) return d.v.front() + d.left_slope * (t - d.t.front());
      if (t >= d.t.back()) return d.v.back() + d.right_slope * (t - d.t.back());
      return d.interp(t);
    }
  }
  return 0.0;
}

double Potential1D::derivative(double t, int order) const {
  if (order != 1 && order != 2) throw std::invalid_argument("derivative order must be 1 or 2");
  switch (kind_) {
    case PotentialKind::poly_in_t_squared: {
      // d/dt sum c_k s^k with s = t^2, Horner in s
      const double s = t * t;
      double d1 = 0.0, d2 = 0.0;
      for (std::size_t k = coeffs_.size(); k-- > 1;) {
        const double kk = static_cast<double>(k);
        d1 = d1 * s + 2.0 * kk * coeffs_[k];
        d2 = d2 * s + 2.0 * kk * (2.0 * kk - 1.0) * coeffs_[k];
      }
      return order == 1 ? d1 * t : d2;
    }
    case PotentialKind::piecewise_poly: {
      const double x = even_ ? std::abs(t) : t;
      const Polynomial& piece = piece_for(x);
      const Polynomial d1 = piece.derivative();
      if (order == 1) {
        const double sign = even_ ? (t > 0.0 ? 1.0 : (t < 0.0 ? -1.0 : 0.0)) : 1.0;
        return sign * d1(x);
      }
      return d1.derivative()(x);
    }
    case PotentialKind::sampled: {
      if (order == 2) throw std::invalid_argument("second derivative unavailable for sampled potentials");
      const double h = 1e-6 * std::max(1.0, std::abs(t));
      return (eval(t + h) - eval(t - h)) / (2.0 * h);
    }
  }
  return 0.0;
}

bool Potential1D::is_coercive() const {
  switch (kind_) {
    case PotentialKind::poly_in_t_squared: {
      const Polynomial p{coeffs_};
      return p.degree() >= 1 && p.leading() > 0.0;
    }
    case PotentialKind::piecewise_poly: {
      const Polynomial& last = pieces_.back();
      if (!(last.degree() >= 1 && last.leading() > 0.0)) return false;
      if (even_) return true;
      const Polynomial& first = pieces_.front();
      const int d = first.degree();
      return d >= 1 && ((d % 2 == 0) ? first.leading() > 0.0 : first.leading() < 0.0);
    }
    case PotentialKind::sampled:
      return sampled_->right_slope > 0.0 && sampled_->left_slope < 0.0;
  }
  return false;
}

namespace {

// Growth exponent on one side: +1 means unbounded above, -1 unbounded below, 0 bounded.
struct SideGrowth {
  double exponent = 0.0;
  int direction = 0;
};

SideGrowth polynomial_side(const Polynomial& p, bool at_plus_infinity) {
  const int d = p.degree();
  if (d < 1) return {};
  int sign = p.leading() > 0.0 ? 1 : -1;
  if (!at_plus_infinity && d % 2 == 1) sign = -sign;
  return {static_cast<double>(d), sign};
}

}  // namespace

double Potential1D::upper_growth_exponent() const {
  SideGrowth plus, minus;
  switch (kind_) {
    case PotentialKind::poly_in_t_squared: {
      Polynomial p;
      for (std::size_t k = 0; k < coeffs_.size(); ++k) {
        p.coeffs.resize(2 * k + 1, 0.0);
        p.coeffs[2 * k] = coeffs_[k];
      }
      plus = minus = polynomial_side(p, true);
      break;
    }
    case PotentialKind::piecewise_poly:
      plus = polynomial_side(pieces_.back(), true);
      minus = even_ ? plus : polynomial_side(pieces_.front(), false);
      break;
    case PotentialKind::sampled:
      plus = {1.0, sampled_->right_slope > 0 ? 1 : (sampled_->right_slope < 0 ? -1 : 0)};
      minus = {1.0, sampled_->left_slope < 0 ? 1 : (sampled_->left_slope > 0 ? -1 : 0)};
      break;
  }
  double e = 0.0;
  if (plus.direction > 0) e = std::max(e, plus.exponent);
  if (minus.direction > 0) e = std::max(e, minus.exponent);
  return e;
}

double Potential1D::lower_growth_exponent() const {
  // Mirror: lower growth of G is upper growth of -G.
  Potential1D neg = *this;
  switch (kind_) {
    case PotentialKind::poly_in_t_squared:
      for (auto& c : neg.coeffs_) c = -c;
      break;
    case PotentialKind::piecewise_poly:
      for (auto& piece : neg.pieces_)
        for (auto& c : piece.coeffs) c = -c;
      break;
    case PotentialKind::sampled: {
      std::vector<double> v = sampled_->v;
      for (auto& x : v) x = -x;
      neg = sampled(sampled_->t, std::move(v));
      break;
    }
  }
  return neg.upper_growth_exponent();
}

double Potential1D::convexity_radius() const {
  switch (kind_) {
    case PotentialKind::poly_in_t_squared: {
      Polynomial p;
      for (std::size_t k = 0; k < coeffs_.size(); ++k) {
        p.coeffs.resize(2 * k + 1, 0.0);
        p.coeffs[2 * k] = coeffs_[k];
      }
      const auto root = largest_real_root(p.derivative().derivative());
      return root ? std::max(0.0, *root) : 0.0;
    }
    case PotentialKind::piecewise_poly: {
      double r = breaks_.empty() ? 0.0 : std::max(std::abs(breaks_.front()), std::abs(breaks_.back()));
      const auto root = largest_real_root(pieces_.back().derivative().derivative());
      if (root) r = std::max(r, *root);
      if (!even_) {
        const Polynomial& first = pieces_.front();
        Polynomial mirrored = first;
        for (std::size_t k = 1; k < mirrored.coeffs.size(); k += 2) mirrored.coeffs[k] = -mirrored.coeffs[k];
        const auto left = largest_real_root(mirrored.derivative().derivative());
        if (left) r = std::max(r, *left);
      }
      return r;
    }
    case PotentialKind::sampled:
      return halfwidth_;
  }
  return 0.0;
}

double Potential1D::evenness_defect(int points) const {
  double worst = 0.0;
  for (int i = 0; i < points; ++i) {
    const double t = -halfwidth_ + 2.0 * halfwidth_ * i / (points - 1);
    worst = std::max(worst, std::abs(eval(t) - eval(-t)));
  }
  return worst;
}

bool Potential1D::operator==(const Potential1D& other) const {
  if (kind_ != other.kind_ || halfwidth_ != other.halfwidth_ || even_ != other.even_) return false;
  if (coeffs_ != other.coeffs_ || breaks_ != other.breaks_) return false;
  if (pieces_.size() != other.pieces_.size()) return false;
  for (std::size_t i = 0; i < pieces_.size(); ++i)
    if (pieces_[i].coeffs != other.pieces_[i].coeffs) return false;
  return sample_t() == other.sample_t() && sample_v() == other.sample_v();
}

// ---------------------------------------------------------------------------
// compute_M

double compute_M(const Potential1D& W, int scan_points) {
  return compute_M(W, W.halfwidth(), scan_points);
}

double compute_M(const Potential1D& W, double window, int scan_points) {
  if (!W.is_coercive()) throw std::invalid_argument("compute_M: potential is not coercive");
  if (scan_points < 16) throw std::invalid_argument("compute_M: need at least 16 scan points");

  double T = window;
  std::vector<double> t(static_cast<std::size_t>(scan_points));
  std::vector<double> y(t.size());
  const int n = scan_points;
  // Grow the window until the grid minimum is interior.
  for (int attempt = 0;; ++attempt) {
    for (int i = 0; i < n; ++i) {
      t[i] = T * i / (n - 1);
      y[i] = W(t[i]);
    }
    const auto it = std::min_element(y.begin(), y.end());
    if (it != y.end() - 1 || attempt > 30) break;
    T *= 2.0;
  }

  double scale = 1.0;
  for (double v : y) scale = std::max(scale, std::abs(v));
  const double plateau_tol = 1e-14 * scale;

  struct Candidate {
    double t, value;
  };
  std::vector<Candidate> candidates;
  int i = 0;
  while (i < n) {
    int j = i;
    while (j + 1 < n && std::abs(y[j + 1] - y[i]) <= plateau_tol) ++j;
    const bool left_ok = i == 0 || y[i - 1] > y[i];
    const bool right_ok = j == n - 1 || y[j + 1] > y[j];
    if (left_ok && right_ok) {
      if (j > i) {
        // Plateau: refine its right edge.
        const double level = y[i];
        double edge = t[j];
        if (j + 1 < n)
          edge = bisect_sign([&](double s) { return W(s) - level - plateau_tol; }, t[j], t[j + 1]);
        candidates.push_back({edge, level});
      } else if (i == 0) {
        candidates.push_back({0.0, y[0]});
      } else {
        const double a = t[i - 1];
        const double b = t[std::min(i + 1, n - 1)];
        double tm;
        if (W.is_polynomial_kind() && W.derivative(a, 1) < 0.0 && W.derivative(b, 1) > 0.0) {
          tm = bisect_sign([&](double s) { return W.derivative(s, 1); }, a, b, 1e-15);
        } else {
          tm = golden_min([&](double s) { return W(s); }, a, b, 1e-13);
        }
        double value = W(tm);
        if (y[i] < value) {
          tm = t[i];
          value = y[i];
        }
        candidates.push_back({tm, value});
      }
    }
    i = j + 1;
  }

  double best = std::numeric_limits<double>::infinity();
  for (const auto& c : candidates) best = std::min(best, c.value);
  const double tie = 1e-12 * std::max(1.0, std::abs(best));
  double M = 0.0;
  for (const auto& c : candidates)
    if (c.value <= best + tie) M = std::max(M, c.t);
  return M;
}

// ---------------------------------------------------------------------------
// Shape of G

const char* to_string(ShapeFlag flag) {
  switch (flag) {
    case ShapeFlag::none: return "none";
    case ShapeFlag::G2: return "G2";
    case ShapeFlag::G2_strict: return "G2strict";
  }
  return "?";
}

ShapeReport check_G_shape(const Potential1D& G, bool strict, int points) {
  ShapeReport report;
  const double T = G.halfwidth();
  std::vector<double> mu(static_cast<std::size_t>(points)), g(mu.size());
  double scale = 1.0;
  for (int i = 0; i < points; ++i) {
    mu[i] = T * i / (points - 1);
    g[i] = G(mu[i]);
    scale = std::max(scale, std::abs(g[i]));
  }
  const double slack = strict ? 0.0 : 1e-14 * scale;
  for (int i = 0; i + 1 < points; ++i) {
    const bool ok = strict ? g[i + 1] < g[i] : g[i + 1] <= g[i] + slack;
    if (!ok) {
      report.passes = false;
      report.witness = ShapeWitness{i, i + 1, mu[i], mu[i + 1],
                                    strict ? "not strictly decreasing on [0,T]" : "increasing on [0,T]"};
      return report;
    }
  }
  for (int i = 1; i < points; ++i) {
    if (g[i] > G(-mu[i]) + 1e-14 * scale) {
      report.passes = false;
      report.witness = ShapeWitness{i, i, mu[i], -mu[i], "G(mu) > G(-mu)"};
      return report;
    }
  }
  return report;
}

// ---------------------------------------------------------------------------
// Problem specification

bool DeclaredGrowth::empty() const {
  return !nu1 && !nu2 && !nu3 && !nu4 && !rho && !C && !g_exponent && !p_tilde;
}

std::optional<double> ProblemSpec::critical_exponent() const {
  if (p >= dimension) return std::nullopt;
  return p * dimension / (dimension - p);
}

bool ProblemSpec::operator==(const ProblemSpec& o) const {
  return dimension == o.dimension && radius == o.radius && p == o.p && W == o.W && G == o.G &&
         growth == o.growth && shape == o.shape;
}

ProblemSpec prototype_spec() {
  ProblemSpec spec;
  spec.dimension = 2;
  spec.radius = 1.0;
  spec.p = 4.0;
  spec.W = Potential1D::even_polynomial({1.0, -2.0, 1.0});
  spec.G = Potential1D::polynomial({0.0, 0.0, -1.0});
  spec.growth.rho = 2.0;
  spec.shape = ShapeFlag::G2_strict;
  return spec;
}

void ValidationReport::add(std::string name, bool passed, std::string detail) {
  checks.push_back({std::move(name), passed, std::move(detail)});
  passes = passes && passed;
}

ValidationReport validate_spec(const ProblemSpec& spec) {
  ValidationReport r;
  const double p = spec.p;
  const int N = spec.dimension;
  r.add("dimension", N >= 2, fmt("N = %g (need N >= 2)", N));
  r.add("radius", spec.radius > 0.0, fmt("R = %g", spec.radius));
  r.add("p", p > 1.0, fmt("p = %g (need p > 1)", p));

  double wscale = 1.0;
  for (int i = 0; i < 1000; ++i)
    wscale = std::max(wscale, std::abs(spec.W(spec.W.halfwidth() * i / 999.0)));
  const double defect = spec.W.evenness_defect(1000);
  r.add("W_even", spec.W.declared_even() && defect <= 1e-12 * wscale,
        fmt("max |W(t) - W(-t)| = %.3g on 1000 points", defect));
  r.add("W_coercive", spec.W.is_coercive(), "leading term of W positive");

  const auto& g = spec.growth;
  const double lower = spec.G.lower_growth_exponent();
  const double upper = g.g_exponent.value_or(spec.G.upper_growth_exponent());
  const auto pstar = spec.critical_exponent();

  if (g.rho) {
    const double rho = *g.rho;
    r.add("rho_range", rho > 0.0 && rho <= p, fmt("rho = %g, need 0 < rho <= p = %g", rho, p));
    r.add("G_lower_growth", lower <= p - rho,
          fmt("G lower growth exponent %g <= p - rho = %g", lower, p - rho));
    if (pstar)
      r.add("G_upper_growth", upper <= *pstar - rho,
            fmt("G upper growth exponent %g <= p* - rho = %g", upper, *pstar - rho));
  } else {
    double room = p - lower;
    if (pstar) room = std::min(room, *pstar - upper);
    r.add("G_growth", room > 0.0,
          fmt("some rho in (0, p] admits the growth of G (room %g)", room));
  }
  if (p == N) {
    const bool finite = g.p_tilde.has_value() ? std::isfinite(*g.p_tilde) : spec.G.is_polynomial_kind();
    r.add("p_tilde", finite,
          g.p_tilde ? fmt("declared p~ = %g", *g.p_tilde)
                    : std::string(finite ? "p~ taken from the polynomial degree of G"
                                         : "p == N requires a declared finite p~"));
  }

  // Spot checks of declared constants.
  const double C = g.C.value_or(0.0);
  const double TW = spec.W.halfwidth();
  const double TG = spec.G.halfwidth();
  auto spot = [&](const char* name, auto&& ok, double T, bool symmetric) {
    for (int i = 0; i < 1000; ++i) {
      const double x = symmetric ? -T + 2.0 * T * i / 999.0 : T * i / 999.0;
      if (!ok(x)) {
        r.add(name, false, fmt("violated at %g", x));
        return;
      }
    }
    r.add(name, true, "1000-point spot check");
  };
  const double slack = 1e-12;
  if (g.nu1)
    spot("W1_coercivity", [&](double t) { return spec.W(t) >= *g.nu1 * std::pow(std::abs(t), p) - C - slack; }, TW,
         false);
  if (g.nu2)
    spot("W2_growth", [&](double t) { return std::abs(spec.W(t)) <= *g.nu2 * std::pow(std::abs(t), p) + C + slack; },
         TW, false);
  if (g.nu3 && g.rho)
    spot("G1_lower", [&](double m) { return spec.G(m) >= -*g.nu3 * std::pow(std::abs(m), p - *g.rho) - C - slack; },
         TG, true);
  if (g.nu4 && g.rho && pstar)
    spot("G1_upper", [&](double m) { return spec.G(m) <= *g.nu4 * std::pow(std::abs(m), *pstar - *g.rho) + C + slack; },
         TG, true);

  if (spec.shape != ShapeFlag::none) {
    const auto shape = check_G_shape(spec.G, spec.shape == ShapeFlag::G2_strict);
    std::string detail = "G decreasing on [0,T] and G(mu) <= G(-mu)";
    if (shape.witness)
      detail = shape.witness->reason + fmt(" between mu = %g and %g", shape.witness->mu_i, shape.witness->mu_j);
    r.add(std::string("G_shape_") + to_string(spec.shape), shape.passes, detail);
  }
  return r;
}

double sphere_area(int dimension) {
  if (dimension < 1) throw std::invalid_argument("sphere_area: dimension must be positive");
  if (dimension == 2) return 2.0 * std::numbers::pi;
  if (dimension == 3) return 4.0 * std::numbers::pi;
  const double half = 0.5 * dimension;
  return 2.0 * std::pow(std::numbers::pi, half) / std::tgamma(half);
}

}  // namespace radsym
