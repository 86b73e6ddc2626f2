#pragma once

#include <memory>
#include <optional>
#include <string>
#include <vector>

namespace radsym {

/// Monomial-basis polynomial, c[0] + c[1] x + ... + c[d] x^d.
struct Polynomial {
  std::vector<double> coeffs;

  double operator()(double x) const;
  Polynomial derivative() const;
  /// Index of the highest nonzero coefficient, -1 for the zero polynomial.
  int degree() const;
  double leading() const;
};

/// Largest real root of `p`, or nullopt if it has none. Scans below the Cauchy bound.
std::optional<double> largest_real_root(const Polynomial& p);

enum class PotentialKind { poly_in_t_squared, piecewise_poly, sampled };

const char* to_string(PotentialKind kind);

/// A scalar potential on the real line: either the gradient term W~ (even) or the
/// lower-order term G. Immutable after construction; copies share sampled data.
class Potential1D {
 public:
  /// W(t) = sum_k c_k t^(2k). Even by construction.
  static Potential1D even_polynomial(std::vector<double> coeffs, double halfwidth = 2.0);
  /// Plain polynomial in t (a piecewise polynomial with a single piece).
  static Potential1D polynomial(std::vector<double> coeffs, double halfwidth = 4.0);
  /// `pieces.size() == breakpoints.size() + 1`. With `even`, the pieces describe
  /// [0, inf) and the potential is evaluated at |t|; breakpoints must then be > 0.
  static Potential1D piecewise(std::vector<double> breakpoints, std::vector<Polynomial> pieces,
                               bool even, double halfwidth = 2.0);
  /// Monotone cubic interpolation of (t, v); t strictly increasing and containing 0.
  /// Outside the sample range the end segments extend linearly.
  static Potential1D sampled(std::vector<double> t, std::vector<double> v);

  PotentialKind kind() const { return kind_; }
  double halfwidth() const { return halfwidth_; }
  bool declared_even() const { return even_; }
  bool is_polynomial_kind() const { return kind_ != PotentialKind::sampled; }

  double operator()(double t) const { return eval(t); }
  double eval(double t) const;
  /// Exact for polynomial kinds; centered difference for the sampled kind (order 1 only).
  double derivative(double t, int order) const;
  bool has_second_derivative() const { return is_polynomial_kind(); }

  /// Leading behaviour at +infinity is strictly increasing (positive leading term).
  bool is_coercive() const;
  /// Degree of growth at +-infinity where the potential is unbounded above / below.
  /// Zero if bounded on that side. The sampled kind reports 1 (linear extension).
  double upper_growth_exponent() const;
  double lower_growth_exponent() const;

  /// Largest |t| beyond which the potential is convex (0 if convex everywhere).
  /// Exact for polynomial kinds; for the sampled kind the last sample.
  double convexity_radius() const;

  /// max |eval(t) - eval(-t)| over `points` points of [-T, T].
  double evenness_defect(int points = 1000) const;

  const std::vector<double>& coefficients() const { return coeffs_; }
  const std::vector<double>& breakpoints() const { return breaks_; }
  const std::vector<Polynomial>& pieces() const { return pieces_; }
  const std::vector<double>& sample_t() const;
  const std::vector<double>& sample_v() const;

  bool operator==(const Potential1D& other) const;

  /// The zero potential.
  Potential1D() = default;

 private:
  struct SampledData;

  const Polynomial& piece_for(double x) const;

  PotentialKind kind_ = PotentialKind::poly_in_t_squared;
  double halfwidth_ = 2.0;
  bool even_ = true;
  std::vector<double> coeffs_;
  std::vector<double> breaks_;
  std::vector<Polynomial> pieces_;
  std::shared_ptr<const SampledData> sampled_;
};

/// Largest modulus at which W~ attains its global minimum.
/// Scans `scan_points` nodes of [0, T] and refines the outermost minimizer to 1e-10.
double compute_M(const Potential1D& W, int scan_points = 10000);
double compute_M(const Potential1D& W, double window, int scan_points);

struct ShapeWitness {
  int i = -1;
  int j = -1;
  double mu_i = 0.0;
  double mu_j = 0.0;
  std::string reason;
};

struct ShapeReport {
  bool passes = true;
  std::optional<ShapeWitness> witness;
};

/// Sampled check that G is (strictly) decreasing on [0, T] and G(mu) <= G(-mu) for mu > 0.
ShapeReport check_G_shape(const Potential1D& G, bool strict, int points = 10000);

enum class ShapeFlag { none, G2, G2_strict };

const char* to_string(ShapeFlag flag);

struct DeclaredGrowth {
  std::optional<double> nu1, nu2, nu3, nu4, rho, C;
  /// Declared upper growth exponent of G and the exponent p~ used when p == N.
  std::optional<double> g_exponent, p_tilde;

  bool operator==(const DeclaredGrowth&) const = default;
  bool empty() const;
};

struct ProblemSpec {
  int dimension = 2;
  double radius = 1.0;
  double p = 2.0;
  Potential1D W = Potential1D::even_polynomial({0.0, 1.0});
  Potential1D G = Potential1D::polynomial({0.0});
  DeclaredGrowth growth;
  ShapeFlag shape = ShapeFlag::none;

  /// Critical Sobolev exponent pN/(N-p); nullopt when p >= N.
  std::optional<double> critical_exponent() const;
  bool operator==(const ProblemSpec& other) const;
};

/// (|xi|^2 - 1)^2 and -mu^2 on the unit disc with p = 4.
ProblemSpec prototype_spec();

struct CheckRecord {
  std::string name;
  bool passed = true;
  std::string detail;
};

struct ValidationReport {
  bool passes = true;
  std::vector<CheckRecord> checks;
  void add(std::string name, bool passed, std::string detail = {});
};

ValidationReport validate_spec(const ProblemSpec& spec);

/// Surface area of the unit sphere S^{N-1}.
double sphere_area(int dimension);

}  // namespace radsym
