#pragma once

#include <radsym/envelope.hpp>
#include <radsym/radial.hpp>

#include <string>
#include <utility>
#include <vector>

namespace radsym {

/// Slopes closer than this to a component endpoint count as contact, not detachment.
inline constexpr double kSlopeEps = 1e-6;

struct CheckResult {
  std::string name;
  /// The property being checked, stated as a formula.
  std::string property;
  bool passed = true;
  double margin = 0.0;
  std::string details;
  std::vector<std::pair<std::string, double>> metrics;
  /// Reported but not part of the overall verdict.
  bool informational = false;

  double metric(const std::string& key) const;
};

struct VerifyOptions {
  double corner_window = 0.2;  // fraction of R
  double corner_tol = 0.05;
  double consistency_tol = 1e-6;
  /// The slope bound and sign constancy are only predicted when G satisfies the shape
  /// hypothesis; otherwise those checks are informational.
  bool expect_monotone = true;
};

struct VerifyReport {
  std::vector<CheckResult> checks;
  bool overall = true;
  int cells = 0;
  double radius = 0.0;
  double max_dr = 0.0;
  /// max |G'| over the profile's value range.
  double lipschitz_G = 0.0;

  const CheckResult& check(const std::string& name) const;
};

/// Measure of cells whose slope sits strictly inside a detachment component.
/// Passes iff the measure is at most 2 max dr.
CheckResult detachment_avoidance_report(const RadialProfile& profile, const EnvelopeResult& env);

/// Fraction of cells with slope <= -M + 1e-6 (needs >= 0.99) and constant sign of u.
CheckResult slope_and_sign_check(const RadialProfile& profile, double M);

/// Least-squares line through the cell slopes with rbar < window, extrapolated to r = 0.
/// Throws std::invalid_argument if fewer than 8 cells fall in the window.
CheckResult corner_condition_check(const RadialProfile& profile, double M, double window, double tol = 0.05);

struct ElCell {
  int cell = 0;
  double r = 0.0;
  double u = 0.0;
  double alpha = 0.0;
  double residual = 0.0;
  bool consistent = false;
  /// More than half of the neighbours within 5 dr also have slopes in a component.
  bool dense = false;
};

struct ElAffineResult {
  CheckResult check;
  std::vector<ElCell> cells;
};

/// |-(N-1) alpha / r + G'(u(r))|.
double el_affine_residual(double r, double u, double alpha, const Potential1D& G, int dimension);

/// Euler-Lagrange identity on cells whose slope lies in a nonconstant affine component.
/// Every such cell is reported; the verdict uses the dense ones (neighbour fraction > 0.5
/// within 5 dr), where the identity is predicted. Vacuous pass when there are none.
ElAffineResult euler_lagrange_affine_check(const RadialProfile& profile, const EnvelopeResult& env,
                                           const ProblemSpec& spec);

/// Flags cells of S = {slope in an affine component} with neighbour density > 0.5 (radius
/// 5 dr) where G''(u) < -1e-9.
CheckResult concavity_exclusion_check(const RadialProfile& profile, const EnvelopeResult& env, const Potential1D& G);

/// |E(u) - E**(u)| <= tol (1 + |E|).
CheckResult energy_consistency(const RadialProfile& profile, const ProblemSpec& spec, const EnvelopeResult& env,
                               double tol = 1e-6);

VerifyReport verify_all(const RadialProfile& profile, const ProblemSpec& spec, const EnvelopeResult& env,
                        const VerifyOptions& options = {});

}  // namespace radsym
