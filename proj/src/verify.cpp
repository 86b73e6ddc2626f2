#include <radsym/verify.hpp>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <stdexcept>

namespace radsym {

namespace {

std::string fmt(const char* format, double a, double b = 0.0, double c = 0.0) {
  char buf[256];
  std::snprintf(buf, sizeof buf, format, a, b, c);
  return buf;
}

bool strictly_inside(const DetachmentComponent& c, double s) { return s > c.a + kSlopeEps && s < c.b - kSlopeEps; }

const DetachmentComponent* detached_component(const EnvelopeResult& env, double s) {
  for (const auto& c : env.components)
    if (strictly_inside(c, s)) return &c;
  return nullptr;
}

// Membership in S = {slope strictly inside a detachment component} and, per cell, whether
// more than half of the neighbours within 5 dr are also in S.
struct DensityFlags {
  std::vector<char> in_s;
  std::vector<char> dense;
  int members = 0;
};

DensityFlags density_flags(const RadialProfile& profile, const EnvelopeResult& env) {
  const int K = profile.cells();
  DensityFlags f;
  f.in_s.assign(static_cast<std::size_t>(K), 0);
  f.dense.assign(static_cast<std::size_t>(K), 0);
  for (int c = 0; c < K; ++c) {
    f.in_s[c] = detached_component(env, profile.slope(c)) != nullptr;
    f.members += f.in_s[c];
  }
  for (int c = 0; c < K; ++c) {
    if (!f.in_s[c]) continue;
    const double rc = profile.grid.mid(c);
    const double radius = 5.0 * profile.grid.width(c);
    int neighbours = 0, hits = 0;
    for (int j = c - 1; j >= 0 && rc - profile.grid.mid(j) <= radius; --j) {
      ++neighbours;
      hits += f.in_s[j];
    }
    for (int j = c + 1; j < K && profile.grid.mid(j) - rc <= radius; ++j) {
      ++neighbours;
      hits += f.in_s[j];
    }
    f.dense[c] = neighbours > 0 && static_cast<double>(hits) / neighbours > 0.5;
  }
  return f;
}

}  // namespace

double CheckResult::metric(const std::string& key) const {
  for (const auto& [k, v] : metrics)
    if (k == key) return v;
  throw std::out_of_range("no metric " + key + " in check " + name);
}

const CheckResult& VerifyReport::check(const std::string& name) const {
  for (const auto& c : checks)
    if (c.name == name) return c;
  throw std::out_of_range("no check named " + name);
}

CheckResult detachment_avoidance_report(const RadialProfile& profile, const EnvelopeResult& env) {
  CheckResult r{"detachment_avoidance", "W~(|u'|) = W~**(|u'|) a.e.", true, 0.0, {}, {}};
  double measure = 0.0;
  int cells = 0;
  for (int c = 0; c < profile.cells(); ++c) {
    if (detached_component(env, profile.slope(c))) {
      measure += profile.grid.width(c);
      ++cells;
    }
  }
  const double threshold = 2.0 * profile.grid.max_width();
  r.passed = measure <= threshold;
  r.margin = measure;
  r.details = fmt("detached measure %.6g over %g cells (threshold 2 max dr = %.6g)", measure, cells, threshold);
  r.metrics = {{"measure", measure}, {"cells", static_cast<double>(cells)}, {"threshold", threshold}};
  return r;
}

CheckResult slope_and_sign_check(const RadialProfile& profile, double M) {
  CheckResult r{"slope_and_sign", "u' <= -M a.e. and u does not change sign", true, 0.0, {}, {}};
  int good = 0;
  for (int c = 0; c < profile.cells(); ++c)
    if (profile.slope(c) <= -M + 1e-6) ++good;
  const double fraction = static_cast<double>(good) / profile.cells();
  const auto [lo, hi] = std::minmax_element(profile.u.begin(), profile.u.end());
  const bool nonnegative = *lo >= -1e-9;
  const bool nonpositive = *hi <= 1e-9;
  const bool sign_ok = nonnegative || nonpositive;
  r.passed = fraction >= 0.99 && sign_ok;
  r.margin = fraction;
  r.details = fmt("slope fraction %.6g (need >= 0.99); min u %.3g, max u %.3g", fraction, *lo, *hi);
  r.metrics = {{"fraction", fraction},
               {"sign_constant", sign_ok ? 1.0 : 0.0},
               {"nonnegative", nonnegative ? 1.0 : 0.0},
               {"min_u", *lo},
               {"max_u", *hi}};
  return r;
}

CheckResult corner_condition_check(const RadialProfile& profile, double M, double window, double tol) {
  double sr = 0.0, ss = 0.0, srr = 0.0, srs = 0.0;
  int count = 0;
  for (int c = 0; c < profile.cells(); ++c) {
    const double r = profile.grid.mid(c);
    if (r >= window) continue;
    const double s = profile.slope(c);
    sr += r;
    ss += s;
    srr += r * r;
    srs += r * s;
    ++count;
  }
  if (count < 8) throw std::invalid_argument("corner_condition_check: fewer than 8 cells inside the window");
  const double n = count;
  const double denom = n * srr - sr * sr;
  const double b = denom != 0.0 ? (n * srs - sr * ss) / denom : 0.0;
  const double a = (ss - b * sr) / n;
  CheckResult r{"corner_condition", "lim_{r->0} u'(r) = -M", true, 0.0, {}, {}};
  const double deviation = std::abs(a + M);
  r.passed = deviation <= tol;
  r.margin = deviation;
  r.details = fmt("fit(0) = %.6g, |fit(0) + M| = %.3g (tol %.3g)", a, deviation, tol);
  r.metrics = {{"fit0", a}, {"fit_slope", b}, {"deviation", deviation}, {"window", window}, {"tol", tol},
               {"cells", n}};
  return r;
}

double el_affine_residual(double r, double u, double alpha, const Potential1D& G, int dimension) {
  return std::abs(-(dimension - 1) * alpha / r + G.derivative(u, 1));
}

ElAffineResult euler_lagrange_affine_check(const RadialProfile& profile, const EnvelopeResult& env,
                                           const ProblemSpec& spec) {
  ElAffineResult out;
  CheckResult& r = out.check;
  r.name = "euler_lagrange_affine";
  r.property = "-(N-1) alpha / r + G'(u(r)) = 0 at density points of {u' in H}";
  const DensityFlags flags = density_flags(profile, env);
  double worst = 0.0, worst_dense = 0.0;
  int dense = 0;
  bool all = true;
  for (int c = 0; c < profile.cells(); ++c) {
    const DetachmentComponent* comp = detached_component(env, profile.slope(c));
    if (!comp || comp->is_constant) continue;
    ElCell cell;
    cell.cell = c;
    cell.r = profile.grid.mid(c);
    cell.u = profile.mid_value(c);
    cell.alpha = comp->alpha;
    cell.dense = flags.dense[c];
    cell.residual = el_affine_residual(cell.r, cell.u, cell.alpha, spec.G, spec.dimension);
    const double scale =
        1.0 + std::abs((spec.dimension - 1) * cell.alpha / cell.r) + std::abs(spec.G.derivative(cell.u, 1));
    cell.consistent = cell.residual <= 1e-6 * scale;
    worst = std::max(worst, cell.residual);
    if (cell.dense) {
      ++dense;
      worst_dense = std::max(worst_dense, cell.residual);
      all = all && cell.consistent;
    }
    out.cells.push_back(cell);
  }
  r.passed = all;
  r.margin = worst_dense;
  if (out.cells.empty())
    r.details = "vacuous: no cell slope in a nonconstant affine component";
  else if (dense == 0)
    r.details = fmt("vacuous: %g isolated cells in affine components (none dense), max residual %.6g",
                    out.cells.size(), worst);
  else
    r.details = fmt("%g cells in affine components, %g dense, max dense residual %.6g", out.cells.size(), dense,
                    worst_dense);
  r.metrics = {{"cells", static_cast<double>(out.cells.size())},
               {"dense", static_cast<double>(dense)},
               {"max_residual", worst},
               {"max_dense_residual", worst_dense}};
  return out;
}

CheckResult concavity_exclusion_check(const RadialProfile& profile, const EnvelopeResult& env, const Potential1D& G) {
  if (!G.has_second_derivative()) throw std::invalid_argument("concavity_exclusion_check: G must be polynomial");
  CheckResult r{"concavity_exclusion", "no density point of {u' in H} where G is strictly concave", true, 0.0, {}, {}};
  const DensityFlags flags = density_flags(profile, env);
  const int members = flags.members;
  int violations = 0;
  int dense = 0;
  double first_violation = -1.0;
  for (int c = 0; c < profile.cells(); ++c) {
    if (!flags.dense[c]) continue;
    ++dense;
    if (G.derivative(profile.mid_value(c), 2) < -1e-9) {
      if (violations == 0) first_violation = profile.grid.mid(c);
      ++violations;
    }
  }
  r.passed = violations == 0;
  r.margin = violations;
  r.details = members == 0 ? std::string("vacuous: S is empty")
                           : fmt("|S| = %g cells, %g dense, %g in strictly concave region", members, dense, violations);
  r.metrics = {{"members", static_cast<double>(members)},
               {"dense", static_cast<double>(dense)},
               {"violations", static_cast<double>(violations)},
               {"first_violation_r", first_violation}};
  return r;
}

CheckResult energy_consistency(const RadialProfile& profile, const ProblemSpec& spec, const EnvelopeResult& env,
                               double tol) {
  const double original = energy_reduced(profile, spec);
  const double relaxed = energy_reduced(profile, spec, env);
  const double gap = std::abs(original - relaxed);
  const double relative = gap / (1.0 + std::abs(original));
  double measure = 0.0;
  for (int c = 0; c < profile.cells(); ++c)
    if (detached_component(env, profile.slope(c))) measure += profile.grid.width(c);
  CheckResult r{"energy_consistency", "E(u) = E**(u)", true, 0.0, {}, {}};
  r.passed = relative <= tol;
  r.margin = relative;
  r.details = fmt("E = %.12g, E** = %.12g, relative gap %.3g", original, relaxed, relative);
  r.metrics = {{"original", original}, {"relaxed", relaxed}, {"gap", gap}, {"relative_gap", relative},
               {"tol", tol}, {"detached_measure", measure}};
  return r;
}

VerifyReport verify_all(const RadialProfile& profile, const ProblemSpec& spec, const EnvelopeResult& env,
                        const VerifyOptions& options) {
  VerifyReport report;
  report.cells = profile.cells();
  report.radius = profile.grid.radius();
  report.max_dr = profile.grid.max_width();
  const auto [lo, hi] = std::minmax_element(profile.u.begin(), profile.u.end());
  for (int k = 0; k <= 200; ++k) {
    const double x = *lo + (*hi - *lo) * k / 200.0;
    report.lipschitz_G = std::max(report.lipschitz_G, std::abs(spec.G.derivative(x, 1)));
  }

  report.checks.push_back(detachment_avoidance_report(profile, env));
  report.checks.push_back(slope_and_sign_check(profile, env.M));
  try {
    report.checks.push_back(
        corner_condition_check(profile, env.M, options.corner_window * profile.grid.radius(), options.corner_tol));
  } catch (const std::invalid_argument& e) {
    report.checks.push_back({"corner_condition", "lim_{r->0} u'(r) = -M", false, 0.0, e.what(), {}});
  }
  report.checks.push_back(euler_lagrange_affine_check(profile, env, spec).check);
  if (spec.G.has_second_derivative())
    report.checks.push_back(concavity_exclusion_check(profile, env, spec.G));
  report.checks.push_back(energy_consistency(profile, spec, env, options.consistency_tol));
  if (!options.expect_monotone)
    for (auto& c : report.checks)
      if (c.name == "slope_and_sign" || c.name == "corner_condition") c.informational = true;
  for (const auto& c : report.checks)
    if (!c.informational) report.overall = report.overall && c.passed;
  return report;
}

}  // namespace radsym
