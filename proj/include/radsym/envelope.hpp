#pragma once

#include <radsym/potentials.hpp>

#include <span>
#include <string>
#include <vector>

namespace radsym {

/// A maximal open interval (a, b) on which the envelope detaches from W~ and is affine,
/// W~**(t) = alpha t + beta.
struct DetachmentComponent {
  double a = 0.0;
  double b = 0.0;
  double alpha = 0.0;
  double beta = 0.0;
  bool is_constant = false;

  bool contains(double t) const { return t > a && t < b; }
  bool contains_closed(double t) const { return t >= a && t <= b; }
  double line(double t) const { return alpha * t + beta; }
};

/// Convex envelope W~** sampled on a symmetric grid, plus its detachment structure.
/// `value`, `slope` and `curvature` evaluate the envelope anywhere on the real line.
struct EnvelopeResult {
  Potential1D W;
  double window = 0.0;
  std::vector<double> grid;
  std::vector<double> values;
  std::vector<DetachmentComponent> components;
  double M = 0.0;
  double constant_radius_M0 = 0.0;
  bool wcaffine_holds = true;
  /// Absolute threshold used to call a node detached.
  double detach_tol = 0.0;
  std::vector<std::string> notes;

  double value(double t) const;
  /// Derivative of the envelope; on a component the affine slope (closed interval, so
  /// the subgradient at +-M resolves to 0).
  double slope(double t) const;
  /// Second derivative, 0 on components and for the sampled kind.
  double curvature(double t) const;
  /// Component whose open interval contains t, if any.
  const DetachmentComponent* component_at(double t) const;
};

/// Lower convex hull of (t_i, y_i) (t strictly increasing) evaluated at every node.
/// One monotone-chain pass; hull vertices keep their exact sample values.
std::vector<double> lower_hull_values(std::span<const double> t, std::span<const double> y);

/// Convex envelope of an even coercive W~. Polynomial kinds are sampled on a symmetric grid
/// of `grid_points` nodes (rounded up to odd so t = 0 is a node) over a window that is grown
/// until W~ is convex beyond it and no detachment touches its edge; component endpoints and
/// affine data are refined to 1e-10. The sampled kind is convexified on its own nodes.
EnvelopeResult convexify(const Potential1D& W, int grid_points = 10001);

/// Maximal detached intervals of `env` with fitted affine data. Runs that touch at a single
/// node with agreeing affine data are merged. For polynomial kinds the endpoints are refined
/// to the exact bitangent contacts; the central constant region is (-M, M).
std::vector<DetachmentComponent> detachment_components(const EnvelopeResult& env);

/// True iff every component lies in (-M, M).
bool wcaffine_holds(const std::vector<DetachmentComponent>& components, double M);

}  // namespace radsym
