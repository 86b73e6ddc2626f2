#pragma once

#include <radsym/envelope.hpp>
#include <radsym/potentials.hpp>

#include <functional>
#include <vector>

namespace radsym {

enum class GridKind { uniform, graded_near_zero };

/// Radial nodes 0 = r_0 < r_1 < ... < r_K = R with K >= 16.
class RadialGrid {
 public:
  explicit RadialGrid(std::vector<double> nodes, GridKind hint = GridKind::uniform);

  static RadialGrid uniform(double R, int cells);
  /// r_i = R (i/K)^power, finer near the origin.
  static RadialGrid graded(double R, int cells, double power = 1.5);

  int cells() const { return static_cast<int>(nodes_.size()) - 1; }
  double radius() const { return nodes_.back(); }
  double node(int i) const { return nodes_[static_cast<std::size_t>(i)]; }
  double width(int c) const { return node(c + 1) - node(c); }
  double mid(int c) const { return 0.5 * (node(c) + node(c + 1)); }
  double max_width() const;
  GridKind hint() const { return hint_; }
  const std::vector<double>& nodes() const { return nodes_; }

  bool operator==(const RadialGrid&) const = default;

 private:
  std::vector<double> nodes_;
  GridKind hint_;
};

/// Nodal values of a radially symmetric candidate; u(R) = 0 is enforced on construction.
struct RadialProfile {
  RadialGrid grid;
  std::vector<double> u;

  RadialProfile(RadialGrid g, std::vector<double> values);
  static RadialProfile from_function(const RadialGrid& g, const std::function<double(double)>& f);
  /// Profile with prescribed cell slopes, integrated inward from u(R) = 0.
  static RadialProfile from_slopes(const RadialGrid& g, const std::vector<double>& slopes);

  double slope(int c) const { return (u[c + 1] - u[c]) / grid.width(c); }
  double mid_value(int c) const { return 0.5 * (u[c] + u[c + 1]); }
  std::vector<double> slopes() const;
  int cells() const { return grid.cells(); }
};

/// Reduced energy |S^{N-1}| sum_c rbar_c^{N-1} [W~(s_c) + G(ubar_c)] dr_c with midpoint
/// quadrature; equals E(u) of the radial extension. Uses W~ itself.
double energy_reduced(const RadialProfile& profile, const ProblemSpec& spec);
/// Same with W~ replaced by its convex envelope.
double energy_reduced(const RadialProfile& profile, const ProblemSpec& spec, const EnvelopeResult& envelope);

}  // namespace radsym
