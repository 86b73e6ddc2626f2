#pragma once

#include <radsym/envelope.hpp>
#include <radsym/radial.hpp>

#include <cstdint>
#include <functional>
#include <vector>

namespace radsym {

/// Nodal values on an n x n grid over [-R, R]^2 (n odd, n >= 33). Nodes with |x| >= R
/// hold 0. Index (i, j) is x = -R + i h, y = -R + j h, stored at j * n + i.
/// Nodes just outside the disc also carry ghost values that continue u linearly through
/// u = 0 on the circle; gradients and samples in cut cells use them.
class DiscField {
 public:
  DiscField(int n, double R, std::vector<double> values);
  static DiscField from_function(int n, double R, const std::function<double(double, double)>& f);

  int n() const { return n_; }
  double radius() const { return R_; }
  double h() const { return 2.0 * R_ / (n_ - 1); }
  double coord(int i) const { return -R_ + h() * i; }
  bool inside(int i, int j) const;
  double at(int i, int j) const { return values_[static_cast<std::size_t>(j) * n_ + i]; }
  /// Value at a node, or its ghost value outside the disc.
  double extended(int i, int j) const { return extended_[static_cast<std::size_t>(j) * n_ + i]; }
  const std::vector<double>& values() const { return values_; }
  /// Bilinear interpolation of the extended values; 0 outside the square.
  double sample(double x, double y) const;
  /// The same data rotated by 90 degrees counterclockwise.
  DiscField rotated90() const;

 private:
  int n_;
  double R_;
  std::vector<double> values_;
  std::vector<double> extended_;
};

/// Area of the disc of radius R centred at 0 intersected with [x0, x1] x [y0, y1].
double disc_rectangle_area(double R, double x0, double x1, double y0, double y1);

/// E(u) = sum over cells of area(cell ∩ disc) [W~(|grad u|) + G(u)] with the bilinear
/// gradient and value at the cell centre. Requires spec.dimension == 2.
double energy_2d(const DiscField& field, const ProblemSpec& spec);
double energy_2d(const DiscField& field, const ProblemSpec& spec, const EnvelopeResult& envelope);

/// Restriction along the ray r -> r (cos theta, sin theta) on a uniform grid with n cells.
RadialProfile ray_profile(const DiscField& field, double theta);

struct RayEnergyReport {
  double lhs = 0.0;
  double rhs = 0.0;
  double tol = 0.0;
  bool passes = false;
  std::vector<double> thetas;
  std::vector<double> per_theta_energies;
};

/// Default constant C of the tolerance C h (1 + |rhs|).
inline constexpr double kRayTolConstant = 0.1;

/// lhs = mean over n_thetas equispaced rays of the reduced energy of the ray profile,
/// rhs = energy_2d; both use the convex envelope, which is nondecreasing on [0, inf).
/// Passes iff lhs <= rhs + C h (1 + |rhs|).
RayEnergyReport averaged_ray_energy_check(const DiscField& field, const ProblemSpec& spec, const EnvelopeResult& envelope,
                                          int n_thetas = 64, double tol_constant = kRayTolConstant);

/// L2 norm of the tangential part of grad u over cells with all four nodes inside the disc,
/// divided by the L2 norm of grad u there (0 when grad u vanishes).
double colinearity_defect(const DiscField& field);

/// Field whose value at x is the mean of u over the circle of radius |x| (n_thetas rays).
DiscField angular_average(const DiscField& field, int n_thetas = 64);

/// Sum of `bumps` Gaussian bumps with seeded centres, widths and amplitudes, multiplied by
/// R^2 - |x|^2 so it vanishes on the boundary.
DiscField random_smooth_field(int n, double R, std::uint64_t seed, int bumps = 4);

}  // namespace radsym
