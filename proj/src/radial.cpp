#include <radsym/radial.hpp>

#include <cmath>
#include <stdexcept>

namespace radsym {

RadialGrid::RadialGrid(std::vector<double> nodes, GridKind hint) : nodes_(std::move(nodes)), hint_(hint) {
  if (nodes_.size() < 17) throw std::invalid_argument("RadialGrid: need at least 16 cells");
  if (nodes_.front() != 0.0) throw std::invalid_argument("RadialGrid: first node must be r = 0");
  for (std::size_t i = 1; i < nodes_.size(); ++i)
    if (!(nodes_[i] > nodes_[i - 1])) throw std::invalid_argument("RadialGrid: nodes must be strictly increasing");
}

RadialGrid RadialGrid::uniform(double R, int cells) {
  if (!(R > 0.0)) throw std::invalid_argument("RadialGrid: radius must be positive");
  if (cells < 16) throw std::invalid_argument("RadialGrid: need at least 16 cells");
  std::vector<double> r(static_cast<std::size_t>(cells) + 1);
  for (int i = 0; i < cells; ++i) r[i] = R * i / cells;
  r[cells] = R;
  return RadialGrid(std::move(r), GridKind::uniform);
}

RadialGrid RadialGrid::graded(double R, int cells, double power) {
  if (!(R > 0.0)) throw std::invalid_argument("RadialGrid: radius must be positive");
  if (cells < 16) throw std::invalid_argument("RadialGrid: need at least 16 cells");
  if (!(power >= 1.0)) throw std::invalid_argument("RadialGrid: grading power must be >= 1");
  std::vector<double> r(static_cast<std::size_t>(cells) + 1);
  for (int i = 0; i < cells; ++i) r[i] = R * std::pow(static_cast<double>(i) / cells, power);
  r[cells] = R;
  return RadialGrid(std::move(r), GridKind::graded_near_zero);
}

double RadialGrid::max_width() const {
  double w = 0.0;
  for (int c = 0; c < cells(); ++c) w = std::max(w, width(c));
  return w;
}

RadialProfile::RadialProfile(RadialGrid g, std::vector<double> values) : grid(std::move(g)), u(std::move(values)) {
  if (u.size() != grid.nodes().size()) throw std::invalid_argument("RadialProfile: value count != node count");
  u.back() = 0.0;
}

RadialProfile RadialProfile::from_function(const RadialGrid& g, const std::function<double(double)>& f) {
  std::vector<double> u(g.nodes().size());
  for (std::size_t i = 0; i < u.size(); ++i) u[i] = f(g.nodes()[i]);
  return RadialProfile(g, std::move(u));
}

RadialProfile RadialProfile::from_slopes(const RadialGrid& g, const std::vector<double>& slopes) {
  if (static_cast<int>(slopes.size()) != g.cells()) throw std::invalid_argument("from_slopes: one slope per cell");
  std::vector<double> u(g.nodes().size(), 0.0);
  for (int c = g.cells() - 1; c >= 0; --c) u[c] = u[c + 1] - slopes[c] * g.width(c);
  return RadialProfile(g, std::move(u));
}

std::vector<double> RadialProfile::slopes() const {
  std::vector<double> s(static_cast<std::size_t>(cells()));
  for (int c = 0; c < cells(); ++c) s[c] = slope(c);
  return s;
}

namespace {

template <class GradientTerm>
double reduced(const RadialProfile& profile, const ProblemSpec& spec, GradientTerm&& w) {
  const RadialGrid& g = profile.grid;
  if (std::abs(g.radius() - spec.radius) > 1e-12 * spec.radius)
    throw std::invalid_argument("energy_reduced: profile radius does not match the problem radius");
  const int power = spec.dimension - 1;
  double sum = 0.0;
  for (int c = 0; c < g.cells(); ++c) {
    const double weight = std::pow(g.mid(c), power) * g.width(c);
    sum += weight * (w(profile.slope(c)) + spec.G(profile.mid_value(c)));
  }
  return sphere_area(spec.dimension) * sum;
}

}  // namespace

double energy_reduced(const RadialProfile& profile, const ProblemSpec& spec) {
  return reduced(profile, spec, [&](double s) { return spec.W(s); });
}

double energy_reduced(const RadialProfile& profile, const ProblemSpec& spec, const EnvelopeResult& envelope) {
  return reduced(profile, spec, [&](double s) { return envelope.value(s); });
}

}  // namespace radsym
