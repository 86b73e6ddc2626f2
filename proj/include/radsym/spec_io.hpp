#pragma once

#include <radsym/potentials.hpp>

#include <filesystem>
#include <stdexcept>
#include <string>

namespace radsym {

/// Parse failure; `line` is 1-based, 0 when the problem is not tied to a line.
class SpecParseError : public std::runtime_error {
 public:
  SpecParseError(const std::string& origin, int line, const std::string& message);
  int line() const { return line_; }

 private:
  int line_;
};

/// INI-style problem file:
///
///   [problem]  dimension, radius, p
///   [W]        kind, coeffs, breakpoints, even, halfwidth, samples_t, samples_v
///   [G]        same keys plus shape = none | G2 | G2strict
///   [growth]   nu1, nu2, nu3, nu4, rho, C, g_exponent, p_tilde   (optional section)
///
/// kind is poly_in_t_squared, poly, piecewise_poly or sampled. Lists are comma separated;
/// piecewise pieces are separated by '|'. '#' and ';' start comments.
ProblemSpec parse_spec_text(const std::string& text, const std::string& origin = "<string>");
ProblemSpec parse_spec(const std::filesystem::path& path);

/// Text that parse_spec_text maps back to an equal ProblemSpec.
std::string format_spec(const ProblemSpec& spec);

}  // namespace radsym
