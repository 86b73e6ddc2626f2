#include <radsym/spec_io.hpp>

#include <doctest.h>

#include <string>

using namespace radsym;

namespace {

const char* kPrototype = R"(# comment
[problem]
dimension = 2
radius = 1
p = 4

[W]
kind = poly_in_t_squared
coeffs = 1, -2, 1

[G]
kind = poly
coeffs = 0, 0, -1   ; trailing comment
shape = G2strict

[growth]
rho = 2
)";

int error_line(const std::string& text) {
  try {
    parse_spec_text(text);
  } catch (const SpecParseError& e) {
    return e.line();
  }
  return -1;
}

std::string replace(std::string s, const std::string& from, const std::string& to) {
  const auto k = s.find(from);
  REQUIRE(k != std::string::npos);
  return s.replace(k, from.size(), to);
}

}  // namespace

TEST_CASE("the prototype file parses to the built-in prototype") {
  CHECK(parse_spec_text(kPrototype) == prototype_spec());
}

TEST_CASE("shipped spec files parse, validate and round-trip") {
  for (const char* name : {"prototype.ini", "convex.ini", "m_zero.ini", "three_well.ini"}) {
    INFO(name);
    const auto spec = parse_spec(std::string(RADSYM_DATA_DIR) + "/specs/" + name);
    CHECK(parse_spec_text(format_spec(spec)) == spec);
    CHECK(format_spec(parse_spec_text(format_spec(spec))) == format_spec(spec));
  }
}

TEST_CASE("round-trip keeps every potential kind and the growth block") {
  ProblemSpec spec;
  spec.dimension = 3;
  spec.radius = 0.1 + 0.2;
  spec.p = 2.5;
  spec.W = Potential1D::sampled({-1.0, -0.3, 0.0, 0.3, 1.0}, {2.0, 0.1, 0.25, 0.1, 2.0});
  spec.G = Potential1D::piecewise({-1.0, 2.0}, {Polynomial{{0.0, -1.0}}, Polynomial{{1.0, 0.0, -1.0 / 3.0}}, Polynomial{{0.5}}},
                                  false, 5.0);
  spec.growth.nu1 = 0.5;
  spec.growth.C = 1e-3;
  spec.growth.p_tilde = 7.0;
  spec.shape = ShapeFlag::G2;
  CHECK(parse_spec_text(format_spec(spec)) == spec);
}

TEST_CASE("poly is a single-piece piecewise polynomial") {
  const std::string base = replace(kPrototype, "kind = poly\n", "kind = poly\nhalfwidth = 3\n");
  const auto a = parse_spec_text(base);
  const auto b = parse_spec_text(replace(base, "kind = poly\n", "kind = piecewise_poly\n"));
  CHECK(a.G == b.G);
  CHECK(a.G(1.7) == b.G(1.7));
  CHECK(a.G.kind() == PotentialKind::piecewise_poly);
}

TEST_CASE("errors carry line numbers") {
  CHECK(error_line(replace(kPrototype, "radius = 1", "radius = 1x")) == 4);
  CHECK(error_line(replace(kPrototype, "p = 4", "q = 4")) == 5);
  CHECK(error_line(replace(kPrototype, "[growth]", "[extra]")) == 16);
  CHECK(error_line(replace(kPrototype, "kind = poly_in_t_squared", "kind = spline")) == 8);
  CHECK(error_line(replace(kPrototype, "rho = 2", "rho = 2\nrho = 3")) == 18);
  CHECK(error_line(replace(kPrototype, "dimension = 2", "dimension = 1")) > 0);
  CHECK(error_line(replace(kPrototype, "radius = 1", "radius = -1")) > 0);
  CHECK(error_line(replace(kPrototype, "p = 4", "p = 1")) > 0);
  CHECK(error_line(replace(kPrototype, "coeffs = 1, -2, 1", "coeffs = 1,,1")) == 9);
  CHECK(error_line(replace(kPrototype, "shape = G2strict", "shape = convex")) == 14);
  CHECK_THROWS_AS(parse_spec_text(replace(kPrototype, "[W]\nkind = poly_in_t_squared\ncoeffs = 1, -2, 1\n", "")),
                  SpecParseError);
  CHECK_THROWS_AS(parse_spec_text(replace(kPrototype, "dimension = 2\n", "")), SpecParseError);
  CHECK_THROWS_AS(parse_spec("/nonexistent/spec.ini"), SpecParseError);
}

TEST_CASE("the growth section is optional") {
  const auto spec = parse_spec_text(replace(kPrototype, "[growth]\nrho = 2\n", ""));
  CHECK(spec.growth.empty());
}
