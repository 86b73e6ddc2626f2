#include <radsym/spec_io.hpp>

#include <algorithm>
#include <cerrno>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <vector>

namespace radsym {

SpecParseError::SpecParseError(const std::string& origin, int line, const std::string& message)
    : std::runtime_error(origin + (line > 0 ? ":" + std::to_string(line) : std::string()) + ": " + message),
      line_(line) {}

namespace {

struct Entry {
  std::string value;
  int line = 0;
};

using Section = std::map<std::string, Entry>;

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string cur;
  std::istringstream in(s);
  while (std::getline(in, cur, sep)) out.push_back(trim(cur));
  return out;
}

class Reader {
 public:
  explicit Reader(std::string origin) : origin_(std::move(origin)) {}

  [[noreturn]] void fail(int line, const std::string& message) const { throw SpecParseError(origin_, line, message); }

  double number(const Entry& e, const std::string& text) const {
    const std::string t = trim(text);
    if (t.empty()) fail(e.line, "empty number");
    char* end = nullptr;
    errno = 0;
    const double v = std::strtod(t.c_str(), &end);
    if (end != t.c_str() + t.size() || errno == ERANGE) fail(e.line, "malformed number '" + t + "'");
    return v;
  }

  std::vector<double> list(const Entry& e, const std::string& text) const {
    std::vector<double> out;
    for (const auto& item : split(text, ',')) out.push_back(number(e, item));
    return out;
  }

  bool boolean(const Entry& e) const {
    if (e.value == "true" || e.value == "1" || e.value == "yes") return true;
    if (e.value == "false" || e.value == "0" || e.value == "no") return false;
    fail(e.line, "expected true or false, got '" + e.value + "'");
  }

  const std::string& origin() const { return origin_; }

 private:
  std::string origin_;
};

void check_keys(const Reader& rd, const std::string& name, const Section& sec, const std::set<std::string>& allowed) {
  for (const auto& [key, entry] : sec)
    if (!allowed.count(key)) rd.fail(entry.line, "unknown key '" + key + "' in [" + name + "]");
}

const Entry& require(const Reader& rd, const std::string& name, const Section& sec, const std::string& key,
                     int section_line) {
  const auto it = sec.find(key);
  if (it == sec.end()) rd.fail(section_line, "missing key '" + key + "' in [" + name + "]");
  return it->second;
}

Potential1D read_potential(const Reader& rd, const std::string& name, const Section& sec, int section_line) {
  check_keys(rd, name, sec,
             name == "G" ? std::set<std::string>{"kind", "coeffs", "breakpoints", "even", "halfwidth", "samples_t",
                                                 "samples_v", "shape"}
                         : std::set<std::string>{"kind", "coeffs", "breakpoints", "even", "halfwidth", "samples_t",
                                                 "samples_v"});
  const Entry& kind = require(rd, name, sec, "kind", section_line);
  const auto opt = [&](const std::string& key) -> const Entry* {
    const auto it = sec.find(key);
    return it == sec.end() ? nullptr : &it->second;
  };
  try {
    if (kind.value == "sampled") {
      const Entry& t = require(rd, name, sec, "samples_t", section_line);
      const Entry& v = require(rd, name, sec, "samples_v", section_line);
      for (const char* k : {"coeffs", "breakpoints", "even", "halfwidth"})
        if (const Entry* e = opt(k)) rd.fail(e->line, std::string("key '") + k + "' does not apply to kind sampled");
      return Potential1D::sampled(rd.list(t, t.value), rd.list(v, v.value));
    }
    for (const char* k : {"samples_t", "samples_v"})
      if (const Entry* e = opt(k)) rd.fail(e->line, std::string("key '") + k + "' only applies to kind sampled");
    const Entry& coeffs = require(rd, name, sec, "coeffs", section_line);
    const Entry* hw = opt("halfwidth");
    if (kind.value == "poly_in_t_squared") {
      if (const Entry* e = opt("breakpoints")) rd.fail(e->line, "breakpoints require kind piecewise_poly");
      if (const Entry* e = opt("even")) rd.fail(e->line, "poly_in_t_squared is always even");
      const auto c = rd.list(coeffs, coeffs.value);
      return hw ? Potential1D::even_polynomial(c, rd.number(*hw, hw->value)) : Potential1D::even_polynomial(c);
    }
    if (kind.value == "poly") {
      if (const Entry* e = opt("breakpoints")) rd.fail(e->line, "breakpoints require kind piecewise_poly");
      if (const Entry* e = opt("even")) rd.fail(e->line, "use piecewise_poly for an even piecewise potential");
      const auto c = rd.list(coeffs, coeffs.value);
      return hw ? Potential1D::polynomial(c, rd.number(*hw, hw->value)) : Potential1D::polynomial(c);
    }
    if (kind.value == "piecewise_poly") {
      std::vector<double> breaks;
      if (const Entry* b = opt("breakpoints"); b && !b->value.empty()) breaks = rd.list(*b, b->value);
      std::vector<Polynomial> pieces;
      for (const auto& piece : split(coeffs.value, '|')) pieces.push_back(Polynomial{rd.list(coeffs, piece)});
      const bool even = opt("even") ? rd.boolean(*opt("even")) : false;
      return hw ? Potential1D::piecewise(breaks, pieces, even, rd.number(*hw, hw->value))
                : Potential1D::piecewise(breaks, pieces, even);
    }
  } catch (const std::invalid_argument& e) {
    rd.fail(kind.line, "[" + name + "]: " + e.what());
  }
  rd.fail(kind.line, "unknown kind '" + kind.value + "' in [" + name + "]");
}

std::string num(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string join(const std::vector<double>& v) {
  std::string out;
  for (std::size_t i = 0; i < v.size(); ++i) out += (i ? ", " : "") + num(v[i]);
  return out;
}

void write_potential(std::ostringstream& out, const Potential1D& pot) {
  switch (pot.kind()) {
    case PotentialKind::poly_in_t_squared:
      out << "kind = poly_in_t_squared\ncoeffs = " << join(pot.coefficients()) << "\nhalfwidth = " << num(pot.halfwidth())
          << "\n";
      break;
    case PotentialKind::piecewise_poly: {
      out << "kind = piecewise_poly\n";
      if (!pot.breakpoints().empty()) out << "breakpoints = " << join(pot.breakpoints()) << "\n";
      out << "coeffs = ";
      for (std::size_t i = 0; i < pot.pieces().size(); ++i) out << (i ? " | " : "") << join(pot.pieces()[i].coeffs);
      out << "\neven = " << (pot.declared_even() ? "true" : "false") << "\nhalfwidth = " << num(pot.halfwidth())
          << "\n";
      break;
    }
    case PotentialKind::sampled:
      out << "kind = sampled\nsamples_t = " << join(pot.sample_t()) << "\nsamples_v = " << join(pot.sample_v())
          << "\n";
      break;
  }
}

}  // namespace

ProblemSpec parse_spec_text(const std::string& text, const std::string& origin) {
  const Reader rd(origin);
  std::map<std::string, Section> sections;
  std::map<std::string, int> section_line;
  std::string current;
  std::istringstream in(text);
  std::string raw;
  int line_no = 0;
  while (std::getline(in, raw)) {
    ++line_no;
    std::string line = raw;
    const auto hash = line.find_first_of("#;");
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']') rd.fail(line_no, "malformed section header");
      current = trim(line.substr(1, line.size() - 2));
      if (current != "problem" && current != "W" && current != "G" && current != "growth")
        rd.fail(line_no, "unknown section [" + current + "]");
      if (sections.count(current)) rd.fail(line_no, "duplicate section [" + current + "]");
      sections[current];
      section_line[current] = line_no;
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos) rd.fail(line_no, "expected key = value");
    if (current.empty()) rd.fail(line_no, "key outside of any section");
    const std::string key = trim(line.substr(0, eq));
    if (key.empty()) rd.fail(line_no, "empty key");
    Section& sec = sections[current];
    if (sec.count(key)) rd.fail(line_no, "duplicate key '" + key + "'");
    sec[key] = Entry{trim(line.substr(eq + 1)), line_no};
  }
  for (const char* name : {"problem", "W", "G"})
    if (!sections.count(name)) rd.fail(0, std::string("missing section [") + name + "]");

  ProblemSpec spec;
  const Section& problem = sections["problem"];
  check_keys(rd, "problem", problem, {"dimension", "radius", "p"});
  const Entry& dim = require(rd, "problem", problem, "dimension", section_line["problem"]);
  const double n = rd.number(dim, dim.value);
  if (n != static_cast<int>(n)) rd.fail(dim.line, "dimension must be an integer");
  if (n < 2) rd.fail(dim.line, "dimension must be >= 2");
  spec.dimension = static_cast<int>(n);
  const Entry& radius = require(rd, "problem", problem, "radius", section_line["problem"]);
  spec.radius = rd.number(radius, radius.value);
  if (!(spec.radius > 0.0)) rd.fail(radius.line, "radius must be positive");
  const Entry& p = require(rd, "problem", problem, "p", section_line["problem"]);
  spec.p = rd.number(p, p.value);
  if (!(spec.p > 1.0)) rd.fail(p.line, "p must exceed 1");

  spec.W = read_potential(rd, "W", sections["W"], section_line["W"]);
  spec.G = read_potential(rd, "G", sections["G"], section_line["G"]);
  if (const auto it = sections["G"].find("shape"); it != sections["G"].end()) {
    const std::string& s = it->second.value;
    if (s == "none")
      spec.shape = ShapeFlag::none;
    else if (s == "G2")
      spec.shape = ShapeFlag::G2;
    else if (s == "G2strict")
      spec.shape = ShapeFlag::G2_strict;
    else
      rd.fail(it->second.line, "shape must be none, G2 or G2strict");
  }

  if (sections.count("growth")) {
    const Section& g = sections["growth"];
    check_keys(rd, "growth", g, {"nu1", "nu2", "nu3", "nu4", "rho", "C", "g_exponent", "p_tilde"});
    const auto read = [&](const char* key, std::optional<double>& slot) {
      if (const auto it = g.find(key); it != g.end()) slot = rd.number(it->second, it->second.value);
    };
    read("nu1", spec.growth.nu1);
    read("nu2", spec.growth.nu2);
    read("nu3", spec.growth.nu3);
    read("nu4", spec.growth.nu4);
    read("rho", spec.growth.rho);
    read("C", spec.growth.C);
    read("g_exponent", spec.growth.g_exponent);
    read("p_tilde", spec.growth.p_tilde);
  }
  return spec;
}

ProblemSpec parse_spec(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw SpecParseError(path.string(), 0, "cannot open file");
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_spec_text(buf.str(), path.string());
}

std::string format_spec(const ProblemSpec& spec) {
  std::ostringstream out;
  out << "[problem]\ndimension = " << spec.dimension << "\nradius = " << num(spec.radius) << "\np = " << num(spec.p)
      << "\n\n[W]\n";
  write_potential(out, spec.W);
  out << "\n[G]\n";
  write_potential(out, spec.G);
  out << "shape = " << to_string(spec.shape) << "\n";
  const DeclaredGrowth& g = spec.growth;
  if (!g.empty()) {
    out << "\n[growth]\n";
    const auto put = [&](const char* key, const std::optional<double>& v) {
      if (v) out << key << " = " << num(*v) << "\n";
    };
    put("nu1", g.nu1);
    put("nu2", g.nu2);
    put("nu3", g.nu3);
    put("nu4", g.nu4);
    put("rho", g.rho);
    put("C", g.C);
    put("g_exponent", g.g_exponent);
    put("p_tilde", g.p_tilde);
  }
  return out.str();
}

}  // namespace radsym
