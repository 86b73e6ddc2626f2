#include <radsym/cli.hpp>

#include <radsym/disc2d.hpp>
#include <radsym/radial_solver.hpp>
#include <radsym/spec_io.hpp>

#include <CLI11.hpp>
#include <json.hpp>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>

namespace radsym {

namespace {

using Json = nlohmann::ordered_json;
namespace fs = std::filesystem;

constexpr const char* kSchemaVersion = "1";

class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct RunConfig {
  std::string spec_path;
  std::string out;
  std::string format = "json";
  std::string profile_csv;

  int envelope_points = 10001;

  int grid_points = 512;
  bool graded = false;
  int multistarts = 8;
  std::uint64_t seed = 0;
  int threads = 0;
  int max_iters = 500;
  bool oracle = false;
  int r_levels = 100;
  int u_levels = 200;
  int slope_levels = 200;
  double window = 0.2;
  double tol_corner = 0.05;

  std::string profile_in;

  std::string field_csv;
  int random_fields = 0;
  int n = 129;
  int rays = 64;
  std::string ray_csv_dir;
};

std::string num(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

void write_atomic(const std::string& path, const std::string& content) {
  const fs::path target(path);
  fs::path tmp = target;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw UsageError("cannot write " + tmp.string());
    out << content;
    if (!out.flush()) throw UsageError("write failed for " + tmp.string());
  }
  fs::rename(tmp, target);
}

void emit(const RunConfig& cfg, const std::string& content) {
  if (cfg.out.empty())
    std::cout << content;
  else
    write_atomic(cfg.out, content);
}

void check_output_path(const std::string& path) {
  if (path.empty()) return;
  const fs::path parent = fs::path(path).parent_path();
  if (!parent.empty() && !fs::is_directory(parent)) throw UsageError("output directory does not exist: " + parent.string());
}

Json envelope_json(const EnvelopeResult& env) {
  Json j;
  j["M"] = env.M;
  j["M0"] = env.constant_radius_M0;
  j["wcaffine_holds"] = env.wcaffine_holds;
  j["window"] = env.window;
  j["grid_points"] = env.grid.size();
  Json comps = Json::array();
  for (const auto& c : env.components)
    comps.push_back({{"a", c.a}, {"b", c.b}, {"alpha", c.alpha}, {"beta", c.beta}, {"is_constant", c.is_constant}});
  j["components"] = comps;
  j["notes"] = env.notes;
  return j;
}

Json validation_json(const ValidationReport& v) {
  Json checks = Json::array();
  for (const auto& c : v.checks) checks.push_back({{"name", c.name}, {"passed", c.passed}, {"detail", c.detail}});
  return {{"passes", v.passes}, {"checks", checks}};
}

Json verify_json(const VerifyReport& r) {
  Json checks = Json::array();
  for (const auto& c : r.checks) {
    Json metrics = Json::object();
    for (const auto& [k, v] : c.metrics) metrics[k] = v;
    checks.push_back({{"name", c.name},
                      {"property", c.property},
                      {"passed", c.passed},
                      {"informational", c.informational},
                      {"margin", c.margin},
                      {"details", c.details},
                      {"metrics", metrics}});
  }
  return {{"overall", r.overall},
          {"cells", r.cells},
          {"radius", r.radius},
          {"max_dr", r.max_dr},
          {"lipschitz_G", r.lipschitz_G},
          {"checks", checks}};
}

std::string profile_csv(const RadialProfile& p) {
  std::string s = "r,u,du_dr\n";
  for (int i = 0; i <= p.cells(); ++i) {
    const double slope = p.slope(std::min(i, p.cells() - 1));
    s += num(p.grid.node(i)) + "," + num(p.u[i]) + "," + num(slope) + "\n";
  }
  return s;
}

std::vector<std::vector<double>> read_numeric_csv(const std::string& path, std::size_t columns) {
  std::ifstream in(path);
  if (!in) throw UsageError("cannot open " + path);
  std::vector<std::vector<double>> rows;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line[0] == '#') continue;
    std::vector<double> row;
    std::stringstream ss(line);
    std::string cell;
    bool header = false;
    while (std::getline(ss, cell, ',')) {
      char* end = nullptr;
      const double v = std::strtod(cell.c_str(), &end);
      if (end == cell.c_str()) {
        header = true;
        break;
      }
      row.push_back(v);
    }
    if (header) {
      if (rows.empty()) continue;
      throw UsageError(path + ":" + std::to_string(line_no) + ": non-numeric row");
    }
    if (row.size() < columns)
      throw UsageError(path + ":" + std::to_string(line_no) + ": expected " + std::to_string(columns) + " columns");
    rows.push_back(std::move(row));
  }
  if (rows.empty()) throw UsageError(path + ": no data rows");
  return rows;
}

RadialProfile read_profile_csv(const std::string& path, double radius) {
  const auto rows = read_numeric_csv(path, 2);
  std::vector<double> r, u;
  for (const auto& row : rows) {
    r.push_back(row[0]);
    u.push_back(row[1]);
  }
  if (std::abs(r.back() - radius) > 1e-9 * radius) throw UsageError(path + ": last r must equal the problem radius");
  r.back() = radius;
  try {
    return RadialProfile(RadialGrid(r), u);
  } catch (const std::invalid_argument& e) {
    throw UsageError(path + ": " + e.what());
  }
}

DiscField read_field_csv(const std::string& path) {
  const auto rows = read_numeric_csv(path, 3);
  const int n = static_cast<int>(std::lround(std::sqrt(static_cast<double>(rows.size()))));
  if (static_cast<std::size_t>(n) * n != rows.size()) throw UsageError(path + ": expected n*n rows (x, y, u)");
  double R = 0.0;
  for (const auto& row : rows) R = std::max({R, std::abs(row[0]), std::abs(row[1])});
  const double h = 2.0 * R / (n - 1);
  std::vector<double> v(rows.size(), 0.0);
  std::vector<char> seen(rows.size(), 0);
  for (const auto& row : rows) {
    const double fi = (row[0] + R) / h, fj = (row[1] + R) / h;
    const long i = std::lround(fi), j = std::lround(fj);
    if (std::abs(fi - i) > 1e-6 || std::abs(fj - j) > 1e-6 || i < 0 || j < 0 || i >= n || j >= n)
      throw UsageError(path + ": points do not form a uniform square grid over [-R, R]^2");
    const std::size_t k = static_cast<std::size_t>(j) * n + i;
    if (seen[k]) throw UsageError(path + ": duplicate grid point");
    seen[k] = 1;
    v[k] = row[2];
  }
  try {
    return DiscField(n, R, std::move(v));
  } catch (const std::invalid_argument& e) {
    throw UsageError(path + ": " + e.what());
  }
}

ProblemSpec load_spec(const RunConfig& cfg) {
  if (cfg.spec_path.empty()) return prototype_spec();
  return parse_spec(cfg.spec_path);
}

Json header(const std::string& command, const RunConfig& cfg, const ProblemSpec& spec) {
  Json j;
  j["schema_version"] = kSchemaVersion;
  j["command"] = command;
  j["seed"] = cfg.seed;
  j["spec"] = format_spec(spec);
  return j;
}

int cmd_envelope(const RunConfig& cfg) {
  const ProblemSpec spec = load_spec(cfg);
  const EnvelopeResult env = convexify(spec.W, cfg.envelope_points);
  if (cfg.format == "csv") {
    std::string s = "t,W,W_envelope\n";
    for (std::size_t i = 0; i < env.grid.size(); ++i)
      s += num(env.grid[i]) + "," + num(spec.W(env.grid[i])) + "," + num(env.values[i]) + "\n";
    emit(cfg, s);
    return kExitOk;
  }
  Json j = header("envelope", cfg, spec);
  j["envelope"] = envelope_json(env);
  emit(cfg, j.dump(2) + "\n");
  return kExitOk;
}

int cmd_solve(const RunConfig& cfg) {
  const ProblemSpec spec = load_spec(cfg);
  PipelineOptions opts;
  opts.grid_cells = cfg.grid_points;
  opts.grid_kind = cfg.graded ? GridKind::graded_near_zero : GridKind::uniform;
  opts.envelope_points = cfg.envelope_points;
  opts.solve.multistarts = cfg.multistarts;
  opts.solve.seed = cfg.seed;
  opts.solve.threads = cfg.threads;
  opts.solve.max_iters = cfg.max_iters;
  opts.verify.corner_window = cfg.window;
  opts.verify.corner_tol = cfg.tol_corner;
  opts.run_oracle = cfg.oracle;
  opts.oracle.r_levels = cfg.r_levels;
  opts.oracle.u_levels = cfg.u_levels;
  opts.oracle.slope_levels = cfg.slope_levels;
  const PipelineReport rep = solve_pipeline(spec, opts);

  if (!cfg.profile_csv.empty()) write_atomic(cfg.profile_csv, profile_csv(rep.solve.profile));
  if (cfg.format == "csv") {
    emit(cfg, profile_csv(rep.solve.profile));
  } else {
    Json j = header("solve", cfg, spec);
    j["options"] = {{"grid_points", cfg.grid_points},
                    {"grid_kind", cfg.graded ? "graded_near_zero" : "uniform"},
                    {"multistarts", cfg.multistarts},
                    {"max_iters", cfg.max_iters},
                    {"envelope_points", cfg.envelope_points},
                    {"window", cfg.window},
                    {"tol_corner", cfg.tol_corner},
                    {"oracle", cfg.oracle}};
    j["validation"] = validation_json(rep.validation);
    j["warnings"] = rep.warnings;
    j["envelope"] = envelope_json(rep.envelope);
    Json result;
    result["relaxed_energy"] = rep.solve.relaxed_energy;
    result["original_energy"] = rep.solve.original_energy;
    result["iterations"] = rep.solve.iterations;
    result["converged"] = rep.solve.converged;
    result["multistart_seed"] = rep.solve.multistart_seed;
    result["best_start"] = rep.solve.best_start;
    result["start_energies"] = rep.solve.start_energies;
    result["rearranged"] = rep.rearranged;
    result["energy_consistent"] = rep.energy_consistent;
    result["oracle_gap"] = rep.solve.oracle_gap ? Json(*rep.solve.oracle_gap) : Json(nullptr);
    j["result"] = result;
    if (rep.oracle) {
      const OracleReport& o = *rep.oracle;
      j["oracle"] = {{"r_levels", cfg.r_levels},
                     {"u_levels", cfg.u_levels},
                     {"slope_levels", cfg.slope_levels},
                     {"energy", o.solve.relaxed_energy},
                     {"table_value", o.table_value},
                     {"u_window", {o.u_min, o.u_max}},
                     {"slope_window", {o.slope_min, o.slope_max}},
                     {"window_hit", o.window_hit}};
    }
    j["verify"] = verify_json(rep.verify);
    j["verify_minimizer"] = verify_json(rep.verify_minimizer);
    j["overall"] = rep.overall;
    emit(cfg, j.dump(2) + "\n");
  }
  if (!rep.solve.converged) return kExitNumerical;
  return rep.overall ? kExitOk : kExitVerifyFailed;
}

int cmd_verify(const RunConfig& cfg) {
  const ProblemSpec spec = load_spec(cfg);
  const RadialProfile profile = read_profile_csv(cfg.profile_in, spec.radius);
  const EnvelopeResult env = convexify(spec.W, cfg.envelope_points);
  VerifyOptions vopts;
  vopts.corner_window = cfg.window;
  vopts.corner_tol = cfg.tol_corner;
  vopts.expect_monotone = spec.shape != ShapeFlag::none;
  const VerifyReport rep = verify_all(profile, spec, env, vopts);
  if (cfg.format == "csv") {
    std::string s = "name,passed,informational,margin\n";
    for (const auto& c : rep.checks)
      s += c.name + "," + (c.passed ? "1" : "0") + "," + (c.informational ? "1" : "0") + "," + num(c.margin) + "\n";
    emit(cfg, s);
  } else {
    Json j = header("verify", cfg, spec);
    j["profile"] = cfg.profile_in;
    j["verify"] = verify_json(rep);
    emit(cfg, j.dump(2) + "\n");
  }
  return rep.overall ? kExitOk : kExitVerifyFailed;
}

int cmd_symmetry(const RunConfig& cfg) {
  ProblemSpec spec = load_spec(cfg);
  if (spec.dimension != 2) throw UsageError("symmetry requires dimension = 2");
  const EnvelopeResult env = convexify(spec.W, cfg.envelope_points);
  struct Case {
    std::string name;
    DiscField field;
  };
  std::vector<Case> cases;
  if (!cfg.field_csv.empty()) {
    DiscField f = read_field_csv(cfg.field_csv);
    if (std::abs(f.radius() - spec.radius) > 1e-9 * spec.radius) throw UsageError("field radius differs from spec radius");
    cases.push_back({cfg.field_csv, std::move(f)});
  }
  for (int k = 0; k < cfg.random_fields; ++k)
    cases.push_back({"random_" + std::to_string(k),
                     random_smooth_field(cfg.n, spec.radius, cfg.seed + static_cast<std::uint64_t>(k))});
  if (cases.empty()) throw UsageError("symmetry needs --field or --random-fields");

  bool all = true;
  Json records = Json::array();
  std::string csv = "field,lhs,rhs,tol,passes,defect\n";
  for (const auto& c : cases) {
    const RayEnergyReport r = averaged_ray_energy_check(c.field, spec, env, cfg.rays);
    const double defect = colinearity_defect(c.field);
    all = all && r.passes;
    records.push_back({{"field", c.name},
                       {"n", c.field.n()},
                       {"lhs", r.lhs},
                       {"rhs", r.rhs},
                       {"tol", r.tol},
                       {"passes", r.passes},
                       {"defect", defect},
                       {"thetas", r.thetas},
                       {"per_theta_energies", r.per_theta_energies}});
    csv += c.name + "," + num(r.lhs) + "," + num(r.rhs) + "," + num(r.tol) + "," + (r.passes ? "1" : "0") + "," +
           num(defect) + "\n";
    if (!cfg.ray_csv_dir.empty()) {
      for (std::size_t k = 0; k < r.thetas.size(); ++k) {
        const fs::path p = fs::path(cfg.ray_csv_dir) / (fs::path(c.name).filename().string() + "_ray" + std::to_string(k) + ".csv");
        write_atomic(p.string(), profile_csv(ray_profile(c.field, r.thetas[k])));
      }
    }
  }
  if (cfg.format == "csv") {
    emit(cfg, csv);
  } else {
    Json j = header("symmetry", cfg, spec);
    j["rays"] = cfg.rays;
    j["tol_constant"] = kRayTolConstant;
    j["records"] = records;
    j["overall"] = all;
    emit(cfg, j.dump(2) + "\n");
  }
  return all ? kExitOk : kExitVerifyFailed;
}

int cmd_oracle(const RunConfig& cfg) {
  const ProblemSpec spec = load_spec(cfg);
  const EnvelopeResult env = convexify(spec.W, cfg.envelope_points);
  OracleOptions o;
  o.r_levels = cfg.r_levels;
  o.u_levels = cfg.u_levels;
  o.slope_levels = cfg.slope_levels;
  const OracleReport rep = dp_oracle(spec, env, o);
  if (!cfg.profile_csv.empty()) write_atomic(cfg.profile_csv, profile_csv(rep.solve.profile));
  if (cfg.format == "csv") {
    emit(cfg, profile_csv(rep.solve.profile));
  } else {
    Json j = header("oracle", cfg, spec);
    j["oracle"] = {{"r_levels", cfg.r_levels},
                   {"u_levels", cfg.u_levels},
                   {"slope_levels", cfg.slope_levels},
                   {"relaxed_energy", rep.solve.relaxed_energy},
                   {"original_energy", rep.solve.original_energy},
                   {"table_value", rep.table_value},
                   {"u_window", {rep.u_min, rep.u_max}},
                   {"slope_window", {rep.slope_min, rep.slope_max}},
                   {"window_hit", rep.window_hit}};
    emit(cfg, j.dump(2) + "\n");
  }
  return kExitOk;
}

}  // namespace

int run_cli(int argc, char** argv) {
  CLI::App app{"Relaxation, radial minimization and verification for nonconvex radial variational problems"};
  app.require_subcommand(1);
  RunConfig cfg;

  const auto add_common = [&](CLI::App* sub, bool spec_required) {
    if (spec_required)
      sub->add_option("spec", cfg.spec_path, "Problem spec file (INI)")->required()->check(CLI::ExistingFile);
    else
      sub->add_option("--spec", cfg.spec_path, "Problem spec file (INI); default is the built-in prototype")
          ->check(CLI::ExistingFile);
    sub->add_option("--out", cfg.out, "Write the report here (atomically) instead of stdout");
    sub->add_option("--format", cfg.format, "Report format")->check(CLI::IsMember({"json", "csv"}))->capture_default_str();
    sub->add_option("--envelope-points", cfg.envelope_points, "Envelope sampling grid size")
        ->check(CLI::Range(64, 10000001))
        ->capture_default_str();
  };
  const auto add_verify_opts = [&](CLI::App* sub) {
    sub->add_option("--window", cfg.window, "Corner-condition fit window as a fraction of R")
        ->check(CLI::Range(0.0, 1.0))
        ->capture_default_str();
    sub->add_option("--tol-corner", cfg.tol_corner, "Corner-condition tolerance")
        ->check(CLI::PositiveNumber)
        ->capture_default_str();
  };
  const auto add_oracle_opts = [&](CLI::App* sub) {
    sub->add_option("--r-levels", cfg.r_levels, "Oracle radial cells")->check(CLI::Range(16, 200))->capture_default_str();
    sub->add_option("--u-levels", cfg.u_levels, "Oracle value levels")->check(CLI::Range(2, 400))->capture_default_str();
    sub->add_option("--slope-levels", cfg.slope_levels, "Oracle slope levels")
        ->check(CLI::Range(2, 400))
        ->capture_default_str();
  };

  CLI::App* envelope = app.add_subcommand("envelope", "Convex envelope and detachment components of W");
  add_common(envelope, true);

  CLI::App* solve = app.add_subcommand("solve", "Relax, minimize, rearrange and verify");
  add_common(solve, true);
  add_verify_opts(solve);
  add_oracle_opts(solve);
  solve->add_option("--grid-points", cfg.grid_points, "Radial cells K")->check(CLI::Range(16, 1 << 20))->capture_default_str();
  solve->add_flag("--graded", cfg.graded, "Grade the radial grid toward r = 0");
  solve->add_option("--multistarts", cfg.multistarts, "Number of starting profiles")
      ->check(CLI::Range(1, 1024))
      ->capture_default_str();
  solve->add_option("--seed", cfg.seed, "Seed for the random starts")->capture_default_str();
  solve->add_option("--threads", cfg.threads, "Worker threads (0: hardware concurrency)")
      ->check(CLI::NonNegativeNumber)
      ->capture_default_str();
  solve->add_option("--max-iters", cfg.max_iters, "Newton iterations per start")
      ->check(CLI::Range(1, 1000000))
      ->capture_default_str();
  solve->add_flag("--oracle", cfg.oracle, "Also run the dynamic-programming oracle and report the gap");
  solve->add_option("--profile-csv", cfg.profile_csv, "Write the final profile (r, u, du_dr)");

  CLI::App* verify = app.add_subcommand("verify", "Check a profile against the predicted minimizer structure");
  add_common(verify, true);
  add_verify_opts(verify);
  verify->add_option("--profile", cfg.profile_in, "Profile CSV (r, u[, du_dr])")->required()->check(CLI::ExistingFile);

  CLI::App* symmetry = app.add_subcommand("symmetry", "Averaged ray-energy inequality and colinearity on the disc");
  add_common(symmetry, false);
  symmetry->add_option("--field", cfg.field_csv, "Field CSV (x, y, u) on an n x n grid")->check(CLI::ExistingFile);
  symmetry->add_option("--random-fields", cfg.random_fields, "Number of seeded random smooth fields")
      ->check(CLI::NonNegativeNumber);
  symmetry->add_option("--seed", cfg.seed, "Seed of the first random field")->capture_default_str();
  symmetry->add_option("--n", cfg.n, "Grid size of random fields (odd, >= 33)")->capture_default_str();
  symmetry->add_option("--rays", cfg.rays, "Number of equispaced rays")->check(CLI::Range(1, 100000))->capture_default_str();
  symmetry->add_option("--ray-csv-dir", cfg.ray_csv_dir, "Write every ray profile as CSV into this directory")
      ->check(CLI::ExistingDirectory);

  CLI::App* oracle = app.add_subcommand("oracle", "Dynamic-programming oracle for the reduced problem");
  add_common(oracle, true);
  add_oracle_opts(oracle);
  oracle->add_option("--profile-csv", cfg.profile_csv, "Write the oracle profile (r, u, du_dr)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    check_output_path(cfg.out);
    check_output_path(cfg.profile_csv);
    if (symmetry->parsed() && cfg.random_fields > 0 && (cfg.n < 33 || cfg.n % 2 == 0))
      throw UsageError("--n must be odd and >= 33");
    if (envelope->parsed()) return cmd_envelope(cfg);
    if (solve->parsed()) return cmd_solve(cfg);
    if (verify->parsed()) return cmd_verify(cfg);
    if (symmetry->parsed()) return cmd_symmetry(cfg);
    if (oracle->parsed()) return cmd_oracle(cfg);
  } catch (const SpecParseError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const UsageError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::exception& e) {
    std::cerr << "numerical failure: " << e.what() << "\n";
    return kExitNumerical;
  }
  return kExitUsage;
}

}  // namespace radsym
