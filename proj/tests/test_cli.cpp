#include <radsym/cli.hpp>

#include <doctest.h>
#include <json.hpp>

#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <unistd.h>

using namespace radsym;
namespace fs = std::filesystem;

namespace {

int run(std::vector<std::string> args) {
  args.insert(args.begin(), "radsym");
  std::vector<char*> argv;
  for (auto& a : args) argv.push_back(a.data());
  return run_cli(static_cast<int>(argv.size()), argv.data());
}

std::string spec_file(const std::string& name) { return std::string(RADSYM_DATA_DIR) + "/specs/" + name; }

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

struct TempDir {
  fs::path path = fs::temp_directory_path() / ("radsym_cli_test_" + std::to_string(::getpid()));
  TempDir() { fs::create_directories(path); }
  ~TempDir() { fs::remove_all(path); }
  std::string operator/(const std::string& name) const { return (path / name).string(); }
};

}  // namespace

TEST_CASE("usage errors exit with 1") {
  CHECK(run({}) == kExitUsage);
  CHECK(run({"frobnicate"}) == kExitUsage);
  CHECK(run({"envelope", "/nonexistent.ini"}) == kExitUsage);
  CHECK(run({"solve", spec_file("prototype.ini"), "--grid-points", "4"}) == kExitUsage);
  CHECK(run({"oracle", spec_file("prototype.ini"), "--r-levels", "500"}) == kExitUsage);
  CHECK(run({"envelope", spec_file("prototype.ini"), "--out", "/nonexistent/dir/out.json"}) == kExitUsage);
  CHECK(run({"symmetry"}) == kExitUsage);
  CHECK(run({"symmetry", "--random-fields", "1", "--n", "40"}) == kExitUsage);
  TempDir tmp;
  {
    std::ofstream(tmp / "bad.ini") << "[problem]\ndimension = two\n";
  }
  CHECK(run({"envelope", tmp / "bad.ini"}) == kExitUsage);
}

TEST_CASE("envelope writes a versioned JSON report and a CSV table") {
  TempDir tmp;
  REQUIRE(run({"envelope", spec_file("prototype.ini"), "--out", tmp / "env.json"}) == kExitOk);
  const auto j = nlohmann::json::parse(slurp(tmp / "env.json"));
  CHECK(j["schema_version"] == "1");
  CHECK(j["command"] == "envelope");
  CHECK(j["envelope"]["M"].get<double>() == doctest::Approx(1.0));
  CHECK(j["envelope"]["components"].size() == 1);
  REQUIRE(run({"envelope", spec_file("prototype.ini"), "--format", "csv", "--out", tmp / "env.csv"}) == kExitOk);
  CHECK(slurp(tmp / "env.csv").rfind("t,W,W_envelope\n", 0) == 0);
}

TEST_CASE("solve, then verify the written profile") {
  TempDir tmp;
  REQUIRE(run({"solve", spec_file("prototype.ini"), "--grid-points", "256", "--seed", "3", "--out", tmp / "s.json",
               "--profile-csv", tmp / "p.csv"}) == kExitOk);
  const auto j = nlohmann::json::parse(slurp(tmp / "s.json"));
  CHECK(j["overall"] == true);
  CHECK(j["seed"] == 3);
  CHECK(j["result"]["converged"] == true);
  CHECK(j["verify"]["checks"].size() == 6);
  CHECK(run({"verify", spec_file("prototype.ini"), "--profile", tmp / "p.csv", "--out", tmp / "v.json"}) == kExitOk);
  // Against a problem with M = 0 the profile's corner slope of -1 is wrong.
  CHECK(run({"verify", spec_file("convex.ini"), "--profile", tmp / "p.csv", "--out", tmp / "v2.json"}) ==
        kExitVerifyFailed);
}

TEST_CASE("a failing structural check exits with 3") {
  TempDir tmp;
  {
    std::ofstream out(tmp / "flat.csv");
    out << "r,u\n";
    for (int i = 0; i <= 64; ++i) out << i / 64.0 << "," << 0.5 * (1.0 - i / 64.0) << "\n";
  }
  CHECK(run({"verify", spec_file("prototype.ini"), "--profile", tmp / "flat.csv", "--out", tmp / "v.json"}) ==
        kExitVerifyFailed);
  // The three-well minimizer bends near the origin, so the default corner window fails.
  CHECK(run({"solve", spec_file("three_well.ini"), "--out", tmp / "t.json"}) == kExitVerifyFailed);
  CHECK(run({"solve", spec_file("three_well.ini"), "--window", "0.04", "--out", tmp / "t.json"}) == kExitOk);
}

TEST_CASE("symmetry and oracle subcommands") {
  TempDir tmp;
  CHECK(run({"symmetry", "--random-fields", "2", "--n", "65", "--rays", "16", "--out", tmp / "sym.json"}) == kExitOk);
  const auto j = nlohmann::json::parse(slurp(tmp / "sym.json"));
  CHECK(j["records"].size() == 2);
  {
    std::ofstream out(tmp / "field.csv");
    out << "x,y,u\n";
    for (int jj = 0; jj < 65; ++jj)
      for (int i = 0; i < 65; ++i) {
        const double x = -1.0 + i / 32.0, y = -1.0 + jj / 32.0;
        out << x << "," << y << "," << 1.0 - x * x - y * y << "\n";
      }
  }
  CHECK(run({"symmetry", "--field", tmp / "field.csv", "--ray-csv-dir", tmp.path.string(), "--rays", "64", "--out",
             tmp / "f.json"}) == kExitOk);
  CHECK(fs::exists(tmp / "field.csv_ray63.csv"));
  CHECK(run({"oracle", spec_file("prototype.ini"), "--r-levels", "32", "--u-levels", "60", "--slope-levels", "60",
             "--out", tmp / "o.json"}) == kExitOk);
  CHECK(nlohmann::json::parse(slurp(tmp / "o.json"))["oracle"]["relaxed_energy"].get<double>() < 0.0);
}

TEST_CASE("repeated solves are byte-identical") {
  TempDir tmp;
  REQUIRE(run({"solve", spec_file("m_zero.ini"), "--grid-points", "128", "--seed", "42", "--out", tmp / "a.json"}) ==
          kExitOk);
  REQUIRE(run({"solve", spec_file("m_zero.ini"), "--grid-points", "128", "--seed", "42", "--threads", "2", "--out",
               tmp / "b.json"}) == kExitOk);
  CHECK(slurp(tmp / "a.json") == slurp(tmp / "b.json"));
}
