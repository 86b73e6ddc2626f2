#pragma once

#include <radsym/envelope.hpp>
#include <radsym/radial.hpp>
#include <radsym/verify.hpp>

#include <algorithm>
#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

namespace radsym {

struct SolveOptions {
  int multistarts = 8;
  int max_iters = 500;
  std::uint64_t seed = 0;
  /// Worker threads for the multistarts; 0 picks the hardware concurrency.
  int threads = 0;
};

struct SolveReport {
  RadialProfile profile{RadialGrid::uniform(1.0, 16), std::vector<double>(17, 0.0)};
  double relaxed_energy = 0.0;
  double original_energy = 0.0;
  int iterations = 0;
  std::uint64_t multistart_seed = 0;
  std::optional<double> oracle_gap;
  bool converged = true;
  /// Relaxed energy of each start after descent, in start order.
  int best_start = 0;
  std::vector<double> start_energies;
};

/// Minimizes the discretized relaxed energy over nodal values u_0..u_{K-1} (u_K = 0) with a
/// damped Newton method on the tridiagonal Hessian, from several starting profiles.
/// The best result is chosen by energy, ties broken lexicographically on u.
SolveReport minimize_relaxed(const ProblemSpec& spec, const EnvelopeResult& env, const RadialGrid& grid,
                             const SolveOptions& options = {});

struct OracleOptions {
  int r_levels = 100;
  int u_levels = 200;
  int slope_levels = 200;
  /// Value window [u_min, u_max] and slope range; derived from the problem when unset.
  std::optional<double> u_max;
  std::optional<double> slope_max;
};

struct OracleReport {
  SolveReport solve;
  /// Optimal value of the dynamic program on its value grid.
  double table_value = 0.0;
  double u_min = 0.0;
  double u_max = 0.0;
  double slope_min = 0.0;
  double slope_max = 0.0;
  /// The reconstructed profile touches the value or slope window.
  bool window_hit = false;
};

/// Brute-force dynamic program over (cell, value) on a uniform radial grid with r_levels
/// cells. Value functions live on a uniform value grid and are interpolated linearly;
/// controls are cell slopes from a uniform slope grid. The returned profile is the forward
/// reconstruction of the optimal policy and its energy is evaluated exactly.
OracleReport dp_oracle(const ProblemSpec& spec, const EnvelopeResult& env, const OracleOptions& options = {});

/// Maps ν ≥ 0 to max{t ≥ ν : f(t) = f(ν)} for an even, coercive f sampled on [0, T].
class LevelSetIndex {
 public:
  template <class F>
  LevelSetIndex(F&& f, double window, int points = 20001);

  double outermost(double nu) const;

 private:
  std::function<double(double)> f_;
  std::vector<double> t_;
  std::vector<double> values_;
  std::vector<double> suffix_min_;
};

enum class LevelFunction { original, envelope };

/// Replaces every cell slope s by -max{nu >= 0 : W(nu) = W(|s|)} (W~ or its envelope) and
/// re-integrates from u(R) = 0. The result is nonincreasing and dominates |u|.
RadialProfile monotone_rearrange(const RadialProfile& profile, const EnvelopeResult& env, const Potential1D& W,
                                 LevelFunction level = LevelFunction::original);

struct PipelineOptions {
  int grid_cells = 512;
  GridKind grid_kind = GridKind::uniform;
  int envelope_points = 10001;
  SolveOptions solve;
  VerifyOptions verify;
  bool run_oracle = false;
  OracleOptions oracle;
};

struct PipelineReport {
  ValidationReport validation;
  EnvelopeResult envelope;
  SolveReport solve;
  /// The relaxed minimizer before rearrangement.
  RadialProfile minimizer{RadialGrid::uniform(1.0, 16), std::vector<double>(17, 0.0)};
  bool rearranged = false;
  VerifyReport verify_minimizer;
  VerifyReport verify;
  std::optional<OracleReport> oracle;
  std::vector<std::string> warnings;
  /// |E - E**| of the final profile within tolerance.
  bool energy_consistent = true;
  bool overall = true;
};

/// Relax, minimize, rearrange (when G is declared G2/G2strict), verify.
/// Hypothesis violations become warnings.
PipelineReport solve_pipeline(const ProblemSpec& spec, const PipelineOptions& options = {});

// ---------------------------------------------------------------------------

template <class F>
LevelSetIndex::LevelSetIndex(F&& f, double window, int points) : f_(std::forward<F>(f)) {
  t_.resize(static_cast<std::size_t>(points));
  values_.resize(t_.size());
  for (int i = 0; i < points; ++i) {
    t_[i] = window * i / (points - 1);
    values_[i] = f_(t_[i]);
  }
  suffix_min_ = values_;
  for (int i = points - 2; i >= 0; --i) suffix_min_[i] = std::min(suffix_min_[i], suffix_min_[i + 1]);
}

}  // namespace radsym
