#pragma once

#include <cstdint>
#include <numbers>
#include <optional>
#include <utility>
#include <vector>

#include "ccik/cc_model.hpp"
#include "ccik/solvers.hpp"

namespace ccik::bench {

/// Randomised IK experiment grid. Every (method, n, limit, tolerance) cell runs
/// `trials_per_config` trials; trial k at segment count n uses the same target for all
/// methods, limits and tolerances.
struct BenchmarkSpec {
  std::vector<int> segment_counts{2, 3, 4, 5, 6, 7};
  int trials_per_config = 1000;
  std::vector<int> iteration_limits{30, 60, 100, 160, 500};
  std::vector<double> tolerances{1e-4, 1e-6, 1e-8};
  std::vector<Method> methods{Method::Jacobian, Method::Vvl, Method::Dls};
  double theta_max = std::numbers::pi;  // per-segment bending angle range [0, theta_max]
  double phi_min = 0.0;
  double phi_max = 2.0 * std::numbers::pi;
  std::uint64_t master_seed = 1;
  double nominal_length = 1.0;
  /// Method, tol, max_iter and record_trajectory are overridden per cell.
  SolverOptions solver;

  /// Single limit (500) and tolerance (1e-4), 1000 trials per cell.
  static BenchmarkSpec desk_scale();

  /// Throws std::invalid_argument if a set is empty or a range is invalid.
  void validate() const;
  std::size_t cell_count() const;
  std::size_t trial_count() const { return cell_count() * static_cast<std::size_t>(trials_per_config); }
};

struct TrialRecord {
  std::uint64_t trial_id = 0;  // position in canonical order
  int trial_index = 0;         // index within its cell
  Method method = Method::Jacobian;
  int n_segments = 0;
  int iter_limit = 0;
  double tolerance = 0.0;
  std::uint64_t seed = 0;  // target seed, shared across methods/limits/tolerances
  std::vector<double> target_kappa;
  std::vector<double> target_phi;
  Eigen::Vector3d target_tip = Eigen::Vector3d::Zero();
  bool converged = false;
  int iterations = 0;
  double final_error = 0.0;
  bool deadlock_any = false;
  FailCause fail_cause = FailCause::None;
  std::int64_t wall_time_us = 0;
};

struct SummaryCell {
  Method method = Method::Jacobian;
  int n_segments = 0;
  int iter_limit = 0;
  double tolerance = 0.0;
  int trial_count = 0;
  int converged_count = 0;
  double success_rate = 0.0;
  std::optional<double> mean_iter_converged;
  /// Mean iterations over trials on which every method in the record set converged.
  std::optional<double> mean_iter_paired;
  double deadlock_rate = 0.0;
  bool empty = false;
};

struct BenchmarkSummary {
  std::vector<SummaryCell> cells;

  const SummaryCell* find(Method m, int n, int limit, double tol) const;
};

/// 64-bit mix of a word sequence (splitmix64 finaliser chained over the inputs).
std::uint64_t hash_words(std::initializer_list<std::uint64_t> words);
std::uint64_t target_seed(std::uint64_t master_seed, int n, int trial_index);
std::uint64_t trial_seed(std::uint64_t master_seed, Method m, int n, int limit, double tol,
                         int trial_index);

struct Target {
  ManipulatorState configuration;
  Pose pose;
};

/// Bending angle theta_i ~ U[0, theta_max] (kappa_i = theta_i / L) and phi_i ~ U[phi_min, phi_max).
Target sample_target(std::uint64_t seed, int n, const BenchmarkSpec& spec);

TrialRecord run_trial(const BenchmarkSpec& spec, Method method, int n, int limit, double tol,
                      int trial_index);

/// Worker count from CC_IK_THREADS, else hardware concurrency (at least 1).
unsigned default_workers();

/// All cells in canonical order (method, n, limit, tolerance, trial index), independent of
/// `workers`.
std::vector<TrialRecord> run_suite(const BenchmarkSpec& spec, unsigned workers = 0);

/// Throws std::invalid_argument for an empty record list.
BenchmarkSummary aggregate(const std::vector<TrialRecord>& records);
/// Like aggregate(records) but lists every cell of `spec`, marking cells without records empty.
BenchmarkSummary aggregate(const std::vector<TrialRecord>& records, const BenchmarkSpec& spec);

/// Mean iterations of `method` over trials in the (n, limit, tol) cell where every method in
/// `compared` converged. Empty if there are no such trials.
std::optional<double> paired_mean_iterations(const std::vector<TrialRecord>& records,
                                             Method method, const std::vector<Method>& compared,
                                             int n, int limit, double tol);

struct WorkspacePoint {
  Eigen::Vector3d tip;
  ManipulatorState configuration;
};

std::vector<WorkspacePoint> sample_workspace(std::uint64_t seed, int n, int count,
                                             const BenchmarkSpec& spec);

}  // namespace ccik::bench
