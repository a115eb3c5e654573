#pragma once

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "ccik/bench.hpp"
#include "ccik/cc_model.hpp"
#include "ccik/solvers.hpp"

namespace ccik::cli {

enum class Command { Solve, Demo, Bench, Workspace };

inline constexpr int kExitOk = 0;
inline constexpr int kExitBadInput = 2;
inline constexpr int kExitIo = 3;

struct RunConfig {
  Command command = Command::Solve;
  std::filesystem::path input;  // solve target file
  std::filesystem::path out_dir = ".";
  bool write_trajectory = false;
  SolverOptions solver;
  /// Defaults to the desk-scale grid (limit 500, tolerance 1e-4).
  bench::BenchmarkSpec spec = bench::BenchmarkSpec::desk_scale();
  int workspace_samples = 1000;
  unsigned workers = 0;  // 0: CC_IK_THREADS or hardware concurrency
  /// Set once method, tol or max-iter has been given more than one value.
  bool list_valued = false;

  /// Applies one `key = value` setting. Keys match the long flag names without dashes
  /// (method, beta, lambda, tol, max-iter, segments, trials, theta-max, seed, vvl-factor,
  /// out-dir, trajectory, samples, input). List-valued keys take comma-separated values
  /// and `a..b` ranges. Throws std::invalid_argument.
  void apply_setting(std::string_view key, std::string_view value);

  /// Throws std::invalid_argument.
  void validate() const;
};

/// Four-segment demo target, unit lengths.
ManipulatorState demo_target();
/// Target configuration rotated by pi about each segment's base axis with half the curvature.
ManipulatorState demo_adverse_start();

struct DemoRun {
  std::string name;
  Method method = Method::Jacobian;
  SolveResult result;
};

/// Rest/JACOBIAN, adverse/JACOBIAN and rest/VVL runs at tolerance 1e-8, 500 iterations.
/// Method, tol and max_iter in `base` are ignored.
std::vector<DemoRun> run_demo(const SolverOptions& base);

int cmd_solve(const RunConfig& config, std::ostream& out, std::ostream& err);
int cmd_demo(const RunConfig& config, std::ostream& out, std::ostream& err);
int cmd_bench(const RunConfig& config, std::ostream& out, std::ostream& err);
int cmd_workspace(const RunConfig& config, std::ostream& out, std::ostream& err);

/// Full command-line entry point.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace ccik::cli
