#pragma once

#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Core>

#include "ccik/cc_model.hpp"
#include "ccik/liegroup.hpp"

namespace ccik {

enum class Method { Jacobian, Dls, Vvl };

std::string_view to_string(Method m);
/// Accepts "jacobian", "dls", "vvl" in any case.
std::optional<Method> parse_method(std::string_view text);

struct SolverOptions {
  Method method = Method::Jacobian;
  double beta = 0.5;
  double lambda = 0.01;
  double tol = 1e-4;
  int max_iter = 500;
  double vvl_initial_length_factor = 1.0 / 3.0;
  bool record_trajectory = false;
  /// Virtual lengths are clamped to at least this fraction of the nominal length.
  double length_floor_fraction = 0.05;

  /// Throws std::invalid_argument when a field is out of range.
  void validate() const;
};

enum class FailCause { None, MaxIter, Deadlock, LogBranch };

std::string_view to_string(FailCause c);
std::optional<FailCause> parse_fail_cause(std::string_view text);

struct TrajectoryPoint {
  int iteration = 0;
  ManipulatorState state;
  double error = 0.0;  // norm of the error twist at `state`
};

struct SolveResult {
  bool converged = false;
  int iterations = 0;
  /// Composite pose error at final_state; +inf when the error twist could not be formed.
  double final_error = 0.0;
  /// For VVL the lengths are restored to their nominal values.
  ManipulatorState final_state;
  /// Segment i is flagged if its bending angle reached 2 pi at any iterate.
  std::vector<bool> deadlock_flags;
  FailCause fail_cause = FailCause::None;
  std::vector<TrajectoryPoint> trajectory;

  bool any_deadlock() const;
};

/// log(target * current^-1), the spatial twist carrying `current` onto `target`.
/// Propagates LogBranchError.
Twist pose_error_twist(const Pose& current, const Pose& target);
double error_norm(const Twist& error);

/// beta * J^+ V_D over (kappa_1, phi_1, ..., kappa_n, phi_n).
Eigen::VectorXd step_jacobian(const ManipulatorState& state, const Pose& target,
                              const SolverOptions& opts);
/// beta * J^T (J J^T + lambda^2 I)^-1 V_D, same ordering as step_jacobian.
Eigen::VectorXd step_dls(const ManipulatorState& state, const Pose& target,
                         const SolverOptions& opts);
/// beta * J_a^+ [V_D; L - l] over (kappa_1..n, phi_1..n, l_1..n).
Eigen::VectorXd step_vvl(const ManipulatorState& state, const Pose& target,
                         const SolverOptions& opts);

/// Adds a step produced for `method` to `state`. VVL lengths are floored at
/// opts.length_floor_fraction * nominal.
ManipulatorState apply_step(const ManipulatorState& state, const Eigen::VectorXd& delta,
                            const SolverOptions& opts);

std::vector<bool> detect_deadlock(const ManipulatorState& state);

/// Straight rest pose; VVL starts with lengths scaled by opts.vvl_initial_length_factor.
ManipulatorState make_initial_guess(std::size_t n, std::span<const double> nominal_lengths,
                                    const SolverOptions& opts);

SolveResult solve(const ManipulatorState& initial, const Pose& target, const SolverOptions& opts);

}  // namespace ccik
