#include "ccik/solvers.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

#include <Eigen/SVD>

namespace ccik {

namespace {

std::string lower(std::string_view text) {
  std::string out(text);
  std::transform(out.begin(), out.end(), out.begin(),
                 [](unsigned char ch) { return static_cast<char>(std::tolower(ch)); });
  return out;
}

Eigen::VectorXd length_residual(const ManipulatorState& state) {
  return state.nominal_lengths() - state.lengths();
}

ManipulatorState with_nominal_lengths(ManipulatorState state) {
  for (auto& seg : state.segments) seg.length = seg.nominal_length;
  return state;
}

Eigen::VectorXd jacobian_step(const ManipulatorState& state, const Twist& error, double beta) {
  return beta * (pseudo_inverse(jacobian_standard(state).entries) * error);
}

Eigen::VectorXd dls_step(const ManipulatorState& state, const Twist& error, double beta,
                         double lambda) {
  // J^T (J J^T + l^2 I)^-1 = V diag(s / (s^2 + l^2)) U^T
  const Eigen::MatrixXd J = jacobian_standard(state).entries;
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(J, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const auto& sigma = svd.singularValues();
  const double damping = lambda * lambda;
  Eigen::VectorXd gain(sigma.size());
  for (Eigen::Index i = 0; i < sigma.size(); ++i) {
    const double denom = sigma(i) * sigma(i) + damping;
    gain(i) = denom > 0.0 ? sigma(i) / denom : 0.0;
  }
  return beta * (svd.matrixV() * (gain.asDiagonal() * (svd.matrixU().transpose() * error)));
}

Eigen::VectorXd vvl_step(const ManipulatorState& state, const Twist& error, double beta) {
  const auto n = static_cast<Eigen::Index>(state.size());
  Eigen::VectorXd rhs(6 + n);
  rhs << error, length_residual(state);
  return beta * (pseudo_inverse(jacobian_augmented(state).entries) * rhs);
}

Eigen::VectorXd method_step(const ManipulatorState& state, const Twist& error,
                            const SolverOptions& opts) {
  switch (opts.method) {
    case Method::Jacobian:
      return jacobian_step(state, error, opts.beta);
    case Method::Dls:
      return dls_step(state, error, opts.beta, opts.lambda);
    case Method::Vvl:
      return vvl_step(state, error, opts.beta);
  }
  throw std::logic_error("unknown method");
}

}  // namespace

std::string_view to_string(Method m) {
  switch (m) {
    case Method::Jacobian: return "JACOBIAN";
    case Method::Dls: return "DLS";
    case Method::Vvl: return "VVL";
  }
  return "?";
}

std::optional<Method> parse_method(std::string_view text) {
  const auto t = lower(text);
  if (t == "jacobian") return Method::Jacobian;
  if (t == "dls") return Method::Dls;
  if (t == "vvl") return Method::Vvl;
  return std::nullopt;
}

std::string_view to_string(FailCause c) {
  switch (c) {
    case FailCause::None: return "none";
    case FailCause::MaxIter: return "max-iter";
    case FailCause::Deadlock: return "deadlock-flagged";
    case FailCause::LogBranch: return "log-branch";
  }
  return "?";
}

std::optional<FailCause> parse_fail_cause(std::string_view text) {
  for (auto c : {FailCause::None, FailCause::MaxIter, FailCause::Deadlock, FailCause::LogBranch}) {
    if (text == to_string(c)) return c;
  }
  return std::nullopt;
}

void SolverOptions::validate() const {
  auto fail = [](const std::string& what) { throw std::invalid_argument("solver options: " + what); };
  if (!(beta > 0.0) || !std::isfinite(beta)) fail("beta must be positive");
  if (!(lambda >= 0.0) || !std::isfinite(lambda)) fail("lambda must be non-negative");
  if (!(tol > 0.0)) fail("tol must be positive");
  if (max_iter < 1) fail("max_iter must be at least 1");
  if (method == Method::Vvl) {
    if (!(vvl_initial_length_factor > 0.0 && vvl_initial_length_factor <= 1.0)) {
      fail("vvl_initial_length_factor must lie in (0, 1]");
    }
    if (!(length_floor_fraction > 0.0 && length_floor_fraction < 1.0)) {
      fail("length_floor_fraction must lie in (0, 1)");
    }
  }
}

bool SolveResult::any_deadlock() const {
  return std::any_of(deadlock_flags.begin(), deadlock_flags.end(), [](bool f) { return f; });
}

Twist pose_error_twist(const Pose& current, const Pose& target) {
  return log_se3(target * current.inverse());
}

double error_norm(const Twist& error) { return error.norm(); }

Eigen::VectorXd step_jacobian(const ManipulatorState& state, const Pose& target,
                              const SolverOptions& opts) {
  return jacobian_step(state, pose_error_twist(forward_kinematics(state), target), opts.beta);
}

Eigen::VectorXd step_dls(const ManipulatorState& state, const Pose& target,
                         const SolverOptions& opts) {
  if (!(opts.lambda >= 0.0)) throw std::invalid_argument("step_dls: lambda must be non-negative");
  return dls_step(state, pose_error_twist(forward_kinematics(state), target), opts.beta,
                  opts.lambda);
}

Eigen::VectorXd step_vvl(const ManipulatorState& state, const Pose& target,
                         const SolverOptions& opts) {
  return vvl_step(state, pose_error_twist(forward_kinematics(state), target), opts.beta);
}

ManipulatorState apply_step(const ManipulatorState& state, const Eigen::VectorXd& delta,
                            const SolverOptions& opts) {
  const std::size_t n = state.size();
  ManipulatorState next = state;
  if (opts.method == Method::Vvl) {
    if (static_cast<std::size_t>(delta.size()) != 3 * n) {
      throw std::invalid_argument("apply_step: VVL step must have 3n entries");
    }
    for (std::size_t i = 0; i < n; ++i) {
      auto& seg = next.segments[i];
      seg.kappa += delta(static_cast<Eigen::Index>(i));
      seg.phi += delta(static_cast<Eigen::Index>(n + i));
      seg.length = std::max(seg.length + delta(static_cast<Eigen::Index>(2 * n + i)),
                            opts.length_floor_fraction * seg.nominal_length);
    }
    return next;
  }
  if (static_cast<std::size_t>(delta.size()) != 2 * n) {
    throw std::invalid_argument("apply_step: step must have 2n entries");
  }
  for (std::size_t i = 0; i < n; ++i) {
    next.segments[i].kappa += delta(static_cast<Eigen::Index>(2 * i));
    next.segments[i].phi += delta(static_cast<Eigen::Index>(2 * i + 1));
  }
  return next;
}

std::vector<bool> detect_deadlock(const ManipulatorState& state) {
  std::vector<bool> flags(state.size());
  for (std::size_t i = 0; i < state.size(); ++i) {
    flags[i] = std::abs(state.segments[i].bending_angle()) >= 2.0 * std::numbers::pi;
  }
  return flags;
}

ManipulatorState make_initial_guess(std::size_t n, std::span<const double> nominal_lengths,
                                    const SolverOptions& opts) {
  if (n == 0) throw std::invalid_argument("make_initial_guess: n must be at least 1");
  if (nominal_lengths.size() != n) {
    throw std::invalid_argument("make_initial_guess: expected one nominal length per segment");
  }
  const double factor = opts.method == Method::Vvl ? opts.vvl_initial_length_factor : 1.0;
  ManipulatorState state;
  state.segments.reserve(n);
  for (double L : nominal_lengths) {
    state.segments.push_back({0.0, 0.0, factor * L, L});
  }
  return state;
}

SolveResult solve(const ManipulatorState& initial, const Pose& target, const SolverOptions& opts) {
  opts.validate();
  initial.validate();

  const bool vvl = opts.method == Method::Vvl;
  SolveResult result;
  result.deadlock_flags = detect_deadlock(initial);
  ManipulatorState state = initial;

  int iter = 0;
  for (;; ++iter) {
    Twist error;
    try {
      error = pose_error_twist(forward_kinematics(state), target);
    } catch (const LogBranchError&) {
      result.fail_cause = FailCause::LogBranch;
      break;
    }
    const double e = error_norm(error);
    if (opts.record_trajectory) {
      result.trajectory.push_back({iter, state, e});
    }

    const double metric =
        vvl ? std::sqrt(e * e + length_residual(state).squaredNorm()) : e;
    if (metric <= opts.tol) {
      if (!vvl) {
        result.converged = true;
        result.final_error = e;
        break;
      }
      // terminate only if the pose still holds once the lengths snap back
      const ManipulatorState snapped = with_nominal_lengths(state);
      try {
        const double e_nominal =
            error_norm(pose_error_twist(forward_kinematics(snapped), target));
        if (e_nominal <= opts.tol) {
          result.converged = true;
          result.final_error = e_nominal;
          state = snapped;
          break;
        }
      } catch (const LogBranchError&) {
      }
    }
    if (iter == opts.max_iter) {
      result.fail_cause = FailCause::MaxIter;
      break;
    }

    state = apply_step(state, method_step(state, error, opts), opts);
    const auto flags = detect_deadlock(state);
    for (std::size_t i = 0; i < flags.size(); ++i) {
      if (flags[i]) result.deadlock_flags[i] = true;
    }
  }

  result.iterations = iter;
  if (!result.converged) {
    if (vvl) state = with_nominal_lengths(state);
    try {
      result.final_error = error_norm(pose_error_twist(forward_kinematics(state), target));
    } catch (const LogBranchError&) {
      result.final_error = std::numeric_limits<double>::infinity();
    }
    if (result.fail_cause == FailCause::MaxIter && result.any_deadlock()) {
      result.fail_cause = FailCause::Deadlock;
    }
  }
  result.final_state = std::move(state);
  return result;
}

}  // namespace ccik
