#pragma once

#include <cmath>
#include <numbers>
#include <random>

#include <Eigen/Core>

#include "ccik/cc_model.hpp"
#include "ccik/liegroup.hpp"

namespace ccik::testing {

inline constexpr double kPi = std::numbers::pi;

inline double uniform(std::mt19937_64& rng, double lo, double hi) {
  return std::uniform_real_distribution<double>(lo, hi)(rng);
}

inline Eigen::Vector3d random_vec3(std::mt19937_64& rng, double scale = 1.0) {
  return {uniform(rng, -scale, scale), uniform(rng, -scale, scale), uniform(rng, -scale, scale)};
}

/// Twist with |omega| uniform in [0, max_angle) and linear part in [-scale, scale]^3.
inline Twist random_twist(std::mt19937_64& rng, double max_angle, double scale = 2.0) {
  Eigen::Vector3d axis = random_vec3(rng);
  while (axis.norm() < 1e-3) axis = random_vec3(rng);
  return make_twist(axis.normalized() * uniform(rng, 0.0, max_angle), random_vec3(rng, scale));
}

inline Pose random_pose(std::mt19937_64& rng) { return exp_se3(random_twist(rng, kPi - 0.1)); }

inline ManipulatorState random_state(std::mt19937_64& rng, int n) {
  ManipulatorState s;
  for (int i = 0; i < n; ++i) {
    const double l = uniform(rng, 0.2, 2.0);
    s.segments.push_back({uniform(rng, -2 * kPi, 2 * kPi), uniform(rng, 0.0, 2 * kPi), l, l});
  }
  return s;
}

/// Dense matrix exponential by scaling and squaring of a truncated Taylor series.
inline Eigen::Matrix4d expm_oracle(const Eigen::Matrix4d& A) {
  int squarings = 0;
  double norm = A.cwiseAbs().rowwise().sum().maxCoeff();
  while (norm > 0.125) {
    norm *= 0.5;
    ++squarings;
  }
  const Eigen::Matrix4d B = A / std::ldexp(1.0, squarings);
  Eigen::Matrix4d term = Eigen::Matrix4d::Identity();
  Eigen::Matrix4d sum = Eigen::Matrix4d::Identity();
  for (int k = 1; k <= 20; ++k) {
    term = term * B / k;
    sum += term;
  }
  for (int i = 0; i < squarings; ++i) sum = sum * sum;
  return sum;
}

/// vee(dT T^-1) per unit step for a single-parameter central difference.
inline Twist fd_twist(const Pose& plus, const Pose& minus, double h) {
  const Eigen::Matrix4d dT = (plus.matrix() - minus.matrix()) / (2 * h);
  const Eigen::Matrix4d M = dT * (0.5 * (plus.matrix() + minus.matrix())).inverse();
  Twist V;
  V << M(2, 1), M(0, 2), M(1, 0), M(0, 3), M(1, 3), M(2, 3);
  return V;
}

inline double& parameter(ManipulatorState& s, const ParameterTag& tag) {
  auto& seg = s.segments[tag.segment];
  switch (tag.kind) {
    case Parameter::Curvature: return seg.kappa;
    case Parameter::Phi: return seg.phi;
    case Parameter::Length: return seg.length;
  }
  return seg.kappa;
}

/// Largest absolute deviation of any Jacobian column from the central difference of FK.
inline double max_fd_deviation(const ManipulatorState& state, const JacobianMatrix& J,
                               double h = 1e-6) {
  double worst = 0.0;
  for (Eigen::Index c = 0; c < J.entries.cols(); ++c) {
    ManipulatorState plus = state, minus = state;
    parameter(plus, J.columns[static_cast<std::size_t>(c)]) += h;
    parameter(minus, J.columns[static_cast<std::size_t>(c)]) -= h;
    const Twist fd = fd_twist(forward_kinematics(plus), forward_kinematics(minus), h);
    const Twist col = J.entries.col(c).head<6>();
    worst = std::max(worst, (col - fd).cwiseAbs().maxCoeff());
  }
  return worst;
}

inline ManipulatorState single(double kappa, double phi, double l) {
  return ManipulatorState{{{kappa, phi, l, l}}};
}

}  // namespace ccik::testing
