#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "ccik/liegroup.hpp"

namespace ccik {

inline constexpr std::size_t kDefaultMaxSegments = 16;

/// One constant-curvature segment. `length` is the current (possibly virtual) arc length,
/// `nominal_length` the physical one.
struct SegmentState {
  double kappa = 0.0;
  double phi = 0.0;
  double length = 1.0;
  double nominal_length = 1.0;

  double bending_angle() const { return kappa * length; }
  bool operator==(const SegmentState&) const = default;
};

/// Ordered base-to-tip list of segments.
struct ManipulatorState {
  std::vector<SegmentState> segments;

  std::size_t size() const { return segments.size(); }
  bool operator==(const ManipulatorState&) const = default;

  /// Throws std::invalid_argument on an empty list, more than `max_segments` entries,
  /// non-positive lengths or non-finite parameters.
  void validate(std::size_t max_segments = kDefaultMaxSegments) const;

  Eigen::VectorXd kappas() const;
  Eigen::VectorXd phis() const;
  Eigen::VectorXd lengths() const;
  Eigen::VectorXd nominal_lengths() const;
};

enum class Parameter { Curvature, Phi, Length };

struct ParameterTag {
  std::size_t segment = 0;
  Parameter kind = Parameter::Curvature;
  bool operator==(const ParameterTag&) const = default;
};

std::string to_string(const ParameterTag& tag);

struct JacobianMatrix {
  Eigen::MatrixXd entries;
  std::vector<ParameterTag> columns;
  /// Number of trailing length-constraint rows (augmented form only).
  std::size_t constraint_rows = 0;

  /// Index of the column carrying `tag`, or -1.
  Eigen::Index column_of(const ParameterTag& tag) const;
};

/// Rotation about z by phi.
Eigen::Matrix3d plane_rotation(double phi);
Eigen::Matrix3d plane_rotation_derivative(double phi);

/// Curvature magnitude below which a segment is treated as straight: 1e-9 / length.
double straight_threshold(const SegmentState& seg);

Twist segment_twist(const SegmentState& seg);
Pose segment_transform(const SegmentState& seg);
Pose forward_kinematics(const ManipulatorState& state);

/// Right-trivialised partial derivatives of exp(hat(segment_twist)) with respect to
/// kappa, phi and length: (d/dx e^V) e^-V expressed as twists.
Twist partial_twist_kappa(const SegmentState& seg);
Twist partial_twist_phi(const SegmentState& seg);
Twist partial_twist_length(const SegmentState& seg);

/// 6 x 2n, columns (kappa_1, phi_1, ..., kappa_n, phi_n).
JacobianMatrix jacobian_standard(const ManipulatorState& state);
/// 6 x 3n, columns grouped (kappa_1..n | phi_1..n | length_1..n).
JacobianMatrix jacobian_vvl(const ManipulatorState& state);
/// (6 + n) x 3n: jacobian_vvl stacked over [0 | I_n] selecting the length columns.
JacobianMatrix jacobian_augmented(const ManipulatorState& state);

/// Base-to-tip backbone polyline with `samples_per_segment` points per segment (shared
/// endpoints counted once). Throws std::invalid_argument if samples_per_segment < 2.
std::vector<Eigen::Vector3d> centerline(const ManipulatorState& state,
                                        std::size_t samples_per_segment);

}  // namespace ccik
