#pragma once

#include <stdexcept>

#include <Eigen/Core>
#include <Eigen/Geometry>

namespace ccik {

using Vector6d = Eigen::Matrix<double, 6, 1>;
using Matrix6d = Eigen::Matrix<double, 6, 6>;

/// Element of se(3) stored as [omega; v] (angular part first).
using Twist = Vector6d;

inline Eigen::Vector3d angular(const Twist& V) { return V.head<3>(); }
inline Eigen::Vector3d linear(const Twist& V) { return V.tail<3>(); }
inline Twist make_twist(const Eigen::Vector3d& omega, const Eigen::Vector3d& v) {
  Twist V;
  V << omega, v;
  return V;
}

/// Rigid transform. Rotation is kept orthonormal by construction paths in this library.
struct Pose {
  Eigen::Matrix3d R = Eigen::Matrix3d::Identity();
  Eigen::Vector3d p = Eigen::Vector3d::Zero();

  static Pose identity() { return {}; }
  static Pose from_matrix(const Eigen::Matrix4d& T);

  Eigen::Matrix4d matrix() const;
  Pose inverse() const { return {R.transpose(), -R.transpose() * p}; }
  Pose operator*(const Pose& other) const { return {R * other.R, R * other.p + p}; }
  Eigen::Vector3d operator*(const Eigen::Vector3d& x) const { return R * x + p; }
};

/// Raised by log_se3 when the rotation angle is within the branch margin of pi.
class LogBranchError : public std::domain_error {
 public:
  explicit LogBranchError(double angle);
  double angle() const { return angle_; }

 private:
  double angle_;
};

struct ScrewDecomposition {
  Eigen::Vector3d axis = Eigen::Vector3d::UnitZ();  // unit omega_e
  Eigen::Vector3d point = Eigen::Vector3d::Zero();  // q_e, closest point on the axis to the origin
  double pitch = 0.0;                               // h; +inf for pure translation
  double magnitude = 0.0;                           // theta_e
  bool pure_translation = false;
};

// Thresholds shared by exp/log.
inline constexpr double kSmallAngle = 1e-6;
inline constexpr double kPiMargin = 1e-6;
inline constexpr double kVeeTolerance = 1e-9;

Eigen::Matrix3d skew3(const Eigen::Vector3d& v);
Eigen::Vector3d unskew3(const Eigen::Matrix3d& S);

Eigen::Matrix4d twist_hat(const Twist& V);
/// Throws std::invalid_argument if M is not a twist matrix (within kVeeTolerance).
Twist twist_vee(const Eigen::Matrix4d& M);

Eigen::Matrix3d exp_so3(const Eigen::Vector3d& omega);
Pose exp_se3(const Twist& V);

/// Principal-branch logarithm. Throws LogBranchError when the rotation angle is within
/// kPiMargin of pi, where the axis is ambiguous.
Twist log_se3(const Pose& T);

Matrix6d adjoint_of_pose(const Pose& T);
Matrix6d ad_of_twist(const Twist& V);

/// Axis/point/pitch/magnitude form with V = magnitude * [axis; axis x point + pitch * axis].
/// Throws std::invalid_argument for the zero twist.
ScrewDecomposition screw_decompose(const Twist& V);
Twist screw_compose(const ScrewDecomposition& s);

/// Moore-Penrose inverse via SVD; singular values below 1e-10 * max(m, n) * sigma_max are
/// treated as zero.
Eigen::MatrixXd pseudo_inverse(const Eigen::Ref<const Eigen::MatrixXd>& M);

}  // namespace ccik
