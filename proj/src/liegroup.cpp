#include "ccik/liegroup.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>

#include <Eigen/SVD>

namespace ccik {

LogBranchError::LogBranchError(double angle)
    : std::domain_error("log_se3: rotation angle " + std::to_string(angle) +
                        " is within the branch margin of pi"),
      angle_(angle) {}

Pose Pose::from_matrix(const Eigen::Matrix4d& T) {
  return {T.topLeftCorner<3, 3>(), T.topRightCorner<3, 1>()};
}

Eigen::Matrix4d Pose::matrix() const {
  Eigen::Matrix4d T = Eigen::Matrix4d::Identity();
  T.topLeftCorner<3, 3>() = R;
  T.topRightCorner<3, 1>() = p;
  return T;
}

Eigen::Matrix3d skew3(const Eigen::Vector3d& v) {
  Eigen::Matrix3d S;
  S << 0.0, -v.z(), v.y(),
       v.z(), 0.0, -v.x(),
       -v.y(), v.x(), 0.0;
  return S;
}

Eigen::Vector3d unskew3(const Eigen::Matrix3d& S) { return {S(2, 1), S(0, 2), S(1, 0)}; }

Eigen::Matrix4d twist_hat(const Twist& V) {
  Eigen::Matrix4d M = Eigen::Matrix4d::Zero();
  M.topLeftCorner<3, 3>() = skew3(angular(V));
  M.topRightCorner<3, 1>() = linear(V);
  return M;
}

Twist twist_vee(const Eigen::Matrix4d& M) {
  const Eigen::Matrix3d W = M.topLeftCorner<3, 3>();
  if (!(W + W.transpose()).isZero(kVeeTolerance) || !M.row(3).isZero(kVeeTolerance)) {
    throw std::invalid_argument("twist_vee: matrix is not an element of se(3)");
  }
  // average the redundant entries so near-antisymmetric input maps to its projection
  const Eigen::Vector3d omega = 0.5 * unskew3(W - W.transpose());
  return make_twist(omega, M.topRightCorner<3, 1>());
}

namespace {

struct ExpCoefficients {
  double a;  // sin t / t
  double b;  // (1 - cos t) / t^2
  double c;  // (t - sin t) / t^3
};

ExpCoefficients exp_coefficients(double theta) {
  const double t2 = theta * theta;
  if (theta < kSmallAngle) {
    return {1.0 - t2 / 6.0 + t2 * t2 / 120.0 - t2 * t2 * t2 / 5040.0,
            0.5 - t2 / 24.0 + t2 * t2 / 720.0 - t2 * t2 * t2 / 40320.0,
            1.0 / 6.0 - t2 / 120.0 + t2 * t2 / 5040.0 - t2 * t2 * t2 / 362880.0};
  }
  const double s = std::sin(theta);
  const double half = std::sin(0.5 * theta);
  return {s / theta, 2.0 * half * half / t2, (theta - s) / (t2 * theta)};
}

}  // namespace

Eigen::Matrix3d exp_so3(const Eigen::Vector3d& omega) {
  const auto k = exp_coefficients(omega.norm());
  const Eigen::Matrix3d W = skew3(omega);
  return Eigen::Matrix3d::Identity() + k.a * W + k.b * W * W;
}

Pose exp_se3(const Twist& V) {
  const Eigen::Vector3d omega = angular(V);
  const auto k = exp_coefficients(omega.norm());
  const Eigen::Matrix3d W = skew3(omega);
  const Eigen::Matrix3d W2 = W * W;
  Pose T;
  T.R = Eigen::Matrix3d::Identity() + k.a * W + k.b * W2;
  T.p = (Eigen::Matrix3d::Identity() + k.b * W + k.c * W2) * linear(V);
  return T;
}

namespace {

// Rotation vector of R. Uses the antisymmetric part away from pi and the symmetric part
// near pi, where sin(theta) loses precision.
Eigen::Vector3d log_so3(const Eigen::Matrix3d& R, double& theta) {
  const Eigen::Vector3d axis2s = unskew3(R - R.transpose());  // 2 sin(theta) * axis
  const double s = 0.5 * axis2s.norm();
  const double c = std::clamp(0.5 * (R.trace() - 1.0), -1.0, 1.0);
  theta = std::atan2(s, c);
  if (std::numbers::pi - theta < kPiMargin) {
    throw LogBranchError(theta);
  }
  if (theta < kSmallAngle) {
    return 0.5 * (1.0 + theta * theta / 6.0) * axis2s;
  }
  if (theta < 0.5 * std::numbers::pi) {
    return (theta / (2.0 * s)) * axis2s;
  }
  // (R + R^T)/2 - cI = (1 - c) a a^T
  const Eigen::Matrix3d B = 0.5 * (R + R.transpose()) - c * Eigen::Matrix3d::Identity();
  Eigen::Index k = 0;
  B.diagonal().maxCoeff(&k);
  Eigen::Vector3d a = B.col(k) / std::sqrt(B(k, k) * (1.0 - c));
  a.normalize();
  if (a.dot(axis2s) < 0.0) {
    a = -a;
  }
  return theta * a;
}

}  // namespace

Twist log_se3(const Pose& T) {
  double theta = 0.0;
  const Eigen::Vector3d omega = log_so3(T.R, theta);
  const Eigen::Matrix3d W = skew3(omega);
  double d = 0.0;
  if (theta < 1e-3) {
    const double t2 = theta * theta;
    d = 1.0 / 12.0 + t2 / 720.0 + t2 * t2 / 30240.0;
  } else {
    const double half = 0.5 * theta;
    // 1/t^2 * (1 - t sin t / (2 (1 - cos t)))
    d = (1.0 - half / std::tan(half)) / (theta * theta);
  }
  const Eigen::Matrix3d Vinv = Eigen::Matrix3d::Identity() - 0.5 * W + d * W * W;
  return make_twist(omega, Vinv * T.p);
}

Matrix6d adjoint_of_pose(const Pose& T) {
  Matrix6d Ad = Matrix6d::Zero();
  Ad.topLeftCorner<3, 3>() = T.R;
  Ad.bottomLeftCorner<3, 3>() = skew3(T.p) * T.R;
  Ad.bottomRightCorner<3, 3>() = T.R;
  return Ad;
}

Matrix6d ad_of_twist(const Twist& V) {
  Matrix6d ad = Matrix6d::Zero();
  const Eigen::Matrix3d W = skew3(angular(V));
  ad.topLeftCorner<3, 3>() = W;
  ad.bottomLeftCorner<3, 3>() = skew3(linear(V));
  ad.bottomRightCorner<3, 3>() = W;
  return ad;
}

ScrewDecomposition screw_decompose(const Twist& V) {
  const Eigen::Vector3d omega = angular(V);
  const Eigen::Vector3d v = linear(V);
  const double wn = omega.norm();
  ScrewDecomposition s;
  if (wn <= 1e-12 * std::max(1.0, v.norm())) {
    const double vn = v.norm();
    if (vn == 0.0) {
      throw std::invalid_argument("screw_decompose: zero twist has no screw axis");
    }
    s.axis = v / vn;
    s.point.setZero();
    s.pitch = std::numeric_limits<double>::infinity();
    s.magnitude = vn;
    s.pure_translation = true;
    return s;
  }
  s.axis = omega / wn;
  s.magnitude = wn;
  const Eigen::Vector3d u = v / wn;  // axis x point + pitch * axis
  s.pitch = s.axis.dot(u);
  s.point = u.cross(s.axis);
  return s;
}

Twist screw_compose(const ScrewDecomposition& s) {
  if (s.pure_translation) {
    return make_twist(Eigen::Vector3d::Zero(), s.magnitude * s.axis);
  }
  return s.magnitude * make_twist(s.axis, s.axis.cross(s.point) + s.pitch * s.axis);
}

Eigen::MatrixXd pseudo_inverse(const Eigen::Ref<const Eigen::MatrixXd>& M) {
  if (M.size() == 0) {
    return Eigen::MatrixXd::Zero(M.cols(), M.rows());
  }
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(M, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const auto& sigma = svd.singularValues();
  const double cutoff =
      1e-10 * static_cast<double>(std::max(M.rows(), M.cols())) * (sigma.size() ? sigma(0) : 0.0);
  Eigen::VectorXd inv = Eigen::VectorXd::Zero(sigma.size());
  for (Eigen::Index i = 0; i < sigma.size(); ++i) {
    if (sigma(i) > cutoff && sigma(i) > 0.0) {
      inv(i) = 1.0 / sigma(i);
    }
  }
  return svd.matrixV() * inv.asDiagonal() * svd.matrixU().transpose();
}

}  // namespace ccik
