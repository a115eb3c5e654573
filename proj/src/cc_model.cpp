#include "ccik/cc_model.hpp"

#include <cmath>
#include <stdexcept>

namespace ccik {

namespace {

// Bending axis and axis-offset direction at phi = 0.
const Eigen::Vector3d kBendAxis = Eigen::Vector3d::UnitY();
const Eigen::Vector3d kOffsetDir = Eigen::Vector3d::UnitX();

// Below this bending angle the dexp coefficients are evaluated by Taylor series; the closed
// forms divide by up to theta^5.
constexpr double kSeriesAngle = 0.2;

struct DexpCoefficients {
  double c1, c2, c3, c4;
};

DexpCoefficients dexp_coefficients(double theta) {
  const double t2 = theta * theta;
  if (std::abs(theta) < kSeriesAngle) {
    const double t4 = t2 * t2;
    const double t6 = t4 * t2;
    const double t8 = t4 * t4;
    const double t10 = t8 * t2;
    const double t12 = t8 * t4;
    return {
        0.5 - t4 / 720.0 + t6 / 20160.0 - t8 / 1209600.0 + t10 / 119750400.0 -
            t12 / 17435658240.0,
        1.0 / 6.0 - t4 / 5040.0 + t6 / 181440.0 - t8 / 13305600.0 + t10 / 1556755200.0 -
            t12 / 261534873600.0,
        1.0 / 24.0 - t2 / 360.0 + t4 / 13440.0 - t6 / 907200.0 + t8 / 95800320.0 -
            t10 / 14529715200.0 + t12 / 2988969984000.0,
        1.0 / 120.0 - t2 / 2520.0 + t4 / 120960.0 - t6 / 9979200.0 + t8 / 1245404160.0 -
            t10 / 217945728000.0 + t12 / 50812489728000.0,
    };
  }
  const double s = std::sin(theta);
  const double c = std::cos(theta);
  const double t3 = t2 * theta;
  return {
      (4.0 - theta * s - 4.0 * c) / (2.0 * t2),
      (4.0 * theta - 5.0 * s + theta * c) / (2.0 * t3),
      (2.0 - theta * s - 2.0 * c) / (2.0 * t3 * theta),
      (2.0 * theta - 3.0 * s + theta * c) / (2.0 * t3 * t2),
  };
}

// (1 - cos t) / t^2 and (t - sin t) / t^2, finite through t = 0.
double one_minus_cos_over_sq(double t) {
  if (std::abs(t) < 1e-4) {
    return 0.5 - t * t / 24.0;
  }
  const double h = std::sin(0.5 * t);
  return 2.0 * h * h / (t * t);
}

double t_minus_sin_over_sq(double t) {
  if (std::abs(t) < kSeriesAngle) {
    const double t2 = t * t;
    return t / 6.0 * (1.0 - t2 / 20.0 * (1.0 - t2 / 42.0 * (1.0 - t2 / 72.0 * (1.0 - t2 / 110.0))));
  }
  return (t - std::sin(t)) / (t * t);
}

}  // namespace

void ManipulatorState::validate(std::size_t max_segments) const {
  if (segments.empty()) {
    throw std::invalid_argument("manipulator state has no segments");
  }
  if (segments.size() > max_segments) {
    throw std::invalid_argument("manipulator state has " + std::to_string(segments.size()) +
                                " segments, maximum is " + std::to_string(max_segments));
  }
  for (std::size_t i = 0; i < segments.size(); ++i) {
    const auto& s = segments[i];
    const bool finite = std::isfinite(s.kappa) && std::isfinite(s.phi) &&
                        std::isfinite(s.length) && std::isfinite(s.nominal_length) &&
                        std::isfinite(s.bending_angle());
    if (!finite) {
      throw std::invalid_argument("segment " + std::to_string(i) + " has non-finite parameters");
    }
    if (!(s.length > 0.0) || !(s.nominal_length > 0.0)) {
      throw std::invalid_argument("segment " + std::to_string(i) + " has non-positive length");
    }
  }
}

Eigen::VectorXd ManipulatorState::kappas() const {
  Eigen::VectorXd out(segments.size());
  for (std::size_t i = 0; i < segments.size(); ++i) out(i) = segments[i].kappa;
  return out;
}

Eigen::VectorXd ManipulatorState::phis() const {
  Eigen::VectorXd out(segments.size());
  for (std::size_t i = 0; i < segments.size(); ++i) out(i) = segments[i].phi;
  return out;
}

Eigen::VectorXd ManipulatorState::lengths() const {
  Eigen::VectorXd out(segments.size());
  for (std::size_t i = 0; i < segments.size(); ++i) out(i) = segments[i].length;
  return out;
}

Eigen::VectorXd ManipulatorState::nominal_lengths() const {
  Eigen::VectorXd out(segments.size());
  for (std::size_t i = 0; i < segments.size(); ++i) out(i) = segments[i].nominal_length;
  return out;
}

std::string to_string(const ParameterTag& tag) {
  const char* name = tag.kind == Parameter::Curvature ? "kappa"
                     : tag.kind == Parameter::Phi     ? "phi"
                                                      : "l";
  return std::string(name) + "_" + std::to_string(tag.segment + 1);
}

Eigen::Index JacobianMatrix::column_of(const ParameterTag& tag) const {
  for (std::size_t i = 0; i < columns.size(); ++i) {
    if (columns[i] == tag) return static_cast<Eigen::Index>(i);
  }
  return -1;
}

Eigen::Matrix3d plane_rotation(double phi) {
  const double c = std::cos(phi);
  const double s = std::sin(phi);
  Eigen::Matrix3d R;
  R << c, -s, 0.0,
       s, c, 0.0,
       0.0, 0.0, 1.0;
  return R;
}

Eigen::Matrix3d plane_rotation_derivative(double phi) {
  const double c = std::cos(phi);
  const double s = std::sin(phi);
  Eigen::Matrix3d dR;
  dR << -s, -c, 0.0,
        c, -s, 0.0,
        0.0, 0.0, 0.0;
  return dR;
}

double straight_threshold(const SegmentState& seg) { return 1e-9 / seg.length; }

Twist segment_twist(const SegmentState& seg) {
  const Eigen::Matrix3d R = plane_rotation(seg.phi);
  return seg.length *
         make_twist(seg.kappa * (R * kBendAxis), R * (skew3(kOffsetDir) * kBendAxis));
}

Pose segment_transform(const SegmentState& seg) { return exp_se3(segment_twist(seg)); }

Pose forward_kinematics(const ManipulatorState& state) {
  Pose T;
  for (const auto& seg : state.segments) {
    T = T * segment_transform(seg);
  }
  return T;
}

Twist partial_twist_kappa(const SegmentState& seg) {
  const Eigen::Matrix3d R = plane_rotation(seg.phi);
  const Eigen::Matrix3d W = skew3(kBendAxis);
  const Eigen::Vector3d Wq = W * kOffsetDir;
  const Eigen::Vector3d WWq = W * Wq;
  const double l2 = seg.length * seg.length;
  const Eigen::Vector3d omega = seg.length * (R * kBendAxis);
  if (std::abs(seg.kappa) <= straight_threshold(seg)) {
    return make_twist(omega, 0.5 * l2 * (R * WWq));
  }
  // kappa^-2 R (e^{t W} - t W - I) q, t = kappa l, written without dividing by kappa
  const double t = seg.bending_angle();
  const Eigen::Vector3d v = l2 * (R * (-t_minus_sin_over_sq(t) * Wq + one_minus_cos_over_sq(t) * WWq));
  return make_twist(omega, v);
}

Twist partial_twist_phi(const SegmentState& seg) {
  // d/dphi of segment_twist; the linear part does not depend on phi
  const Eigen::Vector3d dR_axis = plane_rotation_derivative(seg.phi) * kBendAxis;
  const Twist dV = seg.length * make_twist(seg.kappa * dR_axis, Eigen::Vector3d::Zero());

  const DexpCoefficients c = std::abs(seg.kappa) <= straight_threshold(seg)
                                 ? DexpCoefficients{0.5, 1.0 / 6.0, 1.0 / 24.0, 1.0 / 120.0}
                                 : dexp_coefficients(seg.bending_angle());
  const Matrix6d ad = ad_of_twist(segment_twist(seg));
  const Twist a1 = ad * dV;
  const Twist a2 = ad * a1;
  const Twist a3 = ad * a2;
  const Twist a4 = ad * a3;
  return dV + c.c1 * a1 + c.c2 * a2 + c.c3 * a3 + c.c4 * a4;
}

Twist partial_twist_length(const SegmentState& seg) { return segment_twist(seg) / seg.length; }

namespace {

enum class Layout { Interleaved, Grouped };

JacobianMatrix assemble(const ManipulatorState& state, bool with_length, Layout layout) {
  const std::size_t n = state.size();
  const std::size_t per = with_length ? 3 : 2;
  JacobianMatrix J;
  J.entries.resize(6, static_cast<Eigen::Index>(per * n));
  J.columns.resize(per * n);

  auto column_index = [&](std::size_t seg, std::size_t k) {
    return layout == Layout::Interleaved ? seg * per + k : k * n + seg;
  };
  constexpr Parameter kinds[] = {Parameter::Curvature, Parameter::Phi, Parameter::Length};

  Pose upstream;
  for (std::size_t i = 0; i < n; ++i) {
    const auto& seg = state.segments[i];
    const Matrix6d Ad = adjoint_of_pose(upstream);
    Twist partials[3] = {partial_twist_kappa(seg), partial_twist_phi(seg), Twist::Zero()};
    if (with_length) partials[2] = partial_twist_length(seg);
    for (std::size_t k = 0; k < per; ++k) {
      const auto col = column_index(i, k);
      J.entries.col(static_cast<Eigen::Index>(col)) = Ad * partials[k];
      J.columns[col] = {i, kinds[k]};
    }
    upstream = upstream * segment_transform(seg);
  }
  return J;
}

}  // namespace

JacobianMatrix jacobian_standard(const ManipulatorState& state) {
  return assemble(state, false, Layout::Interleaved);
}

JacobianMatrix jacobian_vvl(const ManipulatorState& state) {
  return assemble(state, true, Layout::Grouped);
}

JacobianMatrix jacobian_augmented(const ManipulatorState& state) {
  const JacobianMatrix top = jacobian_vvl(state);
  const auto n = static_cast<Eigen::Index>(state.size());
  JacobianMatrix J;
  J.columns = top.columns;
  J.constraint_rows = state.size();
  J.entries = Eigen::MatrixXd::Zero(6 + n, 3 * n);
  J.entries.topRows(6) = top.entries;
  J.entries.bottomRightCorner(n, n).setIdentity();
  return J;
}

std::vector<Eigen::Vector3d> centerline(const ManipulatorState& state,
                                        std::size_t samples_per_segment) {
  if (samples_per_segment < 2) {
    throw std::invalid_argument("centerline needs at least 2 samples per segment");
  }
  std::vector<Eigen::Vector3d> points;
  points.reserve(1 + state.size() * (samples_per_segment - 1));
  Pose base;
  points.push_back(base.p);
  const double last = static_cast<double>(samples_per_segment - 1);
  for (const auto& seg : state.segments) {
    const Twist V = segment_twist(seg);
    for (std::size_t s = 1; s + 1 < samples_per_segment; ++s) {
      points.push_back((base * exp_se3((static_cast<double>(s) / last) * V)).p);
    }
    base = base * exp_se3(V);
    points.push_back(base.p);
  }
  return points;
}

}  // namespace ccik
