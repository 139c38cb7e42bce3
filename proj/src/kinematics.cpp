#include "bimanual/kinematics.hpp"

#include <Eigen/Geometry>
#include <Eigen/SVD>

#include <cmath>

namespace bimanual {

bool Pose::has_valid_rotation(double tol) const {
  const Eigen::Matrix3d err = R.transpose() * R - Eigen::Matrix3d::Identity();
  return err.cwiseAbs().maxCoeff() <= tol && std::abs(R.determinant() - 1.0) <= tol;
}

Pose Pose::compose(const Pose& other) const {
  Pose out;
  out.p = p + R * other.p;
  out.R = R * other.R;
  return out;
}

Eigen::VectorXd RobotModel::effective_q(const Eigen::VectorXd& q) const {
  if (q.size() != joint_count) {
    throw std::invalid_argument("effective_q: expected " + std::to_string(joint_count) +
                                " joint values, got " + std::to_string(q.size()));
  }
  Eigen::VectorXd out = q;
  for (const auto& [idx, angle] : locked_joints) out[idx] = angle;
  return out;
}

void RobotModel::validate() const {
  if (joint_count < 1) throw std::invalid_argument(name + ": joint_count must be >= 1");
  if (static_cast<int>(dh.size()) != joint_count)
    throw std::invalid_argument(name + ": dh rows do not match joint_count");
  if (static_cast<int>(link_inertial.size()) != joint_count)
    throw std::invalid_argument(name + ": link_inertial does not match joint_count");
  if (!joint_limits.empty() && static_cast<int>(joint_limits.size()) != joint_count)
    throw std::invalid_argument(name + ": joint_limits does not match joint_count");
  if (!base_pose.has_valid_rotation())
    throw std::invalid_argument(name + ": base_pose rotation is not orthonormal");
  if (!tcp_offset.has_valid_rotation())
    throw std::invalid_argument(name + ": tcp_offset rotation is not orthonormal");
  for (const auto& [idx, angle] : locked_joints) {
    (void)angle;
    if (idx < 0 || idx >= joint_count)
      throw std::invalid_argument(name + ": locked joint index out of range");
  }
  for (int i = 0; i < joint_count; ++i) {
    const Eigen::Matrix3d& in = link_inertial[i].inertia;
    if ((in - in.transpose()).cwiseAbs().maxCoeff() > 1e-9)
      throw std::invalid_argument(name + ": link inertia " + std::to_string(i) + " not symmetric");
    Eigen::SelfAdjointEigenSolver<Eigen::Matrix3d> es(in);
    if (es.eigenvalues().minCoeff() <= 0.0)
      throw std::invalid_argument(name + ": link inertia " + std::to_string(i) +
                                  " not positive definite");
  }
}

namespace {

Eigen::Matrix4d dh_transform(const DhRow& row, double q) {
  const double ct = std::cos(q + row.theta_offset);
  const double st = std::sin(q + row.theta_offset);
  const double ca = std::cos(row.alpha);
  const double sa = std::sin(row.alpha);
  Eigen::Matrix4d t;
  t << ct, -st * ca, st * sa, row.a * ct,
       st, ct * ca, -ct * sa, row.a * st,
       0.0, sa, ca, row.d,
       0.0, 0.0, 0.0, 1.0;
  return t;
}

}  // namespace

std::vector<Pose> link_frames(const RobotModel& model, const Eigen::VectorXd& q) {
  const Eigen::VectorXd qe = model.effective_q(q);
  std::vector<Pose> frames;
  frames.reserve(model.joint_count + 1);
  frames.push_back(model.base_pose);
  for (int i = 0; i < model.joint_count; ++i) {
    const Eigen::Matrix4d t = dh_transform(model.dh[i], qe[i]);
    Pose link;
    link.p = t.block<3, 1>(0, 3);
    link.R = t.block<3, 3>(0, 0);
    frames.push_back(frames.back().compose(link));
  }
  return frames;
}

Pose forward_kinematics(const RobotModel& model, const Eigen::VectorXd& q) {
  return link_frames(model, q).back().compose(model.tcp_offset);
}

Eigen::MatrixXd geometric_jacobian(const RobotModel& model, const Eigen::VectorXd& q) {
  const std::vector<Pose> frames = link_frames(model, q);
  const Eigen::Vector3d p_tcp = frames.back().compose(model.tcp_offset).p;
  Eigen::MatrixXd jac = Eigen::MatrixXd::Zero(6, model.joint_count);
  for (int i = 0; i < model.joint_count; ++i) {
    if (model.is_locked(i)) continue;  // held joints contribute no motion
    // joint i rotates about the z axis of frame i-1
    const Eigen::Vector3d z = frames[i].R.col(2);
    jac.block<3, 1>(0, i) = z.cross(p_tcp - frames[i].p);
    jac.block<3, 1>(3, i) = z;
  }
  return jac;
}

Eigen::Matrix3d skew(const Eigen::Vector3d& v) {
  Eigen::Matrix3d s;
  s << 0.0, -v.z(), v.y(),
       v.z(), 0.0, -v.x(),
       -v.y(), v.x(), 0.0;
  return s;
}

AxisAngle axis_angle_from_rotation(const Eigen::Matrix3d& R) {
  // Quaternion extraction is stable across the whole angle range, including
  // near pi where the direct trace/sine formulas degrade.
  Eigen::Quaterniond quat(R);
  if (quat.w() < 0.0) quat.coeffs() *= -1.0;  // keep angle in [0, pi]
  const double vec_norm = quat.vec().norm();
  AxisAngle out;
  if (vec_norm < 5e-10) return out;  // identity convention: ((0,0,1), 0)
  out.axis = quat.vec() / vec_norm;
  out.angle = 2.0 * std::atan2(vec_norm, quat.w());
  return out;
}

Eigen::Matrix3d rotation_about_axis(const Eigen::Vector3d& axis, double angle) {
  if (std::abs(axis.norm() - 1.0) > 1e-9)
    throw std::invalid_argument("rotation_about_axis: axis must be a unit vector");
  return Eigen::AngleAxisd(angle, axis).toRotationMatrix();
}

Eigen::MatrixXd damped_pseudo_inverse(const Eigen::MatrixXd& m, double lambda) {
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(m, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const Eigen::VectorXd& sv = svd.singularValues();
  Eigen::VectorXd inv_sv = Eigen::VectorXd::Zero(sv.size());
  if (lambda > 0.0) {
    const double l2 = lambda * lambda;
    for (int i = 0; i < sv.size(); ++i) inv_sv[i] = sv[i] / (sv[i] * sv[i] + l2);
  } else {
    const double tol =
        std::max(m.rows(), m.cols()) * std::numeric_limits<double>::epsilon() *
        (sv.size() > 0 ? sv[0] : 0.0);
    for (int i = 0; i < sv.size(); ++i)
      if (sv[i] > tol) inv_sv[i] = 1.0 / sv[i];
  }
  return svd.matrixV() * inv_sv.asDiagonal() * svd.matrixU().transpose();
}

Eigen::MatrixXd pseudo_inverse_auto(const Eigen::MatrixXd& m, bool* damped) {
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(m, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const Eigen::VectorXd& sv = svd.singularValues();
  const double sv_min = sv.size() > 0 ? sv[sv.size() - 1] : 0.0;
  const bool near_singular = sv_min < 1e-4;
  if (damped) *damped = near_singular;
  const double lambda = near_singular ? 1e-3 : 0.0;
  Eigen::VectorXd inv_sv = Eigen::VectorXd::Zero(sv.size());
  if (lambda > 0.0) {
    const double l2 = lambda * lambda;
    for (int i = 0; i < sv.size(); ++i) inv_sv[i] = sv[i] / (sv[i] * sv[i] + l2);
  } else {
    const double tol =
        std::max(m.rows(), m.cols()) * std::numeric_limits<double>::epsilon() * sv[0];
    for (int i = 0; i < sv.size(); ++i)
      if (sv[i] > tol) inv_sv[i] = 1.0 / sv[i];
  }
  return svd.matrixV() * inv_sv.asDiagonal() * svd.matrixU().transpose();
}

}  // namespace bimanual
