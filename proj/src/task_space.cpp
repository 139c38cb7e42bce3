#include "bimanual/task_space.hpp"

namespace bimanual {

std::pair<Eigen::Vector3d, Eigen::Matrix3d> absolute_pose(const Pose& pose1,
                                                          const Pose& pose2) {
  const Eigen::Vector3d p_abs = 0.5 * (pose1.p + pose2.p);
  const AxisAngle aa = axis_angle_from_rotation(pose1.R.transpose() * pose2.R);
  const Eigen::Matrix3d R_abs = pose1.R * rotation_about_axis(aa.axis, 0.5 * aa.angle);
  return {p_abs, R_abs};
}

std::pair<Eigen::Vector3d, Eigen::Matrix3d> relative_pose(const Pose& pose1,
                                                          const Pose& pose2) {
  return {pose2.p - pose1.p, pose1.R.transpose() * pose2.R};
}

TaskCoordinates make_task_coordinates(const Pose& tcp1, const Pose& tcp2) {
  TaskCoordinates out;
  std::tie(out.p_abs, out.R_abs) = absolute_pose(tcp1, tcp2);
  std::tie(out.p_rel, out.R_rel) = relative_pose(tcp1, tcp2);
  out.p_rel_abs = out.R_abs.transpose() * out.p_rel;
  return out;
}

Eigen::MatrixXd bimanual_jacobian(const Eigen::MatrixXd& j1, const Eigen::MatrixXd& j2) {
  if (j1.rows() != 6 || j2.rows() != 6 || j1.cols() != j2.cols())
    throw std::invalid_argument("bimanual_jacobian: expected two 6 x n Jacobians");
  const Eigen::Index n = j1.cols();
  Eigen::MatrixXd j(kTaskDim, 2 * n);
  j.block(0, 0, 6, n) = 0.5 * j1;
  j.block(0, n, 6, n) = 0.5 * j2;
  j.block(6, 0, 6, n) = -j1;
  j.block(6, n, 6, n) = j2;
  return j;
}

namespace {

// ½ Σ S(column_i(R)) column_i(R_d): zero exactly when R = R_d.
Eigen::Vector3d orientation_error(const Eigen::Matrix3d& R, const Eigen::Matrix3d& Rd) {
  Eigen::Vector3d e = Eigen::Vector3d::Zero();
  for (int c = 0; c < 3; ++c) e += R.col(c).cross(Rd.col(c));
  return 0.5 * e;
}

}  // namespace

TaskVector task_errors(const TaskCoordinates& state, const Eigen::Matrix3d& R1,
                       const TaskReference& ref) {
  TaskVector e;
  e.segment<3>(kTaskAbsLinear) = ref.p_absd - state.p_abs;
  e.segment<3>(kTaskAbsAngular) = orientation_error(state.R_abs, ref.R_absd);
  e.segment<3>(kTaskRelLinear) = state.R_abs * ref.p_reld_abs - state.p_rel;
  // relative angular error lives in frame 1; rotate into the world
  e.segment<3>(kTaskRelAngular) = R1 * orientation_error(state.R_rel, ref.R_reld);
  return e;
}

TaskVector desired_velocities(const TaskReference& ref, const Eigen::Matrix3d& R_abs,
                              const Eigen::Vector3d& omega_abs) {
  TaskVector v;
  v.segment<3>(kTaskAbsLinear) = ref.pd_absd;
  v.segment<3>(kTaskAbsAngular) = ref.w_absd;
  v.segment<3>(kTaskRelLinear) =
      R_abs * ref.pd_reld_abs + omega_abs.cross(R_abs * ref.p_reld_abs);
  v.segment<3>(kTaskRelAngular) = ref.w_reld;
  return v;
}

}  // namespace bimanual
