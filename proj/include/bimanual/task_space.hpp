#pragma once

#include "bimanual/kinematics.hpp"

namespace bimanual {

/// Stacked bimanual task quantity, 12 entries in the fixed order
/// [absolute linear(3), absolute angular(3), relative linear(3), relative angular(3)].
/// Errors, velocities and gain diagonals all share this ordering.
using TaskVector = Eigen::Matrix<double, 12, 1>;

inline constexpr int kTaskAbsLinear = 0;
inline constexpr int kTaskAbsAngular = 3;
inline constexpr int kTaskRelLinear = 6;
inline constexpr int kTaskRelAngular = 9;
inline constexpr int kTaskDim = 12;

/// Absolute/relative coordinates of a two-arm system in one configuration.
struct TaskCoordinates {
  Eigen::Vector3d p_abs;     // world
  Eigen::Matrix3d R_abs;     // world
  Eigen::Vector3d p_rel;     // world, p2 - p1
  Eigen::Matrix3d R_rel;     // frame 1 (R1ᵀ R2)
  Eigen::Vector3d p_rel_abs; // absolute frame; p_rel = R_abs * p_rel_abs
};

/// Desired task pose and velocity at one instant.
struct TaskReference {
  Eigen::Vector3d p_absd{Eigen::Vector3d::Zero()};        // world
  Eigen::Matrix3d R_absd{Eigen::Matrix3d::Identity()};    // world
  Eigen::Vector3d p_reld_abs{Eigen::Vector3d::Zero()};    // absolute frame
  Eigen::Matrix3d R_reld{Eigen::Matrix3d::Identity()};    // frame 1
  Eigen::Vector3d pd_absd{Eigen::Vector3d::Zero()};       // world
  Eigen::Vector3d w_absd{Eigen::Vector3d::Zero()};        // world
  Eigen::Vector3d pd_reld_abs{Eigen::Vector3d::Zero()};   // absolute frame
  Eigen::Vector3d w_reld{Eigen::Vector3d::Zero()};        // frame 1
};

/// Midpoint position and half-rotation orientation of two TCP poses.
std::pair<Eigen::Vector3d, Eigen::Matrix3d> absolute_pose(const Pose& pose1,
                                                          const Pose& pose2);

/// Relative position (world) and relative rotation (frame 1).
std::pair<Eigen::Vector3d, Eigen::Matrix3d> relative_pose(const Pose& pose1,
                                                          const Pose& pose2);

/// Full coordinate set from the two TCP poses.
TaskCoordinates make_task_coordinates(const Pose& tcp1, const Pose& tcp2);

/// 12 x 2n stacked Jacobian: rows 1-6 [½J1 ½J2], rows 7-12 [-J1 J2].
Eigen::MatrixXd bimanual_jacobian(const Eigen::MatrixXd& j1, const Eigen::MatrixXd& j2);

/// Task-space pose errors. R1 is the rotation of robot 1's TCP in the world,
/// used to express the relative angular error in world coordinates.
TaskVector task_errors(const TaskCoordinates& state, const Eigen::Matrix3d& R1,
                       const TaskReference& ref);

/// Desired task velocities; the relative linear rows carry the transport term
/// S(omega_abs) R_abs p_reld_abs of the rotating absolute frame.
TaskVector desired_velocities(const TaskReference& ref, const Eigen::Matrix3d& R_abs,
                              const Eigen::Vector3d& omega_abs);

}  // namespace bimanual
