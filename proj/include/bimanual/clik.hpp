#pragma once

#include "bimanual/task_space.hpp"

namespace bimanual {

/// Closed-loop inverse kinematics parameters.
struct ClikConfig {
  TaskVector gain{TaskVector::Constant(10.0)};  // K, 1/s
  double posture_gain = 0.0;                    // K_s, 1/s, null-space term
  double lambda = 1e-3;                         // damping engaged near singularities
  double dt = 0.002;
  int max_iterations = 200;                     // per-sample correction budget
  double tol_pos = 1e-4;                        // m
  double tol_rot = 1e-3;                        // rad

  void validate() const;
};

struct ClikStep {
  Eigen::VectorXd qdot;
  bool damped = false;
};

/// q̇ = J†(v_d + K e) + (I - J†J) K_s (q_demo - q_act). With a zero posture
/// gain this is the plain closed-loop law. Throws when J is singular and
/// cfg.lambda is zero.
ClikStep clik_step(const Eigen::MatrixXd& jacobian, const TaskVector& v_d, const TaskVector& e,
                   const Eigen::VectorXd& q_demo, const Eigen::VectorXd& q_act,
                   const ClikConfig& cfg);

struct JointTrajectory {
  double dt = 0.0;
  Eigen::MatrixXd q;     // samples x 2n
  Eigen::MatrixXd qdot;  // samples x 2n
  int sample_count() const { return static_cast<int>(q.rows()); }
};

struct ClikError : std::runtime_error {
  int sample;
  ClikError(const std::string& what, int sample_) : std::runtime_error(what), sample(sample_) {}
};

/// Forward-integrated joint reference tracking a time-indexed task reference.
/// q0 is converged onto the first reference before t = 0 when needed; samples
/// that stay outside tolerance after cfg.max_iterations corrections raise
/// ClikError with the offending index.
JointTrajectory solve_trajectory(const std::vector<TaskReference>& refs,
                                 const Eigen::VectorXd& q0, const RobotModel& robot1,
                                 const RobotModel& robot2, const ClikConfig& cfg,
                                 const Eigen::VectorXd& q_demo);

}  // namespace bimanual
