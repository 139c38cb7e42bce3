#pragma once

#include <Eigen/Dense>

#include <filesystem>
#include <stdexcept>

namespace bimanual {

/// Exponential phase x = exp(-alpha_x t / tau); x(0) = 1, decays toward 0.
double phase(double t, double tau, double alpha_x);

/// Kernel centers placed at the phase values of uniformly spaced times,
/// c_i = exp(-alpha_x i / (n-1)): strictly decreasing on (0, 1].
Eigen::VectorXd rbf_centers(int n, double alpha_x);

/// Widths chosen so adjacent kernels overlap at roughly 0.7 activation.
Eigen::VectorXd rbf_widths(const Eigen::VectorXd& centers);

/// Discrete dynamic movement primitive for one or more joints sharing the
/// same phase, goals/weights per joint.
struct Dmp {
  double tau = 1.0;
  double alpha_z = 48.0;
  double beta_z = 12.0;   // alpha_z / 4, critical damping
  double alpha_x = 2.0;
  Eigen::VectorXd centers;   // shared, on phase
  Eigen::VectorXd widths;
  Eigen::VectorXd y0;        // per joint
  Eigen::VectorXd goal;
  Eigen::MatrixXd weights;   // joints x kernels

  int dof_count() const { return static_cast<int>(y0.size()); }
  int kernel_count() const { return static_cast<int>(centers.size()); }
  void validate() const;
};

struct DmpTrajectory {
  double dt = 0.0;
  Eigen::MatrixXd y;     // samples x joints
  Eigen::MatrixXd yd;
  Eigen::MatrixXd ydd;
  Eigen::VectorXd x;     // phase per sample
  int sample_count() const { return static_cast<int>(y.rows()); }
};

/// Least-squares fit of the DMP forcing term to uniformly sampled joint
/// positions (samples x joints, spacing dt). Velocities and accelerations
/// come from central finite differences.
Dmp encode_dmp(const Eigen::MatrixXd& samples, double dt, int kernel_count,
               double alpha_z = 48.0, double alpha_x = 2.0);

/// Euler integration at dt over the given duration (default: tau).
DmpTrajectory integrate_dmp(const Dmp& dmp, double dt, double duration = -1.0);

/// Phase-indexed torque profile: normalized RBF mixture per joint.
struct TorqueProfile {
  double tau = 1.0;
  double alpha_x = 2.0;
  Eigen::VectorXd centers;
  Eigen::VectorXd widths;
  Eigen::MatrixXd weights;  // joints x kernels

  int dof_count() const { return static_cast<int>(weights.rows()); }
  int kernel_count() const { return static_cast<int>(centers.size()); }
};

/// Least-squares RBF fit over the phase values of uniformly sampled torques.
TorqueProfile encode_torques(const Eigen::MatrixXd& samples, double dt, int kernel_count,
                             double tau, double alpha_x = 2.0);

/// Σ w ψ(x) / Σ ψ(x) per joint; x at or below 0 is clamped to the smallest
/// kernel center.
Eigen::VectorXd evaluate_torques(const TorqueProfile& profile, double x);

/// Eq.-of-motion residual: task torques = measured - model dynamics.
Eigen::VectorXd extract_task_torques(const Eigen::VectorXd& tau_measured,
                                     const Eigen::VectorXd& f_dynamic);

/// Compliant movement primitive: joint trajectory plus torque profile on a
/// shared phase.
struct Cmp {
  Dmp dmp;
  TorqueProfile torque;

  void validate() const;  // both halves must share tau and alpha_x
  void save(const std::filesystem::path& path) const;
  static Cmp load(const std::filesystem::path& path);
};

}  // namespace bimanual
