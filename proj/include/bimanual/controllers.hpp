#pragma once

#include "bimanual/task_space.hpp"

namespace bimanual {

/// Diagonal gains of the combined controller. K_task/D_task follow the
/// TaskVector ordering.
struct GainSet {
  Eigen::VectorXd kq;       // Nm/rad, per joint of one arm
  Eigen::VectorXd dq;       // Nms/rad
  TaskVector k_task{TaskVector::Zero()};
  TaskVector d_task{TaskVector::Zero()};
  double ks1 = 0.0;         // null-space posture gain of the torque controller

  void validate() const;
};

/// Which feed-forward terms are active during replay.
enum class ControllerVariant { RecOnly, RecPlusBiman, RecMinusVft, Entire };

const char* variant_name(ControllerVariant v);
ControllerVariant variant_from_name(const std::string& name);

/// Joint impedance with dynamics compensation and feed-forward:
/// τ_u = K_q(q_d - q) + D_q(q̇_d - q̇) + f_dynamic + τ_ff.
Eigen::VectorXd joint_impedance(const Eigen::VectorXd& q_d, const Eigen::VectorXd& q,
                                const Eigen::VectorXd& qdot_d, const Eigen::VectorXd& qdot,
                                const Eigen::VectorXd& kq, const Eigen::VectorXd& dq,
                                const Eigen::VectorXd& f_dynamic, const Eigen::VectorXd& tau_ff);

/// Symmetric bimanual task torque Jᵀ(K x_err + D ẋ_err) with the demonstrated
/// posture as a null-space task when ks1 > 0.
Eigen::VectorXd symmetric_task_torque(const Eigen::MatrixXd& jacobian, const TaskVector& x_err,
                                      const TaskVector& xdot_err, const GainSet& gains,
                                      const Eigen::VectorXd& q_demo, const Eigen::VectorXd& q_act);

/// Virtual-work force estimate f_e = (J†)ᵀ τ; damping engages near
/// singularities and is reported through *damped.
Vector6d end_effector_force_estimate(const Eigen::MatrixXd& jacobian, const Eigen::VectorXd& tau,
                                     bool* damped = nullptr);

/// Δτ = τ_expected - τ_measured: the joint-torque residual caused by an
/// external perturbation.
Eigen::VectorXd perturbation_torques(const Eigen::VectorXd& tau_expected,
                                     const Eigen::VectorXd& tau_measured);

/// Cross-arm wrench copy [J1ᵀ(J2†)ᵀΔτ2 ; J2ᵀ(J1†)ᵀΔτ1].
Eigen::VectorXd virtual_force_translation(const Eigen::MatrixXd& j1, const Eigen::MatrixXd& j2,
                                          const Eigen::VectorXd& delta_tau1,
                                          const Eigen::VectorXd& delta_tau2,
                                          bool* damped = nullptr);

/// τ_ff = τ_rec + τ_biman - τ_vft with terms zeroed per variant.
Eigen::VectorXd combined_feedforward(const Eigen::VectorXd& tau_rec,
                                     const Eigen::VectorXd& tau_biman,
                                     const Eigen::VectorXd& tau_vft, ControllerVariant variant);

/// First-order low-pass, y += a (x - y), a = dt / (dt + 1/(2π f_c)).
class LowPassFilter {
 public:
  LowPassFilter(double cutoff_hz, double dt, int size);
  const Eigen::VectorXd& update(const Eigen::VectorXd& input);
  const Eigen::VectorXd& value() const { return state_; }
  void reset();

 private:
  double alpha_;
  Eigen::VectorXd state_;
};

}  // namespace bimanual
