#pragma once

#include "bimanual/kinematics.hpp"

#include <array>
#include <optional>
#include <random>

namespace bimanual {

/// Point load rigidly attached at the TCP.
struct Payload {
  double mass = 0.0;
  Eigen::Vector3d com{Eigen::Vector3d::Zero()};  // offset in TCP frame
};

struct PerturbationSegment {
  enum class Kind { Zero, Ramp, Hold, Sine };
  Kind kind = Kind::Zero;
  double t_start = 0.0;
  double t_end = 0.0;
  Vector6d w_from{Vector6d::Zero()};  // ramp start / hold value / sine amplitude
  Vector6d w_to{Vector6d::Zero()};    // ramp end
  double freq_hz = 0.0;               // sine only
};

/// Piecewise wrench applied at one robot's TCP, world frame.
struct PerturbationProfile {
  int target = 0;  // robot index, 0-based
  double force_cap = 200.0;
  std::vector<PerturbationSegment> segments;

  Vector6d wrench_at(double t) const;
  /// Throws on overlapping windows or forces beyond the cap.
  void validate() const;
};

inline const Eigen::Vector3d kGravity{0.0, 0.0, -9.81};

/// Recursive Newton-Euler joint torques for the chain plus the attached
/// payload. Locked joints are treated as frozen (their q̇, q̈ are ignored);
/// the returned entry at a locked index is the holding torque.
Eigen::VectorXd inverse_dynamics(const RobotModel& model, const Eigen::VectorXd& q,
                                 const Eigen::VectorXd& qdot, const Eigen::VectorXd& qddot,
                                 const Eigen::Vector3d& gravity, const Payload& payload = {});

/// Joint-space mass matrix, built column-wise from unit-acceleration
/// inverse-dynamics calls. Rows/columns of locked joints are zero.
Eigen::MatrixXd mass_matrix(const RobotModel& model, const Eigen::VectorXd& q,
                            const Payload& payload = {});

/// Solves M(q) q̈ = τ_applied + Jᵀ w_ext − C(q, q̇) q̇ − g(q) over the unlocked
/// joints; locked entries of the result are zero. Throws if M is not SPD.
Eigen::VectorXd forward_dynamics(const RobotModel& model, const Eigen::VectorXd& q,
                                 const Eigen::VectorXd& qdot, const Eigen::VectorXd& tau_applied,
                                 const Vector6d& external_wrench, const Eigen::Vector3d& gravity,
                                 const Payload& payload = {});

/// Joint torque sensor emulation: commanded + Jᵀ w_ext, plus optional
/// Gaussian noise when a generator is supplied.
Eigen::VectorXd measured_joint_torques(const RobotModel& model, const Eigen::VectorXd& q,
                                       const Eigen::VectorXd& commanded,
                                       const Vector6d& external_wrench,
                                       double noise_sigma = 0.0,
                                       std::mt19937_64* rng = nullptr);

struct SimState {
  std::array<JointState, 2> arms;
  double t = 0.0;
  long tick = 0;
};

/// Fixed parameters of one two-arm simulation.
struct SimWorld {
  std::array<RobotModel, 2> models;
  std::array<Payload, 2> payloads;
  Eigen::Vector3d gravity{kGravity};
  double joint_damping = 0.1;  // Nms/rad, unmodeled viscous friction
  double dt = 0.002;
};

struct SimulationError : std::runtime_error {
  long tick;
  SimulationError(const std::string& what, long tick_) : std::runtime_error(what), tick(tick_) {}
};

SimState make_initial_state(const SimWorld& world, const Eigen::VectorXd& q1,
                            const Eigen::VectorXd& q2);

/// One semi-implicit Euler step: q̇ += q̈ dt, then q += q̇ dt, locked joints
/// clamped. The perturbation profile is evaluated at the pre-step time.
/// qddot_out, when given, receives the accelerations integrated this tick.
/// Throws SimulationError when the state stops being finite.
void sim_step(const SimWorld& world, SimState& state, const Eigen::VectorXd& tau_cmd1,
              const Eigen::VectorXd& tau_cmd2, const PerturbationProfile* perturbation,
              std::array<Eigen::VectorXd, 2>* qddot_out = nullptr);

}  // namespace bimanual
