#pragma once

#include "bimanual/clik.hpp"
#include "bimanual/config_text.hpp"
#include "bimanual/controllers.hpp"
#include "bimanual/dynamics.hpp"

#include <array>
#include <filesystem>

namespace bimanual {

/// R = Rz(yaw) Ry(pitch) Rx(roll).
Eigen::Matrix3d rpy_to_rotation(double roll, double pitch, double yaw);

/// Loads a serial-arm description ([robot] section: joints, dh, base, tcp,
/// inertia, limits, locked) and validates its invariants.
RobotModel load_robot_model(const std::filesystem::path& path);

struct TrajectoryKeyframe {
  double t = 0.0;
  Eigen::Vector3d offset{Eigen::Vector3d::Zero()};  // from the initial absolute position
};

/// Declarative experiment description; see docs/config-reference.md for the
/// file format.
struct ScenarioConfig {
  std::string name = "scenario";
  double duration = 30.0;
  double dt = 0.002;
  unsigned long long seed = 0;

  std::array<RobotModel, 2> robots;
  std::array<Eigen::VectorXd, 2> home;
  std::array<Payload, 2> payloads;

  std::vector<TrajectoryKeyframe> keyframes;
  Eigen::Vector3d relative_offset{Eigen::Vector3d::Zero()};  // p_reld in the absolute frame
  bool relative_offset_auto = true;                          // derive from the home postures

  GainSet gains;                 // compliant replay
  Eigen::VectorXd kq_stiff;      // learning runs
  Eigen::VectorXd dq_stiff;
  ClikConfig clik;

  ControllerVariant variant = ControllerVariant::Entire;
  double delta_tau_filter_hz = 20.0;

  PerturbationProfile perturbation;
  bool perturbation_enabled = false;

  int motion_kernels = 25;
  int torque_kernels = 40;
  double alpha_z = 48.0;
  double alpha_x = 2.0;
  int stiff_passes = 3;
  double noise_sigma = 0.0;
  double joint_damping = 0.1;

  SimWorld make_world() const;
  int joints_per_arm() const { return robots[0].joint_count; }

  /// Structural checks beyond what loading already enforces.
  void validate() const;
};

ScenarioConfig load_scenario(const std::filesystem::path& path);

/// Task reference at every control tick (duration/dt + 1 samples), built from
/// the home postures, the min-jerk keyframe path and the constant relative
/// offset.
std::vector<TaskReference> synthesize_task_reference(const ScenarioConfig& config);

}  // namespace bimanual
