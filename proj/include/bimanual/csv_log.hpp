#pragma once

#include "bimanual/clik.hpp"
#include "bimanual/task_space.hpp"

#include <filesystem>
#include <string>
#include <vector>

namespace bimanual {

/// Everything logged at one control tick.
struct LogRow {
  double t = 0.0;
  Eigen::VectorXd q1, q2;    // measured joint positions
  Eigen::VectorXd qd1, qd2;  // desired joint positions
  TaskVector err{TaskVector::Zero()};
  Eigen::Vector3d pert_force{Eigen::Vector3d::Zero()};  // estimated, world frame
  double pert_norm = 0.0;
  Eigen::VectorXd tau_rec, tau_biman, tau_vft, tau_ff;  // stacked, 2n
};

/// Floats in the log CSV carry 9 significant digits.
std::string format_sig9(double value);
/// The value a 9-digit CSV round trip produces.
double canonical9(double value);

std::string csv_log_header(int joints_per_arm);
void write_log_csv(const std::filesystem::path& path, const std::vector<LogRow>& rows);
std::vector<LogRow> read_log_csv(const std::filesystem::path& path);

/// Joint reference trajectory artifact: t plus per-sample q and q̇ columns.
void write_trajectory_csv(const std::filesystem::path& path, const JointTrajectory& traj);
JointTrajectory read_trajectory_csv(const std::filesystem::path& path);

/// Task reference artifact (orientations as w x y z quaternions).
void write_task_reference_csv(const std::filesystem::path& path,
                              const std::vector<TaskReference>& refs, double dt);
std::vector<TaskReference> read_task_reference_csv(const std::filesystem::path& path, double* dt);

}  // namespace bimanual
