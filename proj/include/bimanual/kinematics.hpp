#pragma once

#include <Eigen/Dense>

#include <map>
#include <stdexcept>
#include <string>
#include <vector>

namespace bimanual {

using Vector6d = Eigen::Matrix<double, 6, 1>;

/// Position + rotation of a frame, expressed in some reference frame.
struct Pose {
  Eigen::Vector3d p{Eigen::Vector3d::Zero()};
  Eigen::Matrix3d R{Eigen::Matrix3d::Identity()};

  /// RᵀR = I and det(R) = +1 within tol.
  bool has_valid_rotation(double tol = 1e-10) const;

  /// this ∘ other (other expressed in this frame).
  Pose compose(const Pose& other) const;

  static Pose identity() { return Pose{}; }
};

/// One standard Denavit-Hartenberg row: RotZ(theta+offset) TransZ(d) TransX(a) RotX(alpha).
struct DhRow {
  double a = 0.0;
  double alpha = 0.0;
  double d = 0.0;
  double theta_offset = 0.0;
};

struct LinkInertia {
  double mass = 0.0;
  Eigen::Vector3d com{Eigen::Vector3d::Zero()};        // in link frame
  Eigen::Matrix3d inertia{Eigen::Matrix3d::Zero()};    // about com, link frame
};

/// Kinematic + inertial description of one serial arm with revolute joints.
struct RobotModel {
  std::string name;
  int joint_count = 0;
  std::vector<DhRow> dh;
  std::vector<std::pair<double, double>> joint_limits;  // rad, (lo, hi)
  Pose base_pose;                                       // robot base in world
  std::map<int, double> locked_joints;                  // 0-based index -> held angle
  std::vector<LinkInertia> link_inertial;
  Pose tcp_offset;                                      // TCP in last-link frame

  bool is_locked(int joint) const { return locked_joints.count(joint) > 0; }

  /// q with locked joints overwritten by their held angles.
  Eigen::VectorXd effective_q(const Eigen::VectorXd& q) const;

  /// Throws std::invalid_argument on any violated invariant.
  void validate() const;
};

struct JointState {
  Eigen::VectorXd q;
  Eigen::VectorXd qdot;
};

struct AxisAngle {
  Eigen::Vector3d axis{0.0, 0.0, 1.0};
  double angle = 0.0;
};

/// World pose of every DH frame: element 0 is the base, element i the frame
/// after joint i. Locked joints are substituted before evaluation.
std::vector<Pose> link_frames(const RobotModel& model, const Eigen::VectorXd& q);

/// TCP pose in the world frame (base ∘ DH chain ∘ tcp offset).
Pose forward_kinematics(const RobotModel& model, const Eigen::VectorXd& q);

/// World-frame geometric Jacobian at the TCP, rows [linear; angular].
/// Columns of locked joints are zero.
Eigen::MatrixXd geometric_jacobian(const RobotModel& model, const Eigen::VectorXd& q);

/// S(v) with S(v)w = v × w.
Eigen::Matrix3d skew(const Eigen::Vector3d& v);

/// Axis/angle realizing R, angle in [0, pi]. Identity maps to ((0,0,1), 0).
AxisAngle axis_angle_from_rotation(const Eigen::Matrix3d& R);

/// Rodrigues rotation about a unit axis. Throws if |axis| deviates from 1.
Eigen::Matrix3d rotation_about_axis(const Eigen::Vector3d& axis, double angle);

/// Moore-Penrose pseudo-inverse (lambda = 0) or damped least squares
/// Mᵀ(MMᵀ + λ²I)⁻¹ (lambda > 0), both via SVD.
Eigen::MatrixXd damped_pseudo_inverse(const Eigen::MatrixXd& m, double lambda);

/// Pseudo-inverse that switches damping on near singularities:
/// lambda = 1e-3 when the smallest singular value drops below 1e-4, else 0.
/// Sets *damped when provided.
Eigen::MatrixXd pseudo_inverse_auto(const Eigen::MatrixXd& m, bool* damped = nullptr);

}  // namespace bimanual
