// Test-only reference implementations, kept independent of the library code
// paths they check.
#pragma once

#include "bimanual/dynamics.hpp"
#include "bimanual/kinematics.hpp"

#include <random>

namespace bimanual::oracles {

/// TCP pose by explicit 4x4 homogeneous matrix products.
Eigen::Matrix4d fk_homogeneous(const RobotModel& model, const Eigen::VectorXd& q);

/// Lagrangian mass matrix from per-link com Jacobians (payload as a point
/// mass at the TCP).
Eigen::MatrixXd lagrangian_mass_matrix(const RobotModel& model, const Eigen::VectorXd& q,
                                       const Payload& payload = {});

/// Gravity torques from the potential-energy gradient.
Eigen::VectorXd lagrangian_gravity(const RobotModel& model, const Eigen::VectorXd& q,
                                   const Eigen::Vector3d& gravity, const Payload& payload = {});

/// Full joint torque M q̈ + (Ṁ q̇ - ½ ∂(q̇ᵀMq̇)/∂q) + g via the energy form;
/// the velocity term uses directional finite differences of M.
Eigen::VectorXd lagrangian_inverse_dynamics(const RobotModel& model, const Eigen::VectorXd& q,
                                            const Eigen::VectorXd& qdot,
                                            const Eigen::VectorXd& qddot,
                                            const Eigen::Vector3d& gravity,
                                            const Payload& payload = {});

/// Kinetic + potential energy of the chain (payload included).
double total_energy(const RobotModel& model, const Eigen::VectorXd& q,
                    const Eigen::VectorXd& qdot, const Eigen::Vector3d& gravity,
                    const Payload& payload = {});

/// Central finite-difference geometric Jacobian of forward_kinematics.
Eigen::MatrixXd finite_difference_jacobian(const RobotModel& model, const Eigen::VectorXd& q,
                                           double h = 1e-6);

/// Planar 2-link test arm (a = 1, 1; everything else zero).
RobotModel planar_two_link();

/// Randomized serial arm with SPD inertias, for property tests.
RobotModel random_arm(std::mt19937_64& rng, int joints);

Eigen::VectorXd random_vector(std::mt19937_64& rng, int n, double scale);
Eigen::Matrix3d random_rotation(std::mt19937_64& rng);

}  // namespace bimanual::oracles
