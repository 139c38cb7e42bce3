#include "bimanual/clik.hpp"

#include <Eigen/SVD>

namespace bimanual {

void ClikConfig::validate() const {
  if ((gain.array() < 0.0).any() || posture_gain < 0.0)
    throw std::invalid_argument("ClikConfig: gains must be non-negative");
  if (dt <= 0.0) throw std::invalid_argument("ClikConfig: dt must be positive");
}

namespace {

Eigen::MatrixXd clik_pinv(const Eigen::MatrixXd& jacobian, const ClikConfig& cfg, bool* damped) {
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(jacobian, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const Eigen::VectorXd& sv = svd.singularValues();
  const double sv_min = sv[sv.size() - 1];
  const bool near_singular = sv_min < 1e-4;
  if (near_singular && cfg.lambda <= 0.0)
    throw std::runtime_error("clik_step: singular Jacobian with zero damping");
  if (damped) *damped = near_singular;
  const double lambda = near_singular ? cfg.lambda : 0.0;
  Eigen::VectorXd inv_sv(sv.size());
  for (int i = 0; i < sv.size(); ++i)
    inv_sv[i] = lambda > 0.0 ? sv[i] / (sv[i] * sv[i] + lambda * lambda)
                             : (sv[i] > 0.0 ? 1.0 / sv[i] : 0.0);
  return svd.matrixV() * inv_sv.asDiagonal() * svd.matrixU().transpose();
}

struct BimanualState {
  Pose tcp1, tcp2;
  TaskCoordinates coords;
  Eigen::MatrixXd jacobian;
};

BimanualState eval_state(const RobotModel& r1, const RobotModel& r2, const Eigen::VectorXd& q) {
  const int n1 = r1.joint_count;
  const int n2 = r2.joint_count;
  BimanualState s;
  s.tcp1 = forward_kinematics(r1, q.head(n1));
  s.tcp2 = forward_kinematics(r2, q.tail(n2));
  s.coords = make_task_coordinates(s.tcp1, s.tcp2);
  s.jacobian = bimanual_jacobian(geometric_jacobian(r1, q.head(n1)),
                                 geometric_jacobian(r2, q.tail(n2)));
  return s;
}

bool within_tolerance(const TaskVector& e, const ClikConfig& cfg) {
  return e.segment<3>(kTaskAbsLinear).norm() <= cfg.tol_pos &&
         e.segment<3>(kTaskRelLinear).norm() <= cfg.tol_pos &&
         e.segment<3>(kTaskAbsAngular).norm() <= cfg.tol_rot &&
         e.segment<3>(kTaskRelAngular).norm() <= cfg.tol_rot;
}

}  // namespace

ClikStep clik_step(const Eigen::MatrixXd& jacobian, const TaskVector& v_d, const TaskVector& e,
                   const Eigen::VectorXd& q_demo, const Eigen::VectorXd& q_act,
                   const ClikConfig& cfg) {
  if (jacobian.rows() != kTaskDim || q_demo.size() != jacobian.cols() ||
      q_act.size() != jacobian.cols())
    throw std::invalid_argument("clik_step: dimension mismatch");
  ClikStep out;
  const Eigen::MatrixXd pinv = clik_pinv(jacobian, cfg, &out.damped);
  out.qdot = pinv * (v_d + cfg.gain.cwiseProduct(e));
  if (cfg.posture_gain > 0.0) {
    const Eigen::MatrixXd projector =
        Eigen::MatrixXd::Identity(jacobian.cols(), jacobian.cols()) - pinv * jacobian;
    out.qdot += projector * (cfg.posture_gain * (q_demo - q_act));
  }
  return out;
}

JointTrajectory solve_trajectory(const std::vector<TaskReference>& refs,
                                 const Eigen::VectorXd& q0, const RobotModel& robot1,
                                 const RobotModel& robot2, const ClikConfig& cfg,
                                 const Eigen::VectorXd& q_demo) {
  cfg.validate();
  if (refs.empty()) throw std::invalid_argument("solve_trajectory: empty reference");
  const int n1 = robot1.joint_count;
  const int n = n1 + robot2.joint_count;
  if (q0.size() != n || q_demo.size() != n)
    throw std::invalid_argument("solve_trajectory: joint vector size mismatch");

  // locked joints must hold their angles bit-exactly across the whole solve
  auto clamp_locked = [&](Eigen::VectorXd& q_full, Eigen::VectorXd* qdot_full) {
    for (const auto& [idx, angle] : robot1.locked_joints) {
      q_full[idx] = angle;
      if (qdot_full) (*qdot_full)[idx] = 0.0;
    }
    for (const auto& [idx, angle] : robot2.locked_joints) {
      q_full[n1 + idx] = angle;
      if (qdot_full) (*qdot_full)[n1 + idx] = 0.0;
    }
  };

  Eigen::VectorXd q(n);
  q << robot1.effective_q(q0.head(robot1.joint_count)),
      robot2.effective_q(q0.tail(robot2.joint_count));

  // converge onto the first reference before t = 0
  {
    const TaskVector zero_vel = TaskVector::Zero();
    int iter = 0;
    while (true) {
      const BimanualState s = eval_state(robot1, robot2, q);
      const TaskVector e = task_errors(s.coords, s.tcp1.R, refs.front());
      if (within_tolerance(e, cfg)) break;
      if (++iter > 5000)
        throw ClikError("solve_trajectory: initial configuration did not converge", -1);
      q += clik_step(s.jacobian, zero_vel, e, q_demo, q, cfg).qdot * cfg.dt;
      clamp_locked(q, nullptr);
    }
  }

  JointTrajectory traj;
  traj.dt = cfg.dt;
  const int samples = static_cast<int>(refs.size());
  traj.q.resize(samples, n);
  traj.qdot.resize(samples, n);

  for (int k = 0; k < samples; ++k) {
    BimanualState s = eval_state(robot1, robot2, q);
    TaskVector e = task_errors(s.coords, s.tcp1.R, refs[k]);
    if (!within_tolerance(e, cfg)) {
      // feedback-only corrections; these do not advance the timeline
      int iter = 0;
      Eigen::VectorXd q_fix = q;
      while (!within_tolerance(e, cfg)) {
        if (++iter > cfg.max_iterations)
          throw ClikError("solve_trajectory: sample " + std::to_string(k) +
                              " did not converge within max_iterations",
                          k);
        q_fix += clik_step(s.jacobian, TaskVector::Zero(), e, q_demo, q_fix, cfg).qdot * cfg.dt;
        clamp_locked(q_fix, nullptr);
        s = eval_state(robot1, robot2, q_fix);
        e = task_errors(s.coords, s.tcp1.R, refs[k]);
      }
      q = q_fix;
    }
    const TaskVector v_d = desired_velocities(refs[k], refs[k].R_absd, refs[k].w_absd);
    Eigen::VectorXd qdot = clik_step(s.jacobian, v_d, e, q_demo, q, cfg).qdot;
    clamp_locked(q, &qdot);
    traj.q.row(k) = q.transpose();
    traj.qdot.row(k) = qdot.transpose();
    q += qdot * cfg.dt;
  }
  return traj;
}

}  // namespace bimanual
