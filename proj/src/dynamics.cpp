#include "bimanual/dynamics.hpp"

#include <Eigen/Cholesky>

#include <cmath>

namespace bimanual {

Vector6d PerturbationProfile::wrench_at(double t) const {
  Vector6d w = Vector6d::Zero();
  for (const auto& seg : segments) {
    if (t < seg.t_start || t >= seg.t_end) continue;
    switch (seg.kind) {
      case PerturbationSegment::Kind::Zero:
        break;
      case PerturbationSegment::Kind::Hold:
        w += seg.w_from;
        break;
      case PerturbationSegment::Kind::Ramp: {
        const double u = (t - seg.t_start) / (seg.t_end - seg.t_start);
        w += seg.w_from + u * (seg.w_to - seg.w_from);
        break;
      }
      case PerturbationSegment::Kind::Sine:
        w += seg.w_from * std::sin(2.0 * M_PI * seg.freq_hz * (t - seg.t_start));
        break;
    }
  }
  return w;
}

void PerturbationProfile::validate() const {
  for (size_t i = 0; i < segments.size(); ++i) {
    const auto& a = segments[i];
    if (a.t_end <= a.t_start)
      throw std::invalid_argument("perturbation segment window is empty");
    const double peak = std::max(a.w_from.head<3>().norm(), a.w_to.head<3>().norm());
    if (peak > force_cap)
      throw std::invalid_argument("perturbation force exceeds the configured cap");
    for (size_t j = i + 1; j < segments.size(); ++j) {
      const auto& b = segments[j];
      if (a.t_start < b.t_end && b.t_start < a.t_end)
        throw std::invalid_argument("perturbation windows overlap");
    }
  }
}

namespace {

struct CompositeInertia {
  double mass;
  Eigen::Vector3d com;       // link frame
  Eigen::Matrix3d inertia;   // about com, link frame
};

// Folds the point-mass payload into the terminal link.
CompositeInertia with_payload(const LinkInertia& link, const Pose& tcp_offset,
                              const Payload& payload) {
  CompositeInertia out{link.mass, link.com, link.inertia};
  if (payload.mass <= 0.0) return out;
  const Eigen::Vector3d payload_com = tcp_offset.p + tcp_offset.R * payload.com;
  const double m = link.mass + payload.mass;
  const Eigen::Vector3d com = (link.mass * link.com + payload.mass * payload_com) / m;
  auto shift = [](double mass, const Eigen::Vector3d& d) -> Eigen::Matrix3d {
    return mass * (d.squaredNorm() * Eigen::Matrix3d::Identity() - d * d.transpose());
  };
  out.mass = m;
  out.com = com;
  out.inertia = link.inertia + shift(link.mass, link.com - com) +
                shift(payload.mass, payload_com - com);
  return out;
}

Eigen::VectorXd zero_locked(const RobotModel& model, const Eigen::VectorXd& v) {
  Eigen::VectorXd out = v;
  for (const auto& [idx, angle] : model.locked_joints) {
    (void)angle;
    out[idx] = 0.0;
  }
  return out;
}

}  // namespace

Eigen::VectorXd inverse_dynamics(const RobotModel& model, const Eigen::VectorXd& q,
                                 const Eigen::VectorXd& qdot, const Eigen::VectorXd& qddot,
                                 const Eigen::Vector3d& gravity, const Payload& payload) {
  const int n = model.joint_count;
  if (q.size() != n || qdot.size() != n || qddot.size() != n)
    throw std::invalid_argument("inverse_dynamics: dimension mismatch");
  const Eigen::VectorXd qd = zero_locked(model, qdot);
  const Eigen::VectorXd qdd = zero_locked(model, qddot);
  const std::vector<Pose> frames = link_frames(model, q);

  std::vector<Eigen::Vector3d> omega(n), alpha(n), a_com(n), com_w(n);
  std::vector<Eigen::Matrix3d> inertia_w(n);
  std::vector<double> mass(n);

  // forward pass, world frame; the base "accelerates" at -g to fold gravity in
  Eigen::Vector3d w_prev = Eigen::Vector3d::Zero();
  Eigen::Vector3d al_prev = Eigen::Vector3d::Zero();
  Eigen::Vector3d a_prev = -gravity;
  for (int k = 0; k < n; ++k) {
    CompositeInertia body{model.link_inertial[k].mass, model.link_inertial[k].com,
                          model.link_inertial[k].inertia};
    if (k == n - 1) body = with_payload(model.link_inertial[k], model.tcp_offset, payload);

    const Eigen::Vector3d z = frames[k].R.col(2);  // joint k axis
    const Eigen::Vector3d w = w_prev + z * qd[k];
    const Eigen::Vector3d al = al_prev + z * qdd[k] + w_prev.cross(z * qd[k]);
    const Eigen::Vector3d r = frames[k + 1].p - frames[k].p;  // fixed in link k
    const Eigen::Vector3d a_origin = a_prev + al.cross(r) + w.cross(w.cross(r));
    com_w[k] = frames[k + 1].p + frames[k + 1].R * body.com;
    const Eigen::Vector3d rc = com_w[k] - frames[k + 1].p;
    a_com[k] = a_origin + al.cross(rc) + w.cross(w.cross(rc));
    inertia_w[k] = frames[k + 1].R * body.inertia * frames[k + 1].R.transpose();
    mass[k] = body.mass;
    omega[k] = w;
    alpha[k] = al;
    w_prev = w;
    al_prev = al;
    a_prev = a_origin;
  }

  // backward pass: joint wrenches about each joint point
  Eigen::VectorXd tau(n);
  Eigen::Vector3d f_child = Eigen::Vector3d::Zero();
  Eigen::Vector3d n_child = Eigen::Vector3d::Zero();  // about frames[k+1].p
  for (int k = n - 1; k >= 0; --k) {
    const Eigen::Vector3d force = mass[k] * a_com[k];
    const Eigen::Vector3d moment_com =
        inertia_w[k] * alpha[k] + omega[k].cross(inertia_w[k] * omega[k]);
    const Eigen::Vector3d f = force + f_child;
    const Eigen::Vector3d moment_joint = moment_com + (com_w[k] - frames[k].p).cross(force) +
                                         n_child +
                                         (frames[k + 1].p - frames[k].p).cross(f_child);
    tau[k] = frames[k].R.col(2).dot(moment_joint);
    f_child = f;
    n_child = moment_joint;
  }
  return tau;
}

Eigen::MatrixXd mass_matrix(const RobotModel& model, const Eigen::VectorXd& q,
                            const Payload& payload) {
  const int n = model.joint_count;
  const Eigen::VectorXd zero = Eigen::VectorXd::Zero(n);
  Eigen::MatrixXd m = Eigen::MatrixXd::Zero(n, n);
  for (int j = 0; j < n; ++j) {
    if (model.is_locked(j)) continue;
    Eigen::VectorXd unit = Eigen::VectorXd::Zero(n);
    unit[j] = 1.0;
    m.col(j) = inverse_dynamics(model, q, zero, unit, Eigen::Vector3d::Zero(), payload);
  }
  for (const auto& [idx, angle] : model.locked_joints) {
    (void)angle;
    m.row(idx).setZero();
  }
  return m;
}

Eigen::VectorXd forward_dynamics(const RobotModel& model, const Eigen::VectorXd& q,
                                 const Eigen::VectorXd& qdot, const Eigen::VectorXd& tau_applied,
                                 const Vector6d& external_wrench, const Eigen::Vector3d& gravity,
                                 const Payload& payload) {
  const int n = model.joint_count;
  const Eigen::VectorXd zero = Eigen::VectorXd::Zero(n);
  const Eigen::VectorXd bias = inverse_dynamics(model, q, qdot, zero, gravity, payload);
  Eigen::VectorXd rhs = tau_applied - bias;
  if (external_wrench.squaredNorm() > 0.0)
    rhs += geometric_jacobian(model, q).transpose() * external_wrench;

  std::vector<int> unlocked;
  unlocked.reserve(n);
  for (int i = 0; i < n; ++i)
    if (!model.is_locked(i)) unlocked.push_back(i);

  const Eigen::MatrixXd m_full = mass_matrix(model, q, payload);
  const int nu = static_cast<int>(unlocked.size());
  Eigen::MatrixXd m(nu, nu);
  Eigen::VectorXd b(nu);
  for (int i = 0; i < nu; ++i) {
    b[i] = rhs[unlocked[i]];
    for (int j = 0; j < nu; ++j) m(i, j) = m_full(unlocked[i], unlocked[j]);
  }
  m = 0.5 * (m + m.transpose().eval());  // strip asymmetric round-off
  Eigen::LLT<Eigen::MatrixXd> llt(m);
  if (llt.info() != Eigen::Success)
    throw std::runtime_error("forward_dynamics: mass matrix is not positive definite");
  const Eigen::VectorXd acc_u = llt.solve(b);

  Eigen::VectorXd qddot = Eigen::VectorXd::Zero(n);
  for (int i = 0; i < nu; ++i) qddot[unlocked[i]] = acc_u[i];
  return qddot;
}

Eigen::VectorXd measured_joint_torques(const RobotModel& model, const Eigen::VectorXd& q,
                                       const Eigen::VectorXd& commanded,
                                       const Vector6d& external_wrench, double noise_sigma,
                                       std::mt19937_64* rng) {
  Eigen::VectorXd tau = commanded;
  if (external_wrench.squaredNorm() > 0.0)
    tau += geometric_jacobian(model, q).transpose() * external_wrench;
  if (noise_sigma > 0.0 && rng != nullptr) {
    std::normal_distribution<double> dist(0.0, noise_sigma);
    for (int i = 0; i < tau.size(); ++i) tau[i] += dist(*rng);
  }
  return tau;
}

SimState make_initial_state(const SimWorld& world, const Eigen::VectorXd& q1,
                            const Eigen::VectorXd& q2) {
  SimState state;
  for (int r = 0; r < 2; ++r) {
    const Eigen::VectorXd& q = r == 0 ? q1 : q2;
    state.arms[r].q = world.models[r].effective_q(q);
    state.arms[r].qdot = Eigen::VectorXd::Zero(world.models[r].joint_count);
  }
  return state;
}

void sim_step(const SimWorld& world, SimState& state, const Eigen::VectorXd& tau_cmd1,
              const Eigen::VectorXd& tau_cmd2, const PerturbationProfile* perturbation,
              std::array<Eigen::VectorXd, 2>* qddot_out) {
  for (int r = 0; r < 2; ++r) {
    const RobotModel& model = world.models[r];
    JointState& arm = state.arms[r];
    Vector6d w_ext = Vector6d::Zero();
    if (perturbation && perturbation->target == r) w_ext = perturbation->wrench_at(state.t);

    const Eigen::VectorXd& cmd = r == 0 ? tau_cmd1 : tau_cmd2;
    const Eigen::VectorXd tau = cmd - world.joint_damping * arm.qdot;
    const Eigen::VectorXd qddot =
        forward_dynamics(model, arm.q, arm.qdot, tau, w_ext, world.gravity, world.payloads[r]);
    if (qddot_out) (*qddot_out)[r] = qddot;

    arm.qdot += qddot * world.dt;
    arm.q += arm.qdot * world.dt;
    for (const auto& [idx, angle] : model.locked_joints) {
      arm.qdot[idx] = 0.0;
      arm.q[idx] = angle;
    }
    if (!arm.q.allFinite() || !arm.qdot.allFinite())
      throw SimulationError("simulation state became non-finite", state.tick);
  }
  state.t += world.dt;
  state.tick += 1;
}

}  // namespace bimanual
