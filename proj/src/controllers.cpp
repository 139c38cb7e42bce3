#include "bimanual/controllers.hpp"

#include <cmath>

namespace bimanual {

void GainSet::validate() const {
  if ((kq.array() < 0.0).any() || (dq.array() < 0.0).any() || (k_task.array() < 0.0).any() ||
      (d_task.array() < 0.0).any() || ks1 < 0.0)
    throw std::invalid_argument("GainSet: gains must be non-negative");
  if (kq.size() != dq.size()) throw std::invalid_argument("GainSet: kq/dq size mismatch");
}

const char* variant_name(ControllerVariant v) {
  switch (v) {
    case ControllerVariant::RecOnly: return "rec";
    case ControllerVariant::RecPlusBiman: return "rec+biman";
    case ControllerVariant::RecMinusVft: return "rec-vft";
    case ControllerVariant::Entire: return "entire";
  }
  return "?";
}

ControllerVariant variant_from_name(const std::string& name) {
  if (name == "rec") return ControllerVariant::RecOnly;
  if (name == "rec+biman") return ControllerVariant::RecPlusBiman;
  if (name == "rec-vft") return ControllerVariant::RecMinusVft;
  if (name == "entire") return ControllerVariant::Entire;
  throw std::invalid_argument("unknown controller variant '" + name +
                              "' (expected rec, rec+biman, rec-vft or entire)");
}

Eigen::VectorXd joint_impedance(const Eigen::VectorXd& q_d, const Eigen::VectorXd& q,
                                const Eigen::VectorXd& qdot_d, const Eigen::VectorXd& qdot,
                                const Eigen::VectorXd& kq, const Eigen::VectorXd& dq,
                                const Eigen::VectorXd& f_dynamic, const Eigen::VectorXd& tau_ff) {
  const Eigen::Index n = q.size();
  if (q_d.size() != n || qdot_d.size() != n || qdot.size() != n || kq.size() != n ||
      dq.size() != n || f_dynamic.size() != n || tau_ff.size() != n)
    throw std::invalid_argument("joint_impedance: dimension mismatch");
  return (kq.array() * (q_d - q).array() + dq.array() * (qdot_d - qdot).array()).matrix() +
         f_dynamic + tau_ff;
}

Eigen::VectorXd symmetric_task_torque(const Eigen::MatrixXd& jacobian, const TaskVector& x_err,
                                      const TaskVector& xdot_err, const GainSet& gains,
                                      const Eigen::VectorXd& q_demo, const Eigen::VectorXd& q_act) {
  if (jacobian.rows() != kTaskDim)
    throw std::invalid_argument("symmetric_task_torque: expected a 12-row Jacobian");
  if (q_demo.size() != jacobian.cols() || q_act.size() != jacobian.cols())
    throw std::invalid_argument("symmetric_task_torque: joint vector size mismatch");

  Eigen::VectorXd tau =
      jacobian.transpose() *
      (gains.k_task.cwiseProduct(x_err) + gains.d_task.cwiseProduct(xdot_err));
  if (gains.ks1 > 0.0) {
    const Eigen::MatrixXd jt_pinv = pseudo_inverse_auto(jacobian).transpose();
    const Eigen::MatrixXd projector =
        Eigen::MatrixXd::Identity(jacobian.cols(), jacobian.cols()) -
        jt_pinv * jacobian.transpose();
    // per-arm joint stiffness stacked over both arms
    Eigen::VectorXd kq2(2 * gains.kq.size());
    kq2 << gains.kq, gains.kq;
    tau += projector * (gains.ks1 * kq2.cwiseProduct(q_demo - q_act));
  }
  return tau;
}

Vector6d end_effector_force_estimate(const Eigen::MatrixXd& jacobian, const Eigen::VectorXd& tau,
                                     bool* damped) {
  if (jacobian.rows() != 6 || jacobian.cols() != tau.size())
    throw std::invalid_argument("end_effector_force_estimate: dimension mismatch");
  return pseudo_inverse_auto(jacobian, damped).transpose() * tau;
}

Eigen::VectorXd perturbation_torques(const Eigen::VectorXd& tau_expected,
                                     const Eigen::VectorXd& tau_measured) {
  if (tau_expected.size() != tau_measured.size())
    throw std::invalid_argument("perturbation_torques: dimension mismatch");
  return tau_expected - tau_measured;
}

Eigen::VectorXd virtual_force_translation(const Eigen::MatrixXd& j1, const Eigen::MatrixXd& j2,
                                          const Eigen::VectorXd& delta_tau1,
                                          const Eigen::VectorXd& delta_tau2, bool* damped) {
  if (j1.cols() != delta_tau1.size() || j2.cols() != delta_tau2.size())
    throw std::invalid_argument("virtual_force_translation: dimension mismatch");
  bool damped1 = false, damped2 = false;
  const Eigen::VectorXd to_arm1 =
      j1.transpose() * (pseudo_inverse_auto(j2, &damped2).transpose() * delta_tau2);
  const Eigen::VectorXd to_arm2 =
      j2.transpose() * (pseudo_inverse_auto(j1, &damped1).transpose() * delta_tau1);
  if (damped) *damped = damped1 || damped2;
  Eigen::VectorXd tau(to_arm1.size() + to_arm2.size());
  tau << to_arm1, to_arm2;
  return tau;
}

Eigen::VectorXd combined_feedforward(const Eigen::VectorXd& tau_rec,
                                     const Eigen::VectorXd& tau_biman,
                                     const Eigen::VectorXd& tau_vft, ControllerVariant variant) {
  if (tau_rec.size() != tau_biman.size() || tau_rec.size() != tau_vft.size())
    throw std::invalid_argument("combined_feedforward: dimension mismatch");
  switch (variant) {
    case ControllerVariant::RecOnly: return tau_rec;
    case ControllerVariant::RecPlusBiman: return tau_rec + tau_biman;
    case ControllerVariant::RecMinusVft: return tau_rec - tau_vft;
    case ControllerVariant::Entire: return tau_rec + tau_biman - tau_vft;
  }
  throw std::logic_error("combined_feedforward: unknown variant");
}

LowPassFilter::LowPassFilter(double cutoff_hz, double dt, int size)
    : alpha_(cutoff_hz > 0.0 ? dt / (dt + 1.0 / (2.0 * M_PI * cutoff_hz)) : 1.0),
      state_(Eigen::VectorXd::Zero(size)) {}

const Eigen::VectorXd& LowPassFilter::update(const Eigen::VectorXd& input) {
  state_ += alpha_ * (input - state_);
  return state_;
}

void LowPassFilter::reset() { state_.setZero(); }

}  // namespace bimanual
