#include "bimanual/primitives.hpp"

#include "bimanual/config_text.hpp"

#include <Eigen/Cholesky>

#include <cmath>

namespace bimanual {

double phase(double t, double tau, double alpha_x) {
  if (tau <= 0.0) throw std::invalid_argument("phase: tau must be positive");
  return std::exp(-alpha_x * t / tau);
}

Eigen::VectorXd rbf_centers(int n, double alpha_x) {
  if (n < 2) throw std::invalid_argument("rbf_centers: need at least 2 kernels");
  Eigen::VectorXd c(n);
  for (int i = 0; i < n; ++i) c[i] = std::exp(-alpha_x * i / (n - 1.0));
  return c;
}

Eigen::VectorXd rbf_widths(const Eigen::VectorXd& centers) {
  const int n = static_cast<int>(centers.size());
  Eigen::VectorXd h(n);
  const double k = -std::log(0.7);
  for (int i = 0; i + 1 < n; ++i) {
    const double dc = centers[i + 1] - centers[i];
    h[i] = k / (dc * dc);
  }
  h[n - 1] = h[n - 2];
  return h;
}

namespace {

// Normalized kernel activations ψ_j(x)/Σψ(x).
Eigen::VectorXd normalized_basis(const Eigen::VectorXd& centers, const Eigen::VectorXd& widths,
                                 double x) {
  Eigen::VectorXd psi(centers.size());
  for (Eigen::Index j = 0; j < centers.size(); ++j) {
    const double d = x - centers[j];
    psi[j] = std::exp(-widths[j] * d * d);
  }
  const double sum = psi.sum();
  return sum > 0.0 ? Eigen::VectorXd(psi / sum) : psi;
}

// Ridge-regularized least squares; zero targets give exactly zero weights.
Eigen::MatrixXd fit_weights(const Eigen::MatrixXd& design, const Eigen::MatrixXd& targets) {
  const Eigen::Index n = design.cols();
  Eigen::MatrixXd gram = design.transpose() * design;
  gram.diagonal().array() += 1e-10;
  const Eigen::LLT<Eigen::MatrixXd> llt(gram);
  Eigen::MatrixXd weights(targets.cols(), n);
  for (Eigen::Index d = 0; d < targets.cols(); ++d)
    weights.row(d) = llt.solve(design.transpose() * targets.col(d)).transpose();
  return weights;
}

void check_samples(const Eigen::MatrixXd& samples, double dt, int kernel_count) {
  if (dt <= 0.0) throw std::invalid_argument("encode: dt must be positive");
  if (kernel_count < 2) throw std::invalid_argument("encode: need at least 2 kernels");
  if (samples.rows() < 2 * kernel_count)
    throw std::invalid_argument("encode: need at least 2 samples per kernel, got " +
                                std::to_string(samples.rows()) + " rows for " +
                                std::to_string(kernel_count) + " kernels");
  if (!samples.allFinite()) throw std::invalid_argument("encode: samples contain non-finite values");
}

}  // namespace

void Dmp::validate() const {
  if (kernel_count() < 2) throw std::invalid_argument("Dmp: need at least 2 kernels");
  if (tau <= 0.0) throw std::invalid_argument("Dmp: tau must be positive");
  if (std::abs(beta_z - alpha_z / 4.0) > 1e-12)
    throw std::invalid_argument("Dmp: beta_z must equal alpha_z/4");
  for (int i = 0; i + 1 < kernel_count(); ++i)
    if (centers[i + 1] >= centers[i])
      throw std::invalid_argument("Dmp: centers must be strictly decreasing");
}

Dmp encode_dmp(const Eigen::MatrixXd& samples, double dt, int kernel_count, double alpha_z,
               double alpha_x) {
  check_samples(samples, dt, kernel_count);
  const Eigen::Index T = samples.rows();
  const Eigen::Index dofs = samples.cols();

  Dmp dmp;
  dmp.tau = static_cast<double>(T - 1) * dt;
  dmp.alpha_z = alpha_z;
  dmp.beta_z = alpha_z / 4.0;
  dmp.alpha_x = alpha_x;
  dmp.centers = rbf_centers(kernel_count, alpha_x);
  dmp.widths = rbf_widths(dmp.centers);
  dmp.y0 = samples.row(0).transpose();
  dmp.goal = samples.row(T - 1).transpose();

  // central finite differences, one-sided at the ends
  Eigen::MatrixXd yd(T, dofs), ydd(T, dofs);
  for (Eigen::Index k = 0; k < T; ++k) {
    if (k == 0)
      yd.row(k) = (samples.row(1) - samples.row(0)) / dt;
    else if (k == T - 1)
      yd.row(k) = (samples.row(T - 1) - samples.row(T - 2)) / dt;
    else
      yd.row(k) = (samples.row(k + 1) - samples.row(k - 1)) / (2.0 * dt);
  }
  for (Eigen::Index k = 0; k < T; ++k) {
    if (k == 0)
      ydd.row(k) = (yd.row(1) - yd.row(0)) / dt;
    else if (k == T - 1)
      ydd.row(k) = (yd.row(T - 1) - yd.row(T - 2)) / dt;
    else
      ydd.row(k) = (yd.row(k + 1) - yd.row(k - 1)) / (2.0 * dt);
  }

  Eigen::MatrixXd design(T, kernel_count);
  Eigen::MatrixXd targets(T, dofs);
  for (Eigen::Index k = 0; k < T; ++k) {
    const double x = phase(static_cast<double>(k) * dt, dmp.tau, alpha_x);
    design.row(k) = x * normalized_basis(dmp.centers, dmp.widths, x).transpose();
    targets.row(k) = dmp.tau * dmp.tau * ydd.row(k) -
                     alpha_z * (dmp.beta_z * (dmp.goal.transpose() - samples.row(k)).array() -
                                dmp.tau * yd.row(k).array())
                         .matrix();
  }
  dmp.weights = fit_weights(design, targets);
  return dmp;
}

DmpTrajectory integrate_dmp(const Dmp& dmp, double dt, double duration) {
  if (dt <= 0.0) throw std::invalid_argument("integrate_dmp: dt must be positive");
  dmp.validate();
  if (duration < 0.0) duration = dmp.tau;
  const int samples = static_cast<int>(std::llround(duration / dt)) + 1;
  const int dofs = dmp.dof_count();

  DmpTrajectory out;
  out.dt = dt;
  out.y.resize(samples, dofs);
  out.yd.resize(samples, dofs);
  out.ydd.resize(samples, dofs);
  out.x.resize(samples);

  Eigen::VectorXd y = dmp.y0;
  Eigen::VectorXd z = Eigen::VectorXd::Zero(dofs);
  for (int k = 0; k < samples; ++k) {
    const double x = phase(static_cast<double>(k) * dt, dmp.tau, dmp.alpha_x);
    const Eigen::VectorXd forcing = x * (dmp.weights * normalized_basis(dmp.centers, dmp.widths, x));
    const Eigen::VectorXd zdot =
        (dmp.alpha_z * (dmp.beta_z * (dmp.goal - y) - z) + forcing) / dmp.tau;
    out.x[k] = x;
    out.y.row(k) = y.transpose();
    out.yd.row(k) = (z / dmp.tau).transpose();
    out.ydd.row(k) = (zdot / dmp.tau).transpose();
    y += (z / dmp.tau) * dt;
    z += zdot * dt;
  }
  return out;
}

TorqueProfile encode_torques(const Eigen::MatrixXd& samples, double dt, int kernel_count,
                             double tau, double alpha_x) {
  check_samples(samples, dt, kernel_count);
  TorqueProfile profile;
  profile.tau = tau;
  profile.alpha_x = alpha_x;
  profile.centers = rbf_centers(kernel_count, alpha_x);
  profile.widths = rbf_widths(profile.centers);

  const Eigen::Index T = samples.rows();
  Eigen::MatrixXd design(T, kernel_count);
  for (Eigen::Index k = 0; k < T; ++k) {
    const double x = phase(static_cast<double>(k) * dt, tau, alpha_x);
    design.row(k) = normalized_basis(profile.centers, profile.widths, x).transpose();
  }
  profile.weights = fit_weights(design, samples);
  return profile;
}

Eigen::VectorXd evaluate_torques(const TorqueProfile& profile, double x) {
  if (x <= 0.0) x = profile.centers[profile.kernel_count() - 1];
  return profile.weights * normalized_basis(profile.centers, profile.widths, x);
}

Eigen::VectorXd extract_task_torques(const Eigen::VectorXd& tau_measured,
                                     const Eigen::VectorXd& f_dynamic) {
  if (tau_measured.size() != f_dynamic.size())
    throw std::invalid_argument("extract_task_torques: dimension mismatch");
  return tau_measured - f_dynamic;
}

void Cmp::validate() const {
  dmp.validate();
  if (dmp.tau != torque.tau || dmp.alpha_x != torque.alpha_x)
    throw std::invalid_argument("Cmp: motion and torque halves must share phase parameters");
  if (dmp.dof_count() != torque.dof_count())
    throw std::invalid_argument("Cmp: motion and torque halves must cover the same joints");
}

void Cmp::save(const std::filesystem::path& path) const {
  validate();
  ConfigText cfg;
  cfg.set_int("cmp", "joints", dmp.dof_count());
  cfg.set_double("cmp", "tau", dmp.tau);
  cfg.set_double("cmp", "alpha_x", dmp.alpha_x);
  cfg.set_double("dmp", "alpha_z", dmp.alpha_z);
  cfg.set_double("dmp", "beta_z", dmp.beta_z);
  cfg.set_vector("dmp", "centers", dmp.centers);
  cfg.set_vector("dmp", "widths", dmp.widths);
  cfg.set_vector("dmp", "y0", dmp.y0);
  cfg.set_vector("dmp", "goal", dmp.goal);
  for (int d = 0; d < dmp.dof_count(); ++d) cfg.add_vector("dmp", "weights", dmp.weights.row(d));
  cfg.set_vector("torque", "centers", torque.centers);
  cfg.set_vector("torque", "widths", torque.widths);
  for (int d = 0; d < torque.dof_count(); ++d)
    cfg.add_vector("torque", "weights", torque.weights.row(d));
  cfg.save(path);
}

Cmp Cmp::load(const std::filesystem::path& path) {
  const ConfigText cfg = ConfigText::parse_file(path);
  Cmp cmp;
  const int joints = cfg.get_int("cmp", "joints");
  cmp.dmp.tau = cfg.get_double("cmp", "tau");
  cmp.dmp.alpha_x = cfg.get_double("cmp", "alpha_x");
  cmp.dmp.alpha_z = cfg.get_double("dmp", "alpha_z");
  cmp.dmp.beta_z = cfg.get_double("dmp", "beta_z");
  cmp.dmp.centers = cfg.get_vector("dmp", "centers");
  cmp.dmp.widths = cfg.get_vector("dmp", "widths");
  cmp.dmp.y0 = cfg.get_vector("dmp", "y0");
  cmp.dmp.goal = cfg.get_vector("dmp", "goal");
  const auto dmp_rows = cfg.get_all("dmp", "weights");
  if (static_cast<int>(dmp_rows.size()) != joints)
    throw std::runtime_error(path.string() + ": dmp weight rows do not match joint count");
  cmp.dmp.weights.resize(joints, cmp.dmp.centers.size());
  for (int d = 0; d < joints; ++d)
    cmp.dmp.weights.row(d) = ConfigText::parse_vector(dmp_rows[d]).transpose();

  cmp.torque.tau = cmp.dmp.tau;
  cmp.torque.alpha_x = cmp.dmp.alpha_x;
  cmp.torque.centers = cfg.get_vector("torque", "centers");
  cmp.torque.widths = cfg.get_vector("torque", "widths");
  const auto torque_rows = cfg.get_all("torque", "weights");
  if (static_cast<int>(torque_rows.size()) != joints)
    throw std::runtime_error(path.string() + ": torque weight rows do not match joint count");
  cmp.torque.weights.resize(joints, cmp.torque.centers.size());
  for (int d = 0; d < joints; ++d)
    cmp.torque.weights.row(d) = ConfigText::parse_vector(torque_rows[d]).transpose();
  cmp.validate();
  return cmp;
}

}  // namespace bimanual
