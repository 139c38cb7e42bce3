#include "bimanual/harness.hpp"

#include <chrono>
#include <cmath>
#include <sstream>

namespace bimanual {

Demonstration demonstrate(const ScenarioConfig& config) {
  Demonstration demo;
  demo.refs = synthesize_task_reference(config);
  Eigen::VectorXd q0(2 * config.joints_per_arm());
  q0 << config.robots[0].effective_q(config.home[0]),
      config.robots[1].effective_q(config.home[1]);
  demo.joints =
      solve_trajectory(demo.refs, q0, config.robots[0], config.robots[1], config.clik, q0);
  return demo;
}

namespace {

// Reference accelerations by differencing the v velocity rows.
Eigen::MatrixXd difference_rows(const Eigen::MatrixXd& v, double dt) {
  const Eigen::Index rows = v.rows();
  Eigen::MatrixXd out(rows, v.cols());
  for (Eigen::Index k = 0; k < rows; ++k) {
    if (k == 0)
      out.row(k) = (v.row(1) - v.row(0)) / dt;
    else if (k == rows - 1)
      out.row(k) = (v.row(rows - 1) - v.row(rows - 2)) / dt;
    else
      out.row(k) = (v.row(k + 1) - v.row(k - 1)) / (2.0 * dt);
  }
  return out;
}

}  // namespace

LearnResult learn(const ScenarioConfig& config, const Demonstration& demo) {
  const int n = config.joints_per_arm();
  const int ticks = static_cast<int>(std::llround(config.duration / config.dt));
  if (demo.joints.sample_count() < ticks + 1)
    throw std::invalid_argument("learn: demonstration shorter than the scenario duration");

  const SimWorld world = config.make_world();
  const Eigen::MatrixXd qdd_ref = difference_rows(demo.joints.qdot, config.dt);

  LearnResult result;
  std::array<TorqueProfile, 2> profiles;
  bool have_profiles = false;

  for (int pass = 0; pass < config.stiff_passes; ++pass) {
    std::mt19937_64 rng(config.seed);
    SimState state = make_initial_state(world, demo.joints.q.row(0).head(n),
                                        demo.joints.q.row(0).tail(n));
    std::array<Eigen::MatrixXd, 2> recorded = {Eigen::MatrixXd::Zero(ticks, n),
                                               Eigen::MatrixXd::Zero(ticks, n)};
    double track_err = 0.0;

    for (int k = 0; k < ticks; ++k) {
      const double x = phase(state.t, config.duration, config.alpha_x);
      std::array<Eigen::VectorXd, 2> tau_u;
      std::array<JointState, 2> pre = state.arms;
      for (int r = 0; r < 2; ++r) {
        const Eigen::VectorXd q_d = demo.joints.q.row(k).segment(r * n, n);
        const Eigen::VectorXd qdot_d = demo.joints.qdot.row(k).segment(r * n, n);
        const Eigen::VectorXd qdd_d = qdd_ref.row(k).segment(r * n, n);
        const Eigen::VectorXd f_dyn = inverse_dynamics(config.robots[r], state.arms[r].q,
                                                       state.arms[r].qdot, qdd_d, world.gravity);
        const Eigen::VectorXd tau_ff =
            have_profiles ? evaluate_torques(profiles[r], x) : Eigen::VectorXd::Zero(n);
        tau_u[r] = joint_impedance(q_d, state.arms[r].q, qdot_d, state.arms[r].qdot,
                                   config.kq_stiff, config.dq_stiff, f_dyn, tau_ff);
        track_err = std::max(track_err, (q_d - state.arms[r].q).cwiseAbs().maxCoeff());
      }

      std::array<Eigen::VectorXd, 2> qddot;
      sim_step(world, state, tau_u[0], tau_u[1], nullptr, &qddot);

      for (int r = 0; r < 2; ++r) {
        // sensor reading and the robot's own model evaluated on the same state
        const Eigen::VectorXd tau_m =
            measured_joint_torques(config.robots[r], pre[r].q, tau_u[r], Vector6d::Zero(),
                                   config.noise_sigma, &rng);
        const Eigen::VectorXd f_dyn_actual = inverse_dynamics(
            config.robots[r], pre[r].q, pre[r].qdot, qddot[r], world.gravity);
        recorded[r].row(k) = extract_task_torques(tau_m, f_dyn_actual).transpose();
      }
    }

    for (int r = 0; r < 2; ++r)
      profiles[r] = encode_torques(recorded[r], config.dt, config.torque_kernels,
                                   config.duration, config.alpha_x);
    have_profiles = true;
    result.recorded_torques = recorded;
    result.stiff_tracking_error = track_err;
  }

  for (int r = 0; r < 2; ++r) {
    result.cmps[r].dmp =
        encode_dmp(demo.joints.q.middleCols(r * n, n).topRows(ticks + 1), config.dt,
                   config.motion_kernels, config.alpha_z, config.alpha_x);
    result.cmps[r].torque = profiles[r];
    result.cmps[r].validate();
  }
  return result;
}

RunResult replay(const ScenarioConfig& config, const Demonstration& demo,
                 const std::array<Cmp, 2>& cmps, ControllerVariant variant,
                 bool use_perturbation) {
  const auto t_begin = std::chrono::steady_clock::now();
  const int n = config.joints_per_arm();
  const int ticks = static_cast<int>(std::llround(config.duration / config.dt));
  const SimWorld world = config.make_world();
  const bool perturbed = use_perturbation && config.perturbation_enabled;

  const bool need_biman =
      variant == ControllerVariant::RecPlusBiman || variant == ControllerVariant::Entire;
  const bool need_vft =
      variant == ControllerVariant::RecMinusVft || variant == ControllerVariant::Entire;

  std::array<DmpTrajectory, 2> motion;
  for (int r = 0; r < 2; ++r) motion[r] = integrate_dmp(cmps[r].dmp, config.dt, config.duration);

  std::mt19937_64 rng(config.seed);
  SimState state = make_initial_state(world, demo.joints.q.row(0).head(n),
                                      demo.joints.q.row(0).tail(n));
  std::array<LowPassFilter, 2> filters{LowPassFilter(config.delta_tau_filter_hz, config.dt, n),
                                       LowPassFilter(config.delta_tau_filter_hz, config.dt, n)};
  std::array<Eigen::VectorXd, 2> tau_expected{Eigen::VectorXd::Zero(n),
                                              Eigen::VectorXd::Zero(n)};
  std::array<Eigen::VectorXd, 2> tau_measured_prev{Eigen::VectorXd::Zero(n),
                                                   Eigen::VectorXd::Zero(n)};
  bool have_sensors = false;

  RunResult result;
  result.variant = variant;
  result.log.reserve(ticks);

  for (int k = 0; k < ticks; ++k) {
    const double t = state.t;
    const double x = phase(t, cmps[0].dmp.tau, cmps[0].dmp.alpha_x);

    std::array<Pose, 2> tcp;
    std::array<Eigen::MatrixXd, 2> jac;
    for (int r = 0; r < 2; ++r) {
      tcp[r] = forward_kinematics(config.robots[r], state.arms[r].q);
      jac[r] = geometric_jacobian(config.robots[r], state.arms[r].q);
    }
    const TaskCoordinates coords = make_task_coordinates(tcp[0], tcp[1]);
    const TaskReference& ref = demo.refs[k];
    const TaskVector err = task_errors(coords, tcp[0].R, ref);
    const Eigen::MatrixXd jac_biman = bimanual_jacobian(jac[0], jac[1]);

    Eigen::VectorXd qdot_both(2 * n);
    qdot_both << state.arms[0].qdot, state.arms[1].qdot;
    const TaskVector xdot = jac_biman * qdot_both;
    const TaskVector v_d = desired_velocities(ref, ref.R_absd, ref.w_absd);
    const TaskVector xdot_err = v_d - xdot;

    // torque residuals from the previous tick's sensors, low-pass filtered
    std::array<Eigen::VectorXd, 2> delta_tau;
    for (int r = 0; r < 2; ++r) {
      delta_tau[r] = have_sensors ? perturbation_torques(tau_expected[r], tau_measured_prev[r])
                                  : Eigen::VectorXd::Zero(n);
      delta_tau[r] = filters[r].update(delta_tau[r]);
    }

    Eigen::VectorXd tau_rec(2 * n);
    tau_rec << evaluate_torques(cmps[0].torque, x), evaluate_torques(cmps[1].torque, x);

    Eigen::VectorXd q_act(2 * n);
    q_act << state.arms[0].q, state.arms[1].q;
    const Eigen::VectorXd q_demo_k = demo.joints.q.row(k).transpose();
    const Eigen::VectorXd tau_biman =
        need_biman ? symmetric_task_torque(jac_biman, err, xdot_err, config.gains, q_demo_k, q_act)
                   : Eigen::VectorXd::Zero(2 * n);
    const Eigen::VectorXd tau_vft =
        need_vft ? virtual_force_translation(jac[0], jac[1], delta_tau[0], delta_tau[1])
                 : Eigen::VectorXd::Zero(2 * n);
    const Eigen::VectorXd tau_ff = combined_feedforward(tau_rec, tau_biman, tau_vft, variant);

    std::array<Eigen::VectorXd, 2> tau_u;
    for (int r = 0; r < 2; ++r) {
      const Eigen::VectorXd q_d = motion[r].y.row(k).transpose();
      const Eigen::VectorXd qdot_d = motion[r].yd.row(k).transpose();
      const Eigen::VectorXd qdd_d = motion[r].ydd.row(k).transpose();
      const Eigen::VectorXd f_dyn = inverse_dynamics(config.robots[r], state.arms[r].q,
                                                     state.arms[r].qdot, qdd_d, world.gravity);
      tau_u[r] = joint_impedance(q_d, state.arms[r].q, qdot_d, state.arms[r].qdot,
                                 config.gains.kq, config.gains.dq, f_dyn,
                                 tau_ff.segment(r * n, n));
    }

    // perturbation estimate as the paper plots it: from measured joint torques
    Eigen::Vector3d pert_force = Eigen::Vector3d::Zero();
    for (int r = 0; r < 2; ++r)
      pert_force += end_effector_force_estimate(jac[r], -delta_tau[r]).head<3>();

    LogRow row;
    row.t = t;
    row.q1 = state.arms[0].q;
    row.q2 = state.arms[1].q;
    row.qd1 = motion[0].y.row(k).transpose();
    row.qd2 = motion[1].y.row(k).transpose();
    row.err = err;
    row.pert_force = pert_force;
    row.pert_norm = pert_force.norm();
    row.tau_rec = tau_rec;
    row.tau_biman = tau_biman;
    row.tau_vft = tau_vft;
    row.tau_ff = tau_ff;
    result.log.push_back(std::move(row));

    // this tick's sensors feed the next tick's residuals
    for (int r = 0; r < 2; ++r) {
      Vector6d w_ext = Vector6d::Zero();
      if (perturbed && config.perturbation.target == r)
        w_ext = config.perturbation.wrench_at(t);
      tau_measured_prev[r] = measured_joint_torques(config.robots[r], state.arms[r].q, tau_u[r],
                                                    w_ext, config.noise_sigma, &rng);
      tau_expected[r] = tau_u[r];
    }
    have_sensors = true;

    sim_step(world, state, tau_u[0], tau_u[1], perturbed ? &config.perturbation : nullptr);
  }

  result.metrics = compute_metrics(result.log);
  result.metrics.wall_clock_s =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t_begin).count();
  return result;
}

RunMetrics compute_metrics(const std::vector<LogRow>& rows) {
  RunMetrics m;
  if (rows.empty()) return m;
  // metrics see exactly what the 9-digit CSV retains, so recomputing them
  // from an emitted file reproduces them bit for bit
  double sum_abs2 = 0.0, sum_rel2 = 0.0;
  long max_abs_tick = 0, max_rel_tick = 0;
  std::vector<double> pert(rows.size());
  for (size_t k = 0; k < rows.size(); ++k) {
    const LogRow& row = rows[k];
    Eigen::Vector3d abs_err, rel_err;
    for (int i = 0; i < 3; ++i) {
      abs_err[i] = canonical9(row.err[kTaskAbsLinear + i]);
      rel_err[i] = canonical9(row.err[kTaskRelLinear + i]);
    }
    const double abs_norm = abs_err.norm();
    const double rel_norm = rel_err.norm();
    pert[k] = canonical9(row.pert_norm);
    sum_abs2 += abs_norm * abs_norm;
    sum_rel2 += rel_norm * rel_norm;
    if (abs_norm > m.max_abs_error) {
      m.max_abs_error = abs_norm;
      max_abs_tick = static_cast<long>(k);
    }
    if (rel_norm > m.max_rel_error) {
      m.max_rel_error = rel_norm;
      max_rel_tick = static_cast<long>(k);
    }
    if (pert[k] > m.peak_perturbation) {
      m.peak_perturbation = pert[k];
      m.peak_perturbation_tick = static_cast<long>(k);
    }
    for (Eigen::Index i = 0; i < row.tau_biman.size(); ++i) {
      m.peak_tau_biman = std::max(m.peak_tau_biman, std::abs(canonical9(row.tau_biman[i])));
      m.peak_tau_vft = std::max(m.peak_tau_vft, std::abs(canonical9(row.tau_vft[i])));
      const double residual =
          canonical9(row.tau_ff[i]) - (canonical9(row.tau_rec[i]) + canonical9(row.tau_biman[i]) -
                                       canonical9(row.tau_vft[i]));
      m.max_decomposition_residual = std::max(m.max_decomposition_residual, std::abs(residual));
    }
  }
  m.rms_abs_error = std::sqrt(sum_abs2 / rows.size());
  m.rms_rel_error = std::sqrt(sum_rel2 / rows.size());
  m.pert_at_max_abs_error = pert[max_abs_tick];
  m.pert_at_max_rel_error = pert[max_rel_tick];
  const LogRow& peak = rows[m.peak_perturbation_tick];
  Eigen::Vector3d abs_err, rel_err;
  for (int i = 0; i < 3; ++i) {
    abs_err[i] = canonical9(peak.err[kTaskAbsLinear + i]);
    rel_err[i] = canonical9(peak.err[kTaskRelLinear + i]);
  }
  m.abs_error_at_peak = abs_err.norm();
  m.rel_error_at_peak = rel_err.norm();
  m.compliance = m.peak_perturbation > 1e-9 ? m.max_abs_error / m.peak_perturbation : 0.0;
  return m;
}

ComparisonResult compare_variants(const ScenarioConfig& config, const Demonstration& demo,
                                  const std::array<Cmp, 2>& cmps) {
  const std::array<ControllerVariant, 4> order = {
      ControllerVariant::RecOnly, ControllerVariant::RecPlusBiman,
      ControllerVariant::RecMinusVft, ControllerVariant::Entire};
  ComparisonResult out;
  for (int i = 0; i < 4; ++i) out.runs[i] = replay(config, demo, cmps, order[i], true);

  const RunMetrics& rec = out.runs[0].metrics;
  const RunMetrics& biman = out.runs[1].metrics;
  const RunMetrics& vfc = out.runs[2].metrics;
  const RunMetrics& entire = out.runs[3].metrics;

  out.rel_ordering_ok = entire.rel_error_at_peak < biman.rel_error_at_peak &&
                        biman.rel_error_at_peak < vfc.rel_error_at_peak &&
                        vfc.rel_error_at_peak <= rec.rel_error_at_peak;
  out.rel_ratio = biman.rel_error_at_peak > 0.0
                      ? entire.rel_error_at_peak / biman.rel_error_at_peak
                      : 0.0;
  out.rel_ratio_ok = out.rel_ratio >= 0.3 && out.rel_ratio <= 0.7;
  out.compliance_ordering_ok =
      vfc.compliance > entire.compliance && entire.compliance > biman.compliance;

  std::ostringstream table;
  table << "metric                    rec        rec+biman  rec-vft    entire\n";
  auto row = [&table](const char* label, double a, double b, double c, double d) {
    char buf[160];
    std::snprintf(buf, sizeof(buf), "%-24s  %-9.4g  %-9.4g  %-9.4g  %-9.4g\n", label, a, b, c, d);
    table << buf;
  };
  row("abs error @peak [m] *", rec.abs_error_at_peak, biman.abs_error_at_peak,
      vfc.abs_error_at_peak, entire.abs_error_at_peak);
  row("rel error @peak [m]", rec.rel_error_at_peak, biman.rel_error_at_peak,
      vfc.rel_error_at_peak, entire.rel_error_at_peak);
  row("perturbation [N]", rec.peak_perturbation, biman.peak_perturbation,
      vfc.peak_perturbation, entire.peak_perturbation);
  row("max abs error [m]", rec.max_abs_error, biman.max_abs_error, vfc.max_abs_error,
      entire.max_abs_error);
  row("max rel error [m]", rec.max_rel_error, biman.max_rel_error, vfc.max_rel_error,
      entire.max_rel_error);
  row("compliance [m/N]", rec.compliance, biman.compliance, vfc.compliance, entire.compliance);
  table << "* feedback-free variant: absolute error not comparable across columns\n";
  char buf[256];
  std::snprintf(buf, sizeof(buf),
                "rel ordering (entire < rec+biman < rec-vft <= rec): %s\n"
                "entire/rec+biman rel ratio: %.3f (target 0.30..0.70): %s\n"
                "compliance ordering (rec-vft > entire > rec+biman): %s\n",
                out.rel_ordering_ok ? "ok" : "VIOLATED", out.rel_ratio,
                out.rel_ratio_ok ? "ok" : "VIOLATED",
                out.compliance_ordering_ok ? "ok" : "VIOLATED");
  table << buf;
  out.table = table.str();
  return out;
}

void write_metrics(const std::filesystem::path& path, const RunMetrics& m) {
  ConfigText cfg;
  cfg.set_double("metrics", "max_abs_error", m.max_abs_error);
  cfg.set_double("metrics", "max_rel_error", m.max_rel_error);
  cfg.set_double("metrics", "rms_abs_error", m.rms_abs_error);
  cfg.set_double("metrics", "rms_rel_error", m.rms_rel_error);
  cfg.set_double("metrics", "pert_at_max_abs_error", m.pert_at_max_abs_error);
  cfg.set_double("metrics", "pert_at_max_rel_error", m.pert_at_max_rel_error);
  cfg.set_double("metrics", "peak_perturbation", m.peak_perturbation);
  cfg.set_int("metrics", "peak_perturbation_tick", m.peak_perturbation_tick);
  cfg.set_double("metrics", "abs_error_at_peak", m.abs_error_at_peak);
  cfg.set_double("metrics", "rel_error_at_peak", m.rel_error_at_peak);
  cfg.set_double("metrics", "compliance", m.compliance);
  cfg.set_double("metrics", "peak_tau_biman", m.peak_tau_biman);
  cfg.set_double("metrics", "peak_tau_vft", m.peak_tau_vft);
  cfg.set_double("metrics", "max_decomposition_residual", m.max_decomposition_residual);
  cfg.set_double("metrics", "wall_clock_s", m.wall_clock_s);
  cfg.save(path);
}

RunMetrics read_metrics(const std::filesystem::path& path) {
  const ConfigText cfg = ConfigText::parse_file(path);
  RunMetrics m;
  m.max_abs_error = cfg.get_double("metrics", "max_abs_error");
  m.max_rel_error = cfg.get_double("metrics", "max_rel_error");
  m.rms_abs_error = cfg.get_double("metrics", "rms_abs_error");
  m.rms_rel_error = cfg.get_double("metrics", "rms_rel_error");
  m.pert_at_max_abs_error = cfg.get_double("metrics", "pert_at_max_abs_error");
  m.pert_at_max_rel_error = cfg.get_double("metrics", "pert_at_max_rel_error");
  m.peak_perturbation = cfg.get_double("metrics", "peak_perturbation");
  m.peak_perturbation_tick = cfg.get_int("metrics", "peak_perturbation_tick");
  m.abs_error_at_peak = cfg.get_double("metrics", "abs_error_at_peak");
  m.rel_error_at_peak = cfg.get_double("metrics", "rel_error_at_peak");
  m.compliance = cfg.get_double("metrics", "compliance");
  m.peak_tau_biman = cfg.get_double("metrics", "peak_tau_biman");
  m.peak_tau_vft = cfg.get_double("metrics", "peak_tau_vft");
  m.max_decomposition_residual = cfg.get_double("metrics", "max_decomposition_residual");
  m.wall_clock_s = cfg.get_double("metrics", "wall_clock_s");
  return m;
}

void write_run_plots(const std::filesystem::path& dir, const std::vector<LogRow>& rows) {
  if (rows.empty()) return;
  std::vector<double> t(rows.size());
  for (size_t k = 0; k < rows.size(); ++k) t[k] = rows[k].t;

  auto norm_series = [&](int offset, const std::string& label) {
    PlotSeries s{label, t, {}};
    s.y.resize(rows.size());
    for (size_t k = 0; k < rows.size(); ++k)
      s.y[k] = rows[k].err.segment<3>(offset).norm();
    return s;
  };
  write_svg_line_chart(dir / "abs_error.svg", "Absolute position error", "t [s]", "error [m]",
                       {norm_series(kTaskAbsLinear, "|e_abs|")});
  write_svg_line_chart(dir / "rel_error.svg", "Relative position error", "t [s]", "error [m]",
                       {norm_series(kTaskRelLinear, "|e_rel|")});

  PlotSeries pert{"|f_est|", t, {}};
  pert.y.resize(rows.size());
  for (size_t k = 0; k < rows.size(); ++k) pert.y[k] = rows[k].pert_norm;
  write_svg_line_chart(dir / "perturbation.svg", "Estimated end-effector perturbation", "t [s]",
                       "force [N]", {pert});

  // first joint of robot 2, like the torque-decomposition figure
  const int n = static_cast<int>(rows[0].q1.size());
  auto tau_series = [&](const std::string& label, auto getter) {
    PlotSeries s{label, t, {}};
    s.y.resize(rows.size());
    for (size_t k = 0; k < rows.size(); ++k) s.y[k] = getter(rows[k])[n];
    return s;
  };
  write_svg_line_chart(
      dir / "torque_decomposition.svg", "Feed-forward torque, joint 1 of robot 2", "t [s]",
      "torque [Nm]",
      {tau_series("tau_ff", [](const LogRow& r) { return r.tau_ff; }),
       tau_series("tau_rec", [](const LogRow& r) { return r.tau_rec; }),
       tau_series("tau_biman", [](const LogRow& r) { return r.tau_biman; }),
       tau_series("tau_vft", [](const LogRow& r) { return r.tau_vft; })});
}

}  // namespace bimanual
