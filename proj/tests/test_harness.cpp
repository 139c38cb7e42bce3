#include "bimanual/harness.hpp"

#include "oracles.hpp"

#include <doctest.h>

#include <fstream>

using namespace bimanual;

#ifndef BIMANUAL_CONFIG_DIR
#error "BIMANUAL_CONFIG_DIR must point at the shipped config corpus"
#endif

namespace {

const std::filesystem::path kConfigDir = BIMANUAL_CONFIG_DIR;

struct SmokePipeline {
  ScenarioConfig config;
  Demonstration demo;
  LearnResult learned;
};

const SmokePipeline& smoke() {
  static const SmokePipeline pipeline = [] {
    SmokePipeline p;
    p.config = load_scenario(kConfigDir / "smoke.scenario");
    p.demo = demonstrate(p.config);
    p.learned = learn(p.config, p.demo);
    return p;
  }();
  return pipeline;
}

// static-hold variant of the smoke scenario, optionally without payloads
ScenarioConfig static_hold_config(double payload_mass) {
  ScenarioConfig config = load_scenario(kConfigDir / "smoke.scenario");
  config.name = "static_hold";
  config.duration = 3.0;
  config.keyframes = {{0.0, Eigen::Vector3d::Zero()}, {3.0, Eigen::Vector3d::Zero()}};
  config.perturbation_enabled = false;
  config.payloads[0].mass = payload_mass;
  config.payloads[1].mass = payload_mass;
  config.validate();
  return config;
}

}  // namespace

TEST_SUITE("config") {

TEST_CASE("config text parses sections, repeats and comments") {
  const ConfigText cfg = ConfigText::parse_string(
      "# comment\n[alpha]\nkey = 1.5\nlist = 1 2 3\nlist = 4 5 6\n\n[beta]\nname = hello\n");
  CHECK(cfg.get_double("alpha", "key") == 1.5);
  CHECK(cfg.get_all("alpha", "list").size() == 2);
  CHECK(ConfigText::parse_vector(cfg.get_all("alpha", "list")[1])[0] == 4.0);
  CHECK(cfg.get("beta", "name") == "hello");
  CHECK(cfg.get_or("beta", "absent", "fallback") == "fallback");
  CHECK(cfg.has_section("alpha"));
  CHECK_FALSE(cfg.has_section("gamma"));
}

TEST_CASE("config text rejects malformed input") {
  CHECK_THROWS(ConfigText::parse_string("key_outside_section = 1\n"));
  CHECK_THROWS(ConfigText::parse_string("[s]\nno equals sign\n"));
  const ConfigText cfg = ConfigText::parse_string("[s]\nk = 1\nk = 2\n");
  CHECK_THROWS(cfg.get("s", "k"));       // repeated key is not single-valued
  CHECK_THROWS(cfg.get("s", "absent"));  // missing
  CHECK_THROWS(ConfigText::parse_string("[s]\nk = abc\n").get_double("s", "k"));
}

TEST_CASE("config text round trips through its writer") {
  ConfigText cfg;
  cfg.set_double("a", "x", 0.1 + 0.2);
  cfg.add_vector("a", "row", Eigen::Vector3d(1.0, -2.5, 1e-17));
  cfg.set("b", "name", "value with spaces");
  const ConfigText back = ConfigText::parse_string(cfg.to_string());
  CHECK(back.get_double("a", "x") == 0.1 + 0.2);  // lossless double formatting
  CHECK(back.get_vector("a", "row")[2] == 1e-17);
  CHECK(back.get("b", "name") == "value with spaces");
}

TEST_CASE("robot model file loads with every declared key") {
  const RobotModel model = load_robot_model(kConfigDir / "lwr7.model");
  CHECK(model.joint_count == 7);
  CHECK(model.dh.size() == 7);
  CHECK(model.link_inertial.size() == 7);
  CHECK(model.joint_limits.size() == 7);
  CHECK(model.tcp_offset.p.z() == 0.078);
  CHECK(model.locked_joints.empty());  // locking comes from the scenario
  model.validate();
}

TEST_CASE("scenario file resolves gains, locks and the perturbation") {
  const ScenarioConfig config = load_scenario(kConfigDir / "default.scenario");
  CHECK(config.duration == 30.0);
  CHECK(config.dt == 0.002);
  CHECK(config.robots[0].is_locked(2));
  CHECK(config.robots[1].is_locked(2));
  CHECK(config.gains.kq[0] == 25.0);
  CHECK(config.kq_stiff[0] == 2000.0);
  CHECK(config.gains.k_task[kTaskRelLinear] == 2000.0);
  CHECK(config.gains.k_task[kTaskAbsLinear] == 0.0);
  CHECK(config.gains.d_task[kTaskRelLinear] ==
        doctest::Approx(2.0 * std::sqrt(2000.0)));
  CHECK(config.payloads[0].mass == 2.5);
  CHECK(config.perturbation_enabled);
  CHECK(config.perturbation.target == 0);
  CHECK(config.perturbation.wrench_at(12.0)[0] == doctest::Approx(25.0));
  CHECK(config.perturbation.wrench_at(5.0).norm() == 0.0);
  // auto damping resolved to positive per-joint values (zero on the locked axis)
  CHECK(config.gains.dq.maxCoeff() > 0.0);
  CHECK(config.gains.dq.minCoeff() >= 0.0);
}

TEST_CASE("synthesized reference holds the relative task constant") {
  const ScenarioConfig config = load_scenario(kConfigDir / "smoke.scenario");
  const auto refs = synthesize_task_reference(config);
  CHECK(static_cast<int>(refs.size()) ==
        static_cast<int>(std::llround(config.duration / config.dt)) + 1);
  for (size_t k = 0; k < refs.size(); k += 100) {
    CHECK(refs[k].p_reld_abs.isApprox(Eigen::Vector3d(0, 0.6, 0), 1e-14));
    CHECK(refs[k].pd_reld_abs.norm() == 0.0);
    CHECK(refs[k].w_absd.norm() == 0.0);
  }
  // endpoints at rest, dip in between
  CHECK(refs.front().pd_absd.norm() == 0.0);
  CHECK(refs.back().pd_absd.norm() == 0.0);
  CHECK(refs[1200].p_absd.z() < refs[0].p_absd.z());
}

}  // TEST_SUITE

TEST_SUITE("csv") {

TEST_CASE("log header matches the fixed schema") {
  const std::string h = csv_log_header(2);
  CHECK(h ==
        "t,q1_1,q1_2,q2_1,q2_2,qd1_1,qd1_2,qd2_1,qd2_2,"
        "err_abs_x,err_abs_y,err_abs_z,err_abs_rx,err_abs_ry,err_abs_rz,"
        "err_rel_x,err_rel_y,err_rel_z,err_rel_rx,err_rel_ry,err_rel_rz,"
        "pert_fx,pert_fy,pert_fz,pert_n,"
        "tau_rec_1_1,tau_rec_1_2,tau_rec_2_1,tau_rec_2_2,"
        "tau_biman_1_1,tau_biman_1_2,tau_biman_2_1,tau_biman_2_2,"
        "tau_vft_1_1,tau_vft_1_2,tau_vft_2_1,tau_vft_2_2,"
        "tau_ff_1_1,tau_ff_1_2,tau_ff_2_1,tau_ff_2_2");
}

TEST_CASE("floats carry nine significant digits and rows end with LF") {
  CHECK(format_sig9(M_PI) == "3.14159265");
  CHECK(format_sig9(-1.0 / 3.0) == "-0.333333333");
  CHECK(canonical9(M_PI) == 3.14159265);

  LogRow row;
  row.t = 0.123456789123;
  row.q1 = Eigen::VectorXd::Constant(2, M_PI);
  row.q2 = row.q1;
  row.qd1 = row.q1;
  row.qd2 = row.q1;
  row.tau_rec = Eigen::VectorXd::Zero(4);
  row.tau_biman = row.tau_rec;
  row.tau_vft = row.tau_rec;
  row.tau_ff = row.tau_rec;
  const auto path = std::filesystem::temp_directory_path() / "bimanual_log_format.csv";
  write_log_csv(path, {row});
  std::ifstream in(path, std::ios::binary);
  std::string content((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  CHECK(content.find("\r\n") == std::string::npos);
  CHECK(content.find("0.123456789") != std::string::npos);
  CHECK(content.find("3.14159265,") != std::string::npos);
  CHECK(content.back() == '\n');
  std::filesystem::remove(path);
}

TEST_CASE("log round trips to the canonical values") {
  std::mt19937_64 rng(81);
  std::vector<LogRow> rows(3);
  for (auto& row : rows) {
    row.t = oracles::random_vector(rng, 1, 10.0)[0];
    row.q1 = oracles::random_vector(rng, 7, 2.0);
    row.q2 = oracles::random_vector(rng, 7, 2.0);
    row.qd1 = oracles::random_vector(rng, 7, 2.0);
    row.qd2 = oracles::random_vector(rng, 7, 2.0);
    for (int i = 0; i < 12; ++i) row.err[i] = oracles::random_vector(rng, 1, 0.1)[0];
    row.pert_force = oracles::random_vector(rng, 3, 20.0);
    row.pert_norm = row.pert_force.norm();
    row.tau_rec = oracles::random_vector(rng, 14, 30.0);
    row.tau_biman = oracles::random_vector(rng, 14, 30.0);
    row.tau_vft = oracles::random_vector(rng, 14, 30.0);
    row.tau_ff = oracles::random_vector(rng, 14, 30.0);
  }
  const auto path = std::filesystem::temp_directory_path() / "bimanual_log_roundtrip.csv";
  write_log_csv(path, rows);
  const auto back = read_log_csv(path);
  REQUIRE(back.size() == rows.size());
  for (size_t k = 0; k < rows.size(); ++k) {
    CHECK(back[k].t == canonical9(rows[k].t));
    CHECK(back[k].q1[3] == canonical9(rows[k].q1[3]));
    CHECK(back[k].tau_ff[13] == canonical9(rows[k].tau_ff[13]));
    CHECK(back[k].err[11] == canonical9(rows[k].err[11]));
  }
  std::filesystem::remove(path);
}

TEST_CASE("trajectory files round trip losslessly") {
  std::mt19937_64 rng(82);
  JointTrajectory traj;
  traj.dt = 0.002;
  traj.q = Eigen::MatrixXd::Random(50, 14);
  traj.qdot = Eigen::MatrixXd::Random(50, 14);
  const auto path = std::filesystem::temp_directory_path() / "bimanual_traj_roundtrip.csv";
  write_trajectory_csv(path, traj);
  const JointTrajectory back = read_trajectory_csv(path);
  CHECK(back.dt == traj.dt);
  CHECK((back.q - traj.q).cwiseAbs().maxCoeff() == 0.0);
  CHECK((back.qdot - traj.qdot).cwiseAbs().maxCoeff() == 0.0);
  std::filesystem::remove(path);
}

TEST_CASE("task reference files reproduce poses and rates") {
  const ScenarioConfig config = load_scenario(kConfigDir / "smoke.scenario");
  auto refs = synthesize_task_reference(config);
  refs.resize(100);
  const auto path = std::filesystem::temp_directory_path() / "bimanual_refs_roundtrip.csv";
  write_task_reference_csv(path, refs, config.dt);
  double dt = 0.0;
  const auto back = read_task_reference_csv(path, &dt);
  REQUIRE(back.size() == refs.size());
  CHECK(dt == config.dt);
  for (size_t k = 0; k < refs.size(); k += 10) {
    CHECK((back[k].p_absd - refs[k].p_absd).norm() < 1e-15);
    CHECK((back[k].R_absd - refs[k].R_absd).cwiseAbs().maxCoeff() < 1e-12);
    CHECK((back[k].pd_absd - refs[k].pd_absd).norm() < 1e-15);
  }
  std::filesystem::remove(path);
}

}  // TEST_SUITE

TEST_SUITE("harness") {

TEST_CASE("demonstration reconstructs the smoke reference everywhere") {
  const SmokePipeline& p = smoke();
  const int n = p.config.joints_per_arm();
  double worst = 0.0;
  for (int k = 0; k < p.demo.joints.sample_count(); k += 10) {
    const Pose p1 = forward_kinematics(p.config.robots[0], p.demo.joints.q.row(k).head(n));
    const Pose p2 = forward_kinematics(p.config.robots[1], p.demo.joints.q.row(k).tail(n));
    const TaskVector e = task_errors(make_task_coordinates(p1, p2), p1.R, p.demo.refs[k]);
    worst = std::max(worst, std::max(e.segment<3>(kTaskAbsLinear).norm(),
                                     e.segment<3>(kTaskRelLinear).norm()));
  }
  CHECK(worst <= 1e-4);
  // the locked third axes never move
  CHECK((p.demo.joints.q.col(2).array() - p.demo.joints.q(0, 2)).abs().maxCoeff() == 0.0);
  CHECK((p.demo.joints.q.col(10).array() - p.demo.joints.q(0, 10)).abs().maxCoeff() == 0.0);
}

TEST_CASE("static hold without payload learns near-zero task torques") {
  const ScenarioConfig config = static_hold_config(0.0);
  const Demonstration demo = demonstrate(config);
  const LearnResult learned = learn(config, demo);
  CHECK(learned.stiff_tracking_error <= 1e-3);
  for (int r = 0; r < 2; ++r)
    CHECK(learned.recorded_torques[r].cwiseAbs().maxCoeff() <= 0.1);
}

TEST_CASE("static hold with payload learns the analytic payload torque") {
  const ScenarioConfig config = static_hold_config(2.5);
  const Demonstration demo = demonstrate(config);
  const LearnResult learned = learn(config, demo);
  CHECK(learned.stiff_tracking_error <= 1e-3);
  const int n = config.joints_per_arm();
  for (int r = 0; r < 2; ++r) {
    const Eigen::VectorXd q = demo.joints.q.row(0).segment(r * n, n);
    Vector6d payload_wrench = Vector6d::Zero();
    payload_wrench[2] = -2.5 * 9.81;
    const Eigen::VectorXd analytic =
        geometric_jacobian(config.robots[r], q).transpose() * payload_wrench;
    const Eigen::VectorXd mid = learned.recorded_torques[r].row(1000).transpose();
    CHECK((mid - analytic).cwiseAbs().maxCoeff() <= 0.02 * analytic.cwiseAbs().maxCoeff());
  }
}

TEST_CASE("torque encoding reproduces the recorded stiff run within 2 percent") {
  const SmokePipeline& p = smoke();
  for (int r = 0; r < 2; ++r) {
    const Eigen::MatrixXd& recorded = p.learned.recorded_torques[r];
    double p2p = 0.0;
    for (int j = 0; j < recorded.cols(); ++j)
      p2p = std::max(p2p, recorded.col(j).maxCoeff() - recorded.col(j).minCoeff());
    double sq = 0.0;
    for (int k = 0; k < recorded.rows(); ++k) {
      const double x = phase(k * p.config.dt, p.config.duration, p.config.alpha_x);
      sq += (evaluate_torques(p.learned.cmps[r].torque, x) - recorded.row(k).transpose())
                .squaredNorm();
    }
    const double rmse = std::sqrt(sq / (recorded.rows() * recorded.cols()));
    CHECK(rmse <= 0.02 * p2p);
  }
}

TEST_CASE("clean replay tracks and keeps the reactive terms silent") {
  const SmokePipeline& p = smoke();
  const RunResult run = replay(p.config, p.demo, p.learned.cmps, ControllerVariant::Entire, false);
  CHECK(run.metrics.max_abs_error <= 5e-3);
  CHECK(run.metrics.max_rel_error <= 5e-3);
  CHECK(run.metrics.peak_tau_biman <= 0.5);
  CHECK(run.metrics.peak_tau_vft <= 0.5);
  // the decomposition identity holds exactly on the raw log
  for (const LogRow& row : run.log) {
    const Eigen::VectorXd residual = row.tau_ff - ((row.tau_rec + row.tau_biman) - row.tau_vft);
    CHECK(residual.cwiseAbs().maxCoeff() <= 1e-12);
  }
}

TEST_CASE("pushed rec-only run loses the relative task") {
  const SmokePipeline& p = smoke();
  const RunResult clean = replay(p.config, p.demo, p.learned.cmps, ControllerVariant::RecOnly, false);
  const RunResult pushed = replay(p.config, p.demo, p.learned.cmps, ControllerVariant::RecOnly, true);
  CHECK(pushed.metrics.max_rel_error > 0.05);
  CHECK(pushed.metrics.max_rel_error > 100.0 * clean.metrics.max_rel_error);
  CHECK(pushed.metrics.peak_perturbation > 10.0);
}

TEST_CASE("replay logs are byte-identical across runs with the same seed") {
  const SmokePipeline& p = smoke();
  const RunResult a = replay(p.config, p.demo, p.learned.cmps, ControllerVariant::Entire, true);
  const RunResult b = replay(p.config, p.demo, p.learned.cmps, ControllerVariant::Entire, true);
  const auto dir = std::filesystem::temp_directory_path();
  write_log_csv(dir / "bimanual_det_a.csv", a.log);
  write_log_csv(dir / "bimanual_det_b.csv", b.log);
  std::ifstream fa(dir / "bimanual_det_a.csv", std::ios::binary);
  std::ifstream fb(dir / "bimanual_det_b.csv", std::ios::binary);
  const std::string sa((std::istreambuf_iterator<char>(fa)), std::istreambuf_iterator<char>());
  const std::string sb((std::istreambuf_iterator<char>(fb)), std::istreambuf_iterator<char>());
  CHECK(sa == sb);
  std::filesystem::remove(dir / "bimanual_det_a.csv");
  std::filesystem::remove(dir / "bimanual_det_b.csv");
}

TEST_CASE("metrics recomputed from the emitted csv are identical") {
  const SmokePipeline& p = smoke();
  const RunResult run = replay(p.config, p.demo, p.learned.cmps, ControllerVariant::Entire, true);
  const auto path = std::filesystem::temp_directory_path() / "bimanual_metrics_roundtrip.csv";
  write_log_csv(path, run.log);
  const RunMetrics again = compute_metrics(read_log_csv(path));
  CHECK(again.max_abs_error == run.metrics.max_abs_error);
  CHECK(again.max_rel_error == run.metrics.max_rel_error);
  CHECK(again.rms_abs_error == run.metrics.rms_abs_error);
  CHECK(again.rms_rel_error == run.metrics.rms_rel_error);
  CHECK(again.peak_perturbation == run.metrics.peak_perturbation);
  CHECK(again.peak_perturbation_tick == run.metrics.peak_perturbation_tick);
  CHECK(again.abs_error_at_peak == run.metrics.abs_error_at_peak);
  CHECK(again.rel_error_at_peak == run.metrics.rel_error_at_peak);
  CHECK(again.compliance == run.metrics.compliance);
  CHECK(again.peak_tau_biman == run.metrics.peak_tau_biman);
  CHECK(again.peak_tau_vft == run.metrics.peak_tau_vft);
  std::filesystem::remove(path);
}

TEST_CASE("metrics files round trip") {
  const SmokePipeline& p = smoke();
  const RunResult run = replay(p.config, p.demo, p.learned.cmps, ControllerVariant::RecOnly, true);
  const auto path = std::filesystem::temp_directory_path() / "bimanual_metrics.txt";
  write_metrics(path, run.metrics);
  const RunMetrics back = read_metrics(path);
  CHECK(back.max_abs_error == run.metrics.max_abs_error);
  CHECK(back.peak_perturbation_tick == run.metrics.peak_perturbation_tick);
  std::filesystem::remove(path);
}

TEST_CASE("svg plots are written and well formed") {
  const SmokePipeline& p = smoke();
  const RunResult run = replay(p.config, p.demo, p.learned.cmps, ControllerVariant::Entire, true);
  const auto dir = std::filesystem::temp_directory_path() / "bimanual_plots";
  std::filesystem::create_directories(dir);
  write_run_plots(dir, run.log);
  for (const char* name :
       {"abs_error.svg", "rel_error.svg", "perturbation.svg", "torque_decomposition.svg"}) {
    std::ifstream in(dir / name);
    REQUIRE(in.good());
    std::string content((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    CHECK(content.rfind("<svg", 0) == 0);
    CHECK(content.find("</svg>") != std::string::npos);
    CHECK(content.find("polyline") != std::string::npos);
  }
  std::filesystem::remove_all(dir);
}

// flipping the documented signs must make the documented behavior worse
TEST_CASE("sign audit: dynamics compensation and force translation") {
  const SmokePipeline& p = smoke();
  const ScenarioConfig& config = p.config;
  const int n = config.joints_per_arm();
  const SimWorld world = config.make_world();

  SUBCASE("f_dynamic enters with a plus sign") {
    // replay the learned motion for half a second with the compensation sign
    // as documented and flipped; tracking must degrade badly when flipped
    auto track_error = [&](double sign) {
      std::array<DmpTrajectory, 2> motion;
      for (int r = 0; r < 2; ++r)
        motion[r] = integrate_dmp(p.learned.cmps[r].dmp, config.dt, config.duration);
      SimState state = make_initial_state(world, p.demo.joints.q.row(0).head(n),
                                          p.demo.joints.q.row(0).tail(n));
      double worst = 0.0;
      for (int k = 0; k < 250; ++k) {
        const double x = phase(state.t, config.duration, config.alpha_x);
        std::array<Eigen::VectorXd, 2> tau;
        for (int r = 0; r < 2; ++r) {
          const Eigen::VectorXd q_d = motion[r].y.row(k).transpose();
          const Eigen::VectorXd f_dyn =
              sign * inverse_dynamics(config.robots[r], state.arms[r].q, state.arms[r].qdot,
                                      motion[r].ydd.row(k).transpose(), world.gravity);
          tau[r] = joint_impedance(q_d, state.arms[r].q, motion[r].yd.row(k).transpose(),
                                   state.arms[r].qdot, config.gains.kq, config.gains.dq, f_dyn,
                                   evaluate_torques(p.learned.cmps[r].torque, x));
          worst = std::max(worst, (q_d - state.arms[r].q).cwiseAbs().maxCoeff());
        }
        sim_step(world, state, tau[0], tau[1], nullptr);
      }
      return worst;
    };
    const double with_plus = track_error(1.0);
    const double with_minus = track_error(-1.0);
    CHECK(with_minus > 10.0 * with_plus);
  }

  SUBCASE("tau_vft enters with a minus sign") {
    // entire controller with the vft term flipped: worse relative error
    auto pushed_rel_error = [&](double vft_sign) {
      std::array<DmpTrajectory, 2> motion;
      for (int r = 0; r < 2; ++r)
        motion[r] = integrate_dmp(p.learned.cmps[r].dmp, config.dt, config.duration);
      SimState state = make_initial_state(world, p.demo.joints.q.row(0).head(n),
                                          p.demo.joints.q.row(0).tail(n));
      std::array<LowPassFilter, 2> filters{
          LowPassFilter(config.delta_tau_filter_hz, config.dt, n),
          LowPassFilter(config.delta_tau_filter_hz, config.dt, n)};
      std::array<Eigen::VectorXd, 2> expected{Eigen::VectorXd::Zero(n),
                                              Eigen::VectorXd::Zero(n)};
      std::array<Eigen::VectorXd, 2> measured{Eigen::VectorXd::Zero(n),
                                              Eigen::VectorXd::Zero(n)};
      const int ticks = static_cast<int>(config.duration / config.dt);
      double worst_rel = 0.0;
      for (int k = 0; k < ticks; ++k) {
        const double x = phase(state.t, config.duration, config.alpha_x);
        std::array<Pose, 2> tcp;
        std::array<Eigen::MatrixXd, 2> jac;
        for (int r = 0; r < 2; ++r) {
          tcp[r] = forward_kinematics(config.robots[r], state.arms[r].q);
          jac[r] = geometric_jacobian(config.robots[r], state.arms[r].q);
        }
        const TaskCoordinates coords = make_task_coordinates(tcp[0], tcp[1]);
        const TaskVector err = task_errors(coords, tcp[0].R, p.demo.refs[k]);
        worst_rel = std::max(worst_rel, err.segment<3>(kTaskRelLinear).norm());
        const Eigen::MatrixXd jb = bimanual_jacobian(jac[0], jac[1]);
        Eigen::VectorXd qdot_both(2 * n);
        qdot_both << state.arms[0].qdot, state.arms[1].qdot;
        const TaskVector v_d =
            desired_velocities(p.demo.refs[k], p.demo.refs[k].R_absd, p.demo.refs[k].w_absd);
        const TaskVector xerr_dot = v_d - jb * qdot_both;
        std::array<Eigen::VectorXd, 2> dtau;
        for (int r = 0; r < 2; ++r)
          dtau[r] = filters[r].update(perturbation_torques(expected[r], measured[r]));
        Eigen::VectorXd q_act(2 * n);
        q_act << state.arms[0].q, state.arms[1].q;
        Eigen::VectorXd tau_rec(2 * n);
        tau_rec << evaluate_torques(p.learned.cmps[0].torque, x),
            evaluate_torques(p.learned.cmps[1].torque, x);
        const Eigen::VectorXd tau_biman = symmetric_task_torque(
            jb, err, xerr_dot, config.gains, p.demo.joints.q.row(k).transpose(), q_act);
        const Eigen::VectorXd tau_vft =
            virtual_force_translation(jac[0], jac[1], dtau[0], dtau[1]);
        const Eigen::VectorXd tau_ff = tau_rec + tau_biman - vft_sign * tau_vft;
        std::array<Eigen::VectorXd, 2> tau_u;
        for (int r = 0; r < 2; ++r) {
          const Eigen::VectorXd f_dyn =
              inverse_dynamics(config.robots[r], state.arms[r].q, state.arms[r].qdot,
                               motion[r].ydd.row(k).transpose(), world.gravity);
          tau_u[r] = joint_impedance(motion[r].y.row(k).transpose(), state.arms[r].q,
                                     motion[r].yd.row(k).transpose(), state.arms[r].qdot,
                                     config.gains.kq, config.gains.dq, f_dyn,
                                     tau_ff.segment(r * n, n));
        }
        for (int r = 0; r < 2; ++r) {
          Vector6d w_ext = Vector6d::Zero();
          if (config.perturbation.target == r) w_ext = config.perturbation.wrench_at(state.t);
          measured[r] =
              measured_joint_torques(config.robots[r], state.arms[r].q, tau_u[r], w_ext);
          expected[r] = tau_u[r];
        }
        sim_step(world, state, tau_u[0], tau_u[1], &config.perturbation);
      }
      return worst_rel;
    };
    const double documented = pushed_rel_error(1.0);
    const double flipped = pushed_rel_error(-1.0);
    CHECK(flipped > 1.5 * documented);
  }
}

TEST_CASE("compare runs the four variants and checks the orderings") {
  // smoke-scale comparison: the machinery, flags and table only (the flagship
  // orderings live in the acceptance suite)
  const SmokePipeline& p = smoke();
  const ComparisonResult cmp = compare_variants(p.config, p.demo, p.learned.cmps);
  CHECK(cmp.runs[0].variant == ControllerVariant::RecOnly);
  CHECK(cmp.runs[3].variant == ControllerVariant::Entire);
  CHECK(cmp.table.find("rel error @peak") != std::string::npos);
  CHECK(cmp.runs[1].metrics.max_rel_error < cmp.runs[0].metrics.max_rel_error);
  for (const auto& run : cmp.runs) CHECK(run.metrics.peak_perturbation > 5.0);
}

}  // TEST_SUITE
