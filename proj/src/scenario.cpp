#include "bimanual/scenario.hpp"

#include <cmath>
#include <sstream>

namespace bimanual {

Eigen::Matrix3d rpy_to_rotation(double roll, double pitch, double yaw) {
  return (Eigen::AngleAxisd(yaw, Eigen::Vector3d::UnitZ()) *
          Eigen::AngleAxisd(pitch, Eigen::Vector3d::UnitY()) *
          Eigen::AngleAxisd(roll, Eigen::Vector3d::UnitX()))
      .toRotationMatrix();
}

namespace {

Pose pose_from_xyz_rpy(const Eigen::VectorXd& v, const std::string& what) {
  if (v.size() != 6) throw std::runtime_error(what + ": expected 'x y z roll pitch yaw'");
  Pose pose;
  pose.p = v.head<3>();
  pose.R = rpy_to_rotation(v[3], v[4], v[5]);
  return pose;
}

// "3" or "3:0.25", joint indices 1-based in files
std::pair<int, double> parse_locked(const std::string& text) {
  const auto colon = text.find(':');
  const int idx = std::stoi(text.substr(0, colon));
  const double angle = colon == std::string::npos ? 0.0 : std::stod(text.substr(colon + 1));
  return {idx - 1, angle};
}

}  // namespace

RobotModel load_robot_model(const std::filesystem::path& path) {
  const ConfigText cfg = ConfigText::parse_file(path);
  RobotModel model;
  model.name = cfg.get_or("robot", "name", path.stem().string());
  model.joint_count = cfg.get_int("robot", "joints");

  for (const auto& row : cfg.get_all("robot", "dh")) {
    const Eigen::VectorXd v = ConfigText::parse_vector(row);
    if (v.size() != 4) throw std::runtime_error(path.string() + ": dh rows need 'a alpha d theta'");
    model.dh.push_back({v[0], v[1], v[2], v[3]});
  }
  model.base_pose = pose_from_xyz_rpy(
      cfg.get_vector_or("robot", "base", Eigen::VectorXd::Zero(6)), "base");
  model.tcp_offset = pose_from_xyz_rpy(
      cfg.get_vector_or("robot", "tcp", Eigen::VectorXd::Zero(6)), "tcp");

  for (const auto& row : cfg.get_all("robot", "inertia")) {
    const Eigen::VectorXd v = ConfigText::parse_vector(row);
    if (v.size() != 10)
      throw std::runtime_error(path.string() +
                               ": inertia rows need 'm cx cy cz ixx iyy izz ixy ixz iyz'");
    LinkInertia link;
    link.mass = v[0];
    link.com = v.segment<3>(1);
    link.inertia << v[4], v[7], v[8],
                    v[7], v[5], v[9],
                    v[8], v[9], v[6];
    model.link_inertial.push_back(link);
  }
  for (const auto& row : cfg.get_all("robot", "limits")) {
    const Eigen::VectorXd v = ConfigText::parse_vector(row);
    if (v.size() != 2) throw std::runtime_error(path.string() + ": limits rows need 'lo hi'");
    model.joint_limits.emplace_back(v[0], v[1]);
  }
  for (const auto& entry : cfg.get_all("robot", "locked"))
    model.locked_joints.insert(parse_locked(entry));

  model.validate();
  return model;
}

SimWorld ScenarioConfig::make_world() const {
  SimWorld world;
  world.models = robots;
  world.payloads = payloads;
  world.joint_damping = joint_damping;
  world.dt = dt;
  return world;
}

void ScenarioConfig::validate() const {
  if (duration <= 0.0) throw std::invalid_argument(name + ": duration must be positive");
  if (dt <= 0.0) throw std::invalid_argument(name + ": dt must be positive");
  if (robots[0].joint_count != robots[1].joint_count)
    throw std::invalid_argument(name + ": both arms must have the same joint count");
  for (int r = 0; r < 2; ++r) {
    robots[r].validate();
    if (home[r].size() != robots[r].joint_count)
      throw std::invalid_argument(name + ": home posture size mismatch");
    if (payloads[r].mass < 0.0) throw std::invalid_argument(name + ": payload mass must be >= 0");
    if (!robots[r].joint_limits.empty()) {
      const Eigen::VectorXd q = robots[r].effective_q(home[r]);
      for (int i = 0; i < robots[r].joint_count; ++i) {
        const auto [lo, hi] = robots[r].joint_limits[i];
        if (q[i] < lo || q[i] > hi)
          throw std::invalid_argument(name + ": home posture violates joint limit " +
                                      std::to_string(i + 1) + " of " + robots[r].name);
      }
    }
  }
  if (keyframes.size() < 2) throw std::invalid_argument(name + ": need at least two keyframes");
  for (size_t i = 0; i + 1 < keyframes.size(); ++i)
    if (keyframes[i + 1].t <= keyframes[i].t)
      throw std::invalid_argument(name + ": keyframe times must increase");
  gains.validate();
  clik.validate();
  if (perturbation_enabled) perturbation.validate();
  if (motion_kernels < 2 || torque_kernels < 2)
    throw std::invalid_argument(name + ": kernel counts must be at least 2");
  if (stiff_passes < 1) throw std::invalid_argument(name + ": need at least one stiff pass");
}

namespace {

Eigen::VectorXd broadcast(const Eigen::VectorXd& v, int n, const std::string& what) {
  if (v.size() == n) return v;
  if (v.size() == 1) return Eigen::VectorXd::Constant(n, v[0]);
  throw std::runtime_error(what + ": expected 1 or " + std::to_string(n) + " values");
}

// 0.7-damped joint damping from the configured stiffness and the home-posture
// apparent inertia; keeps the 500 Hz discrete loop well clear of instability.
Eigen::VectorXd auto_damping(const RobotModel& model, const Eigen::VectorXd& home,
                             const Payload& payload, const Eigen::VectorXd& kq) {
  const Eigen::MatrixXd m = mass_matrix(model, model.effective_q(home), payload);
  Eigen::VectorXd dq(kq.size());
  for (int i = 0; i < kq.size(); ++i) dq[i] = 1.4 * std::sqrt(kq[i] * std::max(m(i, i), 1e-3));
  return dq;
}

TaskVector task_gain_rows(double abs_lin, double abs_ang, double rel_lin, double rel_ang) {
  TaskVector g;
  g.segment<3>(kTaskAbsLinear).setConstant(abs_lin);
  g.segment<3>(kTaskAbsAngular).setConstant(abs_ang);
  g.segment<3>(kTaskRelLinear).setConstant(rel_lin);
  g.segment<3>(kTaskRelAngular).setConstant(rel_ang);
  return g;
}

PerturbationSegment parse_segment(const std::string& text) {
  std::istringstream in(text);
  std::string kind;
  in >> kind;
  PerturbationSegment seg;
  in >> seg.t_start >> seg.t_end;
  auto read6 = [&in](Vector6d& w) {
    for (int i = 0; i < 6; ++i)
      if (!(in >> w[i])) throw std::runtime_error("perturbation segment: expected 6 wrench values");
  };
  if (kind == "zero") {
    seg.kind = PerturbationSegment::Kind::Zero;
  } else if (kind == "hold") {
    seg.kind = PerturbationSegment::Kind::Hold;
    read6(seg.w_from);
  } else if (kind == "ramp") {
    seg.kind = PerturbationSegment::Kind::Ramp;
    read6(seg.w_from);
    read6(seg.w_to);
  } else if (kind == "sine") {
    seg.kind = PerturbationSegment::Kind::Sine;
    in >> seg.freq_hz;
    read6(seg.w_from);
  } else {
    throw std::runtime_error("perturbation segment: unknown kind '" + kind + "'");
  }
  if (in.fail()) throw std::runtime_error("perturbation segment: malformed entry '" + text + "'");
  return seg;
}

}  // namespace

ScenarioConfig load_scenario(const std::filesystem::path& path) {
  const ConfigText cfg = ConfigText::parse_file(path);
  const std::filesystem::path dir = path.parent_path();
  ScenarioConfig sc;

  sc.name = cfg.get_or("scenario", "name", path.stem().string());
  sc.duration = cfg.get_double_or("scenario", "duration", 30.0);
  sc.dt = cfg.get_double_or("scenario", "dt", 0.002);
  sc.seed = cfg.get_u64_or("scenario", "seed", 0);
  sc.noise_sigma = cfg.get_double_or("scenario", "noise_sigma", 0.0);
  sc.joint_damping = cfg.get_double_or("scenario", "joint_damping", 0.1);

  for (int r = 0; r < 2; ++r) {
    const std::string section = "robot" + std::to_string(r + 1);
    if (!cfg.has_section(section))
      throw std::runtime_error(path.string() + ": missing [" + section + "] section");
    sc.robots[r] = load_robot_model(dir / cfg.get(section, "model"));
    if (cfg.has(section, "base"))
      sc.robots[r].base_pose = pose_from_xyz_rpy(cfg.get_vector(section, "base"), "base");
    if (cfg.has(section, "locked")) {
      sc.robots[r].locked_joints.clear();
      for (const auto& entry : cfg.get_all(section, "locked"))
        sc.robots[r].locked_joints.insert(parse_locked(entry));
    }
    sc.home[r] = cfg.get_vector(section, "home");
    if (cfg.has(section, "payload")) {
      const Eigen::VectorXd v = cfg.get_vector(section, "payload");
      if (v.size() != 1 && v.size() != 4)
        throw std::runtime_error(path.string() + ": payload is 'mass [cx cy cz]'");
      sc.payloads[r].mass = v[0];
      if (v.size() == 4) sc.payloads[r].com = v.segment<3>(1);
    }
    sc.robots[r].validate();
  }

  for (const auto& row : cfg.get_all("trajectory", "keyframe")) {
    const Eigen::VectorXd v = ConfigText::parse_vector(row);
    if (v.size() != 4) throw std::runtime_error(path.string() + ": keyframes are 't dx dy dz'");
    sc.keyframes.push_back({v[0], v.segment<3>(1)});
  }
  if (sc.keyframes.empty()) {
    sc.keyframes.push_back({0.0, Eigen::Vector3d::Zero()});
    sc.keyframes.push_back({sc.duration, Eigen::Vector3d::Zero()});
  }
  if (cfg.has("trajectory", "relative_offset")) {
    const std::string v = cfg.get("trajectory", "relative_offset");
    if (v != "auto") {
      sc.relative_offset = ConfigText::parse_vector(v);
      sc.relative_offset_auto = false;
    }
  }

  const int n = sc.joints_per_arm();
  sc.gains.kq = broadcast(cfg.get_vector_or("gains", "kq", Eigen::VectorXd::Constant(1, 25.0)),
                          n, "gains.kq");
  if (cfg.get_or("gains", "dq", "auto") == "auto")
    sc.gains.dq = auto_damping(sc.robots[0], sc.home[0], sc.payloads[0], sc.gains.kq);
  else
    sc.gains.dq = broadcast(cfg.get_vector("gains", "dq"), n, "gains.dq");
  sc.kq_stiff = broadcast(
      cfg.get_vector_or("gains", "kq_stiff", Eigen::VectorXd::Constant(1, 2000.0)), n,
      "gains.kq_stiff");
  if (cfg.get_or("gains", "dq_stiff", "auto") == "auto")
    sc.dq_stiff = auto_damping(sc.robots[0], sc.home[0], sc.payloads[0], sc.kq_stiff);
  else
    sc.dq_stiff = broadcast(cfg.get_vector("gains", "dq_stiff"), n, "gains.dq_stiff");

  sc.gains.k_task = task_gain_rows(cfg.get_double_or("gains", "k_task_abs_lin", 0.0),
                                   cfg.get_double_or("gains", "k_task_abs_ang", 0.0),
                                   cfg.get_double_or("gains", "k_task_rel_lin", 2000.0),
                                   cfg.get_double_or("gains", "k_task_rel_ang", 0.0));
  if (cfg.has("gains", "d_task"))
    sc.gains.d_task = broadcast(cfg.get_vector("gains", "d_task"), kTaskDim, "gains.d_task")
                          .head<kTaskDim>();
  else
    sc.gains.d_task = 2.0 * sc.gains.k_task.cwiseSqrt();  // critical-damping heuristic
  sc.gains.ks1 = cfg.get_double_or("gains", "ks1", 0.0);
  sc.gains.validate();

  sc.clik.gain = TaskVector::Constant(cfg.get_double_or("clik", "gain", 10.0));
  sc.clik.posture_gain = cfg.get_double_or("clik", "posture_gain", 1.0);
  sc.clik.lambda = cfg.get_double_or("clik", "lambda", 1e-3);
  sc.clik.dt = sc.dt;
  sc.clik.max_iterations = cfg.get_int_or("clik", "max_iterations", 200);
  sc.clik.tol_pos = cfg.get_double_or("clik", "tol_pos", 1e-4);
  sc.clik.tol_rot = cfg.get_double_or("clik", "tol_rot", 1e-3);

  sc.variant = variant_from_name(cfg.get_or("controller", "variant", "entire"));
  sc.delta_tau_filter_hz = cfg.get_double_or("controller", "delta_tau_filter_hz", 20.0);

  if (cfg.has_section("perturbation") && !cfg.get_all("perturbation", "segment").empty()) {
    sc.perturbation_enabled = true;
    sc.perturbation.target = cfg.get_int_or("perturbation", "target", 1) - 1;
    sc.perturbation.force_cap = cfg.get_double_or("perturbation", "cap", 200.0);
    for (const auto& row : cfg.get_all("perturbation", "segment"))
      sc.perturbation.segments.push_back(parse_segment(row));
    if (sc.perturbation.target < 0 || sc.perturbation.target > 1)
      throw std::runtime_error(path.string() + ": perturbation target must be 1 or 2");
    sc.perturbation.validate();
  }

  sc.motion_kernels = cfg.get_int_or("cmp", "motion_kernels", 25);
  sc.torque_kernels = cfg.get_int_or("cmp", "torque_kernels", 40);
  sc.alpha_z = cfg.get_double_or("cmp", "alpha_z", 48.0);
  sc.alpha_x = cfg.get_double_or("cmp", "alpha_x", 2.0);
  sc.stiff_passes = cfg.get_int_or("learning", "stiff_passes", 3);

  sc.validate();
  return sc;
}

std::vector<TaskReference> synthesize_task_reference(const ScenarioConfig& config) {
  const Pose tcp1 = forward_kinematics(config.robots[0], config.home[0]);
  const Pose tcp2 = forward_kinematics(config.robots[1], config.home[1]);
  const TaskCoordinates start = make_task_coordinates(tcp1, tcp2);

  TaskReference base;
  base.p_absd = start.p_abs;
  base.R_absd = start.R_abs;
  base.R_reld = start.R_rel;
  base.p_reld_abs = config.relative_offset_auto ? start.p_rel_abs : config.relative_offset;

  const auto& keys = config.keyframes;
  const int samples = static_cast<int>(std::llround(config.duration / config.dt)) + 1;
  std::vector<TaskReference> refs(samples, base);
  for (int k = 0; k < samples; ++k) {
    const double t = k * config.dt;
    Eigen::Vector3d offset = Eigen::Vector3d::Zero();
    Eigen::Vector3d velocity = Eigen::Vector3d::Zero();
    if (t <= keys.front().t) {
      offset = keys.front().offset;
    } else if (t >= keys.back().t) {
      offset = keys.back().offset;
    } else {
      for (size_t s = 0; s + 1 < keys.size(); ++s) {
        if (t > keys[s + 1].t) continue;
        const double span = keys[s + 1].t - keys[s].t;
        const double u = (t - keys[s].t) / span;
        const double blend = u * u * u * (10.0 + u * (-15.0 + 6.0 * u));
        const double dblend = u * u * (30.0 + u * (-60.0 + 30.0 * u)) / span;
        offset = keys[s].offset + blend * (keys[s + 1].offset - keys[s].offset);
        velocity = dblend * (keys[s + 1].offset - keys[s].offset);
        break;
      }
    }
    refs[k].p_absd = base.p_absd + offset;
    refs[k].pd_absd = velocity;
  }
  return refs;
}

}  // namespace bimanual
