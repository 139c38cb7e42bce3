// pybind11 module exposing the core operations and the scenario pipeline.
#include "bimanual/harness.hpp"

#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

namespace py = pybind11;
using namespace bimanual;

namespace {

Payload make_payload(double mass, const Eigen::Vector3d& com) { return Payload{mass, com}; }

py::dict metrics_dict(const RunMetrics& m) {
  py::dict d;
  d["max_abs_error"] = m.max_abs_error;
  d["max_rel_error"] = m.max_rel_error;
  d["rms_abs_error"] = m.rms_abs_error;
  d["rms_rel_error"] = m.rms_rel_error;
  d["pert_at_max_abs_error"] = m.pert_at_max_abs_error;
  d["pert_at_max_rel_error"] = m.pert_at_max_rel_error;
  d["peak_perturbation"] = m.peak_perturbation;
  d["peak_perturbation_tick"] = m.peak_perturbation_tick;
  d["abs_error_at_peak"] = m.abs_error_at_peak;
  d["rel_error_at_peak"] = m.rel_error_at_peak;
  d["compliance"] = m.compliance;
  d["peak_tau_biman"] = m.peak_tau_biman;
  d["peak_tau_vft"] = m.peak_tau_vft;
  d["max_decomposition_residual"] = m.max_decomposition_residual;
  d["wall_clock_s"] = m.wall_clock_s;
  return d;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Bimanual compliant movement primitive workbench";

  py::class_<Pose>(m, "Pose")
      .def(py::init([](const Eigen::Vector3d& p, const Eigen::Matrix3d& r) {
             Pose pose;
             pose.p = p;
             pose.R = r;
             return pose;
           }),
           py::arg("p") = Eigen::Vector3d::Zero(),
           py::arg("R") = Eigen::Matrix3d::Identity())
      .def_readwrite("p", &Pose::p)
      .def_readwrite("R", &Pose::R)
      .def("compose", &Pose::compose);

  py::class_<RobotModel>(m, "RobotModel")
      .def_readonly("name", &RobotModel::name)
      .def_readonly("joint_count", &RobotModel::joint_count)
      .def_property_readonly("locked_joints",
                             [](const RobotModel& model) {
                               std::vector<int> locked;
                               for (const auto& [idx, angle] : model.locked_joints) {
                                 (void)angle;
                                 locked.push_back(idx);
                               }
                               return locked;
                             })
      .def("effective_q", &RobotModel::effective_q)
      .def("validate", &RobotModel::validate);

  m.def("load_robot_model", &load_robot_model, py::arg("path"));
  m.def("forward_kinematics", &forward_kinematics, py::arg("model"), py::arg("q"));
  m.def("geometric_jacobian", &geometric_jacobian, py::arg("model"), py::arg("q"));
  m.def("skew", &skew, py::arg("v"));
  m.def(
      "axis_angle_from_rotation",
      [](const Eigen::Matrix3d& r) {
        const AxisAngle aa = axis_angle_from_rotation(r);
        return py::make_tuple(aa.axis, aa.angle);
      },
      py::arg("R"));
  m.def("rotation_about_axis", &rotation_about_axis, py::arg("axis"), py::arg("angle"));
  m.def("damped_pseudo_inverse", &damped_pseudo_inverse, py::arg("M"), py::arg("lam"));

  m.def("absolute_pose",
        [](const Pose& a, const Pose& b) {
          auto [p, r] = absolute_pose(a, b);
          return py::make_tuple(p, r);
        });
  m.def("relative_pose", [](const Pose& a, const Pose& b) {
    auto [p, r] = relative_pose(a, b);
    return py::make_tuple(p, r);
  });

  py::class_<TaskCoordinates>(m, "TaskCoordinates")
      .def_readonly("p_abs", &TaskCoordinates::p_abs)
      .def_readonly("R_abs", &TaskCoordinates::R_abs)
      .def_readonly("p_rel", &TaskCoordinates::p_rel)
      .def_readonly("R_rel", &TaskCoordinates::R_rel)
      .def_readonly("p_rel_abs", &TaskCoordinates::p_rel_abs);
  py::class_<TaskReference>(m, "TaskReference")
      .def(py::init<>())
      .def_readwrite("p_absd", &TaskReference::p_absd)
      .def_readwrite("R_absd", &TaskReference::R_absd)
      .def_readwrite("p_reld_abs", &TaskReference::p_reld_abs)
      .def_readwrite("R_reld", &TaskReference::R_reld)
      .def_readwrite("pd_absd", &TaskReference::pd_absd)
      .def_readwrite("w_absd", &TaskReference::w_absd)
      .def_readwrite("pd_reld_abs", &TaskReference::pd_reld_abs)
      .def_readwrite("w_reld", &TaskReference::w_reld);

  m.def("make_task_coordinates", &make_task_coordinates, py::arg("tcp1"), py::arg("tcp2"));
  m.def("bimanual_jacobian", &bimanual_jacobian, py::arg("J1"), py::arg("J2"));
  m.def("task_errors", &task_errors, py::arg("state"), py::arg("R1"), py::arg("ref"));
  m.def("desired_velocities", &desired_velocities, py::arg("ref"), py::arg("R_abs"),
        py::arg("omega_abs"));

  py::class_<Dmp>(m, "Dmp")
      .def_readonly("tau", &Dmp::tau)
      .def_readonly("alpha_z", &Dmp::alpha_z)
      .def_readonly("beta_z", &Dmp::beta_z)
      .def_readonly("alpha_x", &Dmp::alpha_x)
      .def_readonly("centers", &Dmp::centers)
      .def_readonly("widths", &Dmp::widths)
      .def_readonly("y0", &Dmp::y0)
      .def_readonly("goal", &Dmp::goal)
      .def_readonly("weights", &Dmp::weights);
  py::class_<TorqueProfile>(m, "TorqueProfile")
      .def_readonly("tau", &TorqueProfile::tau)
      .def_readonly("centers", &TorqueProfile::centers)
      .def_readonly("weights", &TorqueProfile::weights);
  py::class_<Cmp>(m, "Cmp")
      .def_readonly("dmp", &Cmp::dmp)
      .def_readonly("torque", &Cmp::torque)
      .def("save", &Cmp::save, py::arg("path"))
      .def_static("load", &Cmp::load, py::arg("path"));

  m.def("phase", &phase, py::arg("t"), py::arg("tau"), py::arg("alpha_x") = 2.0);
  m.def("encode_dmp", &encode_dmp, py::arg("samples"), py::arg("dt"), py::arg("kernel_count"),
        py::arg("alpha_z") = 48.0, py::arg("alpha_x") = 2.0);
  m.def(
      "integrate_dmp",
      [](const Dmp& dmp, double dt, double duration) {
        const DmpTrajectory traj = integrate_dmp(dmp, dt, duration);
        return py::make_tuple(traj.y, traj.yd, traj.ydd, traj.x);
      },
      py::arg("dmp"), py::arg("dt"), py::arg("duration") = -1.0);
  m.def("encode_torques", &encode_torques, py::arg("samples"), py::arg("dt"),
        py::arg("kernel_count"), py::arg("tau"), py::arg("alpha_x") = 2.0);
  m.def("evaluate_torques", &evaluate_torques, py::arg("profile"), py::arg("x"));
  m.def("extract_task_torques", &extract_task_torques, py::arg("tau_measured"),
        py::arg("f_dynamic"));

  py::enum_<ControllerVariant>(m, "ControllerVariant")
      .value("REC_ONLY", ControllerVariant::RecOnly)
      .value("REC_PLUS_BIMAN", ControllerVariant::RecPlusBiman)
      .value("REC_MINUS_VFT", ControllerVariant::RecMinusVft)
      .value("ENTIRE", ControllerVariant::Entire);
  m.def("variant_from_name", &variant_from_name, py::arg("name"));

  py::class_<GainSet>(m, "GainSet")
      .def(py::init<>())
      .def_readwrite("kq", &GainSet::kq)
      .def_readwrite("dq", &GainSet::dq)
      .def_readwrite("k_task", &GainSet::k_task)
      .def_readwrite("d_task", &GainSet::d_task)
      .def_readwrite("ks1", &GainSet::ks1);

  m.def("joint_impedance", &joint_impedance, py::arg("q_d"), py::arg("q"), py::arg("qdot_d"),
        py::arg("qdot"), py::arg("kq"), py::arg("dq"), py::arg("f_dynamic"), py::arg("tau_ff"));
  m.def("symmetric_task_torque", &symmetric_task_torque, py::arg("jacobian"), py::arg("x_err"),
        py::arg("xdot_err"), py::arg("gains"), py::arg("q_demo"), py::arg("q_act"));
  m.def(
      "end_effector_force_estimate",
      [](const Eigen::MatrixXd& j, const Eigen::VectorXd& tau) {
        return Eigen::VectorXd(end_effector_force_estimate(j, tau));
      },
      py::arg("jacobian"), py::arg("tau"));
  m.def("perturbation_torques", &perturbation_torques, py::arg("tau_expected"),
        py::arg("tau_measured"));
  m.def("virtual_force_translation", &virtual_force_translation, py::arg("J1"), py::arg("J2"),
        py::arg("delta_tau1"), py::arg("delta_tau2"), py::arg("damped") = nullptr);
  m.def("combined_feedforward", &combined_feedforward, py::arg("tau_rec"), py::arg("tau_biman"),
        py::arg("tau_vft"), py::arg("variant"));

  m.def(
      "inverse_dynamics",
      [](const RobotModel& model, const Eigen::VectorXd& q, const Eigen::VectorXd& qdot,
         const Eigen::VectorXd& qddot, const Eigen::Vector3d& gravity, double payload_mass,
         const Eigen::Vector3d& payload_com) {
        return inverse_dynamics(model, q, qdot, qddot, gravity,
                                make_payload(payload_mass, payload_com));
      },
      py::arg("model"), py::arg("q"), py::arg("qdot"), py::arg("qddot"),
      py::arg("gravity") = kGravity, py::arg("payload_mass") = 0.0,
      py::arg("payload_com") = Eigen::Vector3d::Zero());
  m.def(
      "forward_dynamics",
      [](const RobotModel& model, const Eigen::VectorXd& q, const Eigen::VectorXd& qdot,
         const Eigen::VectorXd& tau, const Vector6d& wrench, const Eigen::Vector3d& gravity,
         double payload_mass, const Eigen::Vector3d& payload_com) {
        return forward_dynamics(model, q, qdot, tau, wrench, gravity,
                                make_payload(payload_mass, payload_com));
      },
      py::arg("model"), py::arg("q"), py::arg("qdot"), py::arg("tau"),
      py::arg("external_wrench") = Vector6d::Zero(), py::arg("gravity") = kGravity,
      py::arg("payload_mass") = 0.0, py::arg("payload_com") = Eigen::Vector3d::Zero());
  m.def("mass_matrix",
        [](const RobotModel& model, const Eigen::VectorXd& q, double payload_mass,
           const Eigen::Vector3d& payload_com) {
          return mass_matrix(model, q, make_payload(payload_mass, payload_com));
        },
        py::arg("model"), py::arg("q"), py::arg("payload_mass") = 0.0,
        py::arg("payload_com") = Eigen::Vector3d::Zero());

  py::class_<ScenarioConfig>(m, "ScenarioConfig")
      .def_readonly("name", &ScenarioConfig::name)
      .def_readonly("duration", &ScenarioConfig::duration)
      .def_readonly("dt", &ScenarioConfig::dt)
      .def_readwrite("seed", &ScenarioConfig::seed)
      .def_readwrite("variant", &ScenarioConfig::variant)
      .def_property_readonly("robots",
                             [](const ScenarioConfig& c) {
                               return py::make_tuple(c.robots[0], c.robots[1]);
                             })
      .def_property_readonly(
          "home", [](const ScenarioConfig& c) { return py::make_tuple(c.home[0], c.home[1]); });
  m.def("load_scenario", &load_scenario, py::arg("path"));
  m.def("synthesize_task_reference", &synthesize_task_reference, py::arg("config"));

  py::class_<Demonstration>(m, "Demonstration")
      .def_property_readonly("q", [](const Demonstration& d) { return d.joints.q; })
      .def_property_readonly("qdot", [](const Demonstration& d) { return d.joints.qdot; })
      .def_property_readonly("sample_count",
                             [](const Demonstration& d) { return d.joints.sample_count(); });
  m.def("demonstrate", &demonstrate, py::arg("config"));

  py::class_<LearnResult>(m, "LearnResult")
      .def_property_readonly(
          "cmps", [](const LearnResult& r) { return py::make_tuple(r.cmps[0], r.cmps[1]); })
      .def_readonly("stiff_tracking_error", &LearnResult::stiff_tracking_error);
  m.def("learn", &learn, py::arg("config"), py::arg("demo"));

  m.def(
      "replay",
      [](const ScenarioConfig& config, const Demonstration& demo, const Cmp& cmp1,
         const Cmp& cmp2, ControllerVariant variant, bool use_perturbation) {
        const RunResult run = replay(config, demo, {cmp1, cmp2}, variant, use_perturbation);
        return metrics_dict(run.metrics);
      },
      py::arg("config"), py::arg("demo"), py::arg("cmp1"), py::arg("cmp2"), py::arg("variant"),
      py::arg("use_perturbation") = true);
  m.def(
      "compare_variants",
      [](const ScenarioConfig& config, const Demonstration& demo, const Cmp& cmp1,
         const Cmp& cmp2) {
        const ComparisonResult cmp = compare_variants(config, demo, {cmp1, cmp2});
        py::dict d;
        d["table"] = cmp.table;
        d["rel_ordering_ok"] = cmp.rel_ordering_ok;
        d["rel_ratio"] = cmp.rel_ratio;
        d["rel_ratio_ok"] = cmp.rel_ratio_ok;
        d["compliance_ordering_ok"] = cmp.compliance_ordering_ok;
        py::dict runs;
        for (const RunResult& run : cmp.runs) runs[variant_name(run.variant)] = metrics_dict(run.metrics);
        d["runs"] = runs;
        return d;
      },
      py::arg("config"), py::arg("demo"), py::arg("cmp1"), py::arg("cmp2"));
}
