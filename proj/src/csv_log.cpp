#include "bimanual/csv_log.hpp"

#include "bimanual/config_text.hpp"

#include <Eigen/Geometry>

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>

namespace bimanual {

std::string format_sig9(double value) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.9g", value);
  return buf;
}

double canonical9(double value) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.9g", value);
  return std::strtod(buf, nullptr);
}

namespace {

void append_joint_headers(std::string& h, const std::string& prefix, int n) {
  for (int arm = 1; arm <= 2; ++arm)
    for (int j = 1; j <= n; ++j)
      h += "," + prefix + std::to_string(arm) + "_" + std::to_string(j);
}

std::vector<double> split_csv_line(const std::string& line) {
  std::vector<double> out;
  const char* p = line.c_str();
  char* end = nullptr;
  while (*p) {
    out.push_back(std::strtod(p, &end));
    p = end;
    if (*p == ',') ++p;
  }
  return out;
}

std::ofstream open_binary(const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write file: " + path.string());
  return out;
}

}  // namespace

std::string csv_log_header(int joints_per_arm) {
  std::string h = "t";
  append_joint_headers(h, "q", joints_per_arm);
  append_joint_headers(h, "qd", joints_per_arm);
  for (const char* axis : {"x", "y", "z", "rx", "ry", "rz"}) h += std::string(",err_abs_") + axis;
  for (const char* axis : {"x", "y", "z", "rx", "ry", "rz"}) h += std::string(",err_rel_") + axis;
  h += ",pert_fx,pert_fy,pert_fz,pert_n";
  append_joint_headers(h, "tau_rec_", joints_per_arm);
  append_joint_headers(h, "tau_biman_", joints_per_arm);
  append_joint_headers(h, "tau_vft_", joints_per_arm);
  append_joint_headers(h, "tau_ff_", joints_per_arm);
  return h;
}

void write_log_csv(const std::filesystem::path& path, const std::vector<LogRow>& rows) {
  if (rows.empty()) throw std::invalid_argument("write_log_csv: no rows");
  const int n = static_cast<int>(rows[0].q1.size());
  std::ofstream out = open_binary(path);
  out << csv_log_header(n) << '\n';
  std::string line;
  for (const LogRow& row : rows) {
    line.clear();
    line += format_sig9(row.t);
    auto push = [&line](double v) { line += ',' + format_sig9(v); };
    auto push_vec = [&push](const Eigen::VectorXd& v) {
      for (Eigen::Index i = 0; i < v.size(); ++i) push(v[i]);
    };
    push_vec(row.q1);
    push_vec(row.q2);
    push_vec(row.qd1);
    push_vec(row.qd2);
    for (int i = 0; i < kTaskDim; ++i) push(row.err[i]);
    push(row.pert_force.x());
    push(row.pert_force.y());
    push(row.pert_force.z());
    push(row.pert_norm);
    push_vec(row.tau_rec);
    push_vec(row.tau_biman);
    push_vec(row.tau_vft);
    push_vec(row.tau_ff);
    out << line << '\n';
  }
}

std::vector<LogRow> read_log_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open log file: " + path.string());
  std::string header;
  std::getline(in, header);
  int n = 0;  // count q1_* columns
  for (std::istringstream hs(header); hs.good();) {
    std::string col;
    std::getline(hs, col, ',');
    if (col.rfind("q1_", 0) == 0) ++n;
  }
  if (n == 0) throw std::runtime_error(path.string() + ": not a run log (no q1_* columns)");
  const size_t expected = 1 + 4 * n + 12 + 4 + 4 * 2 * n;

  std::vector<LogRow> rows;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const std::vector<double> v = split_csv_line(line);
    if (v.size() != expected)
      throw std::runtime_error(path.string() + ": malformed row with " +
                               std::to_string(v.size()) + " columns");
    LogRow row;
    size_t at = 0;
    row.t = v[at++];
    auto take = [&v, &at](int count) {
      Eigen::VectorXd out(count);
      for (int i = 0; i < count; ++i) out[i] = v[at++];
      return out;
    };
    row.q1 = take(n);
    row.q2 = take(n);
    row.qd1 = take(n);
    row.qd2 = take(n);
    for (int i = 0; i < kTaskDim; ++i) row.err[i] = v[at++];
    row.pert_force = take(3);
    row.pert_norm = v[at++];
    row.tau_rec = take(2 * n);
    row.tau_biman = take(2 * n);
    row.tau_vft = take(2 * n);
    row.tau_ff = take(2 * n);
    rows.push_back(std::move(row));
  }
  return rows;
}

void write_trajectory_csv(const std::filesystem::path& path, const JointTrajectory& traj) {
  const int n = static_cast<int>(traj.q.cols());
  std::ofstream out = open_binary(path);
  out << "t";
  for (int j = 1; j <= n; ++j) out << ",q_" << j;
  for (int j = 1; j <= n; ++j) out << ",qdot_" << j;
  out << '\n';
  for (int k = 0; k < traj.sample_count(); ++k) {
    out << ConfigText::format_double(k * traj.dt);
    for (int j = 0; j < n; ++j) out << ',' << ConfigText::format_double(traj.q(k, j));
    for (int j = 0; j < n; ++j) out << ',' << ConfigText::format_double(traj.qdot(k, j));
    out << '\n';
  }
}

JointTrajectory read_trajectory_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open trajectory file: " + path.string());
  std::string header;
  std::getline(in, header);
  int cols = 0;
  for (char c : header)
    if (c == ',') ++cols;
  if (cols < 2 || cols % 2 != 0)
    throw std::runtime_error(path.string() + ": not a trajectory file");
  const int n = cols / 2;

  std::vector<std::vector<double>> rows;
  std::string line;
  double t0 = 0.0, t1 = 0.0;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    rows.push_back(split_csv_line(line));
    if (rows.size() == 1) t0 = rows.back()[0];
    if (rows.size() == 2) t1 = rows.back()[0];
  }
  JointTrajectory traj;
  traj.dt = rows.size() > 1 ? t1 - t0 : 0.0;
  traj.q.resize(rows.size(), n);
  traj.qdot.resize(rows.size(), n);
  for (size_t k = 0; k < rows.size(); ++k) {
    if (static_cast<int>(rows[k].size()) != 1 + 2 * n)
      throw std::runtime_error(path.string() + ": malformed trajectory row");
    for (int j = 0; j < n; ++j) {
      traj.q(k, j) = rows[k][1 + j];
      traj.qdot(k, j) = rows[k][1 + n + j];
    }
  }
  return traj;
}

void write_task_reference_csv(const std::filesystem::path& path,
                              const std::vector<TaskReference>& refs, double dt) {
  std::ofstream out = open_binary(path);
  out << "t,p_absd_x,p_absd_y,p_absd_z,quat_absd_w,quat_absd_x,quat_absd_y,quat_absd_z"
      << ",p_reld_abs_x,p_reld_abs_y,p_reld_abs_z,quat_reld_w,quat_reld_x,quat_reld_y,quat_reld_z"
      << ",pd_absd_x,pd_absd_y,pd_absd_z,w_absd_x,w_absd_y,w_absd_z"
      << ",pd_reld_abs_x,pd_reld_abs_y,pd_reld_abs_z,w_reld_x,w_reld_y,w_reld_z\n";
  auto emit = [&out](const Eigen::Vector3d& v) {
    for (int i = 0; i < 3; ++i) out << ',' << ConfigText::format_double(v[i]);
  };
  auto emit_quat = [&out](const Eigen::Matrix3d& r) {
    const Eigen::Quaterniond q(r);
    out << ',' << ConfigText::format_double(q.w()) << ',' << ConfigText::format_double(q.x())
        << ',' << ConfigText::format_double(q.y()) << ',' << ConfigText::format_double(q.z());
  };
  for (size_t k = 0; k < refs.size(); ++k) {
    out << ConfigText::format_double(k * dt);
    emit(refs[k].p_absd);
    emit_quat(refs[k].R_absd);
    emit(refs[k].p_reld_abs);
    emit_quat(refs[k].R_reld);
    emit(refs[k].pd_absd);
    emit(refs[k].w_absd);
    emit(refs[k].pd_reld_abs);
    emit(refs[k].w_reld);
    out << '\n';
  }
}

std::vector<TaskReference> read_task_reference_csv(const std::filesystem::path& path, double* dt) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open task reference file: " + path.string());
  std::string line;
  std::getline(in, line);  // header
  std::vector<TaskReference> refs;
  double t0 = 0.0, t1 = 0.0;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const std::vector<double> v = split_csv_line(line);
    if (v.size() != 27)
      throw std::runtime_error(path.string() + ": malformed task reference row");
    if (refs.empty()) t0 = v[0];
    if (refs.size() == 1) t1 = v[0];
    TaskReference ref;
    ref.p_absd = Eigen::Vector3d(v[1], v[2], v[3]);
    ref.R_absd = Eigen::Quaterniond(v[4], v[5], v[6], v[7]).normalized().toRotationMatrix();
    ref.p_reld_abs = Eigen::Vector3d(v[8], v[9], v[10]);
    ref.R_reld = Eigen::Quaterniond(v[11], v[12], v[13], v[14]).normalized().toRotationMatrix();
    ref.pd_absd = Eigen::Vector3d(v[15], v[16], v[17]);
    ref.w_absd = Eigen::Vector3d(v[18], v[19], v[20]);
    ref.pd_reld_abs = Eigen::Vector3d(v[21], v[22], v[23]);
    ref.w_reld = Eigen::Vector3d(v[24], v[25], v[26]);
    refs.push_back(ref);
  }
  if (dt) *dt = refs.size() > 1 ? t1 - t0 : 0.0;
  return refs;
}

}  // namespace bimanual
