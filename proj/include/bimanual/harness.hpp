#pragma once

#include "bimanual/csv_log.hpp"
#include "bimanual/primitives.hpp"
#include "bimanual/scenario.hpp"
#include "bimanual/svg_plot.hpp"

#include <array>

namespace bimanual {

/// Output of the demonstration stage: the synthesized task reference and the
/// CLIK-solved joint reference realizing it.
struct Demonstration {
  std::vector<TaskReference> refs;  // one per control tick, plus the final sample
  JointTrajectory joints;           // matching q_d(t), q̇_d(t), both arms stacked
};

Demonstration demonstrate(const ScenarioConfig& config);

struct LearnResult {
  std::array<Cmp, 2> cmps;
  std::array<Eigen::MatrixXd, 2> recorded_torques;  // task torques of the final stiff pass
  double stiff_tracking_error = 0.0;                // max joint error of the final pass, rad
};

/// Stiff executions of the demonstrated trajectory; task torques recorded,
/// extracted and encoded per robot. Iterates stiff passes feeding the encoded
/// torques forward until tracking settles.
LearnResult learn(const ScenarioConfig& config, const Demonstration& demo);

/// Scalar summary of one replay; everything except wall_clock_s is a pure
/// function of the (9-significant-digit) log contents.
struct RunMetrics {
  double max_abs_error = 0.0;            // m
  double max_rel_error = 0.0;            // m
  double rms_abs_error = 0.0;
  double rms_rel_error = 0.0;
  double pert_at_max_abs_error = 0.0;    // N
  double pert_at_max_rel_error = 0.0;
  double peak_perturbation = 0.0;        // N
  long peak_perturbation_tick = 0;
  double abs_error_at_peak = 0.0;        // read at the peak-perturbation tick
  double rel_error_at_peak = 0.0;
  double compliance = 0.0;               // max_abs_error / peak_perturbation
  double peak_tau_biman = 0.0;           // per-joint |τ|, Nm
  double peak_tau_vft = 0.0;
  double max_decomposition_residual = 0.0;  // |τ_ff - (τ_rec + τ_biman - τ_vft)|
  double wall_clock_s = 0.0;
};

RunMetrics compute_metrics(const std::vector<LogRow>& rows);

struct RunResult {
  ControllerVariant variant = ControllerVariant::Entire;
  std::vector<LogRow> log;
  RunMetrics metrics;
};

/// Compliant 500 Hz replay of the learned primitives under the selected
/// feed-forward variant, with optional scripted perturbation.
RunResult replay(const ScenarioConfig& config, const Demonstration& demo,
                 const std::array<Cmp, 2>& cmps, ControllerVariant variant,
                 bool use_perturbation);

/// Identical perturbed replays across the four variants plus the ordering
/// checks used by the comparison table.
struct ComparisonResult {
  std::array<RunResult, 4> runs;  // rec, rec+biman, rec-vft, entire
  double rel_ratio = 0.0;         // entire / rec+biman, relative error at peak
  bool rel_ordering_ok = false;   // entire < rec+biman < rec-vft <= rec
  bool rel_ratio_ok = false;      // rel_ratio within [0.3, 0.7]
  bool compliance_ordering_ok = false;  // rec-vft > entire > rec+biman
  std::string table;

  bool all_ok() const { return rel_ordering_ok && rel_ratio_ok && compliance_ordering_ok; }
};

ComparisonResult compare_variants(const ScenarioConfig& config, const Demonstration& demo,
                                  const std::array<Cmp, 2>& cmps);

void write_metrics(const std::filesystem::path& path, const RunMetrics& metrics);
RunMetrics read_metrics(const std::filesystem::path& path);

/// Error, perturbation and torque-decomposition charts for one run.
void write_run_plots(const std::filesystem::path& dir, const std::vector<LogRow>& rows);

}  // namespace bimanual
