// Command-line front end: demonstrate / learn / replay / compare / validate.
#include "bimanual/harness.hpp"

#include <CLI11.hpp>

#include <cstdio>
#include <filesystem>
#include <iostream>

namespace fs = std::filesystem;
using namespace bimanual;

namespace {

struct CommonOptions {
  std::string config_path;
  std::string out_dir = "out";
  std::string variant;
  unsigned long long seed = 0;
  bool seed_set = false;
  bool no_plots = false;
};

void add_common(CLI::App* cmd, CommonOptions& opt, bool needs_variant) {
  cmd->add_option("--config", opt.config_path, "scenario file")->required();
  cmd->add_option("--out", opt.out_dir, "artifact directory");
  cmd->add_option("--seed", opt.seed, "override the scenario seed")
      ->each([&opt](const std::string&) { opt.seed_set = true; });
  cmd->add_flag("--no-plots", opt.no_plots, "skip SVG plot generation");
  if (needs_variant)
    cmd->add_option("--variant", opt.variant,
                    "controller variant: rec, rec+biman, rec-vft, entire");
}

ScenarioConfig load(const CommonOptions& opt) {
  ScenarioConfig config = load_scenario(opt.config_path);
  if (opt.seed_set) config.seed = opt.seed;
  if (!opt.variant.empty()) config.variant = variant_from_name(opt.variant);
  return config;
}

fs::path refs_path(const CommonOptions& opt) { return fs::path(opt.out_dir) / "task_reference.csv"; }
fs::path joints_path(const CommonOptions& opt) { return fs::path(opt.out_dir) / "joint_reference.csv"; }
fs::path cmp_path(const CommonOptions& opt, int robot) {
  return fs::path(opt.out_dir) / ("cmp_robot" + std::to_string(robot + 1) + ".cmp");
}

Demonstration ensure_demonstration(const ScenarioConfig& config, const CommonOptions& opt,
                                   bool* computed = nullptr) {
  Demonstration demo;
  if (fs::exists(refs_path(opt)) && fs::exists(joints_path(opt))) {
    double dt = 0.0;
    demo.refs = read_task_reference_csv(refs_path(opt), &dt);
    demo.joints = read_trajectory_csv(joints_path(opt));
    if (computed) *computed = false;
    return demo;
  }
  demo = demonstrate(config);
  fs::create_directories(opt.out_dir);
  write_task_reference_csv(refs_path(opt), demo.refs, config.dt);
  write_trajectory_csv(joints_path(opt), demo.joints);
  if (computed) *computed = true;
  return demo;
}

std::array<Cmp, 2> ensure_cmps(const ScenarioConfig& config, const Demonstration& demo,
                               const CommonOptions& opt, bool* computed = nullptr) {
  if (fs::exists(cmp_path(opt, 0)) && fs::exists(cmp_path(opt, 1))) {
    if (computed) *computed = false;
    return {Cmp::load(cmp_path(opt, 0)), Cmp::load(cmp_path(opt, 1))};
  }
  const LearnResult learned = learn(config, demo);
  fs::create_directories(opt.out_dir);
  learned.cmps[0].save(cmp_path(opt, 0));
  learned.cmps[1].save(cmp_path(opt, 1));
  std::printf("learn: final stiff-pass tracking error %.2e rad\n",
              learned.stiff_tracking_error);
  if (computed) *computed = true;
  return learned.cmps;
}

void write_run_artifacts(const ScenarioConfig& config, const RunResult& run,
                         const CommonOptions& opt) {
  const fs::path dir = fs::path(opt.out_dir) / variant_name(run.variant);
  fs::create_directories(dir);
  write_log_csv(dir / "log.csv", run.log);
  write_metrics(dir / "metrics.txt", run.metrics);
  if (!opt.no_plots) write_run_plots(dir, run.log);
  std::printf("%s: max abs %.4f m, max rel %.4f m, peak pert %.2f N -> %s\n",
              variant_name(run.variant), run.metrics.max_abs_error, run.metrics.max_rel_error,
              run.metrics.peak_perturbation, dir.string().c_str());
  (void)config;
}

int cmd_demonstrate(const CommonOptions& opt) {
  const ScenarioConfig config = load(opt);
  bool computed = false;
  const Demonstration demo = ensure_demonstration(config, opt, &computed);
  std::printf("demonstrate: %d samples at %g s -> %s%s\n", demo.joints.sample_count(), config.dt,
              opt.out_dir.c_str(), computed ? "" : " (reused existing artifacts)");
  return 0;
}

int cmd_learn(const CommonOptions& opt) {
  const ScenarioConfig config = load(opt);
  const Demonstration demo = ensure_demonstration(config, opt);
  bool computed = false;
  ensure_cmps(config, demo, opt, &computed);
  std::printf("learn: primitives %s -> %s and %s\n",
              computed ? "encoded" : "already present", cmp_path(opt, 0).string().c_str(),
              cmp_path(opt, 1).string().c_str());
  return 0;
}

int cmd_replay(const CommonOptions& opt) {
  const ScenarioConfig config = load(opt);
  const Demonstration demo = ensure_demonstration(config, opt);
  const std::array<Cmp, 2> cmps = ensure_cmps(config, demo, opt);
  const RunResult run = replay(config, demo, cmps, config.variant, true);
  write_run_artifacts(config, run, opt);
  return 0;
}

int cmd_compare(const CommonOptions& opt) {
  const ScenarioConfig config = load(opt);
  const Demonstration demo = ensure_demonstration(config, opt);
  const std::array<Cmp, 2> cmps = ensure_cmps(config, demo, opt);
  const ComparisonResult cmp = compare_variants(config, demo, cmps);
  for (const RunResult& run : cmp.runs) write_run_artifacts(config, run, opt);

  std::ofstream table(fs::path(opt.out_dir) / "comparison.txt", std::ios::binary);
  table << cmp.table;
  std::printf("\n%s", cmp.table.c_str());
  if (!cmp.all_ok()) {
    std::printf("comparison assertions FAILED\n");
    return 1;
  }
  std::printf("comparison assertions passed\n");
  return 0;
}

int cmd_validate(const CommonOptions& opt) {
  const ScenarioConfig config = load(opt);  // parsing already validates invariants
  int problems = 0;
  for (int r = 0; r < 2; ++r) {
    const Pose tcp = forward_kinematics(config.robots[r], config.home[r]);
    std::printf("robot %d '%s': %d joints, home tcp at (%.3f, %.3f, %.3f)\n", r + 1,
                config.robots[r].name.c_str(), config.robots[r].joint_count, tcp.p.x(),
                tcp.p.y(), tcp.p.z());
  }
  try {
    const auto refs = synthesize_task_reference(config);
    Eigen::VectorXd q0(2 * config.joints_per_arm());
    q0 << config.robots[0].effective_q(config.home[0]),
        config.robots[1].effective_q(config.home[1]);
    const std::vector<TaskReference> first(1, refs.front());
    const JointTrajectory start =
        solve_trajectory(first, q0, config.robots[0], config.robots[1], config.clik, q0);
    std::printf("initial reference reachable, start posture within %.1e rad of home\n",
                (start.q.row(0).transpose() - q0).cwiseAbs().maxCoeff());
    for (int r = 0; r < 2; ++r) {
      if (config.robots[r].joint_limits.empty()) continue;
      const Eigen::VectorXd q = start.q.row(0).segment(r * config.joints_per_arm(),
                                                       config.joints_per_arm());
      for (int i = 0; i < config.joints_per_arm(); ++i) {
        const auto [lo, hi] = config.robots[r].joint_limits[i];
        if (q[i] < lo || q[i] > hi) {
          std::printf("PROBLEM: robot %d joint %d at %.3f rad violates [%.3f, %.3f]\n", r + 1,
                      i + 1, q[i], lo, hi);
          ++problems;
        }
      }
    }
  } catch (const std::exception& e) {
    std::printf("PROBLEM: initial reference not reachable: %s\n", e.what());
    ++problems;
  }
  if (config.perturbation_enabled) {
    double peak = 0.0;
    for (double t = 0.0; t < config.duration; t += config.dt)
      peak = std::max(peak, config.perturbation.wrench_at(t).head<3>().norm());
    std::printf("perturbation on robot %d, peak force %.1f N (cap %.0f N)\n",
                config.perturbation.target + 1, peak, config.perturbation.force_cap);
  } else {
    std::printf("no perturbation configured\n");
  }
  std::printf(problems == 0 ? "scenario '%s' is valid\n" : "scenario '%s' has problems\n",
              config.name.c_str());
  return problems == 0 ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Bimanual compliant-primitive simulation workbench"};
  app.require_subcommand(1);

  CommonOptions opt;
  CLI::App* demonstrate_cmd =
      app.add_subcommand("demonstrate", "synthesize the task reference and solve joint references");
  CLI::App* learn_cmd =
      app.add_subcommand("learn", "record stiff executions and encode the movement primitives");
  CLI::App* replay_cmd =
      app.add_subcommand("replay", "compliant replay under the selected feed-forward variant");
  CLI::App* compare_cmd =
      app.add_subcommand("compare", "run all four variants and check the error orderings");
  CLI::App* validate_cmd = app.add_subcommand("validate", "check a scenario file and its models");
  add_common(demonstrate_cmd, opt, false);
  add_common(learn_cmd, opt, false);
  add_common(replay_cmd, opt, true);
  add_common(compare_cmd, opt, false);
  add_common(validate_cmd, opt, false);

  CLI11_PARSE(app, argc, argv);

  try {
    if (demonstrate_cmd->parsed()) return cmd_demonstrate(opt);
    if (learn_cmd->parsed()) return cmd_learn(opt);
    if (replay_cmd->parsed()) return cmd_replay(opt);
    if (compare_cmd->parsed()) return cmd_compare(opt);
    if (validate_cmd->parsed()) return cmd_validate(opt);
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  }
  return 0;
}
