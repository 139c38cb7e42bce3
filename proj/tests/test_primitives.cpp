#include "bimanual/primitives.hpp"

#include "oracles.hpp"

#include <doctest.h>

#include <cstdio>
#include <filesystem>

using namespace bimanual;

namespace {

// minimum-jerk reach, one joint
Eigen::MatrixXd min_jerk_samples(double amplitude, double duration, double dt) {
  const int samples = static_cast<int>(std::llround(duration / dt)) + 1;
  Eigen::MatrixXd q(samples, 1);
  for (int k = 0; k < samples; ++k) {
    const double u = std::min(1.0, k * dt / duration);
    q(k, 0) = amplitude * u * u * u * (10.0 + u * (-15.0 + 6.0 * u));
  }
  return q;
}

double reconstruction_rmse(const Dmp& dmp, const Eigen::MatrixXd& samples, double dt) {
  const DmpTrajectory traj = integrate_dmp(dmp, dt);
  const int n = std::min<int>(traj.sample_count(), samples.rows());
  double sq = 0.0;
  for (int k = 0; k < n; ++k) sq += (traj.y.row(k) - samples.row(k)).squaredNorm();
  return std::sqrt(sq / (n * samples.cols()));
}

}  // namespace

TEST_SUITE("primitives") {

TEST_CASE("phase signal closed form and monotonicity") {
  CHECK(phase(0.0, 3.0, 2.0) == 1.0);
  CHECK(phase(3.0, 3.0, 2.0) == doctest::Approx(std::exp(-2.0)).epsilon(1e-12));
  double prev = 1.0;
  for (int k = 1; k <= 1000; ++k) {
    const double x = phase(k * 0.01, 3.0, 2.0);
    CHECK(x < prev);
    prev = x;
  }
}

TEST_CASE("kernel centers decrease strictly on the exponential phase") {
  const Eigen::VectorXd c = rbf_centers(25, 2.0);
  CHECK(c[0] == 1.0);
  for (int i = 1; i < c.size(); ++i) CHECK(c[i] < c[i - 1]);
  CHECK(c[24] == doctest::Approx(std::exp(-2.0)));
}

TEST_CASE("constant trajectory encodes to zero weights and goal q0") {
  Eigen::MatrixXd samples = Eigen::MatrixXd::Constant(400, 2, 0.7);
  const Dmp dmp = encode_dmp(samples, 0.01, 10);
  CHECK(dmp.weights.cwiseAbs().maxCoeff() <= 1e-6);
  CHECK(dmp.goal.isApprox(Eigen::Vector2d(0.7, 0.7), 1e-12));
  CHECK(dmp.y0.isApprox(Eigen::Vector2d(0.7, 0.7), 1e-12));
}

TEST_CASE("minimum-jerk reach round trip within 1e-3 rad") {
  const double dt = 0.002;
  const Eigen::MatrixXd samples = min_jerk_samples(1.0, 3.0, dt);
  const Dmp dmp = encode_dmp(samples, dt, 25);
  CHECK(reconstruction_rmse(dmp, samples, dt) <= 1e-3);
}

TEST_CASE("sine trajectory round trip within 5e-3 rad") {
  const double dt = 0.002;
  const double duration = 3.0;
  const int samples_n = static_cast<int>(duration / dt) + 1;
  Eigen::MatrixXd samples(samples_n, 1);
  // raised cosine: sinusoidal, starts at rest, ends displaced from the start
  for (int k = 0; k < samples_n; ++k)
    samples(k, 0) = 0.2 * (1.0 - std::cos(1.5 * M_PI * k * dt / duration));
  const Dmp dmp = encode_dmp(samples, dt, 50);
  CHECK(reconstruction_rmse(dmp, samples, dt) <= 5e-3);
}

TEST_CASE("integrated dmp converges to the goal after three periods") {
  SUBCASE("bare point attractor") {
    Dmp dmp;
    dmp.tau = 2.0;
    dmp.centers = rbf_centers(10, dmp.alpha_x);
    dmp.widths = rbf_widths(dmp.centers);
    dmp.y0 = Eigen::VectorXd::Zero(1);
    dmp.goal = Eigen::VectorXd::Ones(1);
    dmp.weights = Eigen::MatrixXd::Zero(1, 10);
    const DmpTrajectory traj = integrate_dmp(dmp, 0.002, 3.0 * dmp.tau);
    CHECK(std::abs(traj.y(traj.sample_count() - 1, 0) - 1.0) <= 1e-3);
  }
  SUBCASE("encoded reach") {
    const double dt = 0.002;
    const Eigen::MatrixXd samples = min_jerk_samples(0.8, 2.0, dt);
    const Dmp dmp = encode_dmp(samples, dt, 25);
    const DmpTrajectory traj = integrate_dmp(dmp, dt, 3.0 * dmp.tau);
    CHECK(std::abs(traj.y(traj.sample_count() - 1, 0) - dmp.goal[0]) <= 1e-3);
  }
}

TEST_CASE("halving dt changes the trajectory at first order") {
  const double dt = 0.004;
  const Eigen::MatrixXd samples = min_jerk_samples(1.0, 2.0, dt);
  const Dmp dmp = encode_dmp(samples, dt, 20);
  const DmpTrajectory coarse = integrate_dmp(dmp, 0.004);
  const DmpTrajectory fine = integrate_dmp(dmp, 0.002);
  const DmpTrajectory finest = integrate_dmp(dmp, 0.001);
  const double err_coarse = std::abs(coarse.y(coarse.sample_count() - 1, 0) -
                                     finest.y(finest.sample_count() - 1, 0));
  const double err_fine =
      std::abs(fine.y(fine.sample_count() - 1, 0) - finest.y(finest.sample_count() - 1, 0));
  CHECK(err_fine < err_coarse);
}

TEST_CASE("zero torque samples give zero weights") {
  const TorqueProfile profile =
      encode_torques(Eigen::MatrixXd::Zero(300, 3), 0.01, 12, 3.0);
  CHECK(profile.weights.cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("constant torque reproduces the constant across the phase range") {
  const double c = 4.2;
  const TorqueProfile profile =
      encode_torques(Eigen::MatrixXd::Constant(500, 1, c), 0.01, 20, 5.0);
  for (double x = 0.05; x <= 1.0; x += 0.01)
    CHECK(std::abs(evaluate_torques(profile, x)[0] - c) <= 0.01 * std::abs(c));
}

TEST_CASE("smooth torque round trip within 2 percent of peak-to-peak") {
  const double dt = 0.002;
  const double duration = 6.0;
  const int n = static_cast<int>(duration / dt);
  Eigen::MatrixXd samples(n, 2);
  for (int k = 0; k < n; ++k) {
    const double t = k * dt;
    samples(k, 0) = 8.0 + 3.0 * std::sin(2.0 * M_PI * t / duration);
    samples(k, 1) = -2.0 + 1.5 * std::cos(2.0 * M_PI * t / duration);
  }
  const TorqueProfile profile = encode_torques(samples, dt, 40, duration);
  double worst = 0.0;
  for (int k = 0; k < n; ++k) {
    const double x = phase(k * dt, duration, profile.alpha_x);
    worst = std::max(worst,
                     (evaluate_torques(profile, x) - samples.row(k).transpose()).cwiseAbs().maxCoeff());
  }
  CHECK(worst <= 0.02 * 6.0);  // 2% of the larger peak-to-peak (6 Nm)
}

TEST_CASE("torque evaluation clamps non-positive phase to the smallest center") {
  const TorqueProfile profile =
      encode_torques(Eigen::MatrixXd::Constant(300, 1, 1.0), 0.01, 10, 3.0);
  const double at_min = evaluate_torques(profile, profile.centers[9])[0];
  CHECK(evaluate_torques(profile, 0.0)[0] == at_min);
  CHECK(evaluate_torques(profile, -0.5)[0] == at_min);
}

TEST_CASE("single dominant kernel returns its weight at its center") {
  TorqueProfile profile;
  profile.tau = 1.0;
  profile.centers = rbf_centers(2, 2.0);
  profile.widths = rbf_widths(profile.centers);
  profile.weights = Eigen::MatrixXd::Zero(1, 2);
  profile.weights(0, 0) = 3.5;  // kernel centered at x = 1
  profile.widths[0] = 1e6;      // sharply peaked
  profile.widths[1] = 1e6;
  CHECK(evaluate_torques(profile, 1.0)[0] == doctest::Approx(3.5).epsilon(1e-9));
}

TEST_CASE("task torque extraction is exact and linear") {
  std::mt19937_64 rng(51);
  const Eigen::VectorXd a = oracles::random_vector(rng, 7, 5.0);
  const Eigen::VectorXd b = oracles::random_vector(rng, 7, 5.0);
  const Eigen::VectorXd c = oracles::random_vector(rng, 7, 5.0);
  CHECK((extract_task_torques(a, Eigen::VectorXd::Zero(7)) - a).norm() == 0.0);
  CHECK(extract_task_torques(a, a).norm() == 0.0);
  CHECK((extract_task_torques(a + b, c) - (extract_task_torques(a, c) + b)).norm() < 1e-12);
  CHECK_THROWS_AS(extract_task_torques(a, Eigen::VectorXd::Zero(5)), std::invalid_argument);
}

TEST_CASE("encode rejects undersampled or non-finite input") {
  CHECK_THROWS_AS(encode_dmp(Eigen::MatrixXd::Zero(10, 1), 0.01, 10), std::invalid_argument);
  Eigen::MatrixXd bad = Eigen::MatrixXd::Zero(100, 1);
  bad(50, 0) = std::numeric_limits<double>::infinity();
  CHECK_THROWS_AS(encode_dmp(bad, 0.01, 5), std::invalid_argument);
}

TEST_CASE("cmp round trips through its file format") {
  const double dt = 0.002;
  Cmp cmp;
  cmp.dmp = encode_dmp(min_jerk_samples(0.5, 2.0, dt), dt, 12);
  Eigen::MatrixXd torques(1001, 1);
  for (int k = 0; k <= 1000; ++k) torques(k, 0) = 2.0 + std::sin(0.01 * k);
  cmp.torque = encode_torques(torques, dt, 15, cmp.dmp.tau, cmp.dmp.alpha_x);

  const auto path = std::filesystem::temp_directory_path() / "bimanual_test_cmp.cmp";
  cmp.save(path);
  const Cmp loaded = Cmp::load(path);
  CHECK(loaded.dmp.tau == cmp.dmp.tau);
  CHECK((loaded.dmp.weights - cmp.dmp.weights).cwiseAbs().maxCoeff() == 0.0);
  CHECK((loaded.torque.weights - cmp.torque.weights).cwiseAbs().maxCoeff() == 0.0);
  CHECK((loaded.dmp.centers - cmp.dmp.centers).cwiseAbs().maxCoeff() == 0.0);
  std::filesystem::remove(path);
}

TEST_CASE("cmp halves must share phase parameters") {
  Cmp cmp;
  cmp.dmp = encode_dmp(min_jerk_samples(0.5, 2.0, 0.002), 0.002, 10);
  cmp.torque = encode_torques(Eigen::MatrixXd::Zero(500, 1), 0.002, 10, 999.0);
  CHECK_THROWS_AS(cmp.validate(), std::invalid_argument);
}

}  // TEST_SUITE
