#include <doctest.h>

#include "ncshape/rng.hpp"
#include "ncshape/shooting.hpp"
#include "support/testers.hpp"

using namespace ncshape;
using namespace ncshape::testing;

namespace {

RowMat3 random_mat(Rng& rng, int n, double scale) {
  RowMat3 m(n, 3);
  for (int i = 0; i < n; ++i) {
    for (int c = 0; c < 3; ++c) m(i, c) = scale * rng.uniform(-1, 1);
  }
  return m;
}

ShootingConfig small_config(Rng& rng, int controls) {
  ShootingConfig cfg;
  cfg.control_points = random_mat(rng, controls, 0.8);
  cfg.kernel.sigmas = {1.0, 0.5, 0.2, 0.1};
  cfg.steps = 5;
  cfg.reg_weight = 1.0;
  return cfg;
}

} // namespace

TEST_SUITE("shooting") {

TEST_CASE("hamiltonian basics") {
  Rng rng(1);
  ShootingConfig cfg = small_config(rng, 3);

  CHECK(hamiltonian(cfg, cfg.control_points, RowMat3::Zero(3, 3)) == 0.0);

  // Single particle with the 4-kernel sum: H = 1/2 * 4 * |p|^2.
  ShootingConfig single = cfg;
  single.control_points = RowMat3::Zero(1, 3);
  RowMat3 p(1, 3);
  p << 0.3, -0.1, 0.7;
  CHECK(hamiltonian(single, single.control_points, p) ==
        doctest::Approx(0.5 * 4.0 * p.row(0).squaredNorm()).epsilon(1e-14));

  // Two particles: expand the 2x2 quadratic form by hand.
  RowMat3 q(2, 3), pp(2, 3);
  q << 0, 0, 0, 0.4, -0.2, 0.1;
  pp << 1.0, 0.5, -0.3, -0.2, 0.8, 0.6;
  const double k01 = cfg.kernel.eval_sq((q.row(0) - q.row(1)).squaredNorm());
  const double k00 = cfg.kernel.eval_sq(0.0);
  const double expect = 0.5 * (k00 * pp.row(0).squaredNorm() + k00 * pp.row(1).squaredNorm() +
                               2.0 * k01 * pp.row(0).dot(pp.row(1)));
  CHECK(hamiltonian(cfg, q, pp) == doctest::Approx(expect).epsilon(1e-12));
}

TEST_CASE("hamiltonian is nonnegative for random states") {
  Rng rng(19);
  for (int trial = 0; trial < 20; ++trial) {
    ShootingConfig cfg = small_config(rng, 2 + rng.uniform_int(6));
    const RowMat3 p = random_mat(rng, static_cast<int>(cfg.control_points.rows()), 1.0);
    CHECK(hamiltonian(cfg, cfg.control_points, p) >= -1e-12);
  }
}

TEST_CASE("zero momentum is the identity flow") {
  Rng rng(2);
  ShootingConfig cfg = small_config(rng, 4);
  const RowMat3 passengers = random_mat(rng, 7, 1.0);
  const FlowTrajectory traj = shoot_and_flow(cfg, RowMat3::Zero(4, 3), passengers);
  CHECK((traj.final_q() - cfg.control_points).cwiseAbs().maxCoeff() == 0.0);
  CHECK((traj.final_passengers() - passengers).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("single particle moves on a straight force-free geodesic") {
  Rng rng(3);
  ShootingConfig cfg = small_config(rng, 1);
  RowMat3 p0(1, 3);
  p0 << 0.2, 0.1, -0.4;
  const FlowTrajectory traj = shoot_and_flow(cfg, p0, RowMat3::Zero(0, 3));
  // K(0) = number of kernels = 4, momentum constant, displacement = 4 p0.
  CHECK((traj.p.back() - p0).cwiseAbs().maxCoeff() <= 1e-15);
  const RowMat3 expect = cfg.control_points + 4.0 * p0;
  CHECK((traj.final_q() - expect).cwiseAbs().maxCoeff() <= 1e-12);
}

TEST_CASE("total momentum is conserved by every Euler step") {
  Rng rng(4);
  ShootingConfig cfg = small_config(rng, 6);
  const RowMat3 p0 = random_mat(rng, 6, 0.5);
  const FlowTrajectory traj = shoot_and_flow(cfg, p0, RowMat3::Zero(0, 3));
  const Eigen::RowVector3d total0 = p0.colwise().sum();
  for (const auto& p : traj.p) {
    CHECK((Eigen::RowVector3d(p.colwise().sum()) - total0).cwiseAbs().maxCoeff() <= 1e-12);
  }
}

TEST_CASE("flow_pullback matches finite differences") {
  Rng rng(5);
  ShootingConfig cfg = small_config(rng, 3);
  cfg.steps = 4;
  const RowMat3 passengers = random_mat(rng, 5, 0.8);
  const RowMat3 p0 = random_mat(rng, 3, 0.4);
  const RowMat3 coeffs = random_mat(rng, 5, 1.0); // scalar = <coeffs, V_final>

  const auto scalar_of = [&](const RowMat3& p) {
    const FlowTrajectory traj = shoot_and_flow(cfg, p, passengers);
    return (coeffs.array() * traj.final_passengers().array()).sum();
  };

  const FlowTrajectory traj = shoot_and_flow(cfg, p0, passengers);
  const RowMat3 grad = flow_pullback(cfg, traj, coeffs);

  const double h = 1e-6;
  for (int trial = 0; trial < 8; ++trial) {
    const RowMat3 dir = random_mat(rng, 3, 1.0);
    const double fd = (scalar_of(p0 + h * dir) - scalar_of(p0 - h * dir)) / (2.0 * h);
    const double an = (grad.array() * dir.array()).sum();
    CHECK(rel_close(fd, an, 1e-6));
  }
}

TEST_CASE("non-finite states are reported with the step index") {
  ShootingConfig cfg;
  cfg.control_points = RowMat3::Zero(1, 3);
  cfg.kernel.sigmas = {1.0};
  cfg.steps = 3;
  RowMat3 p0(1, 3);
  p0 << 1e200, 0, 0;
  CHECK_THROWS_WITH_AS(shoot_and_flow(cfg, p0 * 1e200, RowMat3::Zero(0, 3)), doctest::Contains("step"),
                       std::runtime_error);
}

TEST_CASE("config validation") {
  ShootingConfig cfg;
  cfg.control_points = RowMat3::Zero(1, 3);
  cfg.steps = 0;
  CHECK_THROWS(cfg.validate());
  cfg.steps = 5;
  cfg.kernel.sigmas = {};
  CHECK_THROWS(cfg.validate());
}

} // TEST_SUITE
