#include <doctest.h>

#include <Eigen/Dense>
#include <map>

#include "ncshape/parallel.hpp"
#include "ncshape/representations.hpp"
#include "ncshape/rls.hpp"
#include "ncshape/rng.hpp"
#include "ncshape/shapes.hpp"
#include "support/testers.hpp"

using namespace ncshape;
using namespace ncshape::testing;

namespace {

RowMat random_points(Rng& rng, int n, double spread) {
  RowMat x(n, 3);
  for (int i = 0; i < n; ++i) {
    for (int c = 0; c < 3; ++c) x(i, c) = rng.uniform(-spread, spread);
  }
  return x;
}

// Independent dense route: diag of K (K + lambda I)^{-1} through a full LU
// solve, no Cholesky.
Eigen::VectorXd dense_scores_oracle(const GaussianKernel& kernel, const RowMat& x, double lambda) {
  const Eigen::MatrixXd K = gram(kernel, x, x);
  Eigen::MatrixXd ridged = K;
  ridged.diagonal().array() += lambda;
  const Eigen::MatrixXd M = ridged.fullPivLu().solve(K); // (K+lambda I)^{-1} K
  return M.diagonal();
}

} // namespace

TEST_SUITE("rls") {

TEST_CASE("exact scores: separated points behave like the identity kernel") {
  Rng rng(1);
  const int n = 12;
  RowMat x(n, 3);
  for (int i = 0; i < n; ++i) x.row(i) = Eigen::RowVector3d(100.0 * i, 0, 0);
  const GaussianKernel kernel{0.5};
  const double lambda = 0.3;
  const Eigen::VectorXd scores = exact_rls_scores(kernel, x, lambda);
  for (int i = 0; i < n; ++i) CHECK(scores[i] == doctest::Approx(1.0 / (1.0 + lambda)).epsilon(1e-12));
}

TEST_CASE("exact scores: single point") {
  RowMat x(1, 3);
  x << 0.1, 0.2, 0.3;
  const double lambda = 0.7;
  const Eigen::VectorXd scores = exact_rls_scores(GaussianKernel{1.0}, x, lambda);
  CHECK(scores[0] == doctest::Approx(1.0 / (1.0 + lambda)).epsilon(1e-14));
}

TEST_CASE("exact scores match a dense-solve oracle") {
  Rng rng(2);
  const GaussianKernel kernel{0.6};
  for (int trial = 0; trial < 10; ++trial) {
    const int n = 6 + rng.uniform_int(20);
    const RowMat x = random_points(rng, n, 1.0);
    const double lambda = std::pow(10.0, rng.uniform(-4, 0));
    const Eigen::VectorXd fast = exact_rls_scores(kernel, x, lambda);
    const Eigen::VectorXd slow = dense_scores_oracle(kernel, x, lambda);
    CHECK((fast - slow).cwiseAbs().maxCoeff() <= 1e-10);
  }
}

TEST_CASE("exact scores refuse negative lambda and over-cap sizes") {
  Rng rng(3);
  const RowMat x = random_points(rng, 8, 1.0);
  CHECK_THROWS(exact_rls_scores(GaussianKernel{0.5}, x, -0.1));
  CHECK_THROWS(exact_rls_scores(GaussianKernel{0.5}, x, 0.1, /*cap=*/4));
}

TEST_CASE("effective dimension model: limits and the auto-lambda window") {
  const TriangleMesh sphere = make_sphere(5); // 750 edges
  const DiracFunctional nc = normal_cycle_of_mesh(sphere);
  RowMat x = nc.points.topRows(300);
  const GaussianKernel kernel{0.4};
  const EffectiveDimensionModel model(kernel, x, 2000);

  // Large lambda: d_eff <= tr(K)/lambda <= 1 at lambda = n.
  CHECK(model.d_eff(300.0) <= 1.0 + 1e-9);
  // Tiny lambda: approaches the numerical rank, far above the target.
  CHECK(model.d_eff(3e-8) > 60.0);

  const int target = 30;
  const double lambda = model.lambda_for(target);
  const Eigen::VectorXd exact = exact_rls_scores(kernel, x, lambda);
  const double d_eff = exact.sum();
  CHECK(d_eff >= target);
  CHECK(d_eff <= 2.0 * target);
}

TEST_CASE("uniform-kernel limit: selection frequencies are flat") {
  const int n = 20, m = 5;
  RowMat x(n, 3);
  for (int i = 0; i < n; ++i) x.row(i) = Eigen::RowVector3d(50.0 * i, 0, 0);
  const GaussianKernel kernel{0.5};

  RlsConfig cfg;
  cfg.target_m = m;
  cfg.lambda = 0.5;
  std::vector<int> hits(n, 0);
  const int runs = 2000;
  for (int seed = 0; seed < runs; ++seed) {
    cfg.seed = static_cast<std::uint64_t>(seed);
    const RlsSample sample = recursive_rls_sample(kernel, x, cfg);
    REQUIRE(static_cast<int>(sample.indices.size()) == m);
    for (const int i : sample.indices) ++hits[static_cast<std::size_t>(i)];
  }
  const double expect = static_cast<double>(runs) * m / n;
  for (int i = 0; i < n; ++i) {
    CHECK(hits[static_cast<std::size_t>(i)] >= 0.75 * expect);
    CHECK(hits[static_cast<std::size_t>(i)] <= 1.25 * expect);
  }
}

TEST_CASE("recursive score estimates stay within factor 4 of exact") {
  const TriangleMesh sphere = make_sphere(4, 1.0, 9, 0.02);
  const DiracFunctional nc = normal_cycle_of_mesh(sphere);
  RowMat x = nc.points.topRows(200);
  const GaussianKernel kernel{0.35};

  RlsConfig cfg;
  cfg.target_m = 20;
  cfg.lambda = auto_lambda(kernel, x, cfg.target_m);
  const Eigen::VectorXd exact = exact_rls_scores(kernel, x, *cfg.lambda);

  int within = 0, total = 0;
  for (int seed = 0; seed < 20; ++seed) {
    cfg.seed = static_cast<std::uint64_t>(seed);
    const RlsSample sample = recursive_rls_sample(kernel, x, cfg);
    for (int i = 0; i < 200; ++i) {
      const double ratio = sample.scores[i] / exact[i];
      if (ratio >= 0.25 && ratio <= 4.0) ++within;
      ++total;
    }
  }
  CHECK(static_cast<double>(within) / total >= 0.95);
}

TEST_CASE("fixed seed gives identical samples across thread counts") {
  Rng rng(5);
  const RowMat x = random_points(rng, 150, 1.0);
  const GaussianKernel kernel{0.4};
  RlsConfig cfg;
  cfg.target_m = 12;
  cfg.seed = 42;

  set_max_threads(1);
  const RlsSample a = recursive_rls_sample(kernel, x, cfg);
  set_max_threads(8);
  const RlsSample b = recursive_rls_sample(kernel, x, cfg);
  set_max_threads(0);
  CHECK(a.indices == b.indices);
  CHECK((a.scores - b.scores).cwiseAbs().maxCoeff() == 0.0);
  CHECK(a.lambda == b.lambda);

  const RlsSample c = recursive_rls_sample(kernel, x, cfg);
  CHECK(c.indices == a.indices);
}

TEST_CASE("recursive sampler validates its inputs") {
  Rng rng(6);
  const RowMat x = random_points(rng, 10, 1.0);
  RlsConfig cfg;
  cfg.target_m = 10; // must be < n
  CHECK_THROWS(recursive_rls_sample(GaussianKernel{0.5}, x, cfg));
  cfg.target_m = 3;
  cfg.lambda = -1.0;
  CHECK_THROWS(recursive_rls_sample(GaussianKernel{0.5}, x, cfg));
}

} // TEST_SUITE
