#include <doctest.h>

#include <Eigen/Eigenvalues>

#include "ncshape/kernels.hpp"
#include "ncshape/parallel.hpp"
#include "ncshape/representations.hpp"
#include "ncshape/rng.hpp"
#include "support/testers.hpp"

using namespace ncshape;
using namespace ncshape::testing;

namespace {

DiracFunctional random_functional(Rng& rng, int n, int k) {
  DiracFunctional f;
  f.dim = 3;
  f.weight_dim = k;
  f.kind = FunctionalKind::Generic;
  f.points.resize(n, 3);
  f.weights.resize(n, k);
  for (int i = 0; i < n; ++i) {
    for (int c = 0; c < 3; ++c) f.points(i, c) = rng.uniform(-1, 1);
    for (int c = 0; c < k; ++c) f.weights(i, c) = rng.uniform(-2, 2);
  }
  return f;
}

// Scalar triple-loop evaluation, deliberately naive.
double dual_inner_oracle(const GaussianKernel& kernel, const DiracFunctional& mu, const DiracFunctional& nu) {
  double total = 0.0;
  for (int i = 0; i < mu.rows(); ++i) {
    for (int j = 0; j < nu.rows(); ++j) {
      double d2 = 0.0;
      for (int c = 0; c < 3; ++c) {
        const double diff = mu.points(i, c) - nu.points(j, c);
        d2 += diff * diff;
      }
      double dot = 0.0;
      for (int c = 0; c < mu.weight_dim; ++c) dot += mu.weights(i, c) * nu.weights(j, c);
      total += std::exp(-d2 / (2.0 * kernel.sigma * kernel.sigma)) * dot;
    }
  }
  return total;
}

} // namespace

TEST_SUITE("kernels") {

TEST_CASE("gram basics") {
  const GaussianKernel kernel{0.7};
  RowMat x(1, 3);
  x << 0.3, -0.2, 1.0;
  CHECK(gram(kernel, x, x)(0, 0) == 1.0);

  RowMat y(1, 3);
  y << 0.3 + kernel.sigma * std::sqrt(2.0), -0.2, 1.0;
  CHECK(gram(kernel, x, y)(0, 0) == doctest::Approx(std::exp(-1.0)).epsilon(1e-14));

  Rng rng(6);
  RowMat pts(5, 3);
  for (int i = 0; i < 5; ++i) {
    for (int c = 0; c < 3; ++c) pts(i, c) = rng.uniform(-1, 1);
  }
  const Eigen::MatrixXd K = gram(kernel, pts, pts);
  CHECK((K - K.transpose()).cwiseAbs().maxCoeff() == 0.0);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(K);
  CHECK(eig.eigenvalues().minCoeff() >= -1e-10);
}

TEST_CASE("dual_inner examples and oracle") {
  const GaussianKernel kernel{0.5};
  Rng rng(8);

  DiracFunctional one = random_functional(rng, 1, 4);
  CHECK(rel_close(dual_inner(kernel, one, one), one.weights.row(0).squaredNorm(), 1e-14));

  DiracFunctional far = one;
  far.points.row(0) += Eigen::RowVector3d(100.0 * kernel.sigma, 0, 0);
  CHECK(std::abs(dual_inner(kernel, one, far)) <
        1e-8 * one.weights.row(0).norm() * far.weights.row(0).norm());

  for (int trial = 0; trial < 20; ++trial) {
    const DiracFunctional mu = random_functional(rng, 4, 5);
    const DiracFunctional nu = random_functional(rng, 3, 5);
    const double fast = dual_inner(kernel, mu, nu);
    const double slow = dual_inner_oracle(kernel, mu, nu);
    CHECK(rel_close(fast, slow, 1e-12));
    CHECK(rel_close(dual_inner(kernel, nu, mu), fast, 1e-12));
  }
}

TEST_CASE("dual_inner rejects mismatched weight dims") {
  const GaussianKernel kernel{0.5};
  Rng rng(9);
  const DiracFunctional a = random_functional(rng, 2, 3);
  const DiracFunctional b = random_functional(rng, 2, 4);
  CHECK_THROWS(dual_inner(kernel, a, b));
}

TEST_CASE("dual_distance_sq basics") {
  const GaussianKernel kernel{0.5};
  Rng rng(10);
  const DiracFunctional mu = random_functional(rng, 5, 3);
  CHECK(dual_distance_sq(kernel, mu, mu) == 0.0);

  DiracFunctional empty = make_empty_functional(3, 3, FunctionalKind::Generic);
  CHECK(rel_close(dual_distance_sq(kernel, mu, empty), dual_inner(kernel, mu, mu), 1e-14));

  for (int trial = 0; trial < 10; ++trial) {
    const DiracFunctional a = random_functional(rng, 4, 3);
    const DiracFunctional b = random_functional(rng, 6, 3);
    CHECK(rel_close(dual_distance_sq(kernel, a, b), dual_distance_sq(kernel, b, a), 1e-12));
  }
}

TEST_CASE("Cauchy-Schwarz holds on random functionals") {
  const GaussianKernel kernel{0.6};
  Rng rng(11);
  for (int trial = 0; trial < 30; ++trial) {
    const DiracFunctional a = random_functional(rng, 3 + rng.uniform_int(5), 6);
    const DiracFunctional b = random_functional(rng, 3 + rng.uniform_int(5), 6);
    const double ab = dual_inner(kernel, a, b);
    const double aa = dual_inner(kernel, a, a);
    const double bb = dual_inner(kernel, b, b);
    CHECK(ab * ab <= aa * bb + 1e-10);
  }
}

TEST_CASE("dual_field_eval equals its loop oracle") {
  const GaussianKernel kernel{0.4};
  Rng rng(12);
  const DiracFunctional mu = random_functional(rng, 6, 15);
  RowMat queries(4, 3);
  for (int i = 0; i < 4; ++i) {
    for (int c = 0; c < 3; ++c) queries(i, c) = rng.uniform(-1, 1);
  }
  const RowMat field = dual_field_eval(kernel, mu, queries);
  for (int q = 0; q < 4; ++q) {
    Eigen::RowVectorXd expect = Eigen::RowVectorXd::Zero(15);
    for (int i = 0; i < mu.rows(); ++i) {
      expect += kernel.eval_sq((queries.row(q) - mu.points.row(i)).squaredNorm()) * mu.weights.row(i);
    }
    CHECK((field.row(q) - expect).cwiseAbs().maxCoeff() <= 1e-12 * (1.0 + expect.cwiseAbs().maxCoeff()));
  }

  // Query at a source point of a one-delta functional returns its weight.
  const DiracFunctional one = random_functional(rng, 1, 15);
  const RowMat at_src = dual_field_eval(kernel, one, RowMat(one.points));
  CHECK((at_src - one.weights).cwiseAbs().maxCoeff() <= 1e-14);

  // Empty functional gives the zero field.
  const DiracFunctional empty = make_empty_functional(3, 15, FunctionalKind::Generic);
  CHECK(dual_field_eval(kernel, empty, queries).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("surface oracle equivalence on randomized meshes") {
  Rng rng(1234);
  const GaussianKernel kernel{0.5};
  int checked = 0;
  for (int trial = 0; trial < 25; ++trial) {
    const TriangleMesh a = random_small_mesh(rng);
    const TriangleMesh b = random_small_mesh(rng);
    const double delta_form = dual_inner(kernel, normal_cycle_of_mesh(a), normal_cycle_of_mesh(b));
    const double theorem_form = nc_inner_theorem_surface(kernel, a, b);
    CHECK(std::abs(delta_form - theorem_form) <= 1e-10 * (1.0 + std::abs(theorem_form)));
    ++checked;
  }
  CHECK(checked == 25);
}

TEST_CASE("curve oracle equivalence on randomized polylines") {
  Rng rng(4321);
  const GaussianKernel kernel{0.5};
  for (int trial = 0; trial < 25; ++trial) {
    const Polyline a = random_polyline(rng);
    const Polyline b = random_polyline(rng);
    const double delta_form = dual_inner(kernel, normal_cycle_of_curve(a), normal_cycle_of_curve(b));
    const double theorem_form = nc_inner_theorem_curve(kernel, a, b);
    CHECK(std::abs(delta_form - theorem_form) <= 1e-12 * (1.0 + std::abs(theorem_form)));
  }
}

TEST_CASE("flat disc: interior edges contribute nothing to the theorem sum") {
  ShapeParams p;
  p.resolution = 2;
  const TriangleMesh disc = std::get<TriangleMesh>(make_shape(ShapeKind::FlatDisc, p));
  const GaussianKernel kernel{0.5};

  // Restricted-sum oracle evaluated right here: boundary-edge-only term plus
  // the boundary-vertex term must give the full value.
  const EdgeTable edges = build_edge_table(disc);
  const BoundaryInfo boundary = boundary_vertices(disc, edges);
  const DiracFunctional nc = normal_cycle_of_mesh(disc, edges, boundary);

  DiracFunctional boundary_only = nc;
  for (int e = 0; e < edges.edge_count(); ++e) {
    if (edges.adjacent[static_cast<std::size_t>(e)].size() == 2) {
      boundary_only.weights.row(e).setZero();
    }
  }
  const double full = dual_inner(kernel, nc, nc);
  const double restricted = dual_inner(kernel, boundary_only, boundary_only);
  CHECK(rel_close(full, restricted, 1e-12));
  CHECK(rel_close(full, nc_inner_theorem_surface(kernel, disc, disc), 1e-10));
}

TEST_CASE("two distant meshes have negligible inner product") {
  const TriangleMesh a = make_sphere(1);
  TriangleMesh b = make_sphere(1);
  const GaussianKernel kernel{0.5};
  b.vertices.col(0).array() += 100.0 * kernel.sigma;
  const double cross = nc_inner_theorem_surface(kernel, a, b);
  const double aa = nc_inner_theorem_surface(kernel, a, a);
  CHECK(std::abs(cross) <= 1e-8 * aa);
}

TEST_CASE("theorem curve form: straight chains reduce to endpoint terms") {
  Polyline chain;
  chain.vertices.resize(4, 3);
  chain.vertices << 0, 0, 0, 1, 0, 0, 2, 0, 0, 3, 0, 0;
  chain.segments = {{0, 1}, {1, 2}, {2, 3}};
  chain.vertex_segments = {{0}, {0, 1}, {1, 2}, {2}};

  Polyline endpoints_only;
  endpoints_only.vertices.resize(2, 3);
  endpoints_only.vertices << 0, 0, 0, 3, 0, 0;
  endpoints_only.segments = {{0, 1}};
  endpoints_only.vertex_segments = {{0}, {0}};

  // Interior A_i vanish, so the chain's self product equals that of the
  // two-endpoint segment with the same outward units.
  const GaussianKernel kernel{0.8};
  CHECK(rel_close(nc_inner_theorem_curve(kernel, chain, chain),
                  nc_inner_theorem_curve(kernel, endpoints_only, endpoints_only), 1e-12));
}

TEST_CASE("theorem curve form scales only through the kernel") {
  Rng rng(55);
  const Polyline a = random_polyline(rng);
  const Polyline b = random_polyline(rng);
  const double s = 3.0;
  Polyline as = a, bs = b;
  as.vertices *= s;
  bs.vertices *= s;
  // Same value when the kernel bandwidth is scaled along with the points
  // (the A_i weights are scale invariant).
  const double base = nc_inner_theorem_curve(GaussianKernel{0.5}, a, b);
  const double scaled = nc_inner_theorem_curve(GaussianKernel{0.5 * s}, as, bs);
  CHECK(rel_close(base, scaled, 1e-12));
}

TEST_CASE("results do not depend on the thread count") {
  Rng rng(66);
  const DiracFunctional mu = random_functional(rng, 300, 15);
  const DiracFunctional nu = random_functional(rng, 200, 15);
  const GaussianKernel kernel{0.5};

  set_max_threads(1);
  const double serial = dual_inner(kernel, mu, nu);
  set_max_threads(8);
  const double parallel = dual_inner(kernel, mu, nu);
  set_max_threads(0);
  CHECK(serial == parallel);
}

TEST_CASE("compensated summation agrees with plain accumulation") {
  Rng rng(67);
  const DiracFunctional mu = random_functional(rng, 50, 3);
  const GaussianKernel kernel{0.5};
  CHECK(rel_close(dual_inner(kernel, mu, mu, true), dual_inner(kernel, mu, mu, false), 1e-12));
}

} // TEST_SUITE
