#include "ncshape/kernels.hpp"

#include <cmath>
#include <stdexcept>

#include "ncshape/parallel.hpp"

namespace ncshape {

namespace {

constexpr double kPi = 3.14159265358979323846;

void check_pair(const DiracFunctional& mu, const DiracFunctional& nu) {
  if (mu.dim != nu.dim) throw std::invalid_argument("dual metric: ambient dimension mismatch");
  if (mu.weight_dim != nu.weight_dim) throw std::invalid_argument("dual metric: weight dimension mismatch");
}

double row_pair_sum(const GaussianKernel& kernel, const double* x, const double* w, int dim, int wdim,
                    const RowMat& points, const RowMat& weights, bool compensated) {
  const int m = static_cast<int>(points.rows());
  double sum = 0.0;
  double carry = 0.0;
  for (int j = 0; j < m; ++j) {
    const double* y = points.row(j).data();
    double d2 = 0.0;
    for (int c = 0; c < dim; ++c) {
      const double diff = x[c] - y[c];
      d2 += diff * diff;
    }
    const double* v = weights.row(j).data();
    double dot = 0.0;
    for (int c = 0; c < wdim; ++c) dot += w[c] * v[c];
    const double term = kernel.eval_sq(d2) * dot;
    if (compensated) {
      const double y1 = term - carry;
      const double t = sum + y1;
      carry = (t - sum) - y1;
      sum = t;
    } else {
      sum += term;
    }
  }
  return sum;
}

// Per-boundary-vertex sum of normalized outward incident edges.
std::pair<std::vector<int>, std::vector<Vec3>> boundary_outward_sums(const TriangleMesh& mesh,
                                                                     const EdgeTable& edges,
                                                                     const BoundaryInfo& boundary) {
  std::vector<Vec3> sums;
  sums.reserve(static_cast<std::size_t>(boundary.count()));
  for (int k = 0; k < boundary.count(); ++k) {
    const int v = boundary.vertices[static_cast<std::size_t>(k)];
    const Vec3 x = mesh.vertices.row(v);
    Vec3 a = Vec3::Zero();
    for (const int e : boundary.incident_edges[static_cast<std::size_t>(k)]) {
      const auto& pair = edges.edges[static_cast<std::size_t>(e)];
      const int other = pair[0] == v ? pair[1] : pair[0];
      a += (Vec3(mesh.vertices.row(other)) - x).normalized();
    }
    sums.push_back(a);
  }
  return {boundary.vertices, sums};
}

struct TheoremEdgeData {
  RowMat3 midpoints;
  RowMat3 edge_vectors;
  RowMat3 normal_sums; // sum over adjacent triangles of n_{T,f}
};

TheoremEdgeData theorem_edge_data(const TriangleMesh& mesh, const EdgeTable& edges) {
  TheoremEdgeData data;
  const int ne = edges.edge_count();
  data.midpoints = edges.midpoints;
  data.edge_vectors.resize(ne, 3);
  data.normal_sums.setZero(ne, 3);
  for (int e = 0; e < ne; ++e) {
    const auto& pair = edges.edges[static_cast<std::size_t>(e)];
    const Vec3 va = mesh.vertices.row(pair[0]);
    const Vec3 vb = mesh.vertices.row(pair[1]);
    const Vec3 f = vb - va;
    data.edge_vectors.row(e) = f;
    Vec3 nsum = Vec3::Zero();
    for (const int t : edges.adjacent[static_cast<std::size_t>(e)]) {
      Vec3 n = triangle_normal(mesh, t);
      // n_{T,f}: flip so that n x f points into the triangle.
      if (n.cross(f).dot(triangle_centroid(mesh, t) - Vec3(data.midpoints.row(e))) < 0.0) n = -n;
      nsum += n;
    }
    data.normal_sums.row(e) = nsum;
  }
  return data;
}

} // namespace

double GaussianKernel::eval_sq(double dist_sq) const { return std::exp(-dist_sq / (2.0 * sigma * sigma)); }

void GaussianKernel::validate() const {
  if (!(sigma > 0.0) || !std::isfinite(sigma)) throw std::invalid_argument("kernel sigma must be finite and > 0");
}

double KernelSum::eval_sq(double dist_sq) const {
  double s = 0.0;
  for (const double sigma : sigmas) s += std::exp(-dist_sq / (2.0 * sigma * sigma));
  return s;
}

void KernelSum::validate() const {
  if (sigmas.empty()) throw std::invalid_argument("kernel sum needs at least one sigma");
  for (const double sigma : sigmas) {
    if (!(sigma > 0.0) || !std::isfinite(sigma)) throw std::invalid_argument("kernel sigma must be finite and > 0");
  }
}

Eigen::MatrixXd gram(const GaussianKernel& kernel, const RowMat& X, const RowMat& Y) {
  kernel.validate();
  const int n = static_cast<int>(X.rows());
  const int m = static_cast<int>(Y.rows());
  Eigen::MatrixXd K(n, m);
  parallel_for(n, [&](std::int64_t begin, std::int64_t end) {
    for (std::int64_t i = begin; i < end; ++i) {
      for (int j = 0; j < m; ++j) {
        K(i, j) = kernel.eval_sq((X.row(i) - Y.row(j)).squaredNorm());
      }
    }
  });
  return K;
}

double dual_inner(const GaussianKernel& kernel, const DiracFunctional& mu, const DiracFunctional& nu,
                  bool compensated) {
  kernel.validate();
  check_pair(mu, nu);
  const int n = mu.rows();
  if (n == 0 || nu.rows() == 0) return 0.0;

  Eigen::VectorXd row_sums(n);
  parallel_for(n, [&](std::int64_t begin, std::int64_t end) {
    for (std::int64_t i = begin; i < end; ++i) {
      row_sums[i] = row_pair_sum(kernel, mu.points.row(i).data(), mu.weights.row(i).data(), mu.dim,
                                 mu.weight_dim, nu.points, nu.weights, compensated);
    }
  });
  double total = 0.0;
  for (int i = 0; i < n; ++i) total += row_sums[i];
  return total;
}

double dual_distance_sq(const GaussianKernel& kernel, const DiracFunctional& mu, const DiracFunctional& nu) {
  const double d2 = dual_inner(kernel, mu, mu) - 2.0 * dual_inner(kernel, mu, nu) + dual_inner(kernel, nu, nu);
  return d2 > 0.0 ? d2 : 0.0;
}

RowMat dual_field_eval(const GaussianKernel& kernel, const DiracFunctional& mu, const RowMat& queries) {
  kernel.validate();
  mu.validate();
  const int m = static_cast<int>(queries.rows());
  const int n = mu.rows();
  RowMat out;
  out.setZero(m, mu.weight_dim);
  parallel_for(m, [&](std::int64_t begin, std::int64_t end) {
    for (std::int64_t q = begin; q < end; ++q) {
      for (int i = 0; i < n; ++i) {
        const double w = kernel.eval_sq((queries.row(q) - mu.points.row(i)).squaredNorm());
        out.row(q) += w * mu.weights.row(i);
      }
    }
  });
  return out;
}

double nc_inner_theorem_surface(const GaussianKernel& kernel, const TriangleMesh& mesh_a,
                                const TriangleMesh& mesh_b) {
  kernel.validate();
  validate_mesh(mesh_a);
  validate_mesh(mesh_b);
  const EdgeTable edges_a = build_edge_table(mesh_a);
  const EdgeTable edges_b = build_edge_table(mesh_b);
  const TheoremEdgeData a = theorem_edge_data(mesh_a, edges_a);
  const TheoremEdgeData b = theorem_edge_data(mesh_b, edges_b);

  const int ne_a = static_cast<int>(a.midpoints.rows());
  const int ne_b = static_cast<int>(b.midpoints.rows());
  Eigen::VectorXd row_sums = Eigen::VectorXd::Zero(ne_a);
  parallel_for(ne_a, [&](std::int64_t begin, std::int64_t end) {
    for (std::int64_t i = begin; i < end; ++i) {
      double s = 0.0;
      for (int j = 0; j < ne_b; ++j) {
        const double kp = kernel.eval_sq((a.midpoints.row(i) - b.midpoints.row(j)).squaredNorm());
        s += kp * a.edge_vectors.row(i).dot(b.edge_vectors.row(j)) *
             a.normal_sums.row(i).dot(b.normal_sums.row(j));
      }
      row_sums[i] = s;
    }
  });
  double edge_term = 0.0;
  for (int i = 0; i < ne_a; ++i) edge_term += row_sums[i];

  const auto [verts_a, sums_a] = boundary_outward_sums(mesh_a, edges_a, boundary_vertices(mesh_a, edges_a));
  const auto [verts_b, sums_b] = boundary_outward_sums(mesh_b, edges_b, boundary_vertices(mesh_b, edges_b));
  double boundary_term = 0.0;
  for (std::size_t i = 0; i < verts_a.size(); ++i) {
    const Vec3 xi = mesh_a.vertices.row(verts_a[i]);
    for (std::size_t j = 0; j < verts_b.size(); ++j) {
      const Vec3 yj = mesh_b.vertices.row(verts_b[j]);
      boundary_term += kernel.eval_sq((xi - yj).squaredNorm()) * sums_a[i].dot(sums_b[j]);
    }
  }

  return kPi * kPi / 4.0 * (edge_term + boundary_term);
}

double nc_inner_theorem_curve(const GaussianKernel& kernel, const Polyline& curve_a, const Polyline& curve_b) {
  kernel.validate();
  validate_polyline(curve_a);
  validate_polyline(curve_b);

  const auto outward = [](const Polyline& c, int v) {
    const Vec3 x = c.vertices.row(v);
    Vec3 a = Vec3::Zero();
    for (const int s : c.vertex_segments[static_cast<std::size_t>(v)]) {
      const auto& seg = c.segments[static_cast<std::size_t>(s)];
      const int other = seg[0] == v ? seg[1] : seg[0];
      a += (Vec3(c.vertices.row(other)) - x).normalized();
    }
    return a;
  };

  double total = 0.0;
  for (int i = 0; i < curve_a.vertex_count(); ++i) {
    const Vec3 xi = curve_a.vertices.row(i);
    const Vec3 ai = outward(curve_a, i);
    for (int j = 0; j < curve_b.vertex_count(); ++j) {
      const Vec3 yj = curve_b.vertices.row(j);
      total += kernel.eval_sq((xi - yj).squaredNorm()) * ai.dot(outward(curve_b, j));
    }
  }
  return kPi * kPi / 4.0 * total;
}

} // namespace ncshape
