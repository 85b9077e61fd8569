#include "ncshape/representations.hpp"

#include <stdexcept>

#include "ncshape/parallel.hpp"
#include "ncshape/wedge.hpp"

namespace ncshape {

namespace {

Eigen::VectorXd stack6(const Vec3& top, const Vec3& bottom) {
  Eigen::VectorXd v(6);
  v << top[0], top[1], top[2], bottom[0], bottom[1], bottom[2];
  return v;
}

} // namespace

int nc_mixed_slot(int i, int j) { return basis_index(i + 1, j + 4, 6); }

const std::array<int, 3> kNcSphericalSlots = {basis_index(4, 5, 6), basis_index(4, 6, 6), basis_index(5, 6, 6)};

void add_spherical_embedding(Eigen::Ref<Eigen::RowVectorXd> row, const Vec3& a, double scale) {
  row[kNcSphericalSlots[0]] += scale * a[2];
  row[kNcSphericalSlots[1]] -= scale * a[1];
  row[kNcSphericalSlots[2]] += scale * a[0];
}

DiracFunctional currents_of_mesh(const TriangleMesh& mesh) {
  validate_mesh(mesh);
  DiracFunctional f;
  f.dim = 3;
  f.weight_dim = 3;
  f.kind = FunctionalKind::CurrentSurface;
  const int nt = mesh.triangle_count();
  f.points.resize(nt, 3);
  f.weights.resize(nt, 3);
  for (int t = 0; t < nt; ++t) {
    const auto& tri = mesh.triangles[static_cast<std::size_t>(t)];
    const Vec3 a = mesh.vertices.row(tri[0]);
    const Vec3 b = mesh.vertices.row(tri[1]);
    const Vec3 c = mesh.vertices.row(tri[2]);
    f.points.row(t) = (a + b + c) / 3.0;
    f.weights.row(t) = 0.5 * (b - a).cross(c - a); // unit normal times area
  }
  f.validate();
  return f;
}

DiracFunctional normal_cycle_of_mesh(const TriangleMesh& mesh) {
  const EdgeTable edges = build_edge_table(mesh, /*strict=*/true);
  const OrientationReport orientation = check_orientation(mesh, edges);
  if (!orientation.consistent()) {
    throw std::runtime_error("normal_cycle_of_mesh: inconsistently oriented mesh (" +
                             std::to_string(orientation.inconsistent_edges.size()) + " bad edges)");
  }
  const BoundaryInfo boundary = boundary_vertices(mesh, edges);
  return normal_cycle_of_mesh(mesh, edges, boundary);
}

DiracFunctional normal_cycle_of_mesh(const TriangleMesh& mesh, const EdgeTable& edges,
                                     const BoundaryInfo& boundary) {
  validate_mesh(mesh);
  const int ne = edges.edge_count();
  const int nb = boundary.count();

  DiracFunctional f;
  f.dim = 3;
  f.weight_dim = 15;
  f.kind = FunctionalKind::NcSurface;
  f.points.resize(ne + nb, 3);
  f.weights.setZero(ne + nb, 15);

  // Cylindrical rows, one per unique edge.
  parallel_for(ne, [&](std::int64_t begin, std::int64_t end) {
    for (std::int64_t e = begin; e < end; ++e) {
      const auto& pair = edges.edges[static_cast<std::size_t>(e)];
      const Vec3 va = mesh.vertices.row(pair[0]);
      const Vec3 vb = mesh.vertices.row(pair[1]);
      const Vec3 edge_vec = vb - va; // canonical: low index to high index
      const Vec3 mid = 0.5 * (va + vb);
      const Vec3 unit_edge = edge_vec.normalized();

      Eigen::VectorXd gamma = Eigen::VectorXd::Zero(15);
      for (const int t : edges.adjacent[static_cast<std::size_t>(e)]) {
        const Vec3 n = triangle_normal(mesh, t);
        Vec3 beta = n.cross(unit_edge); // unit: n is orthogonal to the edge
        const Vec3 centroid = triangle_centroid(mesh, t);
        if (beta.dot(centroid - mid) < 0.0) beta = -beta; // oriented into the triangle
        gamma += wedge_embed(stack6(unit_edge, Vec3::Zero()), stack6(Vec3::Zero(), edge_vec.cross(beta))).coeffs;
      }
      f.points.row(e) = mid;
      f.weights.row(e) = kNcPrefactor * gamma.transpose();
    }
  });

  // Spherical rows, one per boundary vertex, summing every incident mesh
  // edge oriented outwards from the vertex.
  for (int k = 0; k < nb; ++k) {
    const int v = boundary.vertices[static_cast<std::size_t>(k)];
    const Vec3 x = mesh.vertices.row(v);
    Vec3 outward_sum = Vec3::Zero();
    for (const int e : boundary.incident_edges[static_cast<std::size_t>(k)]) {
      const auto& pair = edges.edges[static_cast<std::size_t>(e)];
      const int other = pair[0] == v ? pair[1] : pair[0];
      outward_sum += (Vec3(mesh.vertices.row(other)) - x).normalized();
    }
    f.points.row(ne + k) = x;
    add_spherical_embedding(f.weights.row(ne + k), outward_sum, kNcPrefactor);
  }

  f.validate();
  return f;
}

DiracFunctional normal_cycle_of_curve(const Polyline& curve) {
  validate_polyline(curve);
  const int nv = curve.vertex_count();

  DiracFunctional f;
  f.dim = 3;
  f.weight_dim = 3;
  f.kind = FunctionalKind::NcCurve;
  f.points = curve.vertices;
  f.weights.setZero(nv, 3);
  for (int v = 0; v < nv; ++v) {
    const Vec3 x = curve.vertices.row(v);
    Vec3 outward_sum = Vec3::Zero();
    for (const int s : curve.vertex_segments[static_cast<std::size_t>(v)]) {
      const auto& seg = curve.segments[static_cast<std::size_t>(s)];
      const int other = seg[0] == v ? seg[1] : seg[0];
      outward_sum += (Vec3(curve.vertices.row(other)) - x).normalized();
    }
    f.weights.row(v) = kNcPrefactor * outward_sum.transpose();
  }
  f.validate();
  return f;
}

} // namespace ncshape
