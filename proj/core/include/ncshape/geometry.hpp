#pragma once

#include <Eigen/Core>
#include <Eigen/Geometry>
#include <array>
#include <string>
#include <vector>

namespace ncshape {

using Vec3 = Eigen::Vector3d;
using RowMat = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using RowMat3 = Eigen::Matrix<double, Eigen::Dynamic, 3, Eigen::RowMajor>;

/// Minimum triangle area / segment length accepted by validation.
inline constexpr double kDegenerateTol = 1e-12;

/// Triangulated surface. Triangles are vertex-index triples wound
/// counter-clockwise as seen from the outward normal side. Immutable by
/// convention once built; all queries below take it by const reference.
struct TriangleMesh {
  RowMat3 vertices;
  std::vector<std::array<int, 3>> triangles;

  int vertex_count() const { return static_cast<int>(vertices.rows()); }
  int triangle_count() const { return static_cast<int>(triangles.size()); }
};

/// Discrete curve: vertices plus index-pair segments. Segments may form open
/// chains, loops, or branch; the incident lists are derived from segments.
struct Polyline {
  RowMat3 vertices;
  std::vector<std::array<int, 2>> segments;
  std::vector<std::vector<int>> vertex_segments;

  int vertex_count() const { return static_cast<int>(vertices.rows()); }
  int segment_count() const { return static_cast<int>(segments.size()); }
};

/// Unique undirected edges of a mesh in canonical (low index, high index)
/// form, sorted lexicographically, with per-edge adjacent triangle lists and
/// midpoints.
struct EdgeTable {
  std::vector<std::array<int, 2>> edges;
  std::vector<std::vector<int>> adjacent;
  RowMat3 midpoints;

  int edge_count() const { return static_cast<int>(edges.size()); }
};

/// Boundary vertices (ascending) and, for each, the indices of all mesh
/// edges incident to it.
struct BoundaryInfo {
  std::vector<int> vertices;
  std::vector<std::vector<int>> incident_edges;

  bool empty() const { return vertices.empty(); }
  int count() const { return static_cast<int>(vertices.size()); }
};

struct OrientationReport {
  std::vector<int> inconsistent_edges;
  bool consistent() const { return inconsistent_edges.empty(); }
};

struct Aabb {
  Vec3 lo = Vec3::Zero();
  Vec3 hi = Vec3::Zero();
  Vec3 extent() const { return hi - lo; }
  double diameter() const { return (hi - lo).norm(); }
};

/// Throws std::runtime_error naming the offending triangle when indices are
/// out of range or a triangle is degenerate (area < kDegenerateTol).
void validate_mesh(const TriangleMesh& mesh);

/// Same contract for polylines: valid indices, segment length >= tolerance,
/// incident lists consistent with segments.
void validate_polyline(const Polyline& line);

/// Parses the ASCII OBJ subset: "v x y z" vertices and "f ..." faces.
/// Face entries "a/b/c" keep the vertex index before the first slash,
/// indices are 1-based, faces with more than three vertices are
/// fan-triangulated from the first vertex, all other line types are skipped.
/// Errors cite the 1-based line number.
TriangleMesh load_obj(const std::string& path);

/// Writes "v %.17g %.17g %.17g" and "f i j k" (1-based) lines.
void save_obj(const TriangleMesh& mesh, const std::string& path);

/// Polyline text format: "v x y z" and "l i j" (1-based), same numeric rules
/// as the OBJ writer.
Polyline load_polyline(const std::string& path);
void save_polyline(const Polyline& line, const std::string& path);

/// One entry per unique vertex pair, deterministic order. With strict=true a
/// non-manifold edge (more than two adjacent triangles) throws; otherwise all
/// adjacencies are kept.
EdgeTable build_edge_table(const TriangleMesh& mesh, bool strict = true);

/// A vertex is boundary iff it lies on an edge with exactly one adjacent
/// triangle. Closed meshes return an empty set.
BoundaryInfo boundary_vertices(const TriangleMesh& mesh, const EdgeTable& edges);

/// Checks that every interior edge is traversed in opposite directions by
/// its two adjacent triangles.
OrientationReport check_orientation(const TriangleMesh& mesh, const EdgeTable& edges);

Vec3 triangle_normal(const TriangleMesh& mesh, int t); // unit, from winding
double triangle_area(const TriangleMesh& mesh, int t);
Vec3 triangle_centroid(const TriangleMesh& mesh, int t);
Aabb bounding_box(const RowMat3& points);

} // namespace ncshape
