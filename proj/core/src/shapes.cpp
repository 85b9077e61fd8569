#include "ncshape/shapes.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <stdexcept>

#include "ncshape/rng.hpp"

namespace ncshape {

namespace {

constexpr double kPi = 3.14159265358979323846;

double size_at(const ShapeParams& p, std::size_t i, double fallback) {
  if (i < p.size.size()) return p.size[i];
  if (!p.size.empty()) return p.size.back();
  return fallback;
}

void require(bool ok, const std::string& msg) {
  if (!ok) throw std::invalid_argument(msg);
}

// Icosahedron with every face split into res^2 barycentric sub-triangles,
// vertices projected onto the unit sphere. Grid points on shared icosahedron
// edges are welded through an exact integer key.
TriangleMesh unit_icosphere(int res) {
  require(res >= 1, "sphere resolution must be >= 1");
  const double phi = (1.0 + std::sqrt(5.0)) / 2.0;
  std::vector<Vec3> base = {
      {-1, phi, 0}, {1, phi, 0}, {-1, -phi, 0}, {1, -phi, 0}, {0, -1, phi}, {0, 1, phi},
      {0, -1, -phi}, {0, 1, -phi}, {phi, 0, -1}, {phi, 0, 1}, {-phi, 0, -1}, {-phi, 0, 1},
  };
  for (auto& v : base) v.normalize();
  std::vector<std::array<int, 3>> faces = {
      {0, 11, 5}, {0, 5, 1},  {0, 1, 7},   {0, 7, 10}, {0, 10, 11}, {1, 5, 9},  {5, 11, 4},
      {11, 10, 2}, {10, 7, 6}, {7, 1, 8},  {3, 9, 4},  {3, 4, 2},   {3, 2, 6},  {3, 6, 8},
      {3, 8, 9},   {4, 9, 5},  {2, 4, 11}, {6, 2, 10}, {8, 6, 7},   {9, 8, 1},
  };
  // Outward winding regardless of the table above.
  for (auto& f : faces) {
    const Vec3 c = (base[static_cast<std::size_t>(f[0])] + base[static_cast<std::size_t>(f[1])] +
                    base[static_cast<std::size_t>(f[2])]) /
                   3.0;
    const Vec3 n = (base[static_cast<std::size_t>(f[1])] - base[static_cast<std::size_t>(f[0])])
                       .cross(base[static_cast<std::size_t>(f[2])] - base[static_cast<std::size_t>(f[0])]);
    if (n.dot(c) < 0.0) std::swap(f[1], f[2]);
  }

  TriangleMesh mesh;
  std::vector<Vec3> verts;
  // Key: (vertex, weight) pairs with zero weights dropped, sorted; exact under
  // integer barycentric coordinates, so edge/corner points weld across faces.
  std::map<std::vector<std::pair<int, int>>, int> weld;
  const auto grid_vertex = [&](const std::array<int, 3>& f, int wa, int wb, int wc) {
    std::vector<std::pair<int, int>> key;
    if (wa > 0) key.emplace_back(f[0], wa);
    if (wb > 0) key.emplace_back(f[1], wb);
    if (wc > 0) key.emplace_back(f[2], wc);
    std::sort(key.begin(), key.end());
    const auto it = weld.find(key);
    if (it != weld.end()) return it->second;
    const Vec3 p = (wa * base[static_cast<std::size_t>(f[0])] + wb * base[static_cast<std::size_t>(f[1])] +
                    wc * base[static_cast<std::size_t>(f[2])])
                       .normalized();
    const int id = static_cast<int>(verts.size());
    verts.push_back(p);
    weld.emplace(std::move(key), id);
    return id;
  };

  for (const auto& f : faces) {
    // Rows i toward f[1], columns j toward f[2]; i + j <= res.
    for (int i = 0; i < res; ++i) {
      for (int j = 0; j < res - i; ++j) {
        const int v00 = grid_vertex(f, res - i - j, i, j);
        const int v10 = grid_vertex(f, res - i - j - 1, i + 1, j);
        const int v01 = grid_vertex(f, res - i - j - 1, i, j + 1);
        mesh.triangles.push_back({v00, v10, v01});
        if (i + j < res - 1) {
          const int v11 = grid_vertex(f, res - i - j - 2, i + 1, j + 1);
          mesh.triangles.push_back({v10, v11, v01});
        }
      }
    }
  }

  mesh.vertices.resize(static_cast<Eigen::Index>(verts.size()), 3);
  for (std::size_t i = 0; i < verts.size(); ++i) mesh.vertices.row(static_cast<Eigen::Index>(i)) = verts[i];
  return mesh;
}

// Latitude reparametrization pulling vertices toward the +z pole while
// staying on the unit sphere.
void warp_toward_pole(TriangleMesh& mesh, double strength) {
  const double gamma = 1.0 + strength;
  for (Eigen::Index i = 0; i < mesh.vertices.rows(); ++i) {
    const double z = std::clamp(mesh.vertices(i, 2), -1.0, 1.0);
    const double t = 0.5 * (z + 1.0);
    const double zw = 2.0 * std::pow(t, 1.0 / gamma) - 1.0;
    const double rho = std::sqrt(std::max(0.0, 1.0 - z * z));
    const double rho_w = std::sqrt(std::max(0.0, 1.0 - zw * zw));
    const double s = rho > 1e-15 ? rho_w / rho : 0.0;
    mesh.vertices(i, 0) *= s;
    mesh.vertices(i, 1) *= s;
    mesh.vertices(i, 2) = zw;
  }
}

void apply_jitter(RowMat3& vertices, double jitter, std::uint64_t seed) {
  if (jitter <= 0.0) return;
  Rng rng(seed);
  for (Eigen::Index i = 0; i < vertices.rows(); ++i) {
    for (int c = 0; c < 3; ++c) vertices(i, c) += rng.uniform(-jitter, jitter);
  }
}

TriangleMesh build_torus(const ShapeParams& p) {
  require(p.resolution >= 3, "torus resolution must be >= 3");
  const double R = size_at(p, 0, 1.0);
  const double r = size_at(p, 1, 0.35);
  require(R > r && r > 0.0, "torus needs major radius > minor radius > 0");
  const int nu = p.resolution;
  const int nv = p.resolution;

  TriangleMesh mesh;
  mesh.vertices.resize(static_cast<Eigen::Index>(nu) * nv, 3);
  for (int i = 0; i < nu; ++i) {
    const double u = 2.0 * kPi * i / nu;
    for (int j = 0; j < nv; ++j) {
      const double v = 2.0 * kPi * j / nv;
      const double ring = R + r * std::cos(v);
      mesh.vertices.row(static_cast<Eigen::Index>(i) * nv + j) =
          Vec3(ring * std::cos(u), ring * std::sin(u), r * std::sin(v));
    }
  }
  const auto at = [nv](int i, int j) { return i * nv + j; };
  for (int i = 0; i < nu; ++i) {
    const int i1 = (i + 1) % nu;
    for (int j = 0; j < nv; ++j) {
      const int j1 = (j + 1) % nv;
      mesh.triangles.push_back({at(i, j), at(i1, j), at(i1, j1)});
      mesh.triangles.push_back({at(i, j), at(i1, j1), at(i, j1)});
    }
  }
  return mesh;
}

TriangleMesh build_flat_disc(const ShapeParams& p) {
  require(p.resolution >= 1, "disc resolution must be >= 1");
  const double radius = size_at(p, 0, 1.0);
  require(radius > 0.0, "disc radius must be positive");
  const int rings = p.resolution;
  const int spokes = 6 * p.resolution;

  TriangleMesh mesh;
  mesh.vertices.resize(1 + static_cast<Eigen::Index>(rings) * spokes, 3);
  mesh.vertices.row(0) = Vec3(0, 0, 0);
  for (int i = 1; i <= rings; ++i) {
    const double rho = radius * i / rings;
    for (int j = 0; j < spokes; ++j) {
      const double a = 2.0 * kPi * j / spokes;
      mesh.vertices.row(1 + static_cast<Eigen::Index>(i - 1) * spokes + j) =
          Vec3(rho * std::cos(a), rho * std::sin(a), 0.0);
    }
  }
  const auto at = [spokes](int ring, int j) { return 1 + (ring - 1) * spokes + (j % spokes); };
  for (int j = 0; j < spokes; ++j) {
    mesh.triangles.push_back({0, at(1, j), at(1, j + 1)});
  }
  for (int i = 1; i < rings; ++i) {
    for (int j = 0; j < spokes; ++j) {
      mesh.triangles.push_back({at(i, j), at(i + 1, j), at(i + 1, j + 1)});
      mesh.triangles.push_back({at(i, j), at(i + 1, j + 1), at(i, j + 1)});
    }
  }
  return mesh;
}

TriangleMesh build_cube(const ShapeParams& p) {
  const double h = 0.5 * size_at(p, 0, 1.0);
  require(h > 0.0, "cube edge must be positive");
  TriangleMesh mesh;
  mesh.vertices.resize(8, 3);
  for (int i = 0; i < 8; ++i) {
    mesh.vertices.row(i) = Vec3(i & 1 ? h : -h, i & 2 ? h : -h, i & 4 ? h : -h);
  }
  // Quads wound outward, each split along its first diagonal.
  const std::array<std::array<int, 4>, 6> quads = {{
      {0, 2, 3, 1}, // z = -h
      {4, 5, 7, 6}, // z = +h
      {0, 1, 5, 4}, // y = -h
      {2, 6, 7, 3}, // y = +h
      {0, 4, 6, 2}, // x = -h
      {1, 3, 7, 5}, // x = +h
  }};
  for (const auto& q : quads) {
    mesh.triangles.push_back({q[0], q[1], q[2]});
    mesh.triangles.push_back({q[0], q[2], q[3]});
  }
  return mesh;
}

Polyline finalize_polyline(std::vector<Vec3> verts, std::vector<std::array<int, 2>> segs) {
  Polyline line;
  line.vertices.resize(static_cast<Eigen::Index>(verts.size()), 3);
  for (std::size_t i = 0; i < verts.size(); ++i) line.vertices.row(static_cast<Eigen::Index>(i)) = verts[i];
  line.segments = std::move(segs);
  line.vertex_segments.assign(verts.size(), {});
  for (int s = 0; s < line.segment_count(); ++s) {
    line.vertex_segments[static_cast<std::size_t>(line.segments[static_cast<std::size_t>(s)][0])].push_back(s);
    line.vertex_segments[static_cast<std::size_t>(line.segments[static_cast<std::size_t>(s)][1])].push_back(s);
  }
  return line;
}

Polyline build_line_polyline(const ShapeParams& p) {
  require(p.resolution >= 1, "line resolution must be >= 1");
  const double length = size_at(p, 0, 1.0);
  std::vector<Vec3> verts;
  std::vector<std::array<int, 2>> segs;
  for (int i = 0; i <= p.resolution; ++i) {
    verts.emplace_back(length * i / p.resolution, 0.0, 0.0);
    if (i > 0) segs.push_back({i - 1, i});
  }
  return finalize_polyline(std::move(verts), std::move(segs));
}

Polyline build_l_polyline(const ShapeParams& p) {
  require(p.resolution >= 1, "L resolution must be >= 1");
  const double length = size_at(p, 0, 1.0);
  std::vector<Vec3> verts;
  std::vector<std::array<int, 2>> segs;
  // Walk down the +x leg into the corner, then up the +y leg.
  for (int i = p.resolution; i >= 1; --i) verts.emplace_back(length * i / p.resolution, 0.0, 0.0);
  verts.emplace_back(0.0, 0.0, 0.0);
  for (int i = 1; i <= p.resolution; ++i) verts.emplace_back(0.0, length * i / p.resolution, 0.0);
  for (int i = 1; i < static_cast<int>(verts.size()); ++i) segs.push_back({i - 1, i});
  return finalize_polyline(std::move(verts), std::move(segs));
}

} // namespace

ShapeKind parse_shape_kind(const std::string& name) {
  if (name == "sphere") return ShapeKind::Sphere;
  if (name == "ellipsoid") return ShapeKind::Ellipsoid;
  if (name == "torus") return ShapeKind::Torus;
  if (name == "flat_disc") return ShapeKind::FlatDisc;
  if (name == "cube") return ShapeKind::Cube;
  if (name == "l_polyline") return ShapeKind::LPolyline;
  if (name == "line_polyline") return ShapeKind::LinePolyline;
  throw std::invalid_argument("unknown shape kind: " + name);
}

std::string shape_kind_name(ShapeKind kind) {
  switch (kind) {
    case ShapeKind::Sphere: return "sphere";
    case ShapeKind::Ellipsoid: return "ellipsoid";
    case ShapeKind::Torus: return "torus";
    case ShapeKind::FlatDisc: return "flat_disc";
    case ShapeKind::Cube: return "cube";
    case ShapeKind::LPolyline: return "l_polyline";
    case ShapeKind::LinePolyline: return "line_polyline";
  }
  return "?";
}

bool shape_is_mesh(ShapeKind kind) {
  return kind != ShapeKind::LPolyline && kind != ShapeKind::LinePolyline;
}

std::variant<TriangleMesh, Polyline> make_shape(ShapeKind kind, const ShapeParams& params) {
  switch (kind) {
    case ShapeKind::Sphere:
    case ShapeKind::Ellipsoid: {
      TriangleMesh mesh = unit_icosphere(params.resolution);
      if (params.pole_warp > 0.0) warp_toward_pole(mesh, params.pole_warp);
      if (kind == ShapeKind::Sphere) {
        mesh.vertices *= size_at(params, 0, 1.0);
      } else {
        const Vec3 axes(size_at(params, 0, 1.0), size_at(params, 1, 1.0), size_at(params, 2, 1.0));
        require(axes.minCoeff() > 0.0, "ellipsoid semi-axes must be positive");
        for (int c = 0; c < 3; ++c) mesh.vertices.col(c) *= axes[c];
      }
      apply_jitter(mesh.vertices, params.jitter, params.seed);
      validate_mesh(mesh);
      return mesh;
    }
    case ShapeKind::Torus: {
      TriangleMesh mesh = build_torus(params);
      apply_jitter(mesh.vertices, params.jitter, params.seed);
      validate_mesh(mesh);
      return mesh;
    }
    case ShapeKind::FlatDisc: {
      TriangleMesh mesh = build_flat_disc(params);
      apply_jitter(mesh.vertices, params.jitter, params.seed);
      validate_mesh(mesh);
      return mesh;
    }
    case ShapeKind::Cube: {
      TriangleMesh mesh = build_cube(params);
      apply_jitter(mesh.vertices, params.jitter, params.seed);
      validate_mesh(mesh);
      return mesh;
    }
    case ShapeKind::LPolyline: {
      Polyline line = build_l_polyline(params);
      apply_jitter(line.vertices, params.jitter, params.seed);
      validate_polyline(line);
      return line;
    }
    case ShapeKind::LinePolyline: {
      Polyline line = build_line_polyline(params);
      apply_jitter(line.vertices, params.jitter, params.seed);
      validate_polyline(line);
      return line;
    }
  }
  throw std::invalid_argument("unhandled shape kind");
}

TriangleMesh make_sphere(int resolution, double radius, std::uint64_t seed, double jitter, double pole_warp) {
  ShapeParams p;
  p.resolution = resolution;
  p.size = {radius};
  p.seed = seed;
  p.jitter = jitter;
  p.pole_warp = pole_warp;
  return std::get<TriangleMesh>(make_shape(ShapeKind::Sphere, p));
}

TriangleMesh make_ellipsoid(int resolution, const Vec3& semi_axes, std::uint64_t seed, double jitter,
                            double pole_warp) {
  ShapeParams p;
  p.resolution = resolution;
  p.size = {semi_axes[0], semi_axes[1], semi_axes[2]};
  p.seed = seed;
  p.jitter = jitter;
  p.pole_warp = pole_warp;
  return std::get<TriangleMesh>(make_shape(ShapeKind::Ellipsoid, p));
}

} // namespace ncshape
