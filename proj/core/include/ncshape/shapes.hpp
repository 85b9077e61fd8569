#pragma once

#include <cstdint>
#include <string>
#include <variant>
#include <vector>

#include "ncshape/geometry.hpp"

namespace ncshape {

enum class ShapeKind { Sphere, Ellipsoid, Torus, FlatDisc, Cube, LPolyline, LinePolyline };

ShapeKind parse_shape_kind(const std::string& name);
std::string shape_kind_name(ShapeKind kind);
bool shape_is_mesh(ShapeKind kind);

/// Generator parameters. resolution scales the tessellation (icosphere faces
/// = 20*res^2, torus grid = res x res, polyline segments per leg = res).
/// size holds kind-specific dimensions: sphere radius, ellipsoid semi-axes,
/// torus (major, minor) radii, disc radius, cube edge, polyline leg length.
/// jitter > 0 perturbs every vertex by uniform [-jitter, jitter] per
/// coordinate, seeded. pole_warp > 0 concentrates sphere/ellipsoid vertices
/// toward the +z pole, producing a non-uniform triangle density with the
/// same connectivity.
struct ShapeParams {
  int resolution = 2;
  std::vector<double> size = {1.0};
  std::uint64_t seed = 0;
  double jitter = 0.0;
  double pole_warp = 0.0;
};

/// Deterministic for fixed parameters and seed. Meshes come out manifold and
/// consistently oriented (outward normals); sphere/ellipsoid/torus/cube are
/// closed, flat_disc has a boundary.
std::variant<TriangleMesh, Polyline> make_shape(ShapeKind kind, const ShapeParams& params);

/// Convenience wrappers around make_shape for the mesh kinds.
TriangleMesh make_sphere(int resolution, double radius = 1.0, std::uint64_t seed = 0, double jitter = 0.0,
                         double pole_warp = 0.0);
TriangleMesh make_ellipsoid(int resolution, const Vec3& semi_axes, std::uint64_t seed = 0, double jitter = 0.0,
                            double pole_warp = 0.0);

} // namespace ncshape
