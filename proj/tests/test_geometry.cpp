#include <doctest.h>

#include <algorithm>
#include <fstream>

#include "ncshape/geometry.hpp"
#include "ncshape/rng.hpp"
#include "ncshape/shapes.hpp"
#include "support/testers.hpp"

using namespace ncshape;
using namespace ncshape::testing;

namespace {

std::string write_temp(const std::string& name, const std::string& body) {
  const std::string path = test_path(name);
  std::ofstream out(path);
  out << body;
  return path;
}

} // namespace

TEST_SUITE("geometry") {

TEST_CASE("load_obj parses plain vertices and faces") {
  const auto path = write_temp("tri.obj", "v 0 0 0\nv 1 0 0\nv 0 1 0\nf 1 2 3\n");
  const TriangleMesh mesh = load_obj(path);
  CHECK(mesh.vertex_count() == 3);
  REQUIRE(mesh.triangle_count() == 1);
  CHECK(mesh.triangles[0] == std::array<int, 3>{0, 1, 2});
}

TEST_CASE("load_obj keeps only the vertex index of slash entries") {
  const auto path = write_temp("tri_slash.obj", "v 0 0 0\nv 1 0 0\nv 0 1 0\nf 1/1/1 2/2/2 3/3/3\n");
  const TriangleMesh mesh = load_obj(path);
  REQUIRE(mesh.triangle_count() == 1);
  CHECK(mesh.triangles[0] == std::array<int, 3>{0, 1, 2});
}

TEST_CASE("load_obj fan-triangulates quads") {
  const auto path = write_temp("quad.obj", "v 0 0 0\nv 1 0 0\nv 1 1 0\nv 0 1 0\nf 1 2 3 4\n");
  const TriangleMesh mesh = load_obj(path);
  REQUIRE(mesh.triangle_count() == 2);
  CHECK(mesh.triangles[0] == std::array<int, 3>{0, 1, 2});
  CHECK(mesh.triangles[1] == std::array<int, 3>{0, 2, 3});
}

TEST_CASE("load_obj errors cite the line number") {
  const auto bad_number = write_temp("bad_num.obj", "v 0 0 zero\n");
  CHECK_THROWS_WITH_AS(load_obj(bad_number), doctest::Contains(":1:"), std::runtime_error);

  const auto bad_index = write_temp("bad_idx.obj", "v 0 0 0\nv 1 0 0\nv 0 1 0\nf 1 2 9\n");
  CHECK_THROWS_WITH_AS(load_obj(bad_index), doctest::Contains(":4:"), std::runtime_error);

  const auto short_face = write_temp("short_face.obj", "v 0 0 0\nv 1 0 0\nf 1 2\n");
  CHECK_THROWS(load_obj(short_face));
}

TEST_CASE("degenerate triangles are validation errors") {
  const auto path = write_temp("degen.obj", "v 0 0 0\nv 1 0 0\nv 2 0 0\nf 1 2 3\n");
  CHECK_THROWS_WITH_AS(load_obj(path), doctest::Contains("degenerate"), std::runtime_error);
}

TEST_CASE("save/load round-trips vertices bit-exactly and connectivity exactly") {
  Rng rng(3);
  for (int trial = 0; trial < 10; ++trial) {
    const TriangleMesh mesh = random_small_mesh(rng);
    const auto path = test_path("roundtrip.obj");
    save_obj(mesh, path);
    const TriangleMesh back = load_obj(path);
    REQUIRE(back.vertex_count() == mesh.vertex_count());
    CHECK((back.vertices - mesh.vertices).cwiseAbs().maxCoeff() == 0.0);
    CHECK(back.triangles == mesh.triangles);
  }
}

TEST_CASE("polyline text format round-trips") {
  Rng rng(4);
  const Polyline line = random_polyline(rng);
  const auto path = test_path("roundtrip.lines");
  save_polyline(line, path);
  const Polyline back = load_polyline(path);
  CHECK((back.vertices - line.vertices).cwiseAbs().maxCoeff() == 0.0);
  CHECK(back.segments == line.segments);
}

TEST_CASE("edge table: single triangle") {
  TriangleMesh mesh;
  mesh.vertices.resize(3, 3);
  mesh.vertices << 0, 0, 0, 1, 0, 0, 0, 1, 0;
  mesh.triangles = {{0, 1, 2}};
  const EdgeTable edges = build_edge_table(mesh);
  REQUIRE(edges.edge_count() == 3);
  for (const auto& adj : edges.adjacent) CHECK(adj.size() == 1);
  // Midpoint = mean of the edge endpoints.
  for (int e = 0; e < 3; ++e) {
    const Vec3 expect =
        0.5 * (mesh.vertices.row(edges.edges[static_cast<std::size_t>(e)][0]) +
               mesh.vertices.row(edges.edges[static_cast<std::size_t>(e)][1]));
    CHECK((Vec3(edges.midpoints.row(e)) - expect).norm() == 0.0);
  }
}

TEST_CASE("edge table: cube has 18 edges, all interior") {
  ShapeParams p;
  const TriangleMesh cube = std::get<TriangleMesh>(make_shape(ShapeKind::Cube, p));
  const EdgeTable edges = build_edge_table(cube);
  REQUIRE(edges.edge_count() == 18);
  for (const auto& adj : edges.adjacent) CHECK(adj.size() == 2);
  CHECK(boundary_vertices(cube, edges).empty());
}

TEST_CASE("edge table: two triangles sharing an edge") {
  TriangleMesh mesh;
  mesh.vertices.resize(4, 3);
  mesh.vertices << 0, 0, 0, 1, 0, 0, 0, 1, 0, 1, 1, 0;
  mesh.triangles = {{0, 1, 2}, {2, 1, 3}};
  const EdgeTable edges = build_edge_table(mesh);
  REQUIRE(edges.edge_count() == 5);
  int shared = 0;
  for (const auto& adj : edges.adjacent) {
    if (adj.size() == 2) ++shared;
  }
  CHECK(shared == 1);

  const BoundaryInfo boundary = boundary_vertices(mesh, edges);
  CHECK(boundary.vertices == std::vector<int>{0, 1, 2, 3});
  // Incident lists cover all mesh edges at the vertex, not only boundary ones.
  const auto slot1 = std::find(boundary.vertices.begin(), boundary.vertices.end(), 1) - boundary.vertices.begin();
  CHECK(boundary.incident_edges[static_cast<std::size_t>(slot1)].size() == 3);
}

TEST_CASE("edge table is invariant under triangle permutation") {
  Rng rng(9);
  for (int trial = 0; trial < 5; ++trial) {
    TriangleMesh mesh = random_small_mesh(rng);
    const EdgeTable original = build_edge_table(mesh);
    const auto perm = rng.permutation(mesh.triangle_count());
    TriangleMesh shuffled = mesh;
    for (int t = 0; t < mesh.triangle_count(); ++t) {
      shuffled.triangles[static_cast<std::size_t>(t)] =
          mesh.triangles[static_cast<std::size_t>(perm[static_cast<std::size_t>(t)])];
    }
    const EdgeTable redo = build_edge_table(shuffled);
    REQUIRE(redo.edge_count() == original.edge_count());
    CHECK(redo.edges == original.edges);
    for (int e = 0; e < redo.edge_count(); ++e) {
      CHECK(redo.adjacent[static_cast<std::size_t>(e)].size() ==
            original.adjacent[static_cast<std::size_t>(e)].size());
    }
  }
}

TEST_CASE("non-manifold edge: strict throws, permissive keeps all adjacencies") {
  TriangleMesh mesh;
  mesh.vertices.resize(5, 3);
  mesh.vertices << 0, 0, 0, 1, 0, 0, 0, 1, 0, 0, 0, 1, 0, -1, 0;
  mesh.triangles = {{0, 1, 2}, {0, 1, 3}, {0, 1, 4}};
  CHECK_THROWS_WITH_AS(build_edge_table(mesh, true), doctest::Contains("non-manifold"), std::runtime_error);
  const EdgeTable edges = build_edge_table(mesh, false);
  int multi = 0;
  for (const auto& adj : edges.adjacent) {
    if (adj.size() == 3) ++multi;
  }
  CHECK(multi == 1);
}

TEST_CASE("boundary_vertices examples") {
  const TriangleMesh sphere = make_sphere(2);
  const EdgeTable sphere_edges = build_edge_table(sphere);
  CHECK(boundary_vertices(sphere, sphere_edges).empty());

  TriangleMesh tri;
  tri.vertices.resize(3, 3);
  tri.vertices << 0, 0, 0, 1, 0, 0, 0, 1, 0;
  tri.triangles = {{0, 1, 2}};
  const BoundaryInfo b = boundary_vertices(tri, build_edge_table(tri));
  CHECK(b.vertices == std::vector<int>{0, 1, 2});
}

TEST_CASE("check_orientation flags a flipped triangle") {
  TriangleMesh mesh;
  mesh.vertices.resize(4, 3);
  mesh.vertices << 0, 0, 0, 1, 0, 0, 0, 1, 0, 1, 1, 0;
  mesh.triangles = {{0, 1, 2}, {2, 1, 3}};
  const EdgeTable edges = build_edge_table(mesh);
  CHECK(check_orientation(mesh, edges).consistent());

  TriangleMesh flipped = mesh;
  flipped.triangles[1] = {1, 2, 3};
  const EdgeTable flipped_edges = build_edge_table(flipped);
  const OrientationReport report = check_orientation(flipped, flipped_edges);
  REQUIRE(report.inconsistent_edges.size() == 1);
  const auto& bad = flipped_edges.edges[static_cast<std::size_t>(report.inconsistent_edges[0])];
  CHECK(bad == std::array<int, 2>{1, 2});

  TriangleMesh single;
  single.vertices.resize(3, 3);
  single.vertices << 0, 0, 0, 1, 0, 0, 0, 1, 0;
  single.triangles = {{0, 1, 2}};
  CHECK(check_orientation(single, build_edge_table(single)).consistent());
}

} // TEST_SUITE
