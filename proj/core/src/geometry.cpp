#include "ncshape/geometry.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>
#include <stdexcept>

#include "ncshape/text_format.hpp"

namespace ncshape {

namespace {

[[noreturn]] void fail(const std::string& msg) { throw std::runtime_error(msg); }

[[noreturn]] void fail_line(const std::string& path, int line_no, const std::string& msg) {
  fail(path + ":" + std::to_string(line_no) + ": " + msg);
}

std::vector<std::string> split_ws(const std::string& s) {
  std::vector<std::string> out;
  std::istringstream iss(s);
  std::string tok;
  while (iss >> tok) out.push_back(tok);
  return out;
}

double parse_number(const std::string& tok, const std::string& path, int line_no) {
  char* end = nullptr;
  const double v = std::strtod(tok.c_str(), &end);
  if (end == tok.c_str() || *end != '\0' || !std::isfinite(v)) {
    fail_line(path, line_no, "malformed numeric field '" + tok + "'");
  }
  return v;
}

// Vertex index before the first '/', 1-based in the file.
int parse_face_index(const std::string& tok, int vertex_count, const std::string& path, int line_no) {
  const std::string head = tok.substr(0, tok.find('/'));
  int idx = 0;
  const auto res = std::from_chars(head.data(), head.data() + head.size(), idx);
  if (res.ec != std::errc() || res.ptr != head.data() + head.size()) {
    fail_line(path, line_no, "malformed face index '" + tok + "'");
  }
  if (idx < 1 || idx > vertex_count) {
    fail_line(path, line_no, "face index " + std::to_string(idx) + " out of range [1," +
                                 std::to_string(vertex_count) + "]");
  }
  return idx - 1;
}

} // namespace

void validate_mesh(const TriangleMesh& mesh) {
  const int nv = mesh.vertex_count();
  if (!mesh.vertices.allFinite()) fail("mesh has non-finite vertex coordinates");
  for (int t = 0; t < mesh.triangle_count(); ++t) {
    const auto& tri = mesh.triangles[static_cast<std::size_t>(t)];
    for (int c = 0; c < 3; ++c) {
      if (tri[static_cast<std::size_t>(c)] < 0 || tri[static_cast<std::size_t>(c)] >= nv) {
        fail("triangle " + std::to_string(t) + " references vertex " +
             std::to_string(tri[static_cast<std::size_t>(c)]) + " outside [0," + std::to_string(nv) + ")");
      }
    }
    if (triangle_area(mesh, t) < kDegenerateTol) {
      fail("triangle " + std::to_string(t) + " is degenerate (area below " + fmt17(kDegenerateTol) + ")");
    }
  }
}

void validate_polyline(const Polyline& line) {
  const int nv = line.vertex_count();
  if (!line.vertices.allFinite()) fail("polyline has non-finite vertex coordinates");
  for (int s = 0; s < line.segment_count(); ++s) {
    const auto& seg = line.segments[static_cast<std::size_t>(s)];
    if (seg[0] < 0 || seg[0] >= nv || seg[1] < 0 || seg[1] >= nv) {
      fail("segment " + std::to_string(s) + " references a vertex outside [0," + std::to_string(nv) + ")");
    }
    const double len = (line.vertices.row(seg[0]) - line.vertices.row(seg[1])).norm();
    if (len < kDegenerateTol) {
      fail("segment " + std::to_string(s) + " has near-zero length " + fmt17(len));
    }
  }
  if (line.vertex_segments.size() != static_cast<std::size_t>(nv)) {
    fail("polyline incident-segment lists are stale");
  }
  for (int s = 0; s < line.segment_count(); ++s) {
    const auto& seg = line.segments[static_cast<std::size_t>(s)];
    for (int end = 0; end < 2; ++end) {
      const auto& inc = line.vertex_segments[static_cast<std::size_t>(seg[static_cast<std::size_t>(end)])];
      if (std::find(inc.begin(), inc.end(), s) == inc.end()) {
        fail("segment " + std::to_string(s) + " missing from the incident list of vertex " +
             std::to_string(seg[static_cast<std::size_t>(end)]));
      }
    }
  }
}

TriangleMesh load_obj(const std::string& path) {
  std::ifstream in(path);
  if (!in) fail("cannot open OBJ file: " + path);

  std::vector<Vec3> verts;
  std::vector<std::array<int, 3>> tris;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto toks = split_ws(line);
    if (toks.empty()) continue;
    if (toks[0] == "v") {
      if (toks.size() < 4) fail_line(path, line_no, "vertex record needs 3 coordinates");
      verts.emplace_back(parse_number(toks[1], path, line_no), parse_number(toks[2], path, line_no),
                         parse_number(toks[3], path, line_no));
    } else if (toks[0] == "f") {
      if (toks.size() < 4) fail_line(path, line_no, "face record needs at least 3 vertices");
      std::vector<int> idx;
      idx.reserve(toks.size() - 1);
      for (std::size_t i = 1; i < toks.size(); ++i) {
        idx.push_back(parse_face_index(toks[i], static_cast<int>(verts.size()), path, line_no));
      }
      for (std::size_t i = 1; i + 1 < idx.size(); ++i) {
        tris.push_back({idx[0], idx[i], idx[i + 1]});
      }
    }
    // Any other record type (vn, vt, l, comments, ...) is skipped.
  }

  TriangleMesh mesh;
  mesh.vertices.resize(static_cast<Eigen::Index>(verts.size()), 3);
  for (std::size_t i = 0; i < verts.size(); ++i) mesh.vertices.row(static_cast<Eigen::Index>(i)) = verts[i];
  mesh.triangles = std::move(tris);
  validate_mesh(mesh);
  return mesh;
}

void save_obj(const TriangleMesh& mesh, const std::string& path) {
  std::ofstream out(path);
  if (!out) fail("cannot open for writing: " + path);
  for (Eigen::Index i = 0; i < mesh.vertices.rows(); ++i) {
    out << "v " << fmt17(mesh.vertices(i, 0)) << ' ' << fmt17(mesh.vertices(i, 1)) << ' '
        << fmt17(mesh.vertices(i, 2)) << '\n';
  }
  for (const auto& t : mesh.triangles) {
    out << "f " << t[0] + 1 << ' ' << t[1] + 1 << ' ' << t[2] + 1 << '\n';
  }
  if (!out) fail("write failed: " + path);
}

Polyline load_polyline(const std::string& path) {
  std::ifstream in(path);
  if (!in) fail("cannot open polyline file: " + path);

  std::vector<Vec3> verts;
  std::vector<std::array<int, 2>> segs;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto toks = split_ws(line);
    if (toks.empty()) continue;
    if (toks[0] == "v") {
      if (toks.size() < 4) fail_line(path, line_no, "vertex record needs 3 coordinates");
      verts.emplace_back(parse_number(toks[1], path, line_no), parse_number(toks[2], path, line_no),
                         parse_number(toks[3], path, line_no));
    } else if (toks[0] == "l") {
      if (toks.size() < 3) fail_line(path, line_no, "segment record needs 2 vertices");
      std::array<int, 2> seg{};
      for (int e = 0; e < 2; ++e) {
        seg[static_cast<std::size_t>(e)] =
            parse_face_index(toks[static_cast<std::size_t>(e) + 1], static_cast<int>(verts.size()), path, line_no);
      }
      segs.push_back(seg);
    }
  }

  Polyline out;
  out.vertices.resize(static_cast<Eigen::Index>(verts.size()), 3);
  for (std::size_t i = 0; i < verts.size(); ++i) out.vertices.row(static_cast<Eigen::Index>(i)) = verts[i];
  out.segments = std::move(segs);
  out.vertex_segments.assign(verts.size(), {});
  for (int s = 0; s < out.segment_count(); ++s) {
    out.vertex_segments[static_cast<std::size_t>(out.segments[static_cast<std::size_t>(s)][0])].push_back(s);
    out.vertex_segments[static_cast<std::size_t>(out.segments[static_cast<std::size_t>(s)][1])].push_back(s);
  }
  validate_polyline(out);
  return out;
}

void save_polyline(const Polyline& line, const std::string& path) {
  std::ofstream out(path);
  if (!out) fail("cannot open for writing: " + path);
  for (Eigen::Index i = 0; i < line.vertices.rows(); ++i) {
    out << "v " << fmt17(line.vertices(i, 0)) << ' ' << fmt17(line.vertices(i, 1)) << ' '
        << fmt17(line.vertices(i, 2)) << '\n';
  }
  for (const auto& s : line.segments) {
    out << "l " << s[0] + 1 << ' ' << s[1] + 1 << '\n';
  }
  if (!out) fail("write failed: " + path);
}

EdgeTable build_edge_table(const TriangleMesh& mesh, bool strict) {
  std::map<std::array<int, 2>, std::vector<int>> adj;
  for (int t = 0; t < mesh.triangle_count(); ++t) {
    const auto& tri = mesh.triangles[static_cast<std::size_t>(t)];
    for (int c = 0; c < 3; ++c) {
      const int a = tri[static_cast<std::size_t>(c)];
      const int b = tri[static_cast<std::size_t>((c + 1) % 3)];
      const std::array<int, 2> key{std::min(a, b), std::max(a, b)};
      adj[key].push_back(t);
    }
  }

  EdgeTable table;
  table.edges.reserve(adj.size());
  table.adjacent.reserve(adj.size());
  table.midpoints.resize(static_cast<Eigen::Index>(adj.size()), 3);
  Eigen::Index row = 0;
  for (auto& [key, tris] : adj) {
    if (tris.size() > 2) {
      const std::string what = "non-manifold edge (" + std::to_string(key[0]) + "," +
                               std::to_string(key[1]) + ") with " + std::to_string(tris.size()) +
                               " adjacent triangles";
      if (strict) fail(what);
      std::cerr << "warning: " << what << ", keeping all adjacencies\n";
    }
    table.edges.push_back(key);
    table.adjacent.push_back(std::move(tris));
    table.midpoints.row(row++) = 0.5 * (mesh.vertices.row(key[0]) + mesh.vertices.row(key[1]));
  }
  return table;
}

BoundaryInfo boundary_vertices(const TriangleMesh& mesh, const EdgeTable& edges) {
  std::vector<char> is_boundary(static_cast<std::size_t>(mesh.vertex_count()), 0);
  for (int e = 0; e < edges.edge_count(); ++e) {
    if (edges.adjacent[static_cast<std::size_t>(e)].size() == 1) {
      is_boundary[static_cast<std::size_t>(edges.edges[static_cast<std::size_t>(e)][0])] = 1;
      is_boundary[static_cast<std::size_t>(edges.edges[static_cast<std::size_t>(e)][1])] = 1;
    }
  }

  BoundaryInfo info;
  std::vector<int> slot(static_cast<std::size_t>(mesh.vertex_count()), -1);
  for (int v = 0; v < mesh.vertex_count(); ++v) {
    if (is_boundary[static_cast<std::size_t>(v)]) {
      slot[static_cast<std::size_t>(v)] = info.count();
      info.vertices.push_back(v);
      info.incident_edges.emplace_back();
    }
  }
  // All mesh edges at the vertex, not just boundary ones.
  for (int e = 0; e < edges.edge_count(); ++e) {
    for (int end = 0; end < 2; ++end) {
      const int v = edges.edges[static_cast<std::size_t>(e)][static_cast<std::size_t>(end)];
      if (slot[static_cast<std::size_t>(v)] >= 0) {
        info.incident_edges[static_cast<std::size_t>(slot[static_cast<std::size_t>(v)])].push_back(e);
      }
    }
  }
  return info;
}

OrientationReport check_orientation(const TriangleMesh& mesh, const EdgeTable& edges) {
  // Traversal sign of canonical edge (a,b) inside triangle t: +1 if the
  // triangle walks a->b, -1 if b->a.
  const auto traversal = [&mesh](int t, int a, int b) {
    const auto& tri = mesh.triangles[static_cast<std::size_t>(t)];
    for (int c = 0; c < 3; ++c) {
      const int u = tri[static_cast<std::size_t>(c)];
      const int v = tri[static_cast<std::size_t>((c + 1) % 3)];
      if (u == a && v == b) return 1;
      if (u == b && v == a) return -1;
    }
    return 0;
  };

  OrientationReport report;
  for (int e = 0; e < edges.edge_count(); ++e) {
    const auto& adj = edges.adjacent[static_cast<std::size_t>(e)];
    if (adj.size() != 2) continue;
    const int a = edges.edges[static_cast<std::size_t>(e)][0];
    const int b = edges.edges[static_cast<std::size_t>(e)][1];
    if (traversal(adj[0], a, b) * traversal(adj[1], a, b) != -1) {
      report.inconsistent_edges.push_back(e);
    }
  }
  return report;
}

Vec3 triangle_normal(const TriangleMesh& mesh, int t) {
  const auto& tri = mesh.triangles[static_cast<std::size_t>(t)];
  const Vec3 a = mesh.vertices.row(tri[0]);
  const Vec3 b = mesh.vertices.row(tri[1]);
  const Vec3 c = mesh.vertices.row(tri[2]);
  const Vec3 n = (b - a).cross(c - a);
  const double len = n.norm();
  if (len <= 0.0) fail("triangle " + std::to_string(t) + " has zero normal");
  return n / len;
}

double triangle_area(const TriangleMesh& mesh, int t) {
  const auto& tri = mesh.triangles[static_cast<std::size_t>(t)];
  const Vec3 a = mesh.vertices.row(tri[0]);
  const Vec3 b = mesh.vertices.row(tri[1]);
  const Vec3 c = mesh.vertices.row(tri[2]);
  return 0.5 * (b - a).cross(c - a).norm();
}

Vec3 triangle_centroid(const TriangleMesh& mesh, int t) {
  const auto& tri = mesh.triangles[static_cast<std::size_t>(t)];
  return (mesh.vertices.row(tri[0]) + mesh.vertices.row(tri[1]) + mesh.vertices.row(tri[2])) / 3.0;
}

Aabb bounding_box(const RowMat3& points) {
  Aabb box;
  if (points.rows() == 0) return box;
  box.lo = points.colwise().minCoeff();
  box.hi = points.colwise().maxCoeff();
  return box;
}

} // namespace ncshape
