#include "ncshape/dirac.hpp"

#include <cstdlib>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "ncshape/text_format.hpp"

namespace ncshape {

namespace {

[[noreturn]] void fail(const std::string& msg) { throw std::runtime_error(msg); }

int expected_weight_dim(FunctionalKind kind) {
  switch (kind) {
    case FunctionalKind::NcSurface: return 15;
    case FunctionalKind::NcCurve:
    case FunctionalKind::CurrentSurface: return 3;
    case FunctionalKind::Generic: return -1;
  }
  return -1;
}

} // namespace

std::string functional_kind_name(FunctionalKind kind) {
  switch (kind) {
    case FunctionalKind::CurrentSurface: return "current_surface";
    case FunctionalKind::NcSurface: return "nc_surface";
    case FunctionalKind::NcCurve: return "nc_curve";
    case FunctionalKind::Generic: return "generic";
  }
  return "?";
}

FunctionalKind parse_functional_kind(const std::string& name) {
  if (name == "current_surface") return FunctionalKind::CurrentSurface;
  if (name == "nc_surface") return FunctionalKind::NcSurface;
  if (name == "nc_curve") return FunctionalKind::NcCurve;
  if (name == "generic") return FunctionalKind::Generic;
  fail("unknown functional kind: " + name);
}

void DiracFunctional::validate() const {
  if (points.rows() != weights.rows()) fail("dirac functional: point/weight row mismatch");
  if (points.cols() != dim) fail("dirac functional: point columns != dim");
  if (weights.cols() != weight_dim) fail("dirac functional: weight columns != weight_dim");
  const int want = expected_weight_dim(kind);
  if (want > 0 && weight_dim != want) {
    fail("dirac functional: kind " + functional_kind_name(kind) + " requires weight_dim " +
         std::to_string(want) + ", got " + std::to_string(weight_dim));
  }
  if (!points.allFinite() || !weights.allFinite()) fail("dirac functional: non-finite entries");
}

DiracFunctional make_empty_functional(int dim, int weight_dim, FunctionalKind kind) {
  DiracFunctional f;
  f.dim = dim;
  f.weight_dim = weight_dim;
  f.kind = kind;
  f.points.resize(0, dim);
  f.weights.resize(0, weight_dim);
  return f;
}

void write_dirac(const DiracFunctional& f, const std::string& path) {
  f.validate();
  std::ofstream out(path);
  if (!out) fail("cannot open for writing: " + path);
  out << "# dirac-functional d=" << f.dim << " k=" << f.weight_dim << " n=" << f.rows()
      << " kind=" << functional_kind_name(f.kind) << '\n';
  for (int i = 0; i < f.rows(); ++i) {
    for (int c = 0; c < f.dim; ++c) {
      if (c) out << ' ';
      out << fmt17(f.points(i, c));
    }
    for (int c = 0; c < f.weight_dim; ++c) out << ' ' << fmt17(f.weights(i, c));
    out << '\n';
  }
  if (!out) fail("write failed: " + path);
}

DiracFunctional read_dirac(const std::string& path) {
  std::ifstream in(path);
  if (!in) fail("cannot open dirac functional file: " + path);

  std::string header;
  if (!std::getline(in, header)) fail(path + ": empty file");
  int d = 0, k = 0, n = 0;
  std::string kind_name;
  {
    std::istringstream iss(header);
    std::string tag, marker;
    iss >> tag >> marker;
    if (tag != "#" || marker != "dirac-functional") fail(path + ": bad header '" + header + "'");
    std::string field;
    while (iss >> field) {
      const auto eq = field.find('=');
      if (eq == std::string::npos) fail(path + ": bad header field '" + field + "'");
      const std::string key = field.substr(0, eq);
      const std::string val = field.substr(eq + 1);
      if (key == "d") d = std::atoi(val.c_str());
      else if (key == "k") k = std::atoi(val.c_str());
      else if (key == "n") n = std::atoi(val.c_str());
      else if (key == "kind") kind_name = val;
      else fail(path + ": unknown header field '" + key + "'");
    }
  }
  if (d <= 0 || k <= 0 || n < 0 || kind_name.empty()) fail(path + ": incomplete header");

  DiracFunctional f;
  f.dim = d;
  f.weight_dim = k;
  f.kind = parse_functional_kind(kind_name);
  f.points.resize(n, d);
  f.weights.resize(n, k);
  for (int i = 0; i < n; ++i) {
    std::string line;
    if (!std::getline(in, line)) fail(path + ": expected " + std::to_string(n) + " rows, got " + std::to_string(i));
    std::istringstream iss(line);
    for (int c = 0; c < d + k; ++c) {
      double v = 0.0;
      if (!(iss >> v)) fail(path + ":" + std::to_string(i + 2) + ": expected " + std::to_string(d + k) + " numbers");
      if (c < d) f.points(i, c) = v;
      else f.weights(i, c - d) = v;
    }
  }
  f.validate();
  return f;
}

} // namespace ncshape
