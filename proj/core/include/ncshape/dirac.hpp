#pragma once

#include <string>

#include "ncshape/geometry.hpp"

namespace ncshape {

enum class FunctionalKind { CurrentSurface, NcSurface, NcCurve, Generic };

std::string functional_kind_name(FunctionalKind kind);
FunctionalKind parse_functional_kind(const std::string& name);

/// A dual-space element sum_i delta_{x_i} alpha_i: n points in R^dim with
/// weight rows in R^weight_dim. Weight rows already carry all scalar
/// prefactors, so downstream metric code treats every functional uniformly.
struct DiracFunctional {
  int dim = 3;
  int weight_dim = 0;
  RowMat points;  // n x dim
  RowMat weights; // n x weight_dim
  FunctionalKind kind = FunctionalKind::Generic;

  int rows() const { return static_cast<int>(points.rows()); }

  /// Row counts equal, entries finite, weight_dim matches the kind tag
  /// (15 for nc_surface, 3 for nc_curve / current_surface).
  void validate() const;
};

DiracFunctional make_empty_functional(int dim, int weight_dim, FunctionalKind kind);

/// ASCII format: header "# dirac-functional d=<d> k=<k> n=<n> kind=<kind>"
/// followed by n lines of d+k numbers at 17 significant digits. Round-trips
/// doubles exactly.
void write_dirac(const DiracFunctional& f, const std::string& path);
DiracFunctional read_dirac(const std::string& path);

} // namespace ncshape
