#pragma once

#include <array>

#include "ncshape/dirac.hpp"
#include "ncshape/geometry.hpp"

namespace ncshape {

/// pi/2. Every normal-cycle weight row carries this prefactor so that plain
/// RKHS dual inner products of the outputs reproduce the explicit
/// edge-sum/boundary-sum metric formulas (see nc_inner_theorem_*), which act
/// as the independent oracle for this module.
inline constexpr double kNcPrefactor = 1.5707963267948966;

/// Slot in the lexicographic R^15 layout of the mixed wedge (e_i,0)^(0,e_j),
/// 0-based i,j in 0..2. These nine slots hold the cylindrical weights.
int nc_mixed_slot(int i, int j);

/// The three (0,e_i)^(0,e_j) slots, pairs (4,5), (4,6), (5,6); they hold the
/// spherical (boundary) weights.
extern const std::array<int, 3> kNcSphericalSlots;

/// Adds scale * a embedded into the spherical slots of a 15-wide row. The
/// embedding sends a = u x v to the coefficients of (0,u)^(0,v), i.e.
/// (a_z, -a_y, a_x) in slot order, which keeps it isometric and equivariant
/// under rotations.
void add_spherical_embedding(Eigen::Ref<Eigen::RowVectorXd> row, const Vec3& a, double scale);

/// One delta per triangle: point = centroid, weight = unit normal (from the
/// winding) times triangle area.
DiracFunctional currents_of_mesh(const TriangleMesh& mesh);

/// Dirac form of the surface normal cycle for the constant spherical kernel:
/// one cylindrical delta per unique edge at its midpoint plus one spherical
/// delta per boundary vertex, n = n_e + |boundary|. No face deltas exist
/// (the planar component vanishes). The mesh must be manifold and
/// consistently oriented.
DiracFunctional normal_cycle_of_mesh(const TriangleMesh& mesh);
DiracFunctional normal_cycle_of_mesh(const TriangleMesh& mesh, const EdgeTable& edges,
                                     const BoundaryInfo& boundary);

/// One delta per vertex with weight (pi/2) * sum of normalized incident
/// segments oriented outwards; interior vertices of straight runs get zero
/// rows.
DiracFunctional normal_cycle_of_curve(const Polyline& curve);

} // namespace ncshape
