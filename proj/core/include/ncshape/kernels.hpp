#pragma once

#include <vector>

#include "ncshape/dirac.hpp"
#include "ncshape/geometry.hpp"

namespace ncshape {

/// Gaussian RBF spatial kernel k(x,y) = exp(-|x-y|^2 / (2 sigma^2)).
struct GaussianKernel {
  double sigma = 1.0;

  double eval_sq(double dist_sq) const;
  void validate() const; // sigma finite and positive
};

/// Equal-weight sum of Gaussians, used to parametrize velocity fields in the
/// registration module.
struct KernelSum {
  std::vector<double> sigmas = {1.0, 0.5, 0.2, 0.1};

  double eval_sq(double dist_sq) const;
  void validate() const;
};

/// n x m matrix with entries k(x_i, y_j). Symmetric PSD when X == Y.
Eigen::MatrixXd gram(const GaussianKernel& kernel, const RowMat& X, const RowMat& Y);

/// Dual RKHS inner product sum_ij k(x_i, y_j) <alpha_i, beta_j>. Rows are
/// accumulated sequentially and summed in index order, so the result does
/// not depend on the thread count. compensated=true switches the row loop to
/// Kahan accumulation.
double dual_inner(const GaussianKernel& kernel, const DiracFunctional& mu, const DiracFunctional& nu,
                  bool compensated = false);

/// <mu,mu> - 2<mu,nu> + <nu,nu>, clamped to >= 0.
double dual_distance_sq(const GaussianKernel& kernel, const DiracFunctional& mu, const DiracFunctional& nu);

/// Row j = sum_i k(q_j, x_i) alpha_i; the dual vector field of mu sampled at
/// the query points.
RowMat dual_field_eval(const GaussianKernel& kernel, const DiracFunctional& mu, const RowMat& queries);

/// Explicit surface normal-cycle inner product: (pi^2/4) times the edge
/// double sum k(c_i,d_j) <f_i,g_j> <sum n_{T,f_i}, sum n_{T,g_j}> plus the
/// boundary double sum k(x_i,y_j) <A_i,B_j>. Independent evaluation route
/// from dual_inner over normal_cycle_of_mesh outputs; uses plain 3-vector
/// algebra and no wedge embedding.
double nc_inner_theorem_surface(const GaussianKernel& kernel, const TriangleMesh& mesh_a,
                                const TriangleMesh& mesh_b);

/// Explicit curve formula (pi^2/4) sum_ij k(x_i,y_j) <A_i,B_j> with A_i the
/// sum of normalized outward incident edges.
double nc_inner_theorem_curve(const GaussianKernel& kernel, const Polyline& curve_a, const Polyline& curve_b);

} // namespace ncshape
