#pragma once

#include <Eigen/Core>

namespace ncshape {

/// Coefficients of a 2-wedge of R^n in the lexicographic basis
/// {e_i ^ e_j : 1 <= i < j <= n}, a vector of length n*(n-1)/2.
struct WedgeCoeffs {
  int ambient_dim = 0;
  Eigen::VectorXd coeffs;
};

/// Rank of the pair (i, j), 1 <= i < j <= n, in lexicographic order over all
/// such pairs. Throws std::invalid_argument when the pair is out of range.
int basis_index(int i, int j, int n);

/// Coordinates of a ^ b: coeffs[basis_index(i,j,n)] = a_i*b_j - a_j*b_i.
/// Bilinear in a and b, antisymmetric under swapping them.
WedgeCoeffs wedge_embed(const Eigen::VectorXd& a, const Eigen::VectorXd& b);

/// Inner product of simple 2-wedges via the Gram determinant
/// det [[<a,c>, <a,d>], [<b,c>, <b,d>]]. Equals the dot product of the
/// embedded coefficient vectors; kept as an independent evaluation route.
double wedge_inner(const Eigen::VectorXd& a, const Eigen::VectorXd& b,
                   const Eigen::VectorXd& c, const Eigen::VectorXd& d);

} // namespace ncshape
