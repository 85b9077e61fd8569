#pragma once

#include "ncshape/geometry.hpp"

namespace ncshape {

/// Symmetric Hausdorff distance between two point sets:
/// max(sup_a inf_b |a-b|, sup_b inf_a |a-b|). Brute force for small inputs,
/// uniform-grid accelerated nearest neighbours above 10^4 points. Throws on
/// empty input.
double hausdorff_distance(const RowMat3& a, const RowMat3& b);

} // namespace ncshape
