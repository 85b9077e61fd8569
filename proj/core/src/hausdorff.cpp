#include "ncshape/hausdorff.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <unordered_map>
#include <vector>

#include "ncshape/parallel.hpp"

namespace ncshape {

namespace {

constexpr int kBruteForceLimit = 10000;

// Sparse uniform grid over a point set for nearest-neighbour queries.
class PointGrid {
public:
  explicit PointGrid(const RowMat3& points) : points_(points) {
    const Aabb box = bounding_box(points);
    lo_ = box.lo;
    const double edge = std::max(box.extent().maxCoeff(), 1e-30);
    // Aim for a handful of points per occupied cell.
    const double cells_per_edge = std::max(std::cbrt(static_cast<double>(points.rows())), 1.0);
    h_ = std::max(edge / cells_per_edge, 1e-30);
    cmin_.fill(std::numeric_limits<long long>::max());
    cmax_.fill(std::numeric_limits<long long>::min());
    for (int i = 0; i < static_cast<int>(points.rows()); ++i) {
      const auto c = coords_of(points.row(i));
      for (int k = 0; k < 3; ++k) {
        cmin_[static_cast<std::size_t>(k)] = std::min(cmin_[static_cast<std::size_t>(k)], c[static_cast<std::size_t>(k)]);
        cmax_[static_cast<std::size_t>(k)] = std::max(cmax_[static_cast<std::size_t>(k)], c[static_cast<std::size_t>(k)]);
      }
      cells_[pack(c)].push_back(i);
    }
  }

  double nearest_dist_sq(const Vec3& query) const {
    // Center the ring walk on the nearest occupied-box cell: occupied cells
    // in ring r around it are still at least (r-1)*h from the query, and the
    // walk is bounded by the box span instead of the query offset.
    std::array<long long, 3> c = coords_of(query);
    long long needed = 0;
    for (int k = 0; k < 3; ++k) {
      const std::size_t ks = static_cast<std::size_t>(k);
      c[ks] = std::clamp(c[ks], cmin_[ks], cmax_[ks]);
      needed = std::max(needed, std::max(std::llabs(c[ks] - cmin_[ks]), std::llabs(c[ks] - cmax_[ks])));
    }
    double best = std::numeric_limits<double>::infinity();
    for (long long ring = 0; ring <= needed; ++ring) {
      // Any in-box cell in ring r is at least (r-1)*h from the query point.
      if (std::isfinite(best) && ring > 1 && static_cast<double>(ring - 1) * h_ > std::sqrt(best)) break;
      visit_ring(c, ring, [&](long long x, long long y, long long z) {
        if (x < cmin_[0] || x > cmax_[0] || y < cmin_[1] || y > cmax_[1] || z < cmin_[2] || z > cmax_[2]) {
          return;
        }
        const auto it = cells_.find(pack({x, y, z}));
        if (it == cells_.end()) return;
        for (const int i : it->second) {
          best = std::min(best, (Vec3(points_.row(i)) - query).squaredNorm());
        }
      });
    }
    return best;
  }

private:
  static long long pack(const std::array<long long, 3>& c) {
    const long long bias = 1ll << 20; // 21 bits per axis, biased positive
    return ((c[0] + bias) << 42) | ((c[1] + bias) << 21) | (c[2] + bias);
  }

  std::array<long long, 3> coords_of(const Vec3& p) const {
    std::array<long long, 3> c{};
    for (int k = 0; k < 3; ++k) {
      c[static_cast<std::size_t>(k)] = static_cast<long long>(std::floor((p[k] - lo_[k]) / h_));
    }
    return c;
  }

  template <typename Fn>
  static void visit_ring(const std::array<long long, 3>& c, long long r, Fn&& fn) {
    if (r == 0) {
      fn(c[0], c[1], c[2]);
      return;
    }
    for (long long dx = -r; dx <= r; ++dx) {
      for (long long dy = -r; dy <= r; ++dy) {
        for (long long dz = -r; dz <= r; ++dz) {
          if (std::max({std::llabs(dx), std::llabs(dy), std::llabs(dz)}) != r) continue;
          fn(c[0] + dx, c[1] + dy, c[2] + dz);
        }
      }
    }
  }

  const RowMat3& points_;
  Vec3 lo_;
  double h_ = 1.0;
  std::array<long long, 3> cmin_{};
  std::array<long long, 3> cmax_{};
  std::unordered_map<long long, std::vector<int>> cells_;
};

double directed_sup_sq(const RowMat3& from, const RowMat3& to) {
  const int n = static_cast<int>(from.rows());
  const int m = static_cast<int>(to.rows());
  Eigen::VectorXd nearest(n);
  if (std::max(n, m) <= kBruteForceLimit) {
    parallel_for(n, [&](std::int64_t begin, std::int64_t end) {
      for (std::int64_t i = begin; i < end; ++i) {
        double best = std::numeric_limits<double>::infinity();
        for (int j = 0; j < m; ++j) best = std::min(best, (from.row(i) - to.row(j)).squaredNorm());
        nearest[i] = best;
      }
    });
  } else {
    const PointGrid grid(to);
    parallel_for(n, [&](std::int64_t begin, std::int64_t end) {
      for (std::int64_t i = begin; i < end; ++i) nearest[i] = grid.nearest_dist_sq(from.row(i));
    });
  }
  return nearest.maxCoeff();
}

} // namespace

double hausdorff_distance(const RowMat3& a, const RowMat3& b) {
  if (a.rows() == 0 || b.rows() == 0) throw std::invalid_argument("hausdorff_distance: empty point set");
  return std::sqrt(std::max(directed_sup_sq(a, b), directed_sup_sq(b, a)));
}

} // namespace ncshape
