#include "ncshape/rls.hpp"

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>
#include <functional>
#include <iostream>
#include <stdexcept>

#include "ncshape/parallel.hpp"
#include "ncshape/rng.hpp"

namespace ncshape {

namespace {

constexpr double kScoreFloor = 1e-12;

Eigen::LLT<Eigen::MatrixXd> factor_ridge(Eigen::MatrixXd K, double lambda) {
  const Eigen::Index s = K.rows();
  K.diagonal().array() += lambda;
  Eigen::LLT<Eigen::MatrixXd> llt(K);
  double extra = 1e-12 * static_cast<double>(s);
  for (int attempt = 0; attempt < 3 && llt.info() != Eigen::Success; ++attempt) {
    K.diagonal().array() += extra;
    extra *= 100.0;
    llt.compute(K);
  }
  if (llt.info() != Eigen::Success) throw std::runtime_error("rls: Cholesky factorization failed");
  return llt;
}

RowMat select_rows(const RowMat& X, const std::vector<int>& idx) {
  RowMat out(static_cast<Eigen::Index>(idx.size()), X.cols());
  for (std::size_t i = 0; i < idx.size(); ++i) out.row(static_cast<Eigen::Index>(i)) = X.row(idx[i]);
  return out;
}

/// Score upper bounds for every row of P through the Nystrom sample S:
/// (1/lambda) (1 - |L^{-1} k_Si|^2), clamped to (0, 1].
Eigen::VectorXd scores_through_sample(const GaussianKernel& kernel, const RowMat& P, const RowMat& S,
                                      double lambda) {
  const Eigen::MatrixXd L = factor_ridge(gram(kernel, S, S), lambda).matrixL();
  const int n = static_cast<int>(P.rows());
  const int s = static_cast<int>(S.rows());
  Eigen::VectorXd scores(n);
  parallel_for(n, [&](std::int64_t begin, std::int64_t end) {
    Eigen::VectorXd k_si(s);
    for (std::int64_t i = begin; i < end; ++i) {
      for (int j = 0; j < s; ++j) k_si[j] = kernel.eval_sq((P.row(i) - S.row(j)).squaredNorm());
      L.triangularView<Eigen::Lower>().solveInPlace(k_si);
      const double raw = (1.0 - k_si.squaredNorm()) / lambda;
      scores[i] = std::clamp(raw, kScoreFloor, 1.0);
    }
  });
  return scores;
}

std::vector<int> sample_by_scores_impl(const Eigen::VectorXd& scores, int target_m, double oversample,
                                       Rng& rng) {
  const int n = static_cast<int>(scores.size());
  if (target_m < 1 || target_m > n) throw std::invalid_argument("sample_by_scores: target_m out of range");

  std::vector<int> kept;
  std::vector<char> in_kept(static_cast<std::size_t>(n), 0);
  kept.reserve(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    const double p = std::min(1.0, oversample * scores[i]);
    if (rng.uniform() < p) {
      kept.push_back(i);
      in_kept[static_cast<std::size_t>(i)] = 1;
    }
  }

  std::vector<int> result;
  if (static_cast<int>(kept.size()) <= target_m) {
    result = kept;
    if (static_cast<int>(result.size()) < target_m) {
      // Deterministic top-up by descending score.
      std::vector<int> rest;
      for (int i = 0; i < n; ++i) {
        if (!in_kept[static_cast<std::size_t>(i)]) rest.push_back(i);
      }
      std::stable_sort(rest.begin(), rest.end(), [&](int a, int b) { return scores[a] > scores[b]; });
      for (const int i : rest) {
        if (static_cast<int>(result.size()) >= target_m) break;
        result.push_back(i);
      }
    }
  } else {
    // Thin the surplus with one exponential key per kept index, weighted by
    // its inclusion probability; the m largest keys win.
    std::vector<std::pair<double, int>> keys;
    keys.reserve(kept.size());
    for (const int i : kept) {
      const double w = std::min(1.0, oversample * scores[i]);
      double u = rng.uniform();
      while (u <= 0.0) u = rng.uniform();
      keys.emplace_back(std::log(u) / w, i);
    }
    std::sort(keys.begin(), keys.end(), [](const auto& a, const auto& b) {
      if (a.first != b.first) return a.first > b.first;
      return a.second < b.second;
    });
    for (int r = 0; r < target_m; ++r) result.push_back(keys[static_cast<std::size_t>(r)].second);
  }

  std::sort(result.begin(), result.end());
  return result;
}

} // namespace

Eigen::VectorXd exact_rls_scores(const GaussianKernel& kernel, const RowMat& X, double lambda, int cap) {
  kernel.validate();
  if (lambda < 0.0) throw std::invalid_argument("exact_rls_scores: lambda must be >= 0");
  const int n = static_cast<int>(X.rows());
  if (n > cap) {
    throw std::invalid_argument("exact_rls_scores: n = " + std::to_string(n) + " exceeds cap " +
                                std::to_string(cap));
  }
  // l_i = [K (K + lambda I)^{-1}]_{ii} = 1 - lambda [(K + lambda I)^{-1}]_{ii}
  // for the unit-diagonal Gaussian kernel.
  const Eigen::MatrixXd L = factor_ridge(gram(kernel, X, X), lambda).matrixL();
  Eigen::MatrixXd Linv = Eigen::MatrixXd::Identity(n, n);
  L.triangularView<Eigen::Lower>().solveInPlace(Linv);
  Eigen::VectorXd scores(n);
  for (int i = 0; i < n; ++i) {
    scores[i] = std::clamp(1.0 - lambda * Linv.col(i).squaredNorm(), kScoreFloor, 1.0);
  }
  return scores;
}

EffectiveDimensionModel::EffectiveDimensionModel(const GaussianKernel& kernel, const RowMat& X,
                                                 int subsample_cap) {
  kernel.validate();
  n_ = static_cast<int>(X.rows());
  if (n_ < 2) throw std::invalid_argument("EffectiveDimensionModel: need at least 2 points");

  // Deterministic strided subsample; lambda must not depend on any seed so
  // that runs over different seeds share it.
  const int ns = std::min(n_, std::max(subsample_cap, 2));
  std::vector<int> idx(static_cast<std::size_t>(ns));
  for (int t = 0; t < ns; ++t) {
    idx[static_cast<std::size_t>(t)] = static_cast<int>(static_cast<std::int64_t>(t) * n_ / ns);
  }
  const RowMat S = select_rows(X, idx);

  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(gram(kernel, S, S), Eigen::EigenvaluesOnly);
  if (eig.info() != Eigen::Success) throw std::runtime_error("EffectiveDimensionModel: eigensolve failed");
  eigenvalues_ = eig.eigenvalues().cwiseMax(0.0);
  scale_ = static_cast<double>(n_) / static_cast<double>(ns);
}

double EffectiveDimensionModel::d_eff(double lambda) const {
  double s = 0.0;
  for (Eigen::Index i = 0; i < eigenvalues_.size(); ++i) {
    s += eigenvalues_[i] / (eigenvalues_[i] + lambda);
  }
  return scale_ * s;
}

double EffectiveDimensionModel::lambda_for(int target_m) const {
  if (target_m < 1 || target_m >= n_) throw std::invalid_argument("lambda_for: need 1 <= target_m < n");
  const double lo_target = static_cast<double>(target_m);
  const double hi_target = 2.0 * target_m;
  double lo = 1e-10 * n_;
  double hi = static_cast<double>(n_);
  if (d_eff(lo) < lo_target) {
    std::cerr << "auto_lambda: effective dimension at the smallest ridge is below target_m; "
                 "returning the bracket endpoint\n";
    return lo;
  }
  double mid = lo;
  for (int step = 0; step < 50; ++step) {
    mid = std::sqrt(lo * hi);
    const double d = d_eff(mid);
    if (d >= lo_target && d <= hi_target) return mid;
    if (d > hi_target) lo = mid;
    else hi = mid;
  }
  std::cerr << "auto_lambda: bisection did not land in [m, 2m]; returning the last iterate\n";
  return mid;
}

double auto_lambda(const GaussianKernel& kernel, const RowMat& X, int target_m, int subsample_cap) {
  const int n = static_cast<int>(X.rows());
  if (target_m < 1 || target_m >= n) throw std::invalid_argument("auto_lambda: need 1 <= target_m < n");
  return EffectiveDimensionModel(kernel, X, subsample_cap).lambda_for(target_m);
}

std::vector<int> sample_by_scores(const Eigen::VectorXd& scores, int target_m, double oversample,
                                  std::uint64_t seed) {
  Rng rng(seed);
  return sample_by_scores_impl(scores, target_m, oversample, rng);
}

RlsSample recursive_rls_sample(const GaussianKernel& kernel, const RowMat& X, const RlsConfig& config) {
  kernel.validate();
  const int n = static_cast<int>(X.rows());
  if (config.target_m < 1 || config.target_m >= n) {
    throw std::invalid_argument("recursive_rls_sample: need 1 <= target_m < n");
  }
  const double lambda =
      config.lambda ? *config.lambda : auto_lambda(kernel, X, config.target_m, config.subsample_cap);
  if (!(lambda > 0.0)) throw std::invalid_argument("recursive_rls_sample: lambda must be > 0");

  const int base_size = std::max(2 * config.target_m, 64);
  const int keep_cap = std::max(4 * config.target_m, 192);
  Rng rng(config.seed);

  // Returns a subset of `idx` suitable for estimating scores one level up.
  const std::function<std::vector<int>(const std::vector<int>&)> recurse =
      [&](const std::vector<int>& idx) -> std::vector<int> {
    if (static_cast<int>(idx.size()) <= base_size) return idx;

    // Uniform half.
    const std::vector<int> perm = rng.permutation(static_cast<int>(idx.size()));
    std::vector<int> half(static_cast<std::size_t>((idx.size() + 1) / 2));
    for (std::size_t i = 0; i < half.size(); ++i) half[i] = idx[static_cast<std::size_t>(perm[i])];
    std::sort(half.begin(), half.end());

    const std::vector<int> sample = recurse(half);
    const Eigen::VectorXd scores =
        scores_through_sample(kernel, select_rows(X, idx), select_rows(X, sample), lambda);

    std::vector<int> kept;
    for (std::size_t i = 0; i < idx.size(); ++i) {
      const double p = std::min(1.0, config.oversample * scores[static_cast<Eigen::Index>(i)]);
      if (rng.uniform() < p) kept.push_back(static_cast<int>(i));
    }
    // Keep the sample size bounded on both sides; ties resolved by index.
    std::vector<int> order(idx.size());
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](int a, int b) { return scores[a] > scores[b]; });
    if (static_cast<int>(kept.size()) > keep_cap) {
      std::vector<char> in_kept(idx.size(), 0);
      for (const int i : kept) in_kept[static_cast<std::size_t>(i)] = 1;
      kept.clear();
      for (const int i : order) {
        if (in_kept[static_cast<std::size_t>(i)]) {
          kept.push_back(i);
          if (static_cast<int>(kept.size()) >= keep_cap) break;
        }
      }
    } else if (static_cast<int>(kept.size()) < std::min<int>(base_size, static_cast<int>(idx.size()))) {
      std::vector<char> in_kept(idx.size(), 0);
      for (const int i : kept) in_kept[static_cast<std::size_t>(i)] = 1;
      for (const int i : order) {
        if (static_cast<int>(kept.size()) >= std::min<int>(base_size, static_cast<int>(idx.size()))) break;
        if (!in_kept[static_cast<std::size_t>(i)]) {
          kept.push_back(i);
          in_kept[static_cast<std::size_t>(i)] = 1;
        }
      }
    }
    std::vector<int> out;
    out.reserve(kept.size());
    for (const int i : kept) out.push_back(idx[static_cast<std::size_t>(i)]);
    std::sort(out.begin(), out.end());
    return out;
  };

  std::vector<int> all(static_cast<std::size_t>(n));
  std::iota(all.begin(), all.end(), 0);

  std::vector<int> top_sample;
  if (n <= base_size) {
    top_sample = all;
  } else {
    const std::vector<int> perm = rng.permutation(n);
    std::vector<int> half(static_cast<std::size_t>((n + 1) / 2));
    for (std::size_t i = 0; i < half.size(); ++i) half[i] = perm[i];
    std::sort(half.begin(), half.end());
    top_sample = recurse(half);
  }

  RlsSample result;
  result.lambda = lambda;
  result.scores = scores_through_sample(kernel, X, select_rows(X, top_sample), lambda);
  result.indices = sample_by_scores_impl(result.scores, config.target_m, config.oversample, rng);
  return result;
}

} // namespace ncshape
