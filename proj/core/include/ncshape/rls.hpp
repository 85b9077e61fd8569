#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "ncshape/geometry.hpp"
#include "ncshape/kernels.hpp"

namespace ncshape {

/// Parameters for ridge-leverage-score sampling. lambda empty means pick it
/// automatically so the effective dimension lands near target_m.
struct RlsConfig {
  std::optional<double> lambda;
  int target_m = 1;
  std::uint64_t seed = 0;
  double oversample = 8.0;
  int exact_cap = 4000;      // hard cap for the O(n^3) exact-score path
  int subsample_cap = 2000;  // points used to estimate d_eff in auto_lambda
};

struct RlsSample {
  std::vector<int> indices;  // m distinct, ascending
  Eigen::VectorXd scores;    // per-point score estimates, length n
  double lambda = 0.0;
};

/// Exact ridge leverage scores l_i = [K(K + lambda I)^{-1}]_{ii}, computed
/// through a Cholesky factorization of K + lambda I. O(n^3); refuses n
/// beyond the cap.
Eigen::VectorXd exact_rls_scores(const GaussianKernel& kernel, const RowMat& X, double lambda,
                                 int cap = 4000);

/// d_eff(lambda) model built from one uniform-subsample spectrum; answers
/// lambda queries for many target sizes without refactorizing.
class EffectiveDimensionModel {
public:
  EffectiveDimensionModel(const GaussianKernel& kernel, const RowMat& X, int subsample_cap = 2000);

  /// sum_i l_i(lambda) estimated from the subsample, rescaled by
  /// n/subsample.
  double d_eff(double lambda) const;

  /// Bisection on lambda in [1e-10 n, n] until d_eff lands in
  /// [target_m, 2 target_m]; returns a bracket endpoint with a warning on
  /// stderr when the window cannot be reached.
  double lambda_for(int target_m) const;

private:
  Eigen::VectorXd eigenvalues_;
  double scale_ = 1.0;
  int n_ = 0;
};

/// One-shot wrapper around EffectiveDimensionModel::lambda_for.
double auto_lambda(const GaussianKernel& kernel, const RowMat& X, int target_m, int subsample_cap = 2000);

/// Recursive halving sampler: estimates scores of each level through the
/// sample returned by the level below via
///   l~_i = (1/lambda) (k(x_i,x_i) - k_iS (K_SS + lambda I)^{-1} k_Si),
/// clamped to (0,1], then draws target_m distinct indices with inclusion
/// probabilities min(1, oversample * l~_i) (random shortfall topped up, and
/// surplus thinned, by score). Deterministic for a fixed seed and thread
/// count independent. Returns the top-level score estimates for all points.
RlsSample recursive_rls_sample(const GaussianKernel& kernel, const RowMat& X, const RlsConfig& config);

/// Shared by the exact and recursive paths: draws target_m distinct indices
/// from the score vector as described above.
std::vector<int> sample_by_scores(const Eigen::VectorXd& scores, int target_m, double oversample,
                                  std::uint64_t seed);

} // namespace ncshape
