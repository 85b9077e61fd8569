#pragma once

#include <optional>
#include <string>
#include <vector>

#include "ncshape/dirac.hpp"
#include "ncshape/kernels.hpp"
#include "ncshape/rls.hpp"

namespace ncshape {

enum class SampleMethod { RlsRecursive, RlsExact, Uniform };

std::string sample_method_name(SampleMethod method);
SampleMethod parse_sample_method(const std::string& name); // "rls", "rls-exact", "uniform", ...

struct CompressConfig {
  SampleMethod method = SampleMethod::RlsRecursive;
  int target_m = 1;
  std::optional<double> lambda; // empty = auto
  std::uint64_t seed = 0;
  double oversample = 8.0;
  int exact_cap = 4000;
  int subsample_cap = 2000;
  int trace_cap = 20000;
  bool with_trace_bound = true;
};

struct CompressionResult {
  std::vector<int> selected;    // ascending indices into the source rows
  DiracFunctional compressed;   // points are exact copies of the selected source points
  double error_sq = 0.0;        // |mu - mu_hat|^2 in the dual norm, clamped >= 0
  double source_norm_sq = 0.0;  // |mu|^2
  std::optional<double> trace_bound;
  SampleMethod method = SampleMethod::RlsRecursive;
  std::uint64_t seed = 0;
  double wall_ms = 0.0;
  double lambda = 0.0; // informational; not serialized
};

/// Orthogonal-projection weights onto the deltas at the selected points:
/// solves (K_CC + jitter I) beta = Y with Y = dual_field_eval at the centers
/// and jitter = 1e-10 * m * mean(diag K_CC). Falls back to a least-squares
/// pseudo-solve when the factorization fails. Duplicate indices are
/// rejected.
RowMat nystrom_weights(const GaussianKernel& kernel, const DiracFunctional& mu,
                       const std::vector<int>& selected);

/// Samples indices by the configured method, computes Nystrom weights, and
/// evaluates the error through the Pythagoras identity
/// |mu - mu_hat|^2 = <mu,mu> - <mu_hat,mu_hat>. Pass the source norm when it
/// is already known to skip the O(n^2) recomputation.
CompressionResult compress(const GaussianKernel& kernel, const DiracFunctional& mu,
                           const CompressConfig& config,
                           std::optional<double> source_norm_sq = std::nullopt);

enum class ErrorMode { Pythagoras, Direct };

/// Pythagoras mode assumes mu_hat was built by nystrom_weights (orthogonal
/// projection); Direct expands <mu,mu> - 2<mu,mu_hat> + <mu_hat,mu_hat>.
double compression_error_sq(const GaussianKernel& kernel, const DiracFunctional& mu,
                            const DiracFunctional& mu_hat, ErrorMode mode);

/// tr(K_XX - Q_XX) with Q = K_XC K_CC^{-1} K_CX, evaluated without
/// materializing K_XX; clamped >= 0.
double trace_bound(const GaussianKernel& kernel, const RowMat& X, const std::vector<int>& selected,
                   int cap = 20000);

/// Sum of the eigenvalues of K_XX after the largest S, sorted descending.
double eigen_tail(const GaussianKernel& kernel, const RowMat& X, int skip, int cap = 3000);

struct DecayRow {
  std::string method;
  std::uint64_t seed = 0;
  int m = 0;
  double error_sq = 0.0;
  double rel_error = 0.0;
  std::optional<double> trace_bound;
  double wall_ms = 0.0;
};

struct DecayOptions {
  std::optional<double> lambda;
  double oversample = 8.0;
  int exact_cap = 4000;
  int subsample_cap = 2000;
  int trace_cap = 20000;
  bool with_trace_bound = true;
};

/// Runs compress for every (m, method, seed) combination; m_list must be
/// ascending. The auto-lambda model and the source norm are computed once
/// and shared across the sweep.
std::vector<DecayRow> decay_curve(const GaussianKernel& kernel, const DiracFunctional& mu,
                                  const std::vector<int>& m_list, const std::vector<SampleMethod>& methods,
                                  const std::vector<std::uint64_t>& seeds, const DecayOptions& options = {});

/// CSV with header "method,seed,m,error_sq,rel_error,trace_bound,wall_ms",
/// 17-significant-digit numerics, "nan" for an absent bound.
void write_decay_csv(const std::vector<DecayRow>& rows, const std::string& path);

/// JSON sidecar with keys method, seed, m, error_sq, source_norm_sq,
/// trace_bound (null when absent), wall_ms.
void write_compression_sidecar(const CompressionResult& result, const std::string& path);

} // namespace ncshape
