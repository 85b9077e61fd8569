#include "ncshape/compression.hpp"

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>
#include <Eigen/QR>
#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>
#include <stdexcept>

#include "ncshape/json_writer.hpp"
#include "ncshape/parallel.hpp"
#include "ncshape/rng.hpp"
#include "ncshape/stopwatch.hpp"
#include "ncshape/text_format.hpp"

namespace ncshape {

namespace {

void check_selected(const std::vector<int>& selected, int n) {
  if (selected.empty()) throw std::invalid_argument("selection is empty");
  std::vector<int> sorted = selected;
  std::sort(sorted.begin(), sorted.end());
  if (sorted.front() < 0 || sorted.back() >= n) throw std::invalid_argument("selected index out of range");
  if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end()) {
    throw std::invalid_argument("selected indices contain duplicates");
  }
}

RowMat rows_at(const RowMat& M, const std::vector<int>& idx) {
  RowMat out(static_cast<Eigen::Index>(idx.size()), M.cols());
  for (std::size_t i = 0; i < idx.size(); ++i) out.row(static_cast<Eigen::Index>(i)) = M.row(idx[i]);
  return out;
}

struct ProjectionParts {
  RowMat beta;
  double projection_norm_sq = 0.0;
};

ProjectionParts project_onto_centers(const GaussianKernel& kernel, const DiracFunctional& mu,
                                     const std::vector<int>& selected) {
  check_selected(selected, mu.rows());

  ProjectionParts out;
  if (static_cast<int>(selected.size()) == mu.rows()) {
    // Full selection: the projection is the identity, no solve needed.
    out.beta = mu.weights;
    out.projection_norm_sq = dual_inner(kernel, mu, mu);
    return out;
  }

  const RowMat centers = rows_at(mu.points, selected);
  const RowMat Y = dual_field_eval(kernel, mu, centers);
  Eigen::MatrixXd K_cc = gram(kernel, centers, centers);

  const double jitter = 1e-10 * static_cast<double>(selected.size()) * K_cc.diagonal().mean();
  Eigen::MatrixXd ridged = K_cc;
  ridged.diagonal().array() += jitter;

  Eigen::LLT<Eigen::MatrixXd> llt(ridged);
  if (llt.info() == Eigen::Success) {
    Eigen::MatrixXd beta = llt.solve(Eigen::MatrixXd(Y));
    // The ridge keeps the factorization stable but biases the solution off
    // the exact projection by O(jitter |beta|^2); two refinement steps
    // against the unridged system remove that bias.
    for (int step = 0; step < 2; ++step) {
      const Eigen::MatrixXd residual = Eigen::MatrixXd(Y) - K_cc * beta;
      beta += llt.solve(residual);
    }
    out.beta = beta;
  } else {
    out.beta = K_cc.completeOrthogonalDecomposition().solve(Eigen::MatrixXd(Y));
  }
  out.projection_norm_sq = (out.beta.transpose() * K_cc * out.beta).trace();
  return out;
}

std::vector<int> uniform_distinct(int n, int m, Rng& rng) {
  std::vector<int> perm = rng.permutation(n);
  perm.resize(static_cast<std::size_t>(m));
  std::sort(perm.begin(), perm.end());
  return perm;
}

} // namespace

std::string sample_method_name(SampleMethod method) {
  switch (method) {
    case SampleMethod::RlsRecursive: return "rls_recursive";
    case SampleMethod::RlsExact: return "rls_exact";
    case SampleMethod::Uniform: return "uniform";
  }
  return "?";
}

SampleMethod parse_sample_method(const std::string& name) {
  if (name == "rls" || name == "rls_recursive" || name == "rls-recursive") return SampleMethod::RlsRecursive;
  if (name == "rls-exact" || name == "rls_exact") return SampleMethod::RlsExact;
  if (name == "uniform") return SampleMethod::Uniform;
  throw std::invalid_argument("unknown sampling method: " + name);
}

RowMat nystrom_weights(const GaussianKernel& kernel, const DiracFunctional& mu,
                       const std::vector<int>& selected) {
  return project_onto_centers(kernel, mu, selected).beta;
}

CompressionResult compress(const GaussianKernel& kernel, const DiracFunctional& mu,
                           const CompressConfig& config, std::optional<double> source_norm_sq) {
  kernel.validate();
  mu.validate();
  const int n = mu.rows();
  const int m = config.target_m;
  if (m < 1 || m > n) throw std::invalid_argument("compress: need 1 <= m <= n");

  Stopwatch timer;
  CompressionResult result;
  result.method = config.method;
  result.seed = config.seed;

  if (m == n) {
    result.selected.resize(static_cast<std::size_t>(n));
    std::iota(result.selected.begin(), result.selected.end(), 0);
  } else {
    switch (config.method) {
      case SampleMethod::Uniform: {
        Rng rng(config.seed);
        result.selected = uniform_distinct(n, m, rng);
        break;
      }
      case SampleMethod::RlsExact: {
        const double lambda =
            config.lambda ? *config.lambda : auto_lambda(kernel, mu.points, m, config.subsample_cap);
        const Eigen::VectorXd scores = exact_rls_scores(kernel, mu.points, lambda, config.exact_cap);
        result.selected = sample_by_scores(scores, m, config.oversample, config.seed);
        result.lambda = lambda;
        break;
      }
      case SampleMethod::RlsRecursive: {
        RlsConfig rls;
        rls.lambda = config.lambda;
        rls.target_m = m;
        rls.seed = config.seed;
        rls.oversample = config.oversample;
        rls.exact_cap = config.exact_cap;
        rls.subsample_cap = config.subsample_cap;
        RlsSample sample = recursive_rls_sample(kernel, mu.points, rls);
        result.selected = std::move(sample.indices);
        result.lambda = sample.lambda;
        break;
      }
    }
  }

  const ProjectionParts projection = project_onto_centers(kernel, mu, result.selected);
  result.source_norm_sq = source_norm_sq ? *source_norm_sq : dual_inner(kernel, mu, mu);
  result.error_sq = std::max(0.0, result.source_norm_sq - projection.projection_norm_sq);

  result.compressed.dim = mu.dim;
  result.compressed.weight_dim = mu.weight_dim;
  result.compressed.kind = mu.kind;
  result.compressed.points = rows_at(mu.points, result.selected);
  result.compressed.weights = projection.beta;
  result.compressed.validate();

  if (config.with_trace_bound && n <= config.trace_cap) {
    result.trace_bound = trace_bound(kernel, mu.points, result.selected, config.trace_cap);
  }
  result.wall_ms = timer.elapsed_ms();
  return result;
}

double compression_error_sq(const GaussianKernel& kernel, const DiracFunctional& mu,
                            const DiracFunctional& mu_hat, ErrorMode mode) {
  const double mu_norm = dual_inner(kernel, mu, mu);
  const double hat_norm = dual_inner(kernel, mu_hat, mu_hat);
  double err = 0.0;
  if (mode == ErrorMode::Pythagoras) {
    err = mu_norm - hat_norm;
  } else {
    err = mu_norm - 2.0 * dual_inner(kernel, mu, mu_hat) + hat_norm;
  }
  return err > 0.0 ? err : 0.0;
}

double trace_bound(const GaussianKernel& kernel, const RowMat& X, const std::vector<int>& selected,
                   int cap) {
  kernel.validate();
  const int n = static_cast<int>(X.rows());
  if (n > cap) {
    throw std::invalid_argument("trace_bound: n = " + std::to_string(n) + " exceeds cap " + std::to_string(cap));
  }
  if (selected.empty()) return static_cast<double>(n); // unit diagonal
  if (static_cast<int>(selected.size()) == n) return 0.0; // Q = K

  check_selected(selected, n);
  const RowMat centers = rows_at(X, selected);
  Eigen::MatrixXd K_cc = gram(kernel, centers, centers);
  const double jitter = 1e-10 * static_cast<double>(selected.size()) * K_cc.diagonal().mean();
  K_cc.diagonal().array() += jitter;
  Eigen::LLT<Eigen::MatrixXd> llt(K_cc);
  if (llt.info() != Eigen::Success) throw std::runtime_error("trace_bound: factorization failed");
  const Eigen::MatrixXd L = llt.matrixL();

  const int s = static_cast<int>(selected.size());
  Eigen::VectorXd terms(n);
  parallel_for(n, [&](std::int64_t begin, std::int64_t end) {
    Eigen::VectorXd k_ci(s);
    for (std::int64_t i = begin; i < end; ++i) {
      for (int j = 0; j < s; ++j) k_ci[j] = kernel.eval_sq((X.row(i) - centers.row(j)).squaredNorm());
      L.triangularView<Eigen::Lower>().solveInPlace(k_ci);
      terms[i] = 1.0 - k_ci.squaredNorm();
    }
  });
  double total = 0.0;
  for (int i = 0; i < n; ++i) total += terms[i];
  return total > 0.0 ? total : 0.0;
}

double eigen_tail(const GaussianKernel& kernel, const RowMat& X, int skip, int cap) {
  kernel.validate();
  const int n = static_cast<int>(X.rows());
  if (n > cap) {
    throw std::invalid_argument("eigen_tail: n = " + std::to_string(n) + " exceeds cap " + std::to_string(cap));
  }
  if (skip < 0 || skip > n) throw std::invalid_argument("eigen_tail: skip out of range");
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(gram(kernel, X, X), Eigen::EigenvaluesOnly);
  if (eig.info() != Eigen::Success) throw std::runtime_error("eigen_tail: eigensolve failed");
  const Eigen::VectorXd ev = eig.eigenvalues(); // ascending
  double tail = 0.0;
  for (int i = 0; i < n - skip; ++i) tail += ev[i];
  return tail;
}

std::vector<DecayRow> decay_curve(const GaussianKernel& kernel, const DiracFunctional& mu,
                                  const std::vector<int>& m_list, const std::vector<SampleMethod>& methods,
                                  const std::vector<std::uint64_t>& seeds, const DecayOptions& options) {
  if (!std::is_sorted(m_list.begin(), m_list.end())) {
    throw std::invalid_argument("decay_curve: m_list must be ascending");
  }
  const double norm_sq = dual_inner(kernel, mu, mu);

  const bool any_rls = std::any_of(methods.begin(), methods.end(),
                                   [](SampleMethod m) { return m != SampleMethod::Uniform; });
  std::optional<EffectiveDimensionModel> deff;
  if (any_rls && !options.lambda) {
    deff.emplace(kernel, mu.points, options.subsample_cap);
  }

  std::vector<DecayRow> rows;
  for (const int m : m_list) {
    std::optional<double> lambda = options.lambda;
    if (!lambda && deff && m < mu.rows()) lambda = deff->lambda_for(m);
    for (const SampleMethod method : methods) {
      for (const std::uint64_t seed : seeds) {
        CompressConfig cfg;
        cfg.method = method;
        cfg.target_m = m;
        cfg.lambda = lambda;
        cfg.seed = seed;
        cfg.oversample = options.oversample;
        cfg.exact_cap = options.exact_cap;
        cfg.subsample_cap = options.subsample_cap;
        cfg.trace_cap = options.trace_cap;
        cfg.with_trace_bound = options.with_trace_bound;
        const CompressionResult r = compress(kernel, mu, cfg, norm_sq);

        DecayRow row;
        row.method = sample_method_name(method);
        row.seed = seed;
        row.m = m;
        row.error_sq = r.error_sq;
        row.rel_error = norm_sq > 0.0 ? std::sqrt(r.error_sq / norm_sq) : 0.0;
        row.trace_bound = r.trace_bound;
        row.wall_ms = r.wall_ms;
        rows.push_back(std::move(row));
      }
    }
  }
  return rows;
}

void write_decay_csv(const std::vector<DecayRow>& rows, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open for writing: " + path);
  out << "method,seed,m,error_sq,rel_error,trace_bound,wall_ms\n";
  for (const auto& row : rows) {
    out << row.method << ',' << row.seed << ',' << row.m << ',' << fmt17(row.error_sq) << ','
        << fmt17(row.rel_error) << ',' << (row.trace_bound ? fmt17(*row.trace_bound) : "nan") << ','
        << fmt17(row.wall_ms) << '\n';
  }
  if (!out) throw std::runtime_error("write failed: " + path);
}

void write_compression_sidecar(const CompressionResult& result, const std::string& path) {
  JsonWriter json;
  json.field("method", sample_method_name(result.method));
  json.field("seed", static_cast<unsigned long long>(result.seed));
  json.field("m", static_cast<int>(result.selected.size()));
  json.field("error_sq", result.error_sq);
  json.field("source_norm_sq", result.source_norm_sq);
  if (result.trace_bound) json.field("trace_bound", *result.trace_bound);
  else json.null_field("trace_bound");
  json.field("wall_ms", result.wall_ms);
  json.write(path);
}

} // namespace ncshape
