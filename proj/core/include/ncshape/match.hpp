#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "ncshape/dirac.hpp"
#include "ncshape/geometry.hpp"
#include "ncshape/kernels.hpp"
#include "ncshape/shooting.hpp"

namespace ncshape {

/// How the deforming template's normal cycle is handled during matching.
/// None and TargetOnly both rebuild it exactly every evaluation (TargetOnly
/// records that the target side was compressed upstream). FrozenSupport
/// restricts the rebuild to an RLS-selected subset of rows picked once at
/// rest, with weights recomputed from the deformed geometry and rescaled by
/// the rest-state mass ratio; an explicitly approximate mode.
enum class TemplateCompression { None, TargetOnly, FrozenSupport };

struct MatchProblem {
  TriangleMesh template_mesh;
  DiracFunctional target; // nc_surface functional, possibly compressed
  GaussianKernel data_kernel{0.2};
  ShootingConfig shooting;
  TemplateCompression template_compression = TemplateCompression::None;
  int frozen_m = 0;
  std::uint64_t seed = 0;

  // Filled by prepare_match_problem.
  EdgeTable edges;
  BoundaryInfo boundary;
  std::vector<int> support;    // restricted NC row ids (FrozenSupport only)
  double support_scale = 1.0;  // rest-state |beta|_F / |alpha_support|_F
  double target_norm_sq = 0.0;
  bool prepared = false;
};

/// Validates the template (manifold, consistently oriented) and the target
/// kind, builds the connectivity tables, caches <target,target>, and picks
/// the frozen support when requested.
void prepare_match_problem(MatchProblem& problem);

struct ObjectiveParts {
  double total = 0.0;
  double data = 0.0;
  double reg = 0.0;
};

/// E(p0) = reg_weight * H(q0, p0) + |NC(deformed template) - target|^2 in
/// the dual norm of the data kernel.
ObjectiveParts match_objective(const MatchProblem& problem, const RowMat3& p0);

/// Exact gradient of the discrete forward computation via reverse
/// accumulation through the normal-cycle rebuild and the Euler flow.
RowMat3 match_gradient(const MatchProblem& problem, const RowMat3& p0);

struct MatchResult {
  RowMat3 p0;
  std::vector<double> objective_trace; // accepted iterates, starting at E(p0_init)
  TriangleMesh deformed;
  ObjectiveParts final_parts;
  int iterations = 0;
  double grad_norm = 0.0;
  int objective_evals = 0;
  double mean_eval_ms = 0.0; // average wall time of one value+gradient pass
};

/// Limited-memory quasi-Newton (history 10) with strong Wolfe line search
/// (c1 = 1e-4, c2 = 0.9) and an Armijo steepest-descent fallback; accepted
/// objective values never increase. Deterministic for fixed inputs.
MatchResult optimize_match(const MatchProblem& problem, int max_iterations, std::uint64_t seed,
                           const RowMat3* p0_init = nullptr);

/// nx x ny x nz grid spanning the box corners (a single layer collapses to
/// the box center along that axis); default control layout for matching.
RowMat3 make_control_grid(const Aabb& box, int nx, int ny, int nz);

} // namespace ncshape
