#include "ncshape/match.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include "ncshape/compression.hpp"
#include "ncshape/parallel.hpp"
#include "ncshape/representations.hpp"
#include "ncshape/rls.hpp"
#include "ncshape/stopwatch.hpp"

namespace ncshape {

namespace {

// NC rows of the deformed template, organized for reverse-mode
// differentiation: cylindrical weights are pi/2 * f N^T in the nine mixed
// slots with N the sum of inward-oriented adjacent triangle normals, which
// is algebraically identical to the wedge construction in
// normal_cycle_of_mesh.
struct DeformedNc {
  RowMat points;  // n_rows x 3
  RowMat weights; // n_rows x 15
};

struct NcBuildInputs {
  const TriangleMesh* mesh = nullptr; // connectivity only; positions come from V
  const EdgeTable* edges = nullptr;
  const BoundaryInfo* boundary = nullptr;
  const std::vector<int>* support = nullptr; // nullptr = all rows
  double weight_scale = 1.0;
};

int nc_row_count(const NcBuildInputs& in) {
  return in.support ? static_cast<int>(in.support->size())
                    : in.edges->edge_count() + in.boundary->count();
}

// Triangle normal sum N_e and orientation signs for one edge at deformed
// positions V.
Vec3 edge_normal_sum(const NcBuildInputs& in, const RowMat3& V, int e) {
  const auto& pair = in.edges->edges[static_cast<std::size_t>(e)];
  const Vec3 va = V.row(pair[0]);
  const Vec3 vb = V.row(pair[1]);
  const Vec3 f = vb - va;
  const Vec3 mid = 0.5 * (va + vb);
  Vec3 nsum = Vec3::Zero();
  for (const int t : in.edges->adjacent[static_cast<std::size_t>(e)]) {
    const auto& tri = in.mesh->triangles[static_cast<std::size_t>(t)];
    const Vec3 a = V.row(tri[0]);
    const Vec3 b = V.row(tri[1]);
    const Vec3 c = V.row(tri[2]);
    const Vec3 m = (b - a).cross(c - a);
    Vec3 n = m.normalized();
    if (n.cross(f).dot((a + b + c) / 3.0 - mid) < 0.0) n = -n;
    nsum += n;
  }
  return nsum;
}

DeformedNc build_deformed_nc(const NcBuildInputs& in, const RowMat3& V) {
  const int ne = in.edges->edge_count();
  const int rows = nc_row_count(in);
  DeformedNc out;
  out.points.resize(rows, 3);
  out.weights.setZero(rows, 15);

  parallel_for(rows, [&](std::int64_t begin, std::int64_t end) {
    for (std::int64_t r = begin; r < end; ++r) {
      const int row_id = in.support ? (*in.support)[static_cast<std::size_t>(r)] : static_cast<int>(r);
      if (row_id < ne) {
        const auto& pair = in.edges->edges[static_cast<std::size_t>(row_id)];
        const Vec3 va = V.row(pair[0]);
        const Vec3 vb = V.row(pair[1]);
        const Vec3 f = vb - va;
        out.points.row(r) = 0.5 * (va + vb);
        const Vec3 nsum = edge_normal_sum(in, V, row_id);
        const double s = kNcPrefactor * in.weight_scale;
        for (int i = 0; i < 3; ++i) {
          for (int j = 0; j < 3; ++j) {
            out.weights(r, nc_mixed_slot(i, j)) = s * f[i] * nsum[j];
          }
        }
      } else {
        const int k = row_id - ne;
        const int v = in.boundary->vertices[static_cast<std::size_t>(k)];
        const Vec3 x = V.row(v);
        Vec3 a = Vec3::Zero();
        for (const int e : in.boundary->incident_edges[static_cast<std::size_t>(k)]) {
          const auto& pair = in.edges->edges[static_cast<std::size_t>(e)];
          const int other = pair[0] == v ? pair[1] : pair[0];
          a += (Vec3(V.row(other)) - x).normalized();
        }
        out.points.row(r) = x;
        add_spherical_embedding(out.weights.row(r), a, kNcPrefactor * in.weight_scale);
      }
    }
  });
  return out;
}

// Pullback of (d_points, d_weights) through build_deformed_nc onto the
// deformed vertex positions.
RowMat3 deformed_nc_pullback(const NcBuildInputs& in, const RowMat3& V, const RowMat& d_points,
                             const RowMat& d_weights) {
  const int ne = in.edges->edge_count();
  const int rows = nc_row_count(in);
  RowMat3 dV = RowMat3::Zero(V.rows(), 3);

  // Accumulation is sequential over rows: several rows touch the same
  // vertices.
  for (int r = 0; r < rows; ++r) {
    const int row_id = in.support ? (*in.support)[static_cast<std::size_t>(r)] : r;
    if (row_id < ne) {
      const auto& pair = in.edges->edges[static_cast<std::size_t>(row_id)];
      const Vec3 va = V.row(pair[0]);
      const Vec3 vb = V.row(pair[1]);
      const Vec3 f = vb - va;
      const Vec3 mid = 0.5 * (va + vb);
      const double s = kNcPrefactor * in.weight_scale;

      // Midpoint adjoint.
      const Vec3 gp = d_points.row(r);
      dV.row(pair[0]) += 0.5 * gp.transpose();
      dV.row(pair[1]) += 0.5 * gp.transpose();

      // Weight block W = s f N^T.
      Eigen::Matrix3d G;
      for (int i = 0; i < 3; ++i) {
        for (int j = 0; j < 3; ++j) G(i, j) = d_weights(r, nc_mixed_slot(i, j));
      }
      const Vec3 nsum = edge_normal_sum(in, V, row_id);
      const Vec3 gf = s * (G * nsum);
      const Vec3 gn_sum = s * (G.transpose() * f);
      dV.row(pair[1]) += gf.transpose();
      dV.row(pair[0]) -= gf.transpose();

      for (const int t : in.edges->adjacent[static_cast<std::size_t>(row_id)]) {
        const auto& tri = in.mesh->triangles[static_cast<std::size_t>(t)];
        const Vec3 a = V.row(tri[0]);
        const Vec3 b = V.row(tri[1]);
        const Vec3 c = V.row(tri[2]);
        const Vec3 m = (b - a).cross(c - a);
        const double len = m.norm();
        Vec3 n = m / len;
        double sign = 1.0;
        if (n.cross(f).dot((a + b + c) / 3.0 - mid) < 0.0) {
          n = -n;
          sign = -1.0;
        }
        // n = sign * m / |m|; the orientation sign is locally constant.
        const Vec3 gm = sign * (gn_sum - n.dot(gn_sum) * n) / len;
        // m = u x w with u = b - a, w = c - a.
        const Vec3 u = b - a;
        const Vec3 w = c - a;
        const Vec3 gu = w.cross(gm);
        const Vec3 gw = gm.cross(u);
        dV.row(tri[1]) += gu.transpose();
        dV.row(tri[0]) -= gu.transpose();
        dV.row(tri[2]) += gw.transpose();
        dV.row(tri[0]) -= gw.transpose();
      }
    } else {
      const int k = row_id - ne;
      const int v = in.boundary->vertices[static_cast<std::size_t>(k)];
      const Vec3 x = V.row(v);
      const double s = kNcPrefactor * in.weight_scale;

      dV.row(v) += d_points.row(r);

      Vec3 ga(s * d_weights(r, kNcSphericalSlots[2]), -s * d_weights(r, kNcSphericalSlots[1]),
              s * d_weights(r, kNcSphericalSlots[0]));
      for (const int e : in.boundary->incident_edges[static_cast<std::size_t>(k)]) {
        const auto& pair = in.edges->edges[static_cast<std::size_t>(e)];
        const int other = pair[0] == v ? pair[1] : pair[0];
        const Vec3 u = Vec3(V.row(other)) - x;
        const double len = u.norm();
        const Vec3 uh = u / len;
        const Vec3 gu = (ga - uh.dot(ga) * uh) / len;
        dV.row(other) += gu.transpose();
        dV.row(v) -= gu.transpose();
      }
    }
  }
  return dV;
}

// Data term |mu - nu|^2 and its gradient with respect to mu's points and
// weights; nu is fixed.
struct DataTermResult {
  double value = 0.0;
  RowMat d_points;
  RowMat d_weights;
};

DataTermResult data_term(const GaussianKernel& kernel, const DeformedNc& mu, const DiracFunctional& nu,
                         double nu_norm_sq, bool with_grad) {
  const int n = static_cast<int>(mu.points.rows());
  const int m = nu.rows();
  const double inv_s2 = 1.0 / (kernel.sigma * kernel.sigma);

  Eigen::VectorXd self_sums(n), cross_sums(n);
  DataTermResult out;
  if (with_grad) {
    out.d_points.setZero(n, 3);
    out.d_weights.setZero(n, 15);
  }

  parallel_for(n, [&](std::int64_t begin, std::int64_t end) {
    for (std::int64_t i = begin; i < end; ++i) {
      const Vec3 xi = mu.points.row(i);
      double self = 0.0;
      double cross = 0.0;
      Vec3 gp = Vec3::Zero();
      Eigen::RowVectorXd gw = Eigen::RowVectorXd::Zero(15);
      for (int j = 0; j < n; ++j) {
        const Vec3 diff = xi - Vec3(mu.points.row(j));
        const double kv = kernel.eval_sq(diff.squaredNorm());
        const double wdot = mu.weights.row(i).dot(mu.weights.row(j));
        self += kv * wdot;
        if (with_grad) {
          gp -= 2.0 * kv * inv_s2 * wdot * diff; // d<mu,mu>/dx_i counts pairs twice
          gw += 2.0 * kv * mu.weights.row(j);
        }
      }
      for (int j = 0; j < m; ++j) {
        const Vec3 diff = xi - Vec3(nu.points.row(j));
        const double kv = kernel.eval_sq(diff.squaredNorm());
        const double wdot = mu.weights.row(i).dot(nu.weights.row(j));
        cross += kv * wdot;
        if (with_grad) {
          gp += 2.0 * kv * inv_s2 * wdot * diff;
          gw -= 2.0 * kv * nu.weights.row(j);
        }
      }
      self_sums[i] = self;
      cross_sums[i] = cross;
      if (with_grad) {
        out.d_points.row(i) = gp.transpose();
        out.d_weights.row(i) = gw;
      }
    }
  });

  double mu_norm = 0.0, cross = 0.0;
  for (int i = 0; i < n; ++i) {
    mu_norm += self_sums[i];
    cross += cross_sums[i];
  }
  out.value = std::max(0.0, mu_norm - 2.0 * cross + nu_norm_sq);
  return out;
}

struct Evaluation {
  ObjectiveParts parts;
  RowMat3 gradient;
};

NcBuildInputs build_inputs(const MatchProblem& problem) {
  NcBuildInputs in;
  in.mesh = &problem.template_mesh;
  in.edges = &problem.edges;
  in.boundary = &problem.boundary;
  if (problem.template_compression == TemplateCompression::FrozenSupport) {
    in.support = &problem.support;
    in.weight_scale = problem.support_scale;
  }
  return in;
}

Evaluation evaluate(const MatchProblem& problem, const RowMat3& p0, bool with_grad) {
  if (!problem.prepared) throw std::logic_error("match problem not prepared");
  const NcBuildInputs inputs = build_inputs(problem);

  const FlowTrajectory traj = shoot_and_flow(problem.shooting, p0, problem.template_mesh.vertices);
  const DeformedNc mu = build_deformed_nc(inputs, traj.final_passengers());
  const DataTermResult data =
      data_term(problem.data_kernel, mu, problem.target, problem.target_norm_sq, with_grad);

  Evaluation ev;
  ev.parts.data = data.value;
  ev.parts.reg = problem.shooting.reg_weight * hamiltonian(problem.shooting, problem.shooting.control_points, p0);
  ev.parts.total = ev.parts.data + ev.parts.reg;
  if (with_grad) {
    const RowMat3 dV = deformed_nc_pullback(inputs, traj.final_passengers(), data.d_points, data.d_weights);
    ev.gradient = flow_pullback(problem.shooting, traj, dV);
    ev.gradient += problem.shooting.reg_weight *
                   hamiltonian_p_gradient(problem.shooting, problem.shooting.control_points, p0);
  }
  return ev;
}

double flat_dot(const RowMat3& a, const RowMat3& b) { return (a.array() * b.array()).sum(); }

} // namespace

void prepare_match_problem(MatchProblem& problem) {
  validate_mesh(problem.template_mesh);
  problem.shooting.validate();
  problem.data_kernel.validate();
  problem.target.validate();
  if (problem.target.kind != FunctionalKind::NcSurface) {
    throw std::invalid_argument("match: target must be an nc_surface functional");
  }
  problem.edges = build_edge_table(problem.template_mesh, /*strict=*/true);
  const OrientationReport orient = check_orientation(problem.template_mesh, problem.edges);
  if (!orient.consistent()) {
    throw std::invalid_argument("match: template mesh is not consistently oriented (" +
                                std::to_string(orient.inconsistent_edges.size()) + " bad edges)");
  }
  problem.boundary = boundary_vertices(problem.template_mesh, problem.edges);

  DiracFunctional nu = problem.target;
  problem.target_norm_sq = dual_inner(problem.data_kernel, nu, nu);

  if (problem.template_compression == TemplateCompression::FrozenSupport) {
    const DiracFunctional rest =
        normal_cycle_of_mesh(problem.template_mesh, problem.edges, problem.boundary);
    if (problem.frozen_m < 1 || problem.frozen_m > rest.rows()) {
      throw std::invalid_argument("match: frozen support size out of range");
    }
    if (problem.frozen_m == rest.rows()) {
      problem.support.resize(static_cast<std::size_t>(rest.rows()));
      std::iota(problem.support.begin(), problem.support.end(), 0);
    } else {
      RlsConfig cfg;
      cfg.target_m = problem.frozen_m;
      cfg.seed = problem.seed;
      problem.support = recursive_rls_sample(problem.data_kernel, rest.points, cfg).indices;
    }
    const RowMat beta = nystrom_weights(problem.data_kernel, rest, problem.support);
    double support_norm = 0.0;
    for (const int r : problem.support) support_norm += rest.weights.row(r).squaredNorm();
    support_norm = std::sqrt(support_norm);
    problem.support_scale = support_norm > 0.0 ? beta.norm() / support_norm : 1.0;
  }
  problem.prepared = true;
}

ObjectiveParts match_objective(const MatchProblem& problem, const RowMat3& p0) {
  return evaluate(problem, p0, /*with_grad=*/false).parts;
}

RowMat3 match_gradient(const MatchProblem& problem, const RowMat3& p0) {
  return evaluate(problem, p0, /*with_grad=*/true).gradient;
}

RowMat3 make_control_grid(const Aabb& box, int nx, int ny, int nz) {
  if (nx < 1 || ny < 1 || nz < 1) throw std::invalid_argument("control grid needs >= 1 point per axis");
  RowMat3 grid(static_cast<Eigen::Index>(nx) * ny * nz, 3);
  Eigen::Index row = 0;
  const auto coord = [](double lo, double hi, int i, int n) {
    return n == 1 ? 0.5 * (lo + hi) : lo + (hi - lo) * i / (n - 1);
  };
  for (int ix = 0; ix < nx; ++ix) {
    for (int iy = 0; iy < ny; ++iy) {
      for (int iz = 0; iz < nz; ++iz) {
        grid.row(row++) = Vec3(coord(box.lo[0], box.hi[0], ix, nx), coord(box.lo[1], box.hi[1], iy, ny),
                               coord(box.lo[2], box.hi[2], iz, nz));
      }
    }
  }
  return grid;
}

MatchResult optimize_match(const MatchProblem& problem, int max_iterations, std::uint64_t seed,
                           const RowMat3* p0_init) {
  (void)seed; // the optimizer itself is deterministic; kept for the CLI contract
  if (max_iterations < 1) throw std::invalid_argument("optimize_match: iterations must be >= 1");
  const int mc = static_cast<int>(problem.shooting.control_points.rows());

  MatchResult result;
  result.p0 = p0_init ? *p0_init : RowMat3::Zero(mc, 3);

  Stopwatch total_timer;
  int evals = 0;
  double eval_ms = 0.0;
  const auto value_and_grad = [&](const RowMat3& p, RowMat3& grad_out) {
    Stopwatch t;
    const Evaluation ev = evaluate(problem, p, /*with_grad=*/true);
    eval_ms += t.elapsed_ms();
    ++evals;
    grad_out = ev.gradient;
    return ev.parts;
  };

  RowMat3 grad(mc, 3);
  ObjectiveParts parts = value_and_grad(result.p0, grad);
  double f = parts.total;
  result.objective_trace.push_back(f);

  const double grad_tol = 1e-8 * (1.0 + std::abs(f));

  // L-BFGS two-loop recursion with history 10.
  const int history = 10;
  std::vector<RowMat3> s_hist, y_hist;
  std::vector<double> rho_hist;

  const double c1 = 1e-4;
  const double c2 = 0.9;

  int iter = 0;
  for (; iter < max_iterations; ++iter) {
    const double gnorm = grad.cwiseAbs().maxCoeff();
    result.grad_norm = gnorm;
    if (gnorm <= grad_tol) break;

    // Two-loop recursion for the search direction.
    RowMat3 dir = -grad;
    std::vector<double> alpha(s_hist.size());
    for (int h = static_cast<int>(s_hist.size()) - 1; h >= 0; --h) {
      alpha[static_cast<std::size_t>(h)] =
          rho_hist[static_cast<std::size_t>(h)] * flat_dot(s_hist[static_cast<std::size_t>(h)], dir);
      dir -= alpha[static_cast<std::size_t>(h)] * y_hist[static_cast<std::size_t>(h)];
    }
    if (!s_hist.empty()) {
      const double gamma = flat_dot(s_hist.back(), y_hist.back()) / flat_dot(y_hist.back(), y_hist.back());
      if (std::isfinite(gamma) && gamma > 0.0) dir *= gamma;
    }
    for (std::size_t h = 0; h < s_hist.size(); ++h) {
      const double beta = rho_hist[h] * flat_dot(y_hist[h], dir);
      dir += (alpha[h] - beta) * s_hist[h];
    }

    double dphi0 = flat_dot(grad, dir);
    if (!(dphi0 < 0.0)) { // not a descent direction; reset to steepest descent
      dir = -grad;
      dphi0 = flat_dot(grad, dir);
      s_hist.clear();
      y_hist.clear();
      rho_hist.clear();
    }

    // Strong Wolfe line search (bracket + zoom).
    const double phi0 = f;
    double alpha_prev = 0.0;
    double phi_prev = phi0;
    double step = s_hist.empty() ? std::min(1.0, 1.0 / std::max(1e-12, grad.cwiseAbs().maxCoeff())) : 1.0;
    double alpha_lo = -1.0, alpha_hi = -1.0, phi_lo = 0.0;
    bool bracketed = false;
    bool accepted = false;
    RowMat3 p_new = result.p0;
    RowMat3 grad_new = grad;
    ObjectiveParts parts_new = parts;
    double f_new = f;

    const auto eval_at = [&](double a, ObjectiveParts& parts_out, RowMat3& g_out) {
      const RowMat3 p_try = result.p0 + a * dir;
      RowMat3 g(mc, 3);
      parts_out = value_and_grad(p_try, g);
      g_out = g;
      return parts_out.total;
    };

    for (int ls = 0; ls < 20 && !accepted && !bracketed; ++ls) {
      ObjectiveParts pt;
      RowMat3 gt(mc, 3);
      const double phi = eval_at(step, pt, gt);
      const double dphi = flat_dot(gt, dir);
      if (phi > phi0 + c1 * step * dphi0 || (ls > 0 && phi >= phi_prev)) {
        alpha_lo = alpha_prev;
        phi_lo = phi_prev;
        alpha_hi = step;
        bracketed = true;
        break;
      }
      if (std::abs(dphi) <= -c2 * dphi0) {
        accepted = true;
        p_new = result.p0 + step * dir;
        grad_new = gt;
        parts_new = pt;
        f_new = phi;
        break;
      }
      if (dphi >= 0.0) {
        alpha_lo = step;
        phi_lo = phi;
        alpha_hi = alpha_prev;
        bracketed = true;
        break;
      }
      alpha_prev = step;
      phi_prev = phi;
      step *= 2.0;
    }

    if (bracketed && !accepted) {
      for (int z = 0; z < 25 && !accepted; ++z) {
        const double a_mid = 0.5 * (alpha_lo + alpha_hi);
        ObjectiveParts pt;
        RowMat3 gt(mc, 3);
        const double phi = eval_at(a_mid, pt, gt);
        const double dphi = flat_dot(gt, dir);
        if (phi > phi0 + c1 * a_mid * dphi0 || phi >= phi_lo) {
          alpha_hi = a_mid;
        } else {
          if (std::abs(dphi) <= -c2 * dphi0) {
            accepted = true;
            p_new = result.p0 + a_mid * dir;
            grad_new = gt;
            parts_new = pt;
            f_new = phi;
            break;
          }
          if (dphi * (alpha_hi - alpha_lo) >= 0.0) alpha_hi = alpha_lo;
          alpha_lo = a_mid;
          phi_lo = phi;
        }
        if (std::abs(alpha_hi - alpha_lo) < 1e-16) break;
      }
    }

    if (!accepted) {
      // Armijo backtracking on steepest descent.
      s_hist.clear();
      y_hist.clear();
      rho_hist.clear();
      const RowMat3 sd = -grad;
      const double dphi_sd = flat_dot(grad, sd);
      double a = 1.0 / std::max(1.0, grad.cwiseAbs().maxCoeff());
      for (int bt = 0; bt < 60; ++bt) {
        ObjectiveParts pt;
        RowMat3 gt(mc, 3);
        const RowMat3 p_try = result.p0 + a * sd;
        pt = value_and_grad(p_try, gt);
        if (pt.total <= phi0 + c1 * a * dphi_sd) {
          accepted = true;
          p_new = p_try;
          grad_new = gt;
          parts_new = pt;
          f_new = pt.total;
          break;
        }
        a *= 0.5;
      }
      if (!accepted) break; // no further progress possible
    }

    // Curvature pair update.
    const RowMat3 s_vec = p_new - result.p0;
    const RowMat3 y_vec = grad_new - grad;
    const double sy = flat_dot(s_vec, y_vec);
    if (sy > 1e-12 * std::max(1.0, flat_dot(y_vec, y_vec))) {
      s_hist.push_back(s_vec);
      y_hist.push_back(y_vec);
      rho_hist.push_back(1.0 / sy);
      if (static_cast<int>(s_hist.size()) > history) {
        s_hist.erase(s_hist.begin());
        y_hist.erase(y_hist.begin());
        rho_hist.erase(rho_hist.begin());
      }
    }

    result.p0 = p_new;
    grad = grad_new;
    parts = parts_new;
    f = f_new;
    result.objective_trace.push_back(f);
  }

  result.iterations = iter;
  result.final_parts = parts;
  result.grad_norm = grad.cwiseAbs().maxCoeff();
  result.objective_evals = evals;
  result.mean_eval_ms = evals > 0 ? eval_ms / evals : 0.0;

  const FlowTrajectory traj = shoot_and_flow(problem.shooting, result.p0, problem.template_mesh.vertices);
  result.deformed = problem.template_mesh;
  result.deformed.vertices = traj.final_passengers();
  return result;
}

} // namespace ncshape
