#include "ncshape/shooting.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

#include "ncshape/parallel.hpp"

namespace ncshape {

namespace {

// Per-sigma Gaussian values at squared distance d2.
inline double kernel_value(const KernelSum& ks, double d2) { return ks.eval_sq(d2); }

// sum_s h_s / sigma_s^2, the radial factor of -grad_1 K(x,y) = c * (x-y).
inline double kernel_radial(const KernelSum& ks, double d2) {
  double c = 0.0;
  for (const double s : ks.sigmas) {
    const double inv = 1.0 / (s * s);
    c += std::exp(-0.5 * d2 * inv) * inv;
  }
  return c;
}

// sum_s h_s / sigma_s^4, used by the force Jacobian.
inline double kernel_radial2(const KernelSum& ks, double d2) {
  double c = 0.0;
  for (const double s : ks.sigmas) {
    const double inv = 1.0 / (s * s);
    c += std::exp(-0.5 * d2 * inv) * inv * inv;
  }
  return c;
}

RowMat3 velocity_at(const KernelSum& ks, const RowMat3& x, const RowMat3& q, const RowMat3& p) {
  const int n = static_cast<int>(x.rows());
  const int m = static_cast<int>(q.rows());
  RowMat3 v = RowMat3::Zero(n, 3);
  parallel_for(n, [&](std::int64_t begin, std::int64_t end) {
    for (std::int64_t i = begin; i < end; ++i) {
      for (int j = 0; j < m; ++j) {
        v.row(i) += kernel_value(ks, (x.row(i) - q.row(j)).squaredNorm()) * p.row(j);
      }
    }
  });
  return v;
}

// pdot_i = sum_j <p_i,p_j> kernel_radial(|q_i-q_j|^2) (q_i - q_j).
RowMat3 momentum_force(const KernelSum& ks, const RowMat3& q, const RowMat3& p) {
  const int m = static_cast<int>(q.rows());
  RowMat3 f = RowMat3::Zero(m, 3);
  parallel_for(m, [&](std::int64_t begin, std::int64_t end) {
    for (std::int64_t i = begin; i < end; ++i) {
      for (int j = 0; j < m; ++j) {
        if (j == static_cast<int>(i)) continue;
        const Vec3 r = q.row(i) - q.row(j);
        f.row(i) += p.row(i).dot(p.row(j)) * kernel_radial(ks, r.squaredNorm()) * r.transpose();
      }
    }
  });
  return f;
}

} // namespace

void ShootingConfig::validate() const {
  if (control_points.rows() < 1) throw std::invalid_argument("shooting: need at least one control point");
  if (steps < 1) throw std::invalid_argument("shooting: steps must be >= 1");
  kernel.validate();
  if (!(reg_weight > 0.0)) throw std::invalid_argument("shooting: reg_weight must be > 0");
}

double hamiltonian(const ShootingConfig& config, const RowMat3& q, const RowMat3& p) {
  if (q.rows() != p.rows()) throw std::invalid_argument("hamiltonian: q/p shape mismatch");
  const int m = static_cast<int>(q.rows());
  Eigen::VectorXd row_sums(m);
  parallel_for(m, [&](std::int64_t begin, std::int64_t end) {
    for (std::int64_t i = begin; i < end; ++i) {
      double s = 0.0;
      for (int j = 0; j < m; ++j) {
        s += kernel_value(config.kernel, (q.row(i) - q.row(j)).squaredNorm()) * p.row(i).dot(p.row(j));
      }
      row_sums[i] = s;
    }
  });
  double total = 0.0;
  for (int i = 0; i < m; ++i) total += row_sums[i];
  return 0.5 * total;
}

RowMat3 hamiltonian_p_gradient(const ShootingConfig& config, const RowMat3& q, const RowMat3& p) {
  return velocity_at(config.kernel, q, q, p);
}

FlowTrajectory shoot_and_flow(const ShootingConfig& config, const RowMat3& p0, const RowMat3& passengers) {
  config.validate();
  if (p0.rows() != config.control_points.rows()) {
    throw std::invalid_argument("shoot_and_flow: momentum shape does not match control points");
  }
  const double dt = 1.0 / config.steps;

  FlowTrajectory traj;
  traj.q.reserve(static_cast<std::size_t>(config.steps) + 1);
  traj.p.reserve(static_cast<std::size_t>(config.steps) + 1);
  traj.passengers.reserve(static_cast<std::size_t>(config.steps) + 1);
  traj.q.push_back(config.control_points);
  traj.p.push_back(p0);
  traj.passengers.push_back(passengers);

  for (int step = 0; step < config.steps; ++step) {
    const RowMat3& q = traj.q.back();
    const RowMat3& p = traj.p.back();
    const RowMat3& v = traj.passengers.back();
    RowMat3 q_next = q + dt * velocity_at(config.kernel, q, q, p);
    RowMat3 p_next = p + dt * momentum_force(config.kernel, q, p);
    RowMat3 v_next = v + dt * velocity_at(config.kernel, v, q, p);
    if (!q_next.allFinite() || !p_next.allFinite() || !v_next.allFinite()) {
      throw std::runtime_error("shoot_and_flow: non-finite state after step " + std::to_string(step));
    }
    traj.q.push_back(std::move(q_next));
    traj.p.push_back(std::move(p_next));
    traj.passengers.push_back(std::move(v_next));
  }
  return traj;
}

RowMat3 flow_pullback(const ShootingConfig& config, const FlowTrajectory& trajectory,
                      const RowMat3& d_passengers) {
  const double dt = 1.0 / config.steps;
  const int steps = static_cast<int>(trajectory.q.size()) - 1;
  const int mc = static_cast<int>(config.control_points.rows());
  const int np = static_cast<int>(trajectory.passengers.front().rows());

  RowMat3 lq = RowMat3::Zero(mc, 3);
  RowMat3 lp = RowMat3::Zero(mc, 3);
  RowMat3 lv = d_passengers;

  for (int step = steps - 1; step >= 0; --step) {
    const RowMat3& q = trajectory.q[static_cast<std::size_t>(step)];
    const RowMat3& p = trajectory.p[static_cast<std::size_t>(step)];
    const RowMat3& v = trajectory.passengers[static_cast<std::size_t>(step)];

    RowMat3 lq_prev = lq;
    RowMat3 lp_prev = lp;
    RowMat3 lv_prev = lv;

    // Passenger update v' = v + dt sum_j K(v_a, q_j) p_j.
    parallel_for(np, [&](std::int64_t begin, std::int64_t end) {
      for (std::int64_t a = begin; a < end; ++a) {
        const Vec3 lam = lv.row(a);
        for (int j = 0; j < mc; ++j) {
          const Vec3 r = v.row(a) - q.row(j);
          const double d2 = r.squaredNorm();
          const double pj_dot_lam = p.row(j).dot(lam);
          lv_prev.row(a) -= dt * pj_dot_lam * kernel_radial(config.kernel, d2) * r.transpose();
        }
      }
    });
    // Same update's contributions to the control adjoints; loop over j
    // outside so each row is written once.
    parallel_for(mc, [&](std::int64_t begin, std::int64_t end) {
      for (std::int64_t j = begin; j < end; ++j) {
        for (int a = 0; a < np; ++a) {
          const Vec3 lam = lv.row(a);
          const Vec3 r = v.row(a) - q.row(j);
          const double d2 = r.squaredNorm();
          const double pj_dot_lam = p.row(j).dot(lam);
          lq_prev.row(j) += dt * pj_dot_lam * kernel_radial(config.kernel, d2) * r.transpose();
          lp_prev.row(j) += dt * kernel_value(config.kernel, d2) * lam.transpose();
        }
      }
    });

    // Control updates q' = q + dt u(q,p), p' = p + dt g(q,p).
    parallel_for(mc, [&](std::int64_t begin, std::int64_t end) {
      for (std::int64_t i = begin; i < end; ++i) {
        Vec3 acc_q = Vec3::Zero();
        Vec3 acc_p = Vec3::Zero();
        for (int j = 0; j < mc; ++j) {
          const Vec3 r = q.row(i) - q.row(j);
          const double d2 = r.squaredNorm();
          const double kv = kernel_value(config.kernel, d2);
          const double kr = kernel_radial(config.kernel, d2);

          // u_i = sum_j K_ij p_j: grad_{q_i} K(d2_ij) = -kr * r for both the
          // own-row and the cross-row dependence.
          const Vec3 lam_ui = lq.row(i);
          const Vec3 lam_uj = lq.row(j);
          acc_q -= dt * kr * (p.row(j).dot(lam_ui) + p.row(i).dot(lam_uj)) * r;
          acc_p += dt * kv * lam_uj; // du_j/dp_i

          if (j != static_cast<int>(i)) {
            // g_i = sum_j <p_i,p_j> c(d2) r_ij with c = kernel_radial.
            const Vec3 lam_gi = lp.row(i);
            const Vec3 lam_gj = lp.row(j);
            const double cij = p.row(i).dot(p.row(j));
            const double kr2 = kernel_radial2(config.kernel, d2);
            // d(c r)/dq_i = c I - kr2 r r^T applied to lam; sign +1 for the
            // own row g_i, -1 for the cross row g_j.
            const Vec3 jac_gi = kr * lam_gi - kr2 * r.dot(lam_gi) * r;
            const Vec3 jac_gj = kr * lam_gj - kr2 * r.dot(lam_gj) * r;
            acc_q += dt * cij * jac_gi;
            acc_q -= dt * cij * jac_gj;
            // dg_i/dp_i = sum_j (c r) p_j^T, dg_j/dp_i = (c r_ji) p_j'^T...
            acc_p += dt * (kr * r.dot(lam_gi)) * p.row(j).transpose();
            acc_p += dt * (kr * (-r).dot(lam_gj)) * p.row(j).transpose();
          }
        }
        lq_prev.row(i) += acc_q.transpose();
        lp_prev.row(i) += acc_p.transpose();
      }
    });

    lq = std::move(lq_prev);
    lp = std::move(lp_prev);
    lv = std::move(lv_prev);
  }
  return lp;
}

} // namespace ncshape
