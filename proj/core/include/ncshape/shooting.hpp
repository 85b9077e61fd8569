#pragma once

#include <vector>

#include "ncshape/geometry.hpp"
#include "ncshape/kernels.hpp"

namespace ncshape {

/// Hamiltonian particle system driving the registration flow: control points
/// q with momenta p, velocity field v(x) = sum_j K_V(x, q_j) p_j where K_V
/// is an equal-weight sum of Gaussians.
struct ShootingConfig {
  RowMat3 control_points; // q0
  KernelSum kernel;
  int steps = 5;
  double reg_weight = 1.0;

  void validate() const;
};

/// H(q, p) = 1/2 sum_ij K_V(q_i, q_j) <p_i, p_j>; nonnegative since the
/// kernel sum is positive definite.
double hamiltonian(const ShootingConfig& config, const RowMat3& q, const RowMat3& p);

/// dH/dp, i.e. the velocity field sampled at the control points.
RowMat3 hamiltonian_p_gradient(const ShootingConfig& config, const RowMat3& q, const RowMat3& p);

/// States after each of the forward Euler steps (steps+1 entries each).
/// Passengers ride the same velocity field, advanced with the pre-step
/// control state.
struct FlowTrajectory {
  std::vector<RowMat3> q;
  std::vector<RowMat3> p;
  std::vector<RowMat3> passengers;

  const RowMat3& final_q() const { return q.back(); }
  const RowMat3& final_passengers() const { return passengers.back(); }
};

/// Integrates qdot = dH/dp, pdot = -dH/dq and the passenger advection with
/// steps forward Euler steps of size 1/steps. Throws naming the step index
/// if the state leaves the finite range.
FlowTrajectory shoot_and_flow(const ShootingConfig& config, const RowMat3& p0, const RowMat3& passengers);

/// Reverse-mode accumulation through the stored trajectory: returns the
/// gradient with respect to p0 of any scalar whose gradient with respect to
/// the final passenger positions is d_passengers.
RowMat3 flow_pullback(const ShootingConfig& config, const FlowTrajectory& trajectory,
                      const RowMat3& d_passengers);

} // namespace ncshape
