#ifndef CONIWAVE_GAUSSIAN_HPP
#define CONIWAVE_GAUSSIAN_HPP

#include <functional>

#include "coniwave/classical.hpp"
#include "coniwave/grid.hpp"

namespace coniwave {

// Complex Gaussian amp * exp(i A y.y / 2) with Im A > 0.
struct GaussianParams {
    Eigen::MatrixXcd A;
    cplx amp;
};

// Quadratic Hamiltonian path h(y, p, t) = |p|^2/2 + (C(t) y).p + y.W(t) y / 2.
struct QuadPath {
    std::function<Mat(double)> W;
    std::function<Mat(double)> C;  // may be empty (no cross term)
};

// Propagates the Gaussian through the quadratic flow: A = P Q^{-1} with
// Qdot = C Q + P, Pdot = -W Q - C' P, and amp following det(Q)^{-1/2}
// continuously. The path coefficients must be finite on [t0, t1].
GaussianParams evolve_gaussian(const QuadPath& path, const GaussianParams& g0,
                               double t0, double t1, double rtol = 1e-12);

ProfileGrid sample_gaussian(const BoxSpec& box, const GaussianParams& g);

// W(t) = Hess lambda_mode(q(t)) along the trajectory, no cross term.
QuadPath profile_quad_path(const PotentialModel& model, const Trajectory& traj);

// Compensated-frame coefficients inside the crossing window:
// W(t) = M(t) + g(t)^2 Gamma0^2 and C(t) = -g(t) Gamma0 with
// g(t) = mode * sgn(t - t_flat) * ln|t - t_flat|. Singular exactly at t_flat.
QuadPath compensated_quad_path(const PotentialModel& model, const Trajectory& traj,
                               const CrossingGeometry& geom);

// standard normalized ground-state Gaussian, A = i Id
GaussianParams gaussian_ground_state(int d);

} // namespace coniwave

#endif
