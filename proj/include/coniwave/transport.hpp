#ifndef CONIWAVE_TRANSPORT_HPP
#define CONIWAVE_TRANSPORT_HPP

#include <optional>
#include <vector>

#include "coniwave/classical.hpp"

namespace coniwave {

// Real unit eigenvector transported along a trajectory.
struct EigenframePath {
    Mode mode = Mode::minus;
    std::vector<double> times;
    std::vector<Vec2> Y;
    std::vector<Vec2> dY;
    std::optional<Vec2> v_omega;

    Vec2 at(double t) const;
};

// B_pm(x, xi) = +-Pi_mp(x) xi.grad Pi_+(x) Pi_pm(x), evaluated in closed form.
Mat2 b_matrix(const PotentialModel& model, Mode mode, const Vec& x, const Vec& xi);

// Solves dY/dt = B_mode(Phi(t)) Y along the trajectory. With a crossing the
// integration stops just short of t_flat.
EigenframePath parallel_transport(const PotentialModel& model, const Trajectory& traj,
                                  const Vec2& Y0);

// Extrapolated limit of Y(t) at t_flat, projected onto ker(A(omega) - Id) and
// renormalized. Sign follows the transported frame.
Vec2 crossing_limit(const EigenframePath& frame, const CrossingGeometry& geom);

// Initial vectors for restarting transport on the outgoing branches:
// V_omega for the plus mode and V_omega-perp for the minus mode, projected onto
// the exact eigenspaces at the restart points.
std::pair<Vec2, Vec2> outgoing_frames(const PotentialModel& model, const CrossingGeometry& geom,
                                      const Vec2& v_omega, double h_restart = 1e-6);

// +1 when the plus-frame limit equals +V_omega-perp, -1 when it equals the
// opposite sign (the pair (Y0+, phi+) must then be flipped).
int align_pair_signs(const EigenframePath& frame_minus, const EigenframePath& frame_plus,
                     const CrossingGeometry& geom);

Vec2 rotate_quarter(const Vec2& v);  // +pi/2 rotation

} // namespace coniwave

#endif
