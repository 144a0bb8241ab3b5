#ifndef CONIWAVE_PROFILE_HPP
#define CONIWAVE_PROFILE_HPP

#include "coniwave/classical.hpp"
#include "coniwave/grid.hpp"

namespace coniwave {

struct ProfileEvolveOptions {
    double dt = 1e-3;             // Strang step away from the crossing
    double tau_switch = 0.05;     // half-width of the compensated window
    double h_extract = 1e-4;      // extrapolation offset for the in/out profiles
    double geo_shrink = 0.75;     // step ratio of the geometric approach to t_flat
    double tau_floor = 1e-8;      // closest regular step endpoint to t_flat
    double boundary_flag = 1e-8;  // outer-shell mass fraction that trips the flag
    double boundary_fatal = 1e-3; // outer-shell mass fraction that aborts
};

// Hessian of the mode eigenvalue along the trajectory, split against the
// crossing-local Gamma0: Hess lambda(q(t)) = M(t) + sign * Gamma0 / |t - t_flat|.
struct HessianSplit {
    Mat full;            // Hess lambda_mode(q(t))
    Mat smooth;          // M(t)
    bool singular = false;
    double coefficient = 0.0;  // sign * 1/|t - t_flat| multiplying Gamma0
    Mode mode = Mode::reference;
};

HessianSplit hessian_at(const PotentialModel& model, const Trajectory& traj, double t);

// Strang split-step solution of i du/dt = -Lap u / 2 + Hess lambda(q(t)) y.y u / 2
// on [t0, t1]; the window must stay tau_switch away from a crossing time.
ProfileGrid evolve_profile(const PotentialModel& model, const Trajectory& traj,
                           const ProfileGrid& u, double t0, double t1,
                           const ProfileEvolveOptions& opt = {});

// Evolution of the compensated variable
//   v(t) = Exp(sign(t - t_flat) * mode * (i/2) Gamma0 y.y ln|t - t_flat|) u(t)
// inside the window |t - t_flat| <= tau_switch. The generator has only
// logarithmic singularities, so t_flat itself may be an endpoint; at the inner
// endpoint the returned values are the compensated profile (= the in/out
// profile), elsewhere the quadratic phase is removed again on exit.
ProfileGrid evolve_compensated(const PotentialModel& model, const Trajectory& traj,
                               const ProfileGrid& u, double t0, double t1,
                               const CrossingGeometry& geom,
                               const ProfileEvolveOptions& opt = {});

struct ExtractResult {
    ProfileGrid u_in;
    double residual = 0.0;  // norm distance of the two states entering the extrapolation
};

// Compensated evolution up to t_flat - h and t_flat - h/2, then extrapolation
// to t_flat with the |t-t_flat| (1 + |ln|t-t_flat||) error model.
ExtractResult extract_incoming(const PotentialModel& model, const Trajectory& traj,
                               const ProfileGrid& u, const CrossingGeometry& geom,
                               const ProfileEvolveOptions& opt = {});

// Starts an outgoing profile at the crossing: compensated evolution from t_flat
// through the window, then the plain profile equation up to t1.
ProfileGrid launch_outgoing(const ProfileGrid& u_out, const CrossingGeometry& geom,
                            const PotentialModel& model, const Trajectory& traj,
                            double t1, const ProfileEvolveOptions& opt = {});

// Reverse of launch_outgoing, for round-trip checks: takes the physical profile
// at u.time > t_flat and returns the compensated state extrapolated to t_flat.
ExtractResult extract_outgoing(const PotentialModel& model, const Trajectory& traj,
                               const ProfileGrid& u, const CrossingGeometry& geom,
                               const ProfileEvolveOptions& opt = {});

// Exact metaplectic dilation along the unit direction ghat:
// v(y) <- mu^{1/2} v(y + (mu - 1)(ghat.y) ghat), realized as four quadratic
// phases (two in position, two in momentum). Unitary on the grid.
void apply_rank1_dilation(ProfileGrid& g, const Vec& ghat, double mu);

// Pointwise quadratic phase u *= exp(i c (form y.y) / 2) for a symmetric form.
void apply_quadratic_phase(ProfileGrid& g, const Mat& form, double c);

ProfileGrid make_gaussian_profile(const BoxSpec& box, const Vec& center,
                                  const Vec& poly_lin, double poly_const = 1.0);

} // namespace coniwave

#endif
