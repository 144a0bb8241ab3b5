#ifndef CONIWAVE_ANSATZ_HPP
#define CONIWAVE_ANSATZ_HPP

#include <map>
#include <optional>

#include "coniwave/landau_zener.hpp"
#include "coniwave/profile.hpp"
#include "coniwave/reference.hpp"
#include "coniwave/transport.hpp"

namespace coniwave {

// Scalar wave packet eps^{-d/4} e^{i p.(x-q)/eps} phi((x-q)/sqrt(eps)) sampled
// on the physical grid through the trigonometric interpolant of the profile.
ComplexGrid wave_packet(const PhysicalGrid& grid, const PhasePoint& z,
                        const ProfileGrid& profile);

// One propagated branch: everything needed to assemble its wave packet at any
// time in its validity window.
struct ModeAnsatz {
    Mode mode = Mode::minus;
    Trajectory traj;
    ActionCurve action;
    EigenframePath frame;
    ProfileGrid profile_ref;   // profile at the anchor time profile_ref.time
    double t_lo = 0, t_hi = 0;
};

struct AnsatzInit {
    PhasePoint z0;
    ProfileGrid profile;
    double Y0_sign = +1.0;
};

// Full single-packet pipeline through one conical crossing.
struct CrossingAnsatz {
    double epsilon = 0;
    double delta = 0;  // eps^{5/14}, layer bookkeeping only
    CrossingGeometry geom;
    double S_flat_minus = 0, S_flat_plus = 0;
    Vec2 v_omega;
    int pair_sign = +1;
    ModeAnsatz in_minus;
    std::optional<ModeAnsatz> in_plus;
    ModeAnsatz out_plus, out_minus;
    ProfileGrid u_in_minus, u_in_plus;    // extracted at t_flat (plus only for pairs)
    ProfileGrid u_out_plus, u_out_minus;  // transfer outputs at t_flat
    double extract_residual = 0;
    ProfileEvolveOptions profile_opt;
};

// Profile of one branch at time t (within its window), including the
// compensated region next to the crossing.
ProfileGrid profile_at(const PotentialModel& model, const CrossingAnsatz& ca,
                       const ModeAnsatz& branch, double t);

// Y(t) (x) e^{i S/eps} WP(u(t)) for one branch.
Field2 assemble_single_mode(const PotentialModel& model, const CrossingAnsatz& ca,
                            const ModeAnsatz& branch, double t, const PhysicalGrid& grid);

// Sum of the active branches at time t.
Field2 assemble_total(const PotentialModel& model, const CrossingAnsatz& ca, double t,
                      const PhysicalGrid& grid);

CrossingAnsatz propagate_ansatz(const PotentialModel& model, const AnsatzInit& init,
                                double t0, double T, double epsilon,
                                const ProfileEvolveOptions& popt = {},
                                const FlowOptions& fopt = {});

CrossingAnsatz propagate_pair(const PotentialModel& model, const AnsatzInit& init_minus,
                              const AnsatzInit& init_plus, double t0, double T,
                              double epsilon, const ProfileEvolveOptions& popt = {},
                              const FlowOptions& fopt = {});

// sup over |alpha| + |beta| <= k of ||x^alpha (eps d_x)^beta f||_
double sigma_norm(const ComplexGrid& f, int k, double epsilon);
double sigma_norm(const Field2& f, int k, double epsilon);

// Wigner-measure mode masses of the outgoing pair:
//   c_plus  = || sqrt(1 - a^2) u_in_plus ||^2 + || a u_in_minus ||^2
//   c_minus = || a u_in_plus ||^2 + || sqrt(1 - a^2) u_in_minus ||^2
// with a = a(eta2 / sqrt(r)) evaluated pointwise. Pass null for a missing mode.
std::pair<double, double> wigner_masses(const ProfileGrid* u_in_plus,
                                        const ProfileGrid& u_in_minus,
                                        const CrossingGeometry& geom);

// the minus-mode (or plus-mode) unit eigenvector at q0 with a deterministic
// orientation, scaled by sign
Vec2 initial_eigenvector(const PotentialModel& model, const Vec& q0, Mode mode, double sign);

} // namespace coniwave

#endif
