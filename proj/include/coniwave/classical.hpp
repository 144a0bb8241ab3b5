#ifndef CONIWAVE_CLASSICAL_HPP
#define CONIWAVE_CLASSICAL_HPP

#include <optional>
#include <vector>

#include "coniwave/ode.hpp"
#include "coniwave/potential.hpp"

namespace coniwave {

struct FlowOptions {
    double rtol = 1e-10;
    double atol = 1e-12;
    double h_max = 0.01;
    // |w| thresholds: below crossing_gap the minimum counts as a conical crossing,
    // below near_miss_gap (but above crossing_gap) the run is rejected as a graze.
    double crossing_gap = 1e-8;
    double near_miss_gap = 1e-4;
    double h_restart = 1e-6;
};

// Sampled Hamiltonian trajectory of one mode. Interpolation between samples is
// cubic Hermite with derivatives from zdot = J grad h.
struct Trajectory {
    Mode mode = Mode::reference;
    std::vector<double> times;
    std::vector<PhasePoint> states;
    std::vector<PhasePoint> derivs;
    std::optional<CrossingGeometry> crossing;

    double t_begin() const { return times.front(); }
    double t_end() const { return times.back(); }
    PhasePoint at(double t) const;
    PhasePoint deriv_at(double t) const;
    // index of the step containing t
    std::size_t locate(double t) const;
};

struct ActionCurve {
    Mode mode = Mode::reference;
    std::vector<double> times;
    std::vector<double> S;
    std::vector<double> Sdot;
    double at(double t) const;
};

double hamiltonian(const PotentialModel& model, const PhasePoint& z, Mode m);

// Integrates the mode flow from z0 over [t0,t1]. Halts early with the crossing
// recorded when |w(q(t))| dips below the crossing threshold; a minimum in
// (crossing_gap, near_miss_gap) throws NearMissCrossing.
Trajectory integrate_flow(const PotentialModel& model, Mode mode, const PhasePoint& z0,
                          double t0, double t1, const FlowOptions& opt = {});

// Restarts the out_mode flow at t_flat + h_restart from the second-order Taylor
// state of the generalized trajectory and integrates to t1 > t_flat. The
// returned trajectory starts with the crossing point itself.
Trajectory continue_through_crossing(const PotentialModel& model, const Trajectory& traj_in,
                                     Mode out_mode, double t1, const FlowOptions& opt = {});

// Ingoing branch of the generalized trajectory through geom, integrated backward
// to t0 < t_flat and returned with increasing times (crossing point last).
Trajectory backward_from_crossing(const PotentialModel& model, const CrossingGeometry& geom,
                                  Mode in_mode, double t0, const FlowOptions& opt = {});

// S(t) = int (p.qdot - h) ds accumulated along the trajectory (Simpson per step).
ActionCurve action_along(const PotentialModel& model, const Trajectory& traj);

// Flow and action of the scalar Hamiltonian h0 = |xi|^2/2 + v(x) through the
// crossing point, covering [t0, t1].
std::pair<Trajectory, ActionCurve> reference_frame(const PotentialModel& model,
                                                   const CrossingGeometry& geom,
                                                   double t0, double t1,
                                                   const FlowOptions& opt = {});

} // namespace coniwave

#endif
