#ifndef CONIWAVE_RUNNER_HPP
#define CONIWAVE_RUNNER_HPP

#include <string>
#include <vector>

#include "coniwave/ansatz.hpp"
#include "coniwave/config.hpp"

namespace coniwave {

struct EpsResult {
    double epsilon = 0;
    double delta = 0;
    double err_l2_T = 0;       // reference vs ansatz at the final time
    double err_sigma1_T = 0;
    double err_l2_mid = 0;     // after the crossing, t_flat + delta (crossing kinds)
    double mass_plus_ref = 0, mass_minus_ref = 0;
    double c_plus = 0, c_minus = 0;     // Wigner coefficients
    double mass_plus_app = 0, mass_minus_app = 0;
    double cross_term = 0;     // |gamma_eps| interference magnitude (pair runs)
    double t_flat = 0;
    double box_L = 0;
    bool resolution_ok = true;
};

struct RunReport {
    RunKind kind = RunKind::crossing_single;
    std::vector<EpsResult> eps;
    double fitted_slope = 0;   // d ln err / d ln eps at the final time
    bool monotone = false;
    std::vector<std::string> notes;
};

// Executes the configured pipeline for a single epsilon (the first entry).
RunReport run(const ExperimentConfig& cfg);

// Convergence study over the full epsilon list (at least three values).
RunReport sweep(const ExperimentConfig& cfg);

// Crossing-profile diagnostics (Cauchy rate, Sigma^1 growth) written as CSV.
void profile_diagnostics(const ExperimentConfig& cfg);

// Classical trajectory dump: t, q.., p.., S, gap (+ optional eigenframe CSV).
void classical_dump(const ExperimentConfig& cfg, bool eigenframe);

// LZ coefficient/oracle table.
void lz_table(const ExperimentConfig& cfg);

// single-branch adiabatic ansatz (no crossing on [t0, t0+T])
ModeAnsatz adiabatic_branch(const PotentialModel& model, const AnsatzInit& init, Mode mode,
                            double t0, double T, const FlowOptions& fopt = {});

Field2 assemble_adiabatic(const PotentialModel& model, const ModeAnsatz& branch, double t,
                          const PhysicalGrid& grid, double epsilon,
                          const ProfileEvolveOptions& popt);

} // namespace coniwave

#endif
