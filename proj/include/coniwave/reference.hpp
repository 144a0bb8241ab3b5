#ifndef CONIWAVE_REFERENCE_HPP
#define CONIWAVE_REFERENCE_HPP

#include "coniwave/grid.hpp"
#include "coniwave/potential.hpp"

namespace coniwave {

// One pointwise application of exp(-i (dt/eps) V(x)) using the closed
// trigonometric form; robust through |w| -> 0.
void potential_half_step(const PotentialModel& model, Field2& psi, double dt);

// Fourier multiplier exp(-i (dt eps / 2) |k|^2) on both components.
void kinetic_step(Field2& psi, double dt);

struct ReferenceOptions {
    double boundary_fatal = 1e-3;
    long check_every = 64;
};

// Strang V/2 - T - V/2 splitting for the coupled two-level system.
Field2 propagate_reference(const PotentialModel& model, const Field2& psi0, double t0,
                           double t1, double dt, const ReferenceOptions& opt = {});

// (m_plus, m_minus) = masses of the pointwise eigenprojections of the field.
std::pair<double, double> mode_masses(const PotentialModel& model, const Field2& psi);

} // namespace coniwave

#endif
