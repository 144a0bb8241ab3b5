#ifndef CONIWAVE_GRID_HPP
#define CONIWAVE_GRID_HPP

#include <algorithm>
#include <cmath>
#include <complex>
#include <functional>
#include <vector>

#include "coniwave/potential.hpp"

namespace coniwave {

using cplx = std::complex<double>;

// Uniform periodic box [-L, L]^d with n points per axis.
struct BoxSpec {
    int d = 0;
    int n = 0;
    double L = 0;

    std::size_t size() const {
        std::size_t s = 1;
        for (int i = 0; i < d; ++i) s *= static_cast<std::size_t>(n);
        return s;
    }
    double dx() const { return 2.0 * L / n; }
    double coord(int i) const { return -L + i * dx(); }
    // wavenumber of DFT index j (standard ordering, k = pi m / L)
    double wavenumber(int j) const {
        int m = (j < n / 2) ? j : j - n;
        return M_PI * m / L;
    }
    bool operator==(const BoxSpec& o) const { return d == o.d && n == o.n && L == o.L; }
};

// Complex scalar field on a BoxSpec, row-major. Also carries the profile
// metadata (time stamp, mode) where that is meaningful.
class ComplexGrid {
public:
    BoxSpec box;
    std::vector<cplx> v;
    double time = 0.0;
    Mode mode = Mode::reference;

    ComplexGrid() = default;
    explicit ComplexGrid(const BoxSpec& b) : box(b), v(b.size(), cplx(0.0, 0.0)) {}

    std::size_t size() const { return v.size(); }
    double cell_volume() const {
        double dv = 1.0;
        for (int i = 0; i < box.d; ++i) dv *= box.dx();
        return dv;
    }

    double mass() const;                     // int |u|^2
    double boundary_mass_fraction() const;   // mass share in the outer 10% shell
    cplx inner(const ComplexGrid& other) const;  // int conj(u) w

    // decode flat index -> per-axis indices
    void unravel(std::size_t idx, int* out) const;

    // apply u *= f(y) over the grid
    void scale_pointwise(const std::function<cplx(const Vec&)>& f);

    void fft_forward();   // unnormalized
    void fft_backward();  // normalized by 1/size
};

// multiply in Fourier space by f(k), leaving position-space values
void apply_fourier_multiplier(ComplexGrid& g, const std::function<cplx(const Vec&)>& f);

// Evaluate the trigonometric interpolant of `g` on a tensor grid of per-axis
// target coordinates (targets[axis] lists the coordinates along that axis).
// Returns values row-major over the target tensor grid.
std::vector<cplx> resample_tensor(const ComplexGrid& g,
                                  const std::vector<std::vector<double>>& targets);

using ProfileGrid = ComplexGrid;

// Physical box carrying the semiclassical parameter.
struct PhysicalGrid {
    BoxSpec box;
    double epsilon = 1.0;

    // dx small enough for the sqrt(eps) envelope and the p-oscillation
    bool resolution_ok(double p_max) const {
        double want = std::min(std::sqrt(epsilon) / 8.0, epsilon / (4.0 * std::max(p_max, 1e-12)));
        return box.dx() <= want;
    }
};

// Two-component wavefunction on a physical box.
struct Field2 {
    PhysicalGrid grid;
    ComplexGrid c1, c2;

    Field2() = default;
    explicit Field2(const PhysicalGrid& g) : grid(g), c1(g.box), c2(g.box) {}
    double mass() const { return c1.mass() + c2.mass(); }
    double boundary_mass_fraction() const;
};

double l2_distance(const Field2& a, const Field2& b);
double l2_distance(const ComplexGrid& a, const ComplexGrid& b);

} // namespace coniwave

#endif
