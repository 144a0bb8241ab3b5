#include "coniwave/reference.hpp"

#include <cmath>

namespace coniwave {

void potential_half_step(const PotentialModel& model, Field2& psi, double dt) {
    using namespace std::complex_literals;
    double theta = dt / psi.grid.epsilon;
    const BoxSpec& box = psi.grid.box;
    std::vector<int> ix(box.d);
    Vec x(box.d);
    for (std::size_t i = 0; i < psi.c1.v.size(); ++i) {
        psi.c1.unravel(i, ix.data());
        for (int ax = 0; ax < box.d; ++ax) x(ax) = box.coord(ix[ax]);
        double vx = model.v(x);
        Vec2 wx = model.w(x);
        double n = wx.norm();
        cplx scalar = std::exp(-1i * theta * vx);
        // exp(-i theta A(w)) = cos(theta |w|) Id - i sin(theta |w|) A(w)/|w|
        double cosw = std::cos(theta * n);
        double sincw = (n < 1e-12) ? theta : std::sin(theta * n) / n;  // series limit
        cplx a = psi.c1.v[i], b = psi.c2.v[i];
        cplx f = -1i * sincw;
        psi.c1.v[i] = scalar * (cosw * a + f * (wx(0) * a + wx(1) * b));
        psi.c2.v[i] = scalar * (cosw * b + f * (wx(1) * a - wx(0) * b));
    }
}

void kinetic_step(Field2& psi, double dt) {
    double c = 0.5 * dt * psi.grid.epsilon;
    auto mult = [c](const Vec& k) { return std::exp(cplx(0.0, -c * k.squaredNorm())); };
    apply_fourier_multiplier(psi.c1, mult);
    apply_fourier_multiplier(psi.c2, mult);
}

Field2 propagate_reference(const PotentialModel& model, const Field2& psi0, double t0,
                           double t1, double dt, const ReferenceOptions& opt) {
    if (t1 < t0) throw std::invalid_argument("propagate_reference: t1 < t0");
    Field2 psi = psi0;
    double span = t1 - t0;
    long n = std::max<long>(1, static_cast<long>(std::ceil(span / dt - 1e-12)));
    double h = span / n;
    // merged Strang sweep: V/2 (T V)^{n-1} T V/2
    potential_half_step(model, psi, 0.5 * h);
    for (long k = 0; k < n; ++k) {
        kinetic_step(psi, h);
        potential_half_step(model, psi, (k + 1 < n) ? h : 0.5 * h);
        if ((k + 1) % opt.check_every == 0) {
            double f = psi.boundary_mass_fraction();
            if (f > opt.boundary_fatal)
                throw GridOverflow("propagate_reference: boundary shell mass fraction " +
                                   std::to_string(f));
        }
    }
    double f = psi.boundary_mass_fraction();
    if (f > opt.boundary_fatal)
        throw GridOverflow("propagate_reference: boundary shell mass fraction " +
                           std::to_string(f));
    return psi;
}

std::pair<double, double> mode_masses(const PotentialModel& model, const Field2& psi) {
    const BoxSpec& box = psi.grid.box;
    std::vector<int> ix(box.d);
    Vec x(box.d);
    double mp = 0.0, mm = 0.0;
    for (std::size_t i = 0; i < psi.c1.v.size(); ++i) {
        psi.c1.unravel(i, ix.data());
        for (int ax = 0; ax < box.d; ++ax) x(ax) = box.coord(ix[ax]);
        Vec2 wx = model.w(x);
        double n = wx.norm();
        cplx a = psi.c1.v[i], b = psi.c2.v[i];
        if (n < kTolGap) {  // projector undefined on the crossing set; split evenly
            double half = 0.5 * (std::norm(a) + std::norm(b));
            mp += half;
            mm += half;
            continue;
        }
        Vec2 wh = wx / n;
        // Pi+- = (Id +- A(w-hat)) / 2
        cplx pa = 0.5 * ((1.0 + wh(0)) * a + wh(1) * b);
        cplx pb = 0.5 * (wh(1) * a + (1.0 - wh(0)) * b);
        mp += std::norm(pa) + std::norm(pb);
        cplx qa = a - pa, qb = b - pb;
        mm += std::norm(qa) + std::norm(qb);
    }
    double dv = psi.c1.cell_volume();
    return {mp * dv, mm * dv};
}

} // namespace coniwave
