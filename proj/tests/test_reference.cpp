#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "coniwave/reference.hpp"

using namespace coniwave;
using namespace std::complex_literals;

namespace {

Vec vec2(double a, double b) {
    Vec x(2);
    x << a, b;
    return x;
}

PotentialModel const_model(double v0, double w1, double w2) {
    QuadScalar v = QuadScalar::zero(2);
    v.c0 = v0;
    QuadScalar q1 = QuadScalar::zero(2);
    q1.c0 = w1;
    QuadScalar q2 = QuadScalar::zero(2);
    q2.c0 = w2;
    return PotentialModel(v, q1, q2, "const");
}

Field2 gaussian_field(const PhysicalGrid& grid, const Vec& q, const Vec& p, cplx amp1,
                      cplx amp2) {
    Field2 f(grid);
    std::vector<int> ix(2);
    double se = std::sqrt(grid.epsilon);
    for (std::size_t i = 0; i < f.c1.v.size(); ++i) {
        f.c1.unravel(i, ix.data());
        Vec x = vec2(grid.box.coord(ix[0]), grid.box.coord(ix[1]));
        Vec y = (x - q) / se;
        cplx val = std::pow(grid.epsilon, -0.5) / std::sqrt(M_PI) *
                   std::exp(-0.5 * y.squaredNorm()) *
                   std::exp(1i * p.dot(x - q) / grid.epsilon);
        f.c1.v[i] = amp1 * val;
        f.c2.v[i] = amp2 * val;
    }
    return f;
}

} // namespace

TEST_CASE("potential step: scalar phase, sign flip, unitarity") {
    PhysicalGrid grid{BoxSpec{2, 64, 1.0}, 0.05};

    // w = 0: pure scalar phase
    PotentialModel ms = const_model(0.7, 0.0, 0.0);
    Field2 f = gaussian_field(grid, vec2(0, 0), vec2(0, 0), 1.0, 0.5);
    Field2 g = f;
    double dt = 0.01;
    potential_half_step(ms, g, dt);
    cplx want = std::exp(-1i * (dt / grid.epsilon) * 0.7);
    double worst = 0;
    for (std::size_t i = 0; i < g.c1.v.size(); ++i) {
        worst = std::max(worst, std::abs(g.c1.v[i] - want * f.c1.v[i]));
        worst = std::max(worst, std::abs(g.c2.v[i] - want * f.c2.v[i]));
    }
    CHECK(worst < 1e-13);

    // v=0, w=(1,0), dt/eps = pi: exp(-i pi A) = -Id
    PotentialModel mf = const_model(0.0, 1.0, 0.0);
    Field2 h = f;
    potential_half_step(mf, h, M_PI * grid.epsilon);
    worst = 0;
    for (std::size_t i = 0; i < h.c1.v.size(); ++i) {
        worst = std::max(worst, std::abs(h.c1.v[i] + f.c1.v[i]));
        worst = std::max(worst, std::abs(h.c2.v[i] + f.c2.v[i]));
    }
    CHECK(worst < 1e-12);

    // pointwise unitarity on a generic model
    PotentialModel lin = linear_isotropic(2);
    Field2 u = gaussian_field(grid, vec2(0.2, -0.1), vec2(1, 0), 0.8, 0.6i);
    double m0 = u.mass();
    potential_half_step(lin, u, 0.013);
    CHECK(u.mass() == doctest::Approx(m0).epsilon(1e-13));
}

TEST_CASE("kinetic step: identity at dt=0, exact plane-wave phase, mass") {
    PhysicalGrid grid{BoxSpec{2, 64, 1.0}, 0.05};
    Field2 f = gaussian_field(grid, vec2(0, 0), vec2(0.5, 0), 1.0, 0.0);
    Field2 g = f;
    kinetic_step(g, 0.0);
    CHECK(l2_distance(f, g) < 1e-14);

    // single Fourier mode advances by exactly exp(-i dt eps k^2 / 2)
    Field2 pw(grid);
    double k = grid.box.wavenumber(3);
    for (std::size_t i = 0; i < pw.c1.v.size(); ++i) {
        std::vector<int> ix(2);
        pw.c1.unravel(i, ix.data());
        pw.c1.v[i] = std::exp(1i * k * grid.box.coord(ix[0]));
    }
    Field2 pw2 = pw;
    double dt = 0.02;
    kinetic_step(pw2, dt);
    cplx phase = std::exp(-1i * 0.5 * dt * grid.epsilon * k * k);
    double worst = 0;
    for (std::size_t i = 0; i < pw.c1.v.size(); ++i)
        worst = std::max(worst, std::abs(pw2.c1.v[i] - phase * pw.c1.v[i]));
    CHECK(worst < 1e-12);

    double m0 = f.mass();
    kinetic_step(f, 0.37);
    CHECK(f.mass() == doctest::Approx(m0).epsilon(1e-13));
}

TEST_CASE("constant V: split-step reproduces the closed form") {
    PhysicalGrid grid{BoxSpec{2, 128, 1.0}, 0.05};
    PotentialModel m = const_model(0.3, 0.4, -0.2);
    Field2 f0 = gaussian_field(grid, vec2(0, 0), vec2(0.6, 0.2), 1.0, 0.4 + 0.2i);
    double T = 0.1;
    Field2 num = propagate_reference(m, f0, 0.0, T, grid.epsilon / 10.0);

    // exact: kinetic multiplier then the constant matrix exponential
    Field2 ref = f0;
    kinetic_step(ref, T);
    potential_half_step(m, ref, T);
    CHECK(l2_distance(num, ref) < 1e-10);
    CHECK(num.mass() == doctest::Approx(f0.mass()).epsilon(1e-12));
}

TEST_CASE("Strang splitting is second order in dt") {
    PhysicalGrid grid{BoxSpec{2, 128, 1.2}, 0.05};
    PotentialModel lin = linear_isotropic(2);
    Field2 f0 = gaussian_field(grid, vec2(0.4, 0.1), vec2(-0.5, 0.3), 1.0, 0.0);
    double T = 0.05;
    Field2 fine = propagate_reference(lin, f0, 0.0, T, T / 512.0);
    double e1 = l2_distance(propagate_reference(lin, f0, 0.0, T, T / 32.0), fine);
    double e2 = l2_distance(propagate_reference(lin, f0, 0.0, T, T / 64.0), fine);
    double order = std::log2(e1 / e2);
    CHECK(order > 1.8);
    CHECK(order < 2.2);
}

TEST_CASE("mode masses of projected and mixed fields") {
    PhysicalGrid grid{BoxSpec{2, 64, 1.0}, 0.05};
    PotentialModel lin = linear_isotropic(2);

    Field2 minus_only(grid), mixed(grid);
    std::vector<int> ix(2);
    for (std::size_t i = 0; i < minus_only.c1.v.size(); ++i) {
        minus_only.c1.unravel(i, ix.data());
        Vec x = vec2(grid.box.coord(ix[0]), grid.box.coord(ix[1]));
        double f = std::exp(-4.0 * x.squaredNorm());
        if (x.norm() < 1e-9) continue;
        EigenData e = eigen_at(lin, x);
        Vec2 ym = e.pi_minus.col(0).norm() > 0.5 ? e.pi_minus.col(0).normalized()
                                                 : e.pi_minus.col(1).normalized();
        Vec2 yp = e.pi_plus.col(0).norm() > 0.5 ? e.pi_plus.col(0).normalized()
                                                : e.pi_plus.col(1).normalized();
        minus_only.c1.v[i] = f * ym(0);
        minus_only.c2.v[i] = f * ym(1);
        Vec2 eq = (ym + yp) / std::sqrt(2.0);
        mixed.c1.v[i] = f * eq(0);
        mixed.c2.v[i] = f * eq(1);
    }
    auto [mp, mm] = mode_masses(lin, minus_only);
    double tot = minus_only.mass();
    CHECK(mp < 1e-12 * tot + 1e-15);
    CHECK(mm == doctest::Approx(tot).epsilon(1e-12));

    auto [mp2, mm2] = mode_masses(lin, mixed);
    double tot2 = mixed.mass();
    CHECK(mp2 == doctest::Approx(0.5 * tot2).epsilon(1e-10));
    CHECK(mm2 == doctest::Approx(0.5 * tot2).epsilon(1e-10));
    CHECK(mp2 + mm2 == doctest::Approx(tot2).epsilon(1e-12));
}

TEST_CASE("mass conservation over a longer run") {
    PhysicalGrid grid{BoxSpec{2, 128, 1.2}, 0.05};
    PotentialModel lin = linear_isotropic(2);
    Field2 f0 = gaussian_field(grid, vec2(-0.4, 0.0), vec2(0.8, 0.1), 1.0, 0.0);
    Field2 f1 = propagate_reference(lin, f0, 0.0, 0.5, grid.epsilon / 20.0);
    CHECK(std::abs(f1.mass() - f0.mass()) / 0.5 < 1e-9);
}
