#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "coniwave/gaussian.hpp"
#include "coniwave/profile.hpp"

using namespace coniwave;
using namespace std::complex_literals;

namespace {

Vec vec2(double a, double b) {
    Vec x(2);
    x << a, b;
    return x;
}

// v = const, w = const: all Hessians vanish -> free evolution
PotentialModel free_model() {
    QuadScalar v = QuadScalar::zero(2);
    QuadScalar w1 = QuadScalar::zero(2);
    w1.c0 = 1.0;
    return PotentialModel(v, w1, QuadScalar::zero(2), "free");
}

// v = |x|^2/2, w = const: Hess lambda = Id on every mode
PotentialModel harmonic_model() {
    QuadScalar v = QuadScalar::zero(2);
    v.H = Mat::Identity(2, 2);
    QuadScalar w1 = QuadScalar::zero(2);
    w1.c0 = 2.0;
    return PotentialModel(v, w1, QuadScalar::zero(2), "harmonic");
}

Trajectory still_trajectory(const PotentialModel& m, Mode mode, double t0, double t1) {
    PhasePoint z0{vec2(0, 0), vec2(0, 0)};
    return integrate_flow(m, mode, z0, t0, t1);
}

BoxSpec test_box(int d = 2, int n = 128, double L = 10.0) { return BoxSpec{d, n, L}; }

ProfileGrid unit_gaussian(const BoxSpec& box) {
    return make_gaussian_profile(box, Vec::Zero(box.d), Vec::Zero(box.d));
}

} // namespace

TEST_CASE("rank-1 dilation acts as an exact scaled evaluation") {
    BoxSpec box{1, 256, 12.0};
    Vec ghat(1);
    ghat << 1.0;
    for (double mu : {1.07, 0.93, 1.0005}) {
        ProfileGrid f(box);
        for (int i = 0; i < box.n; ++i) {
            double y = box.coord(i);
            f.v[i] = std::pow(M_PI, -0.25) * std::exp(-0.5 * y * y) *
                     std::exp(0.2i * y);  // add a mild chirp-free modulation
        }
        double mass0 = f.mass();
        ProfileGrid g = f;
        apply_rank1_dilation(g, ghat, mu);
        CHECK(g.mass() == doctest::Approx(mass0).epsilon(1e-12));
        double worst = 0;
        for (int i = 0; i < box.n; ++i) {
            double y = box.coord(i);
            if (std::abs(y) > 8.0) continue;  // stay away from the periodic seam
            cplx want = std::sqrt(mu) * std::pow(M_PI, -0.25) *
                        std::exp(-0.5 * mu * mu * y * y) * std::exp(0.2i * mu * y);
            worst = std::max(worst, std::abs(g.v[i] - want));
        }
        CHECK(worst < 1e-9);
    }
}

TEST_CASE("rank-1 dilation along an oblique direction in 2d") {
    BoxSpec box = test_box(2, 128, 10.0);
    Vec ghat = vec2(0.6, 0.8);
    double mu = 1.04;
    ProfileGrid f = unit_gaussian(box);
    ProfileGrid g = f;
    apply_rank1_dilation(g, ghat, mu);
    CHECK(g.mass() == doctest::Approx(f.mass()).epsilon(1e-12));
    // direct formula: sqrt(mu) f(y + (mu-1)(g.y)g), f the normalized Gaussian
    double worst = 0;
    std::vector<int> ix(2);
    for (std::size_t i = 0; i < g.v.size(); ++i) {
        g.unravel(i, ix.data());
        Vec y = vec2(box.coord(ix[0]), box.coord(ix[1]));
        if (y.norm() > 6.0) continue;
        Vec ys = y + (mu - 1.0) * ghat.dot(y) * ghat;
        cplx want = std::sqrt(mu) * std::exp(-0.5 * ys.squaredNorm()) / std::sqrt(M_PI);
        worst = std::max(worst, std::abs(g.v[i] - want));
    }
    CHECK(worst < 1e-8);

    // composition property
    ProfileGrid h = f;
    apply_rank1_dilation(h, ghat, 1.02);
    apply_rank1_dilation(h, ghat, 1.04 / 1.02);
    CHECK(l2_distance(h, g) < 1e-9);
}

TEST_CASE("hessian split near the crossing") {
    PotentialModel lin = linear_isotropic(2);
    Trajectory in = integrate_flow(lin, Mode::minus, {vec2(-0.5, 0), vec2(1.25, 0)}, 0.0, 2.0);
    REQUIRE(in.crossing.has_value());
    const CrossingGeometry& g = *in.crossing;

    // |t - t_flat| Hess lambda_minus -> -Gamma0 on the axis
    for (double tau : {1e-2, 1e-3, 1e-4}) {
        HessianSplit hs = hessian_at(lin, in, g.t_flat - tau);
        CHECK(hs.singular);
        Mat scaled = tau * hs.full;
        CHECK((scaled + g.gamma0).norm() < 5.0 * tau);
        CHECK((hs.full - hs.full.transpose()).norm() < 1e-12);
        // the split reproduces the full Hessian
        CHECK((hs.smooth + hs.coefficient * g.gamma0 - hs.full).norm() < 1e-12);
    }
    CHECK_THROWS_AS(hessian_at(lin, in, g.t_flat), AtCrossingTime);

    // constant-gap region: no singular part, M = Hess v +- Hess|w|
    PotentialModel hm = harmonic_model();
    Trajectory tr = still_trajectory(hm, Mode::plus, 0.0, 1.0);
    HessianSplit hs = hessian_at(hm, tr, 0.5);
    CHECK(!hs.singular);
    CHECK((hs.smooth - Mat::Identity(2, 2)).norm() < 1e-12);
}

TEST_CASE("free evolution reproduces the Gaussian width law") {
    PotentialModel m = free_model();
    Trajectory tr = still_trajectory(m, Mode::minus, 0.0, 1.0);
    BoxSpec box = test_box();
    ProfileGrid u0 = unit_gaussian(box);
    ProfileGrid u1 = evolve_profile(m, tr, u0, 0.0, 1.0);
    CHECK(u1.mass() == doctest::Approx(u0.mass()).epsilon(1e-12));

    // closed form: A(t) = A0 (Id + t A0)^{-1}, A0 = i Id
    GaussianParams gp = gaussian_ground_state(2);
    cplx az = cplx(0, 1) / (1.0 + 1.0i);  // i/(1+it) at t=1
    GaussianParams want;
    want.A = az * Eigen::MatrixXcd::Identity(2, 2);
    want.amp = gp.amp / (1.0 + 1.0i);  // det(Q)^{-1/2} = (1+it)^{-d/2}, d=2
    ProfileGrid ref = sample_gaussian(box, want);
    CHECK(l2_distance(u1, ref) < 1e-7);

    // oracle route agrees with the closed form
    GaussianParams evolved = evolve_gaussian(profile_quad_path(m, tr), gp, 0.0, 1.0);
    CHECK((evolved.A - want.A).norm() < 1e-10);
    CHECK(std::abs(evolved.amp - want.amp) < 1e-10);
}

TEST_CASE("harmonic ground state only rotates its phase") {
    PotentialModel m = harmonic_model();
    Trajectory tr = still_trajectory(m, Mode::plus, 0.0, 1.0);
    BoxSpec box = test_box();
    ProfileGrid u0 = unit_gaussian(box);
    ProfileGrid u1 = evolve_profile(m, tr, u0, 0.0, 1.0);
    // u(t) = e^{-i d t / 2} u0 with d = 2
    double worst = 0;
    for (std::size_t i = 0; i < u1.v.size(); ++i)
        worst = std::max(worst, std::abs(u1.v[i] - std::exp(-1.0i) * u0.v[i]));
    CHECK(worst < 1e-6);

    // Riccati fixed point
    GaussianParams gp = gaussian_ground_state(2);
    GaussianParams ev = evolve_gaussian(profile_quad_path(m, tr), gp, 0.0, 1.0);
    CHECK((ev.A - gp.A).norm() < 1e-10);
}

TEST_CASE("grid vs Riccati on a time-dependent smooth Hessian path") {
    // harmonic well, moving center: Hess lambda_ref = Id but act on the plus mode
    // of a curved model for a genuinely time-dependent Hessian
    QuadScalar v = QuadScalar::zero(2);
    v.H << 0.6, 0.1, 0.1, 0.3;
    QuadScalar w1 = QuadScalar::zero(2);
    w1.c0 = 2.0;
    w1.g << 0.2, 0.0;
    QuadScalar w2 = QuadScalar::zero(2);
    w2.c0 = 0.0;
    w2.g << 0.0, 0.4;
    PotentialModel m(v, w1, w2, "smooth");
    PhasePoint z0{vec2(0.3, -0.2), vec2(0.4, 0.5)};
    Trajectory tr = integrate_flow(m, Mode::plus, z0, 0.0, 1.0);

    BoxSpec box = test_box();
    GaussianParams gp = gaussian_ground_state(2);
    ProfileGrid u0 = sample_gaussian(box, gp);
    ProfileGrid u1 = evolve_profile(m, tr, u0, 0.0, 1.0);
    GaussianParams ev = evolve_gaussian(profile_quad_path(m, tr), gp, 0.0, 1.0);
    ProfileGrid ref = sample_gaussian(box, ev);
    CHECK(l2_distance(u1, ref) < 1e-6);
    CHECK(u1.mass() == doctest::Approx(1.0).epsilon(1e-10));
}

TEST_CASE("compensated window agrees with the Riccati oracle through the log singularity") {
    PotentialModel lin = linear_isotropic(2);
    Trajectory in = integrate_flow(lin, Mode::minus, {vec2(-0.5, 0), vec2(1.25, 0)}, 0.0, 2.0);
    REQUIRE(in.crossing.has_value());
    const CrossingGeometry& g = *in.crossing;
    double tf = g.t_flat;
    ProfileEvolveOptions opt;
    opt.dt = 2.5e-4;
    double tw = tf - opt.tau_switch;
    double te = tf - 1e-6;

    BoxSpec box = test_box(2, 256, 10.0);
    GaussianParams gp = gaussian_ground_state(2);
    ProfileGrid u0 = sample_gaussian(box, gp);
    u0.time = tw;
    ProfileGrid u1 = evolve_compensated(lin, in, u0, tw, te, g, opt);
    CHECK(u1.mass() == doctest::Approx(1.0).epsilon(1e-9));

    // oracle: compensated-frame Gaussian from the same physical data
    int m = mode_sign(Mode::minus);
    double sdir = -1.0;
    GaussianParams v0 = gp;
    v0.A = gp.A + cplx(m * sdir * std::log(opt.tau_switch), 0.0) * g.gamma0.cast<cplx>();
    GaussianParams v1 = evolve_gaussian(compensated_quad_path(lin, in, g), v0, tw, te);
    GaussianParams u1_pred = v1;
    u1_pred.A = v1.A - cplx(m * sdir * std::log(1e-6), 0.0) * g.gamma0.cast<cplx>();
    ProfileGrid ref = sample_gaussian(box, u1_pred);
    CHECK(l2_distance(u1, ref) < 5e-6);
}

TEST_CASE("trivial compensation window reduces to the plain evolution") {
    PotentialModel m = harmonic_model();
    Trajectory tr = still_trajectory(m, Mode::plus, 0.0, 1.0);
    CrossingGeometry fake;
    fake.t_flat = 1.0;
    fake.q_flat = vec2(0, 0);
    fake.p_flat = vec2(1, 0);
    fake.dw = Mat2X::Zero(2, 2);
    fake.r = 1.0;
    fake.omega = Vec2(1, 0);
    fake.omega_perp = Vec2(0, 1);
    fake.gamma0 = Mat::Zero(2, 2);

    BoxSpec box = test_box();
    ProfileGrid u0 = unit_gaussian(box);
    ProfileGrid a = evolve_compensated(m, tr, u0, 0.96, 1.0, fake);
    ProfileGrid b = evolve_profile(m, tr, u0, 0.96, 1.0);
    CHECK(l2_distance(a, b) < 1e-8);
}

TEST_CASE("launch and reverse round-trip at the crossing (adjoint consistency)") {
    PotentialModel lin = linear_isotropic(2);
    Trajectory in = integrate_flow(lin, Mode::minus, {vec2(-0.5, 0), vec2(1.25, 0)}, 0.0, 2.0);
    const CrossingGeometry& g = *in.crossing;
    Trajectory out_m = continue_through_crossing(lin, in, Mode::minus, g.t_flat + 0.3);

    BoxSpec box = test_box(2, 256, 10.0);
    ProfileGrid u_out = unit_gaussian(box);
    u_out.mode = Mode::minus;

    ProfileEvolveOptions opt;
    opt.dt = 2.5e-4;
    double t1 = g.t_flat + opt.tau_switch;
    ProfileGrid w = launch_outgoing(u_out, g, lin, out_m, t1, opt);
    CHECK(w.mass() == doctest::Approx(1.0).epsilon(1e-9));

    // evolve the compensated system back onto t_flat; the endpoint value is the
    // out-profile again (launch is built from the adjoint propagator)
    ProfileGrid back = evolve_compensated(lin, out_m, w, t1, g.t_flat, g, opt);
    CHECK(l2_distance(back, u_out) < 1e-5);
    CHECK(back.mass() == doctest::Approx(1.0).epsilon(1e-9));

    // the extraction op lands on the same answer and reports a sane residual
    ExtractResult ex = extract_outgoing(lin, out_m, w, g, opt);
    CHECK(l2_distance(ex.u_in, u_out) < 2e-5);
    CHECK(ex.u_in.mass() == doctest::Approx(1.0).epsilon(1e-9));
    CHECK(ex.residual > 1e-5);   // the h-offset Cauchy gap is genuinely nonzero
    CHECK(ex.residual < 1e-2);
}

TEST_CASE("ingoing extraction shrinks with the h (1 + |ln h|) law") {
    PotentialModel lin = linear_isotropic(2);
    Trajectory in = integrate_flow(lin, Mode::minus, {vec2(-0.5, 0), vec2(1.25, 0)}, 0.0, 2.0);
    const CrossingGeometry& g = *in.crossing;
    ProfileEvolveOptions opt;
    double tw = g.t_flat - opt.tau_switch;

    BoxSpec box = test_box(2, 128, 10.0);
    ProfileGrid u0 = unit_gaussian(box);
    u0.time = tw;
    u0.mode = Mode::minus;

    // Cauchy residuals ||v(tf - h) - v(tf - h/2)|| for shrinking h
    std::vector<double> hs, res;
    for (double h : {4e-3, 2e-3, 1e-3, 5e-4, 2.5e-4, 1.25e-4}) {
        ProfileEvolveOptions o = opt;
        o.h_extract = h;
        ExtractResult r = extract_incoming(lin, in, u0, g, o);
        hs.push_back(h);
        res.push_back(r.residual);
        CHECK(r.u_in.mass() == doctest::Approx(1.0).epsilon(1e-3));
    }
    // fit res = C h^alpha |ln h|^3 (the log power matches the measured norm
    // growth stacking on the linear-log rate): alpha must be ~1
    int n = static_cast<int>(hs.size());
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (int i = 0; i < n; ++i) {
        double l = std::abs(std::log(hs[i]));
        double x = std::log(hs[i]);
        double y = std::log(res[i] / (l * l * l));
        sx += x; sy += y; sxx += x * x; sxy += x * y;
    }
    double alpha = (n * sxy - sx * sy) / (n * sxx - sx * sx);
    CHECK(alpha > 0.9);
    CHECK(alpha < 1.1);

    // with the cubic-log model the prefactor is stable at small h
    double c_lo = 1e30, c_hi = 0;
    for (int i = n - 3; i < n; ++i) {
        double l = std::abs(std::log(hs[i]));
        double c = res[i] / (hs[i] * l * l * l);
        c_lo = std::min(c_lo, c);
        c_hi = std::max(c_hi, c);
    }
    CHECK(c_hi / c_lo < 1.2);
}
