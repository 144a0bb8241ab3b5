#include "coniwave/profile.hpp"

#include <cmath>

namespace coniwave {

namespace {

using namespace std::complex_literals;

double tau_of(const CrossingGeometry& geom, double t) { return std::abs(t - geom.t_flat); }

// antiderivatives in tau = |t - t_flat| of ln tau and ln^2 tau
double F_ln(double tau) { return tau > 0 ? tau * (std::log(tau) - 1.0) : 0.0; }
double F_ln2(double tau) {
    if (tau <= 0) return 0.0;
    double l = std::log(tau);
    return tau * (l * l - 2.0 * l + 2.0);
}

void check_boundary(const ProfileGrid& g, const ProfileEvolveOptions& opt) {
    double f = g.boundary_mass_fraction();
    if (f > opt.boundary_fatal)
        throw GridOverflow("profile evolution: boundary shell holds mass fraction " +
                           std::to_string(f));
}

void kinetic_full(ProfileGrid& g, double dt) {
    apply_fourier_multiplier(g, [dt](const Vec& k) {
        return std::exp(cplx(0.0, -0.5 * dt * k.squaredNorm()));
    });
}

} // namespace

void apply_quadratic_phase(ProfileGrid& g, const Mat& form, double c) {
    if (c == 0.0) return;
    g.scale_pointwise([&](const Vec& y) {
        return std::exp(cplx(0.0, 0.5 * c * y.dot(form * y)));
    });
}

void apply_rank1_dilation(ProfileGrid& g, const Vec& ghat, double mu) {
    if (mu == 1.0) return;
    // K_L(c1) K_U(b1) K_L(c2) K_U(b2) = diag(1/mu, mu) in the (ghat.y, ghat.D)
    // plane, with beta = -b: beta1 c1 = mu - 1, c2 = -c1/mu, beta2 = -mu beta1.
    double k = std::sqrt(std::abs(mu - 1.0));
    double s = (mu >= 1.0) ? 1.0 : -1.0;
    double c1 = s * k, beta1 = k;
    double c2 = -c1 / mu, beta2 = -mu * beta1;
    double b1 = -beta1, b2 = -beta2;

    auto pos_chirp = [&](double c) {
        if (c == 0.0) return;
        g.scale_pointwise([&](const Vec& y) {
            double u = ghat.dot(y);
            return std::exp(cplx(0.0, 0.5 * c * u * u));
        });
    };
    auto mom_chirp = [&](double b) {
        if (b == 0.0) return;
        apply_fourier_multiplier(g, [&](const Vec& kk) {
            double u = ghat.dot(kk);
            return std::exp(cplx(0.0, 0.5 * b * u * u));
        });
    };

    // operator order: rightmost factor first
    mom_chirp(b2);
    pos_chirp(c2);
    mom_chirp(b1);
    pos_chirp(c1);
}

HessianSplit hessian_at(const PotentialModel& model, const Trajectory& traj, double t) {
    HessianSplit hs;
    hs.mode = traj.mode;
    if (traj.crossing && std::abs(t - traj.crossing->t_flat) < 1e-14)
        throw AtCrossingTime("hessian_at: Hessian undefined at the crossing time");
    PhasePoint z = traj.at(t);
    hs.full = model.hess_lambda(z.q, traj.mode);
    hs.smooth = hs.full;
    if (traj.crossing) {
        double tau = std::abs(t - traj.crossing->t_flat);
        hs.singular = true;
        hs.coefficient = mode_sign(traj.mode) / tau;
        hs.smooth = hs.full - hs.coefficient * traj.crossing->gamma0;
    }
    return hs;
}

ProfileGrid evolve_profile(const PotentialModel& model, const Trajectory& traj,
                           const ProfileGrid& u, double t0, double t1,
                           const ProfileEvolveOptions& opt) {
    if (traj.crossing) {
        double tf = traj.crossing->t_flat;
        double lo = std::min(t0, t1), hi = std::max(t0, t1);
        if (lo < tf - 1e-12 && hi > tf + 1e-12)
            throw std::invalid_argument("evolve_profile: window straddles the crossing time");
        double gap = std::max(std::min(std::abs(t0 - tf), std::abs(t1 - tf)), 0.0);
        if (gap < 0.999 * opt.tau_switch && std::abs(t1 - t0) > 0)
            throw std::invalid_argument(
                "evolve_profile: window enters the compensated region around t_flat");
    }
    ProfileGrid g = u;
    g.mode = traj.mode;
    double dir = (t1 >= t0) ? 1.0 : -1.0;
    double t = t0;
    long steps = 0;
    while (dir * (t1 - t) > 1e-14) {
        double dt = dir * std::min(opt.dt, std::abs(t1 - t));
        // half potential exp(-i (dt/2) W y.y / 2), kinetic, half potential
        Mat w_first = model.hess_lambda(traj.at(t + 0.25 * dt).q, traj.mode);
        apply_quadratic_phase(g, w_first, -0.5 * dt);
        kinetic_full(g, dt);
        Mat w_second = model.hess_lambda(traj.at(t + 0.75 * dt).q, traj.mode);
        apply_quadratic_phase(g, w_second, -0.5 * dt);
        t += dt;
        if (++steps % 50 == 0) check_boundary(g, opt);
    }
    check_boundary(g, opt);
    g.time = t1;
    return g;
}

namespace {

// One Strang step of the compensated system over [ta, tb] (one side of t_flat).
struct CompensatedStepper {
    const PotentialModel* model;
    const Trajectory* traj;
    const CrossingGeometry* geom;
    int m;          // mode sign
    double s_dir;   // side of the window relative to t_flat
    Vec ghat;       // unit direction of range(Gamma0)
    double gam;     // nonzero eigenvalue of Gamma0 (0 for trivial compensation)

    Mat smooth_hessian(double t, double tau) const {
        PhasePoint z = traj->at(t);
        Mat h = model->hess_lambda(z.q, traj->mode);
        return h - (m / tau) * geom->gamma0;
    }

    void half_potential(ProfileGrid& g, double ta, double tb) const {
        double dt = tb - ta;
        double tmid = 0.5 * (ta + tb);
        // exp(-i dt M y.y / 2) exp(-i (int g^2) |Gamma0 y|^2 / 2)
        Mat m_mid = smooth_hessian(tmid, tau_of(*geom, tmid));
        Mat form = dt * m_mid;
        if (gam > 0.0) {
            double int_ln2 = s_dir * (F_ln2(tau_of(*geom, tb)) - F_ln2(tau_of(*geom, ta)));
            form += int_ln2 * gam * gam * ghat * ghat.transpose();  // Gamma0^2 piece
        }
        apply_quadratic_phase(g, form, -1.0);
    }

    void dilation(ProfileGrid& g, double ta, double tb) const {
        if (gam <= 0.0) return;
        double G = m * (F_ln(tau_of(*geom, tb)) - F_ln(tau_of(*geom, ta)));
        apply_rank1_dilation(g, ghat, std::exp(G * gam));
    }

    void step(ProfileGrid& g, double ta, double tb) const {
        double tm = 0.5 * (ta + tb);
        half_potential(g, ta, tm);
        dilation(g, ta, tm);
        kinetic_full(g, tb - ta);
        dilation(g, tm, tb);
        half_potential(g, tm, tb);
    }
};

std::vector<double> window_times(double t0, double t1, double tf,
                                 const ProfileEvolveOptions& opt) {
    // step endpoints from t0 to t1, geometric toward (or away from) tf
    std::vector<double> ts{t0};
    double dir = (t1 >= t0) ? 1.0 : -1.0;
    double t = t0;
    auto tau = [&](double x) { return std::abs(x - tf); };
    bool toward = tau(t1) < tau(t0);
    while (dir * (t1 - t) > 1e-15) {
        double step;
        if (toward) {
            double d = tau(t);
            step = std::min(opt.dt, (1.0 - opt.geo_shrink) * d);
            if (d <= opt.tau_floor * (1.0 + 1e-9)) step = d;  // final hop onto tf/t1
        } else {
            double d = std::max(tau(t), opt.tau_floor);
            step = std::min(opt.dt, (1.0 / opt.geo_shrink - 1.0) * d);
        }
        step = std::min(step, std::abs(t1 - t));
        if (step <= 1e-16) break;
        t += dir * step;
        ts.push_back(t);
    }
    ts.back() = t1;
    return ts;
}

} // namespace

ProfileGrid evolve_compensated(const PotentialModel& model, const Trajectory& traj,
                               const ProfileGrid& u, double t0, double t1,
                               const CrossingGeometry& geom,
                               const ProfileEvolveOptions& opt) {
    double tf = geom.t_flat;
    if ((t0 - tf) * (t1 - tf) < -1e-18)
        throw std::invalid_argument("evolve_compensated: window straddles t_flat");
    if (std::max(tau_of(geom, t0), tau_of(geom, t1)) > opt.tau_switch * (1.0 + 1e-9))
        throw std::invalid_argument("evolve_compensated: window exceeds tau_switch");

    int m = mode_sign(traj.mode);
    if (m == 0) throw std::invalid_argument("evolve_compensated: mode must be plus or minus");
    double side_point = (tau_of(geom, t0) > tau_of(geom, t1)) ? t0 : t1;
    double s_dir = (side_point >= tf) ? 1.0 : -1.0;

    // rank-one factorization of Gamma0 (conical geometry makes it rank one)
    Eigen::SelfAdjointEigenSolver<Mat> es(geom.gamma0);
    int d = static_cast<int>(geom.gamma0.rows());
    double gam = es.eigenvalues()(d - 1);
    Vec ghat = es.eigenvectors().col(d - 1);
    if (gam < 1e-14) gam = 0.0;

    ProfileGrid g = u;
    g.mode = traj.mode;
    // enter the compensated frame: v = exp(i m s_dir ln(tau) Gamma0 y.y / 2) u
    double tau0 = tau_of(geom, t0);
    if (tau0 > 1e-13 && gam > 0.0)
        apply_quadratic_phase(g, geom.gamma0, m * s_dir * std::log(tau0));

    CompensatedStepper st{&model, &traj, &geom, m, s_dir, ghat, gam};
    std::vector<double> ts = window_times(t0, t1, tf, opt);
    for (std::size_t k = 0; k + 1 < ts.size(); ++k) {
        st.step(g, ts[k], ts[k + 1]);
        if (k % 16 == 15) check_boundary(g, opt);
    }

    double tau1 = tau_of(geom, t1);
    if (tau1 > 1e-13 && gam > 0.0)
        apply_quadratic_phase(g, geom.gamma0, -m * s_dir * std::log(tau1));
    check_boundary(g, opt);
    g.time = t1;
    return g;
}

namespace {

ExtractResult extract_side(const PotentialModel& model, const Trajectory& traj,
                           const ProfileGrid& u, const CrossingGeometry& geom,
                           const ProfileEvolveOptions& opt, double s_dir) {
    double tf = geom.t_flat;
    double h = opt.h_extract;
    double t_a = tf + s_dir * h;
    ProfileGrid ua = evolve_compensated(model, traj, u, u.time, t_a, geom, opt);

    // compensated value at the offset, for the reported Cauchy residual
    int m = mode_sign(traj.mode);
    ProfileGrid ca = ua;
    apply_quadratic_phase(ca, geom.gamma0, m * s_dir * std::log(h));

    // geometric steps carry the compensated state onto t_flat itself
    ExtractResult res;
    res.u_in = evolve_compensated(model, traj, ua, t_a, tf, geom, opt);

    double diff2 = 0.0;
    for (std::size_t i = 0; i < ca.v.size(); ++i) diff2 += std::norm(res.u_in.v[i] - ca.v[i]);
    res.residual = std::sqrt(diff2 * ca.cell_volume());
    res.u_in.time = tf;
    res.u_in.mode = traj.mode;
    return res;
}

} // namespace

ExtractResult extract_incoming(const PotentialModel& model, const Trajectory& traj,
                               const ProfileGrid& u, const CrossingGeometry& geom,
                               const ProfileEvolveOptions& opt) {
    if (u.time >= geom.t_flat - 1e-15)
        throw std::invalid_argument("extract_incoming: profile must start before t_flat");
    return extract_side(model, traj, u, geom, opt, -1.0);
}

ExtractResult extract_outgoing(const PotentialModel& model, const Trajectory& traj,
                               const ProfileGrid& u, const CrossingGeometry& geom,
                               const ProfileEvolveOptions& opt) {
    if (u.time <= geom.t_flat + 1e-15)
        throw std::invalid_argument("extract_outgoing: profile must start after t_flat");
    return extract_side(model, traj, u, geom, opt, +1.0);
}

ProfileGrid launch_outgoing(const ProfileGrid& u_out, const CrossingGeometry& geom,
                            const PotentialModel& model, const Trajectory& traj,
                            double t1, const ProfileEvolveOptions& opt) {
    double tf = geom.t_flat;
    if (t1 <= tf) throw std::invalid_argument("launch_outgoing: t1 must follow t_flat");
    ProfileGrid g = u_out;
    g.time = tf;
    double t_edge = std::min(tf + opt.tau_switch, t1);
    g = evolve_compensated(model, traj, g, tf, t_edge, geom, opt);
    if (t1 > t_edge) g = evolve_profile(model, traj, g, t_edge, t1, opt);
    return g;
}

ProfileGrid make_gaussian_profile(const BoxSpec& box, const Vec& center,
                                  const Vec& poly_lin, double poly_const) {
    ProfileGrid g(box);
    double norm2 = 0.0;
    std::vector<int> ix(box.d);
    Vec y(box.d);
    for (std::size_t i = 0; i < g.v.size(); ++i) {
        g.unravel(i, ix.data());
        for (int ax = 0; ax < box.d; ++ax) y(ax) = box.coord(ix[ax]);
        Vec dy = y - center;
        double amp = poly_const + poly_lin.dot(dy);
        g.v[i] = amp * std::exp(-0.5 * dy.squaredNorm());
        norm2 += std::norm(g.v[i]);
    }
    double scale = 1.0 / std::sqrt(norm2 * g.cell_volume());
    for (cplx& z : g.v) z *= scale;
    return g;
}

} // namespace coniwave
