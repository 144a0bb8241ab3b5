// Acceptance suite: one numbered check per criterion, each printing a
// PASS/FAIL line with the measured numbers. Run all or a subset:
//   acceptance_tests [1 2 ...]
#include <cmath>
#include <complex>
#include <cstdarg>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "coniwave/ansatz.hpp"
#include "coniwave/gaussian.hpp"
#include "coniwave/io.hpp"
#include "coniwave/landau_zener.hpp"
#include "coniwave/runner.hpp"
#include "coniwave/special.hpp"

using namespace coniwave;
using namespace std::complex_literals;

namespace {

int g_failures = 0;

void report(int crit, bool pass, const std::string& detail) {
    std::printf("CRITERION %d: %s  %s\n", crit, pass ? "PASS" : "FAIL", detail.c_str());
    std::fflush(stdout);
    if (!pass) ++g_failures;
}

std::string fmt(const char* f, ...) {
    char buf[512];
    va_list ap;
    va_start(ap, f);
    std::vsnprintf(buf, sizeof(buf), f, ap);
    va_end(ap);
    return buf;
}

Vec vec2(double a, double b) {
    Vec x(2);
    x << a, b;
    return x;
}

double fit_loglog(const std::vector<double>& x, const std::vector<double>& y) {
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    int n = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        if (y[i] <= 0) continue;
        double lx = std::log(x[i]), ly = std::log(y[i]);
        sx += lx; sy += ly; sxx += lx * lx; sxy += lx * ly;
        ++n;
    }
    return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

// ---------------------------------------------------------------- criterion 1
void criterion_1() {
    double worst = 0.0;
    for (double e = -4.0; e <= 4.0 + 1e-12; e += 1e-3) {
        double u = coeff_a(e) * coeff_a(e) + std::norm(coeff_b(e));
        worst = std::max(worst, std::abs(u - 1.0));
    }
    report(1, worst <= 1e-12, fmt("max | |a|^2+|b|^2 - 1 | = %.3e (<= 1e-12)", worst));
}

// ---------------------------------------------------------------- criterion 2
void criterion_2() {
    double r = 1.0;
    bool pass = true;
    std::string detail;

    auto state_at = [&](double eta2, double s0) {
        Vec2 eta(0.0, eta2);
        Vec2c u0(std::exp(-1.0i * lambda_phase(-s0, eta, r)), 0.0);
        return lz_integrate(eta, r, s0, u0);
    };
    auto full_gap = [&](double eta2, double s0) {
        Vec2 eta(0.0, eta2);
        Vec2c u = state_at(eta2, s0);
        Mat2c S = scattering_matrix(eta2);
        Vec2c pred(S(1, 1) * std::exp(-1.0i * lambda_phase(s0, eta, r)),
                   S(0, 1) * std::exp(1.0i * lambda_phase(s0, eta, r)));
        return (u - pred).norm();
    };
    auto avg_gap = [&](double eta2, double s0) {
        double acc = 0;
        for (int k = 0; k < 5; ++k) acc += full_gap(eta2, s0 * (1.0 + 0.02 * k));
        return acc / 5;
    };

    std::vector<double> Rs, Ds;
    for (double eta2 : {0.5, 1.0, 2.0}) {
        double a2 = coeff_a(eta2) * coeff_a(eta2);
        double prob = std::norm(state_at(eta2, 200.0)(0));
        double disc = std::abs(prob - a2);
        double g200 = avg_gap(eta2, 200.0);
        double g400 = avg_gap(eta2, 400.0);
        bool ok = disc <= 0.01 && g400 < 0.75 * g200;
        pass = pass && ok;
        detail += fmt("[eta2=%.1f |P-a^2|=%.2e gap200=%.2e gap400=%.2e] ", eta2, disc,
                      g200, g400);
        Rs.push_back(1.0 + eta2);
        Ds.push_back(g200);
    }
    // the remainder's R-power, reported (the stated power is uncertain upstream)
    double p_fit = fit_loglog(Rs, Ds);
    detail += fmt("fitted R-power %.2f (reported)", p_fit);
    report(2, pass, detail);
}

// ---------------------------------------------------------------- criterion 3
void criterion_3() {
    PotentialModel lin = linear_isotropic(2);
    Trajectory in =
        integrate_flow(lin, Mode::minus, {vec2(-0.5, 0), vec2(1.25, 0)}, 0.0, 2.0);
    const CrossingGeometry& g = *in.crossing;
    Trajectory out_m = continue_through_crossing(lin, in, Mode::minus, g.t_flat + 0.25);
    ActionCurve am = action_along(lin, out_m);
    auto [ref, s0] = reference_frame(lin, g, g.t_flat - 0.25, g.t_flat + 0.25);

    std::vector<double> taus, err_w, err_s;
    for (double tau = 1e-4; tau <= 0.1 + 1e-12; tau *= 1.5) {
        double t = g.t_flat + tau;
        Vec2 w = lin.w(out_m.at(t).q);
        err_w.push_back((w - tau * g.r * g.omega).norm());
        err_s.push_back(std::abs(am.at(t) - s0.at(t) - g.r * tau * tau));
        taus.push_back(tau);
    }
    double slope_w = fit_loglog(taus, err_w);
    double slope_s = fit_loglog(taus, err_s);
    bool pass = slope_w >= 1.9 && slope_s >= 2.9;
    report(3, pass,
           fmt("|w(q(t)) - tau r omega| slope %.3f (>=1.9), action slope %.3f (>=2.9)",
               slope_w, slope_s));
}

// ---------------------------------------------------------------- criterion 4
void criterion_4() {
    PotentialModel lin = linear_isotropic(2);
    Trajectory in =
        integrate_flow(lin, Mode::minus, {vec2(-0.5, 0), vec2(1.25, 0)}, 0.0, 2.0);
    const CrossingGeometry& geom = *in.crossing;
    ProfileEvolveOptions opt;
    BoxSpec box{2, 256, 12.0};

    auto chain = [&](double dt) {
        ProfileEvolveOptions o = opt;
        o.dt = dt;
        double edge = geom.t_flat - o.tau_switch;
        ProfileGrid u = make_gaussian_profile(box, Vec::Zero(2), Vec::Zero(2));
        u.time = 0.0;
        u.mode = Mode::minus;
        u = evolve_profile(lin, in, u, 0.0, edge, o);
        double mass0 = u.mass();
        struct Row {
            double tau, res, sigma1;
        };
        std::vector<Row> rows;
        ProfileGrid prev = u;
        double prev_tau = o.tau_switch;
        double mass_end = mass0;
        for (int k = 1; k <= 8; ++k) {
            double tau = o.tau_switch / std::pow(2.0, k);
            ProfileGrid cur = evolve_compensated(lin, in, prev, geom.t_flat - prev_tau,
                                                 geom.t_flat - tau, geom, o);
            ProfileGrid ca = prev, cb = cur;
            apply_quadratic_phase(ca, geom.gamma0, std::log(prev_tau));
            apply_quadratic_phase(cb, geom.gamma0, std::log(tau));
            rows.push_back({tau, l2_distance(ca, cb), sigma_norm(cur, 1, 1.0)});
            mass_end = cur.mass();
            prev = cur;
            prev_tau = tau;
        }
        return std::make_tuple(rows, mass0, mass_end);
    };

    auto [rows, mass0, mass_end] = chain(opt.dt);

    // Cauchy rate: fit res = C tau^alpha |ln tau|^3; the criterion bounds alpha
    std::vector<double> taus, scaled;
    for (const auto& r : rows) {
        double l = std::abs(std::log(r.tau));
        taus.push_back(r.tau);
        scaled.push_back(r.res / (l * l * l));
    }
    double alpha = fit_loglog(taus, scaled);

    // Sigma^1 growth bounded by c (1 + |ln tau|), c stable under step halving
    auto fit_c = [](const std::vector<std::tuple<double, double>>& pts) {
        double c = 0;
        for (auto& [tau, s1] : pts) c += s1 / (1.0 + std::abs(std::log(tau)));
        return c / pts.size();
    };
    std::vector<std::tuple<double, double>> pts, pts_half;
    for (const auto& r : rows) pts.push_back({r.tau, r.sigma1});
    auto [rows_half, m0h, meh] = chain(opt.dt / 2);
    for (const auto& r : rows_half) pts_half.push_back({r.tau, r.sigma1});
    double c_full = fit_c(pts), c_half = fit_c(pts_half);
    double c_lo = 1e30, c_hi = 0;
    for (auto& [tau, s1] : pts) {
        double c = s1 / (1.0 + std::abs(std::log(tau)));
        c_lo = std::min(c_lo, c);
        c_hi = std::max(c_hi, c);
    }

    double window = opt.tau_switch;  // elapsed time of the singular chain
    double drift_rate = std::abs(mass_end - mass0) / window;

    bool pass = alpha >= 0.9 && c_hi / c_lo < 2.0 &&
                std::abs(c_full - c_half) / c_full < 0.15 && drift_rate <= 1e-10;
    report(4, pass,
           fmt("Cauchy poly exponent %.3f (>=0.9), Sigma1/c(1+|ln|) in [%.3f, %.3f], "
               "c stable to %.1f%%, mass drift %.2e/unit (<=1e-10)",
               alpha, c_lo, c_hi, 100.0 * std::abs(c_full - c_half) / c_full,
               drift_rate));
}

// ---------------------------------------------------------------- criterion 5
void criterion_5() {
    BoxSpec box{2, 128, 10.0};
    GaussianParams gp = gaussian_ground_state(2);
    double worst = 0;

    {  // free
        QuadScalar v = QuadScalar::zero(2);
        QuadScalar w1 = QuadScalar::zero(2);
        w1.c0 = 1.0;
        PotentialModel m(v, w1, QuadScalar::zero(2), "free");
        Trajectory tr = integrate_flow(m, Mode::minus, {vec2(0, 0), vec2(0, 0)}, 0, 1);
        ProfileGrid u = evolve_profile(m, tr, sample_gaussian(box, gp), 0.0, 1.0);
        GaussianParams ev = evolve_gaussian(profile_quad_path(m, tr), gp, 0.0, 1.0);
        worst = std::max(worst, l2_distance(u, sample_gaussian(box, ev)));
    }
    {  // harmonic
        QuadScalar v = QuadScalar::zero(2);
        v.H = Mat::Identity(2, 2);
        QuadScalar w1 = QuadScalar::zero(2);
        w1.c0 = 2.0;
        PotentialModel m(v, w1, QuadScalar::zero(2), "harmonic");
        Trajectory tr = integrate_flow(m, Mode::plus, {vec2(0, 0), vec2(0, 0)}, 0, 1);
        ProfileGrid u = evolve_profile(m, tr, sample_gaussian(box, gp), 0.0, 1.0);
        GaussianParams ev = evolve_gaussian(profile_quad_path(m, tr), gp, 0.0, 1.0);
        worst = std::max(worst, l2_distance(u, sample_gaussian(box, ev)));
    }
    {  // time-dependent smooth Hessian along a moving trajectory
        QuadScalar v = QuadScalar::zero(2);
        v.H << 0.6, 0.1, 0.1, 0.3;
        QuadScalar w1 = QuadScalar::zero(2);
        w1.c0 = 2.0;
        w1.g << 0.2, 0.0;
        QuadScalar w2 = QuadScalar::zero(2);
        w2.g << 0.0, 0.4;
        PotentialModel m(v, w1, w2, "smooth");
        Trajectory tr =
            integrate_flow(m, Mode::plus, {vec2(0.3, -0.2), vec2(0.4, 0.5)}, 0, 1);
        ProfileGrid u = evolve_profile(m, tr, sample_gaussian(box, gp), 0.0, 1.0);
        GaussianParams ev = evolve_gaussian(profile_quad_path(m, tr), gp, 0.0, 1.0);
        worst = std::max(worst, l2_distance(u, sample_gaussian(box, ev)));
    }
    report(5, worst <= 1e-6, fmt("max grid-vs-Riccati L2 distance %.3e (<= 1e-6)", worst));
}

// shared sweep configs ---------------------------------------------------------

ExperimentConfig crossing_config(const std::string& out) {
    ExperimentConfig cfg;
    cfg.kind = RunKind::crossing_single;
    cfg.t0 = 0.0;
    cfg.T = 0.8;
    cfg.epsilons = {0.02, 0.01, 0.005};
    cfg.out_dir = out;
    cfg.model = linear_isotropic(2);
    cfg.dim = 2;
    cfg.init_minus.q0 = vec2(-0.5, 0);
    cfg.init_minus.p0 = vec2(1.25, 0);
    cfg.init_minus.profile_center = Vec::Zero(2);
    cfg.init_minus.profile_poly = Vec::Zero(2);
    cfg.profile_n = 256;
    cfg.profile_L = 12.0;
    cfg.phys_n = 512;
    cfg.threads = 3;
    return cfg;
}

// ---------------------------------------------------------------- criterion 6
void criterion_6() {
    ExperimentConfig cfg;
    cfg.kind = RunKind::adiabatic;
    cfg.t0 = 0.0;
    cfg.T = 0.7;
    cfg.epsilons = {0.02, 0.01, 0.005};
    cfg.out_dir = "acceptance_out/adiabatic";
    Vec kappa = vec2(0.2, 0.0);
    Mat2X G(2, 2);
    G << 1, 0, 0, 1;
    cfg.model = tilted(kappa, G, Vec2(0.0, -1.0));  // crossing set at x = (0, 1)
    cfg.dim = 2;
    cfg.init_minus.q0 = vec2(-0.6, 0);
    cfg.init_minus.p0 = vec2(1.0, 0);
    cfg.init_minus.profile_center = Vec::Zero(2);
    cfg.init_minus.profile_poly = Vec::Zero(2);
    cfg.profile_n = 256;
    cfg.profile_L = 12.0;
    cfg.phys_n = 512;
    cfg.threads = 3;

    // premise: the gap stays >= 0.5 along the trajectory
    Trajectory tr = integrate_flow(*cfg.model, Mode::minus,
                                   {cfg.init_minus.q0, cfg.init_minus.p0}, 0.0, cfg.T);
    double min_gap = 1e30;
    for (double t = 0; t <= cfg.T; t += cfg.T / 200.0)
        min_gap = std::min(min_gap, cfg.model->gap(tr.at(t).q));

    RunReport rep = sweep(cfg);
    bool monotone = true;
    for (std::size_t i = 1; i < rep.eps.size(); ++i)
        if (rep.eps[i].err_l2_T >= rep.eps[i - 1].err_l2_T) monotone = false;
    bool pass = min_gap >= 0.5 && monotone && rep.fitted_slope >= 0.4;
    std::string detail = fmt("min gap %.2f, slope %.3f (>=0.4), errors", min_gap,
                             rep.fitted_slope);
    for (const EpsResult& r : rep.eps) detail += fmt(" %.4f", r.err_l2_T);
    report(6, pass, detail);
}

// ---------------------------------------------------------------- criterion 7
void criterion_7() {
    ExperimentConfig cfg = crossing_config("acceptance_out/crossing_single");
    RunReport rep = sweep(cfg);
    const EpsResult& fine = rep.eps.back();
    double mass_rel = std::abs(fine.mass_plus_ref - fine.c_plus) / fine.c_plus;
    bool monotone = true;
    for (std::size_t i = 1; i < rep.eps.size(); ++i)
        if (rep.eps[i].err_l2_T >= rep.eps[i - 1].err_l2_T) monotone = false;
    bool pass = mass_rel <= 0.05 && monotone;
    std::string detail =
        fmt("plus-mass ref %.4f vs integral %.4f (rel %.3f <= 0.05); L2(T)",
            fine.mass_plus_ref, fine.c_plus, mass_rel);
    for (const EpsResult& r : rep.eps) detail += fmt(" %.4f", r.err_l2_T);
    detail += monotone ? " strictly decreasing" : " NOT decreasing";
    report(7, pass, detail);
}

// ---------------------------------------------------------------- criterion 8
void criterion_8() {
    ExperimentConfig cfg = crossing_config("acceptance_out/crossing_pair");
    cfg.kind = RunKind::crossing_pair;
    InitialSpec plus;
    plus.q0 = vec2(-0.25, 0);
    plus.p0 = vec2(0.25, 0);
    plus.mode = Mode::plus;
    plus.profile_center = vec2(0.0, 0.8);
    plus.profile_poly = Vec::Zero(2);
    cfg.init_plus = plus;

    RunReport rep = sweep(cfg);
    const EpsResult& fine = rep.eps.back();
    double total = fine.c_plus + fine.c_minus;
    double dp = std::abs(fine.mass_plus_ref - fine.c_plus) / total;
    double dm = std::abs(fine.mass_minus_ref - fine.c_minus) / total;
    bool cross_decreasing = true;
    for (std::size_t i = 1; i < rep.eps.size(); ++i)
        if (rep.eps[i].cross_term >= rep.eps[i - 1].cross_term) cross_decreasing = false;
    bool pass = dp <= 0.05 && dm <= 0.05 && cross_decreasing;
    std::string detail = fmt(
        "mode masses ref (%.4f, %.4f) vs Wigner (%.4f, %.4f), rel (%.3f, %.3f); cross",
        fine.mass_plus_ref, fine.mass_minus_ref, fine.c_plus, fine.c_minus, dp, dm);
    for (const EpsResult& r : rep.eps) detail += fmt(" %.4f", r.cross_term);
    report(8, pass, detail);
}

// ---------------------------------------------------------------- criterion 9
void criterion_9() {
    // two runs of the criterion-7 configuration (its coarsest member keeps the
    // runtime sane; determinism is resolution-independent)
    ExperimentConfig cfg = crossing_config("acceptance_out/det_a");
    cfg.epsilons = {0.02};
    cfg.threads = 1;
    run(cfg);
    ExperimentConfig cfg2 = cfg;
    cfg2.out_dir = "acceptance_out/det_b";
    run(cfg2);

    auto slurp = [](const std::string& p) {
        std::ifstream f(p, std::ios::binary);
        std::stringstream ss;
        ss << f.rdbuf();
        return ss.str();
    };
    bool same = true;
    for (const char* name : {"/errors.csv", "/masses_eps0.csv", "/report.csv"}) {
        std::string a = slurp(cfg.out_dir + name);
        std::string b = slurp(cfg2.out_dir + name);
        if (a.empty() || a != b) same = false;
    }
    report(9, same, same ? "CSV outputs byte-identical across reruns"
                         : "CSV outputs differ between reruns");
}

} // namespace

int main(int argc, char** argv) {
    std::set<int> wanted;
    for (int i = 1; i < argc; ++i) wanted.insert(std::atoi(argv[i]));
    auto want = [&](int k) { return wanted.empty() || wanted.count(k); };

    void (*checks[])() = {criterion_1, criterion_2, criterion_3, criterion_4, criterion_5,
                          criterion_6, criterion_7, criterion_8, criterion_9};
    for (int k = 1; k <= 9; ++k) {
        if (!want(k)) continue;
        try {
            checks[k - 1]();
        } catch (const std::exception& e) {
            report(k, false, fmt("aborted: %s", e.what()));
        }
    }

    if (g_failures) std::printf("%d criterion(s) failed\n", g_failures);
    return g_failures == 0 ? 0 : 1;
}
