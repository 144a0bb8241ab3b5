#include "coniwave/runner.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <mutex>
#include <thread>

#include "coniwave/io.hpp"
#include "coniwave/landau_zener.hpp"

namespace coniwave {

namespace {

namespace fs = std::filesystem;
using namespace std::complex_literals;

AnsatzInit build_init(const InitialSpec& spec, const BoxSpec& profile_box) {
    AnsatzInit init;
    init.z0 = PhasePoint{spec.q0, spec.p0};
    init.profile = make_gaussian_profile(profile_box, spec.profile_center, spec.profile_poly);
    init.Y0_sign = spec.y0_sign;
    return init;
}

// box sized so the packets stay well inside for the whole run
double auto_box(const std::vector<const Trajectory*>& trajs, double t0, double T,
                double epsilon, double profile_extent) {
    double q_max = 0;
    for (const Trajectory* tr : trajs) {
        double lo = std::max(t0, tr->t_begin()), hi = std::min(t0 + T, tr->t_end());
        for (double t = lo; t <= hi + 1e-12; t += (hi - lo) / 64.0 + 1e-12) {
            PhasePoint z = tr->at(std::min(t, hi));
            q_max = std::max(q_max, z.q.cwiseAbs().maxCoeff());
        }
    }
    double margin = profile_extent * std::sqrt(epsilon) + 0.1;
    return std::ceil((q_max + margin) * 50.0) / 50.0;
}

double fit_slope(const std::vector<double>& eps, const std::vector<double>& err) {
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    int n = 0;
    for (std::size_t i = 0; i < eps.size(); ++i) {
        if (err[i] <= 0) continue;
        double x = std::log(eps[i]), y = std::log(err[i]);
        sx += x; sy += y; sxx += x * x; sxy += x * y;
        ++n;
    }
    if (n < 2) return 0.0;
    return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

// |gamma_eps| = | int a b ubar_minus u_plus e^{i theta} | for pair interference
double cross_term_magnitude(const CrossingAnsatz& ca) {
    if (!ca.in_plus) return 0.0;
    const CrossingGeometry& geom = ca.geom;
    const ProfileGrid& um = ca.u_in_minus;
    const ProfileGrid& up = ca.u_in_plus;
    TransferSpec spec{geom, ca.epsilon, ca.S_flat_minus, ca.S_flat_plus};
    double sq_r = std::sqrt(geom.r);
    std::vector<int> ix(um.box.d);
    Vec y(um.box.d);
    cplx acc(0, 0);
    for (std::size_t i = 0; i < um.v.size(); ++i) {
        um.unravel(i, ix.data());
        for (int ax = 0; ax < um.box.d; ++ax) y(ax) = um.box.coord(ix[ax]);
        Vec2 eta = eta_of(geom, y);
        double a = coeff_a(eta(1) / sq_r);
        cplx b = coeff_b(eta(1) / sq_r);
        acc += a * b * up.v[i] * std::conj(um.v[i]) *
               std::exp(1i * theta_eps(spec, eta));
    }
    return std::abs(acc) * um.cell_volume();
}

struct CrossingRun {
    EpsResult res;
    std::vector<std::vector<double>> mass_rows;  // per comparison time
    Field2 ref_T, app_T;
    bool have_fields = false;
};

CrossingRun crossing_run(const ExperimentConfig& cfg, double epsilon) {
    const PotentialModel& model = *cfg.model;
    BoxSpec pbox{cfg.dim, cfg.profile_n, cfg.profile_L};
    AnsatzInit init_m = build_init(cfg.init_minus, pbox);

    CrossingAnsatz ca;
    if (cfg.kind == RunKind::crossing_pair) {
        AnsatzInit init_p = build_init(*cfg.init_plus, pbox);
        ca = propagate_pair(model, init_m, init_p, cfg.t0, cfg.T, epsilon, cfg.profile_opt);
    } else {
        ca = propagate_ansatz(model, init_m, cfg.t0, cfg.T, epsilon, cfg.profile_opt);
    }

    CrossingRun out;
    EpsResult& r = out.res;
    r.epsilon = epsilon;
    r.delta = std::pow(epsilon, cfg.delta_exponent);
    r.t_flat = ca.geom.t_flat;

    std::vector<const Trajectory*> trajs{&ca.in_minus.traj, &ca.out_plus.traj,
                                         &ca.out_minus.traj};
    if (ca.in_plus) trajs.push_back(&ca.in_plus->traj);
    double L = cfg.phys_L > 0 ? cfg.phys_L
                              : auto_box(trajs, cfg.t0, cfg.T, epsilon, cfg.profile_L);
    r.box_L = L;
    PhysicalGrid grid{BoxSpec{cfg.dim, cfg.phys_n, L}, epsilon};
    double p_max = 0;
    for (const Trajectory* tr : trajs)
        for (const PhasePoint& z : tr->states)
            p_max = std::max(p_max, z.p.cwiseAbs().maxCoeff());
    r.resolution_ok = grid.resolution_ok(p_max);

    // reference solve from the assembled initial data
    Field2 psi0 = assemble_total(model, ca, cfg.t0, grid);
    double dt = epsilon / cfg.dt_factor;

    double t_end = cfg.t0 + cfg.T;
    double t_mid = std::min(ca.geom.t_flat + r.delta, t_end);
    std::vector<double> compare_times{cfg.t0};
    double t_pre = ca.geom.t_flat - r.delta;
    if (t_pre > cfg.t0 + 1e-9) compare_times.push_back(t_pre);
    if (t_mid > ca.geom.t_flat + 1e-9 && t_mid < t_end - 1e-9)
        compare_times.push_back(t_mid);
    compare_times.push_back(t_end);

    Field2 psi = psi0;
    double t_cur = cfg.t0;
    for (double tc : compare_times) {
        if (tc > t_cur) {
            psi = propagate_reference(model, psi, t_cur, tc, dt);
            t_cur = tc;
        }
        Field2 app = assemble_total(model, ca, tc, grid);
        double el2 = l2_distance(psi, app);
        auto [mp_ref, mm_ref] = mode_masses(model, psi);
        auto [mp_app, mm_app] = mode_masses(model, app);
        double s_plus = tc >= ca.geom.t_flat ? ca.out_plus.action.at(tc) : 0.0;
        double s_minus = tc >= ca.geom.t_flat ? ca.out_minus.action.at(tc)
                                              : ca.in_minus.action.at(tc);
        PhasePoint zp = tc >= ca.geom.t_flat ? ca.out_plus.traj.at(tc)
                                             : ca.in_minus.traj.at(tc);
        PhasePoint zm = tc >= ca.geom.t_flat ? ca.out_minus.traj.at(tc)
                                             : ca.in_minus.traj.at(tc);
        std::vector<double> row{tc,     mp_ref, mm_ref, mp_app,  mm_app,
                                s_plus, s_minus, el2};
        for (int ax = 0; ax < cfg.dim; ++ax) row.push_back(zp.q(ax));
        for (int ax = 0; ax < cfg.dim; ++ax) row.push_back(zm.q(ax));
        out.mass_rows.push_back(row);

        if (std::abs(tc - t_mid) < 1e-12 && tc > ca.geom.t_flat) r.err_l2_mid = el2;
        if (std::abs(tc - t_end) < 1e-12) {
            r.err_l2_T = el2;
            Field2 diff(grid);
            for (std::size_t i = 0; i < diff.c1.v.size(); ++i) {
                diff.c1.v[i] = psi.c1.v[i] - app.c1.v[i];
                diff.c2.v[i] = psi.c2.v[i] - app.c2.v[i];
            }
            r.err_sigma1_T = sigma_norm(diff, 1, epsilon);
            r.mass_plus_ref = mp_ref;
            r.mass_minus_ref = mm_ref;
            r.mass_plus_app = mp_app;
            r.mass_minus_app = mm_app;
            out.ref_T = psi;
            out.app_T = app;
            out.have_fields = true;
        }
    }

    auto [cp, cm] = wigner_masses(ca.in_plus ? &ca.u_in_plus : nullptr, ca.u_in_minus,
                                  ca.geom);
    r.c_plus = cp;
    r.c_minus = cm;
    r.cross_term = cross_term_magnitude(ca);
    return out;
}

CrossingRun adiabatic_run(const ExperimentConfig& cfg, double epsilon) {
    const PotentialModel& model = *cfg.model;
    BoxSpec pbox{cfg.dim, cfg.profile_n, cfg.profile_L};
    AnsatzInit init = build_init(cfg.init_minus, pbox);
    Mode mode = cfg.init_minus.mode;

    ModeAnsatz br = adiabatic_branch(model, init, mode, cfg.t0, cfg.T);

    CrossingRun out;
    EpsResult& r = out.res;
    r.epsilon = epsilon;
    r.delta = std::pow(epsilon, cfg.delta_exponent);

    std::vector<const Trajectory*> trajs{&br.traj};
    double L = cfg.phys_L > 0 ? cfg.phys_L
                              : auto_box(trajs, cfg.t0, cfg.T, epsilon, cfg.profile_L);
    r.box_L = L;
    PhysicalGrid grid{BoxSpec{cfg.dim, cfg.phys_n, L}, epsilon};
    double p_max = 0;
    for (const PhasePoint& z : br.traj.states)
        p_max = std::max(p_max, z.p.cwiseAbs().maxCoeff());
    r.resolution_ok = grid.resolution_ok(p_max);

    Field2 psi0 = assemble_adiabatic(model, br, cfg.t0, grid, epsilon, cfg.profile_opt);
    double dt = epsilon / cfg.dt_factor;
    double t_end = cfg.t0 + cfg.T;
    Field2 psi = propagate_reference(model, psi0, cfg.t0, t_end, dt);
    Field2 app = assemble_adiabatic(model, br, t_end, grid, epsilon, cfg.profile_opt);
    r.err_l2_T = l2_distance(psi, app);
    Field2 diff(grid);
    for (std::size_t i = 0; i < diff.c1.v.size(); ++i) {
        diff.c1.v[i] = psi.c1.v[i] - app.c1.v[i];
        diff.c2.v[i] = psi.c2.v[i] - app.c2.v[i];
    }
    r.err_sigma1_T = sigma_norm(diff, 1, epsilon);
    auto [mp, mm] = mode_masses(model, psi);
    r.mass_plus_ref = mp;
    r.mass_minus_ref = mm;
    auto [mpa, mma] = mode_masses(model, app);
    r.mass_plus_app = mpa;
    r.mass_minus_app = mma;
    out.ref_T = psi;
    out.app_T = app;
    out.have_fields = true;
    std::vector<double> row{t_end, mp, mm, mpa, mma, 0.0, br.action.at(t_end), r.err_l2_T};
    for (int ax = 0; ax < 2 * cfg.dim; ++ax) row.push_back(br.traj.at(t_end).q(ax % cfg.dim));
    out.mass_rows.push_back(row);
    return out;
}

std::vector<std::string> mass_header(int d) {
    std::vector<std::string> h{"t",      "mass_plus_ref",  "mass_minus_ref",
                               "mass_plus_app", "mass_minus_app", "S_plus",
                               "S_minus", "l2_error"};
    for (int ax = 0; ax < d; ++ax) h.push_back("q_plus_" + std::to_string(ax));
    for (int ax = 0; ax < d; ++ax) h.push_back("q_minus_" + std::to_string(ax));
    return h;
}

RunReport run_eps_list(const ExperimentConfig& cfg, const std::vector<double>& eps_list) {
    RunReport rep;
    rep.kind = cfg.kind;
    fs::create_directories(cfg.out_dir);

    std::vector<CrossingRun> runs(eps_list.size());
    auto work = [&](std::size_t i) {
        runs[i] = (cfg.kind == RunKind::adiabatic) ? adiabatic_run(cfg, eps_list[i])
                                                   : crossing_run(cfg, eps_list[i]);
    };
    if (cfg.threads > 1) {
        std::vector<std::thread> pool;
        std::size_t next = 0;
        std::mutex mtx;
        for (int t = 0; t < std::min<int>(cfg.threads, eps_list.size()); ++t)
            pool.emplace_back([&]() {
                for (;;) {
                    std::size_t i;
                    {
                        std::lock_guard<std::mutex> lock(mtx);
                        if (next >= eps_list.size()) return;
                        i = next++;
                    }
                    work(i);
                }
            });
        for (auto& th : pool) th.join();
    } else {
        for (std::size_t i = 0; i < eps_list.size(); ++i) work(i);
    }

    for (std::size_t i = 0; i < runs.size(); ++i) {
        rep.eps.push_back(runs[i].res);
        CsvWriter mcsv(cfg.out_dir + "/masses_eps" + std::to_string(i) + ".csv",
                       mass_header(cfg.dim));
        for (const auto& row : runs[i].mass_rows) mcsv.row(row);
        if (cfg.dump_fields && runs[i].have_fields) {
            dump_field(cfg.out_dir + "/field_ref_eps" + std::to_string(i), runs[i].ref_T,
                       cfg.t0 + cfg.T);
            dump_field(cfg.out_dir + "/field_app_eps" + std::to_string(i), runs[i].app_T,
                       cfg.t0 + cfg.T);
        }
    }

    CsvWriter ecsv(cfg.out_dir + "/errors.csv",
                   {"epsilon", "delta", "l2_T", "sigma1_T", "l2_after_crossing",
                    "mass_plus_ref", "mass_minus_ref", "c_plus", "c_minus", "cross_term",
                    "box_L", "resolution_ok"});
    std::vector<double> epsv, errv;
    for (const EpsResult& r : rep.eps) {
        ecsv.row({r.epsilon, r.delta, r.err_l2_T, r.err_sigma1_T, r.err_l2_mid,
                  r.mass_plus_ref, r.mass_minus_ref, r.c_plus, r.c_minus, r.cross_term,
                  r.box_L, r.resolution_ok ? 1.0 : 0.0});
        epsv.push_back(r.epsilon);
        errv.push_back(r.err_l2_T);
    }
    rep.fitted_slope = fit_slope(epsv, errv);
    rep.monotone = true;
    for (std::size_t i = 1; i < errv.size(); ++i)
        if (errv[i] >= errv[i - 1]) rep.monotone = false;  // eps descending: err must drop

    CsvWriter rcsv(cfg.out_dir + "/report.csv",
                   {"fitted_slope", "monotone", "n_eps", "beta_R"});
    rcsv.row({rep.fitted_slope, rep.monotone ? 1.0 : 0.0,
              static_cast<double>(rep.eps.size()), cfg.beta_R});
    return rep;
}

} // namespace

ModeAnsatz adiabatic_branch(const PotentialModel& model, const AnsatzInit& init, Mode mode,
                            double t0, double T, const FlowOptions& fopt) {
    ModeAnsatz br;
    br.mode = mode;
    br.traj = integrate_flow(model, mode, init.z0, t0, t0 + T, fopt);
    if (br.traj.crossing)
        throw std::invalid_argument(
            "adiabatic_branch: trajectory reaches the crossing set");
    br.action = action_along(model, br.traj);
    Vec2 y0 = initial_eigenvector(model, init.z0.q, mode, init.Y0_sign);
    br.frame = parallel_transport(model, br.traj, y0);
    br.profile_ref = init.profile;
    br.profile_ref.time = t0;
    br.profile_ref.mode = mode;
    br.t_lo = t0;
    br.t_hi = t0 + T;
    return br;
}

Field2 assemble_adiabatic(const PotentialModel& model, const ModeAnsatz& branch, double t,
                          const PhysicalGrid& grid, double epsilon,
                          const ProfileEvolveOptions& popt) {
    ProfileGrid u = (t > branch.profile_ref.time)
                        ? evolve_profile(model, branch.traj, branch.profile_ref,
                                         branch.profile_ref.time, t, popt)
                        : branch.profile_ref;
    PhasePoint z = branch.traj.at(t);
    double S = branch.action.at(t);
    ComplexGrid wp = wave_packet(grid, z, u);
    cplx phase = std::exp(1i * S / epsilon);
    Vec2 y = branch.frame.at(t);
    Field2 out(grid);
    for (std::size_t i = 0; i < wp.v.size(); ++i) {
        cplx val = phase * wp.v[i];
        out.c1.v[i] = y(0) * val;
        out.c2.v[i] = y(1) * val;
    }
    return out;
}

void lz_table(const ExperimentConfig& cfg) {
    fs::create_directories(cfg.out_dir);
    CsvWriter csv(cfg.out_dir + "/lz_table.csv",
                  {"eta2", "a", "re_b", "im_b", "unitarity", "oracle_prob", "discrepancy"});
    const LzTableSpec& lz = cfg.lz;
    long n = std::lround((lz.eta2_max - lz.eta2_min) / lz.eta2_step);
    for (long i = 0; i <= n; ++i) {
        double e2 = lz.eta2_min + i * lz.eta2_step;
        double a = coeff_a(e2);
        cplx b = coeff_b(e2);
        double unit = a * a + std::norm(b);
        Vec2 eta(0.0, e2 * std::sqrt(lz.r));
        Vec2c u0(std::exp(-1.0i * lambda_phase(-lz.s0, eta, lz.r)), 0.0);
        Vec2c u = lz_integrate(eta, lz.r, lz.s0, u0);
        double prob = std::norm(u(0));
        csv.row({e2, a, b.real(), b.imag(), unit, prob, prob - a * a});
    }
}

void classical_dump(const ExperimentConfig& cfg, bool eigenframe) {
    fs::create_directories(cfg.out_dir);
    const PotentialModel& model = *cfg.model;
    Mode mode = cfg.init_minus.mode;
    PhasePoint z0{cfg.init_minus.q0, cfg.init_minus.p0};
    Trajectory tr = integrate_flow(model, mode, z0, cfg.t0, cfg.t0 + cfg.T);
    ActionCurve ac = action_along(model, tr);

    std::vector<std::string> header{"t"};
    for (int ax = 0; ax < cfg.dim; ++ax) header.push_back("q" + std::to_string(ax));
    for (int ax = 0; ax < cfg.dim; ++ax) header.push_back("p" + std::to_string(ax));
    header.push_back("S");
    header.push_back("gap");
    CsvWriter csv(cfg.out_dir + "/trajectory.csv", header);

    double t_end = tr.t_end();
    long steps = 400;
    for (long i = 0; i <= steps; ++i) {
        double t = cfg.t0 + (t_end - cfg.t0) * i / steps;
        PhasePoint z = tr.at(t);
        std::vector<double> row{t};
        for (int ax = 0; ax < cfg.dim; ++ax) row.push_back(z.q(ax));
        for (int ax = 0; ax < cfg.dim; ++ax) row.push_back(z.p(ax));
        row.push_back(ac.at(t));
        row.push_back(model.gap(z.q));
        csv.row(row);
    }

    if (tr.crossing) {
        CsvWriter gcsv(cfg.out_dir + "/crossing.csv",
                       {"t_flat", "r", "omega_x", "omega_y"});
        gcsv.row({tr.crossing->t_flat, tr.crossing->r, tr.crossing->omega(0),
                  tr.crossing->omega(1)});
    }

    if (eigenframe) {
        Vec2 y0 = initial_eigenvector(model, z0.q, mode, cfg.init_minus.y0_sign);
        EigenframePath fr = parallel_transport(model, tr, y0);
        CsvWriter fcsv(cfg.out_dir + "/eigenframe.csv", {"t", "Y1", "Y2"});
        for (long i = 0; i <= steps; ++i) {
            double t = fr.times.front() +
                       (fr.times.back() - fr.times.front()) * i / steps;
            Vec2 y = fr.at(t);
            fcsv.row({t, y(0), y(1)});
        }
    }
}

void profile_diagnostics(const ExperimentConfig& cfg) {
    fs::create_directories(cfg.out_dir);
    const PotentialModel& model = *cfg.model;
    BoxSpec pbox{cfg.dim, cfg.profile_n, cfg.profile_L};
    AnsatzInit init = build_init(cfg.init_minus, pbox);
    Trajectory in = integrate_flow(model, Mode::minus, {init.z0.q, init.z0.p}, cfg.t0,
                                   cfg.t0 + cfg.T);
    if (!in.crossing) throw NoCrossing("profile-test: no crossing on the trajectory");
    const CrossingGeometry& geom = *in.crossing;
    const ProfileEvolveOptions& opt = cfg.profile_opt;
    double edge = geom.t_flat - opt.tau_switch;

    ProfileGrid u0 = init.profile;
    u0.time = cfg.t0;
    ProfileGrid at_edge = evolve_profile(model, in, u0, cfg.t0, edge, opt);

    CsvWriter csv(cfg.out_dir + "/profile_diag.csv",
                  {"tau", "cauchy_residual", "sigma1_u", "mass_drift"});
    double mass0 = at_edge.mass();
    ProfileGrid prev = at_edge;
    double prev_tau = opt.tau_switch;
    for (double tau = opt.tau_switch / 2; tau > 1.2e-4; tau *= 0.5) {
        ProfileGrid cur =
            evolve_compensated(model, in, prev, geom.t_flat - prev_tau,
                               geom.t_flat - tau, geom, opt);
        // compensated values for the Cauchy residual (ingoing minus frame)
        ProfileGrid ca = prev, cb = cur;
        apply_quadratic_phase(ca, geom.gamma0, std::log(prev_tau));
        apply_quadratic_phase(cb, geom.gamma0, std::log(tau));
        double res = l2_distance(ca, cb);
        double s1 = sigma_norm(cur, 1, 1.0);
        csv.row({tau, res, s1, cur.mass() - mass0});
        prev = cur;
        prev_tau = tau;
    }
}

RunReport run(const ExperimentConfig& cfg) {
    switch (cfg.kind) {
        case RunKind::lz_table: {
            lz_table(cfg);
            RunReport rep;
            rep.kind = cfg.kind;
            return rep;
        }
        case RunKind::classical_only: {
            classical_dump(cfg, false);
            RunReport rep;
            rep.kind = cfg.kind;
            return rep;
        }
        default:
            return run_eps_list(cfg, {cfg.epsilons.front()});
    }
}

RunReport sweep(const ExperimentConfig& cfg) {
    if (cfg.kind != RunKind::adiabatic && cfg.kind != RunKind::crossing_single &&
        cfg.kind != RunKind::crossing_pair)
        throw ConfigError("sweep: requires an adiabatic or crossing run kind");
    if (cfg.epsilons.size() < 3)
        throw ConfigError("sweep: need at least three epsilon values");
    return run_eps_list(cfg, cfg.epsilons);
}

} // namespace coniwave
