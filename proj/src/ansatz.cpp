#include "coniwave/ansatz.hpp"

#include <cmath>

namespace coniwave {

using namespace std::complex_literals;

ComplexGrid wave_packet(const PhysicalGrid& grid, const PhasePoint& z,
                        const ProfileGrid& profile) {
    const BoxSpec& box = grid.box;
    int d = box.d;
    if (profile.box.d != d)
        throw std::invalid_argument("wave_packet: dimension mismatch");
    for (int ax = 0; ax < d; ++ax)
        if (std::abs(z.q(ax)) > box.L)
            throw OutOfBox("wave_packet: packet center outside the box");

    double se = std::sqrt(grid.epsilon);
    // per-axis y-targets (x - q)/sqrt(eps); the profile is a decaying function,
    // so points outside its box read zero rather than the periodic image
    std::vector<std::vector<double>> targets(d);
    std::vector<std::vector<char>> outside(d);
    for (int ax = 0; ax < d; ++ax) {
        targets[ax].resize(box.n);
        outside[ax].resize(box.n);
        for (int i = 0; i < box.n; ++i) {
            double y = (box.coord(i) - z.q(ax)) / se;
            outside[ax][i] = std::abs(y) >= profile.box.L ? 1 : 0;
            targets[ax][i] = outside[ax][i] ? 0.0 : y;
        }
    }
    std::vector<cplx> vals = resample_tensor(profile, targets);

    ComplexGrid out(box);
    double amp = std::pow(grid.epsilon, -0.25 * d);
    std::vector<int> ix(d);
    Vec x(d);
    for (std::size_t i = 0; i < out.v.size(); ++i) {
        out.unravel(i, ix.data());
        bool masked = false;
        for (int ax = 0; ax < d; ++ax) {
            x(ax) = box.coord(ix[ax]);
            if (outside[ax][ix[ax]]) masked = true;
        }
        if (masked) {
            out.v[i] = 0.0;
            continue;
        }
        double phase = z.p.dot(x - z.q) / grid.epsilon;
        out.v[i] = amp * std::exp(1i * phase) * vals[i];
    }

    double m_prof = profile.mass();
    double m_wp = out.mass();
    if (std::abs(m_wp - m_prof) > 1e-5 * std::max(m_prof, 1e-300))
        throw OutOfBox("wave_packet: profile does not fit the box (mass defect " +
                       std::to_string(m_wp - m_prof) + ")");
    return out;
}

Vec2 initial_eigenvector(const PotentialModel& model, const Vec& q0, Mode mode, double sign) {
    EigenData e = eigen_at(model, q0);
    const Mat2& pi = (mode == Mode::plus) ? e.pi_plus : e.pi_minus;
    Vec2 y = pi.col(0).norm() > 0.5 ? pi.col(0).normalized() : pi.col(1).normalized();
    if (y(0) < 0 || (y(0) == 0 && y(1) < 0)) y = -y;  // deterministic orientation
    return sign * y;
}

ProfileGrid profile_at(const PotentialModel& model, const CrossingAnsatz& ca,
                       const ModeAnsatz& branch, double t) {
    const ProfileEvolveOptions& opt = ca.profile_opt;
    double tf = ca.geom.t_flat;
    const ProfileGrid& ref = branch.profile_ref;
    double t_ref = ref.time;
    if (t < branch.t_lo - 1e-12 || t > branch.t_hi + 1e-12)
        throw std::invalid_argument("profile_at: time outside the branch window");

    bool outgoing = t_ref >= tf;
    if (outgoing) {
        // reference profile is the transfer output at t_flat
        if (t <= tf + 1e-14) return ref;
        return launch_outgoing(ref, ca.geom, model, branch.traj, t, opt);
    }
    // ingoing branch, reference at t0
    double edge = tf - opt.tau_switch;
    if (t <= edge + 1e-14) return evolve_profile(model, branch.traj, ref, t_ref, t, opt);
    ProfileGrid at_edge = evolve_profile(model, branch.traj, ref, t_ref, edge, opt);
    return evolve_compensated(model, branch.traj, at_edge, edge, t, ca.geom, opt);
}

Field2 assemble_single_mode(const PotentialModel& model, const CrossingAnsatz& ca,
                            const ModeAnsatz& branch, double t, const PhysicalGrid& grid) {
    ProfileGrid u = profile_at(model, ca, branch, t);
    PhasePoint z = branch.traj.at(t);
    double S = branch.action.at(t);
    ComplexGrid wp = wave_packet(grid, z, u);
    cplx phase = std::exp(1i * S / ca.epsilon);
    Vec2 y = branch.frame.at(t);
    Field2 out(grid);
    for (std::size_t i = 0; i < wp.v.size(); ++i) {
        cplx val = phase * wp.v[i];
        out.c1.v[i] = y(0) * val;
        out.c2.v[i] = y(1) * val;
    }
    return out;
}

Field2 assemble_total(const PotentialModel& model, const CrossingAnsatz& ca, double t,
                      const PhysicalGrid& grid) {
    double tf = ca.geom.t_flat;
    if (t < tf) {
        Field2 f = assemble_single_mode(model, ca, ca.in_minus, t, grid);
        if (ca.in_plus) {
            Field2 g = assemble_single_mode(model, ca, *ca.in_plus, t, grid);
            for (std::size_t i = 0; i < f.c1.v.size(); ++i) {
                f.c1.v[i] += g.c1.v[i];
                f.c2.v[i] += g.c2.v[i];
            }
        }
        return f;
    }
    Field2 f = assemble_single_mode(model, ca, ca.out_plus, t, grid);
    Field2 g = assemble_single_mode(model, ca, ca.out_minus, t, grid);
    for (std::size_t i = 0; i < f.c1.v.size(); ++i) {
        f.c1.v[i] += g.c1.v[i];
        f.c2.v[i] += g.c2.v[i];
    }
    return f;
}

namespace {

// shared tail of the single/pair pipelines: transfer at the crossing and the
// construction of both outgoing branches
void finish_outgoing(const PotentialModel& model, CrossingAnsatz& ca, double T,
                     const ProfileEvolveOptions& popt, const FlowOptions& fopt) {
    const CrossingGeometry& geom = ca.geom;

    TransferSpec spec;
    spec.geom = geom;
    spec.epsilon = ca.epsilon;
    spec.S_flat_minus = ca.S_flat_minus;
    spec.S_flat_plus = ca.S_flat_plus;
    auto outs = ca.in_plus ? transfer_pair(spec, ca.u_in_plus, ca.u_in_minus)
                           : transfer_single(spec, ca.u_in_minus);
    ca.u_out_plus = std::move(outs.first);
    ca.u_out_minus = std::move(outs.second);

    auto frames = outgoing_frames(model, geom, ca.v_omega, fopt.h_restart);

    ca.out_plus.mode = Mode::plus;
    ca.out_plus.traj = continue_through_crossing(model, ca.in_minus.traj, Mode::plus, T, fopt);
    ca.out_plus.action = action_along(model, ca.out_plus.traj);
    ca.out_plus.frame = parallel_transport(model, ca.out_plus.traj, frames.first);
    ca.out_plus.profile_ref = ca.u_out_plus;
    ca.out_plus.profile_ref.time = geom.t_flat;
    ca.out_plus.t_lo = geom.t_flat;
    ca.out_plus.t_hi = T;

    ca.out_minus.mode = Mode::minus;
    ca.out_minus.traj = continue_through_crossing(model, ca.in_minus.traj, Mode::minus, T, fopt);
    ca.out_minus.action = action_along(model, ca.out_minus.traj);
    ca.out_minus.frame = parallel_transport(model, ca.out_minus.traj, frames.second);
    ca.out_minus.profile_ref = ca.u_out_minus;
    ca.out_minus.profile_ref.time = geom.t_flat;
    ca.out_minus.t_lo = geom.t_flat;
    ca.out_minus.t_hi = T;
}

ModeAnsatz ingoing_branch(const PotentialModel& model, const AnsatzInit& init, Mode mode,
                          double t0, double T, const FlowOptions& fopt) {
    ModeAnsatz br;
    br.mode = mode;
    br.traj = integrate_flow(model, mode, init.z0, t0, t0 + T, fopt);
    if (!br.traj.crossing)
        throw NoCrossing("propagate_ansatz: trajectory does not reach the crossing set");
    br.action = action_along(model, br.traj);
    Vec2 y0 = initial_eigenvector(model, init.z0.q, mode, init.Y0_sign);
    br.frame = parallel_transport(model, br.traj, y0);
    br.profile_ref = init.profile;
    br.profile_ref.time = t0;
    br.profile_ref.mode = mode;
    br.t_lo = t0;
    br.t_hi = br.traj.crossing->t_flat;
    return br;
}

} // namespace

CrossingAnsatz propagate_ansatz(const PotentialModel& model, const AnsatzInit& init,
                                double t0, double T, double epsilon,
                                const ProfileEvolveOptions& popt, const FlowOptions& fopt) {
    CrossingAnsatz ca;
    ca.epsilon = epsilon;
    ca.delta = std::pow(epsilon, 5.0 / 14.0);
    ca.profile_opt = popt;

    ca.in_minus = ingoing_branch(model, init, Mode::minus, t0, T, fopt);
    ca.geom = *ca.in_minus.traj.crossing;
    ca.S_flat_minus = ca.in_minus.action.at(ca.geom.t_flat);
    ca.S_flat_plus = 0.0;
    ca.v_omega = crossing_limit(ca.in_minus.frame, ca.geom);

    double edge = ca.geom.t_flat - popt.tau_switch;
    ProfileGrid at_edge =
        evolve_profile(model, ca.in_minus.traj, ca.in_minus.profile_ref, t0, edge, popt);
    ExtractResult ex = extract_incoming(model, ca.in_minus.traj, at_edge, ca.geom, popt);
    ca.u_in_minus = std::move(ex.u_in);
    ca.extract_residual = ex.residual;

    finish_outgoing(model, ca, t0 + T, popt, fopt);
    return ca;
}

CrossingAnsatz propagate_pair(const PotentialModel& model, const AnsatzInit& init_minus,
                              const AnsatzInit& init_plus, double t0, double T,
                              double epsilon, const ProfileEvolveOptions& popt,
                              const FlowOptions& fopt) {
    CrossingAnsatz ca;
    ca.epsilon = epsilon;
    ca.delta = std::pow(epsilon, 5.0 / 14.0);
    ca.profile_opt = popt;

    ca.in_minus = ingoing_branch(model, init_minus, Mode::minus, t0, T, fopt);
    AnsatzInit plus = init_plus;
    ModeAnsatz in_plus = ingoing_branch(model, plus, Mode::plus, t0, T, fopt);

    const CrossingGeometry& gm = *ca.in_minus.traj.crossing;
    const CrossingGeometry& gp = *in_plus.traj.crossing;
    if (std::abs(gm.t_flat - gp.t_flat) > 1e-6 ||
        (gm.q_flat - gp.q_flat).norm() > 1e-6 || (gm.p_flat - gp.p_flat).norm() > 1e-6)
        throw CrossingMismatch("propagate_pair: branches meet the crossing set apart");

    ca.geom = gm;
    ca.S_flat_minus = ca.in_minus.action.at(ca.geom.t_flat);
    ca.S_flat_plus = in_plus.action.at(ca.geom.t_flat);
    ca.v_omega = crossing_limit(ca.in_minus.frame, ca.geom);

    // diabatic-basis alignment: the plus frame must reach +V_omega_perp
    ca.pair_sign = align_pair_signs(ca.in_minus.frame, in_plus.frame, ca.geom);
    if (ca.pair_sign < 0) {
        plus.Y0_sign = -plus.Y0_sign;
        for (cplx& z : plus.profile.v) z = -z;
        in_plus = ingoing_branch(model, plus, Mode::plus, t0, T, fopt);
    }
    ca.in_plus = std::move(in_plus);

    double edge = ca.geom.t_flat - popt.tau_switch;
    ProfileGrid um =
        evolve_profile(model, ca.in_minus.traj, ca.in_minus.profile_ref, t0, edge, popt);
    ExtractResult exm = extract_incoming(model, ca.in_minus.traj, um, ca.geom, popt);
    ca.u_in_minus = std::move(exm.u_in);
    ca.extract_residual = exm.residual;

    ProfileGrid up =
        evolve_profile(model, ca.in_plus->traj, ca.in_plus->profile_ref, t0, edge, popt);
    ExtractResult exp_ = extract_incoming(model, ca.in_plus->traj, up, ca.geom, popt);
    ca.u_in_plus = std::move(exp_.u_in);

    finish_outgoing(model, ca, t0 + T, popt, fopt);
    return ca;
}

double sigma_norm(const ComplexGrid& f, int k, double epsilon) {
    if (k < 0 || k > 2)
        throw std::invalid_argument("sigma_norm: grid-certified range is k <= 2");
    const BoxSpec& box = f.box;
    int d = box.d;
    double sup = 0.0;

    // enumerate derivative multi-indices beta with |beta| <= k
    std::vector<std::vector<int>> betas;
    std::vector<int> beta(d, 0);
    std::function<void(int, int)> gen = [&](int ax, int left) {
        if (ax == d) {
            betas.push_back(beta);
            return;
        }
        for (int b = 0; b <= left; ++b) {
            beta[ax] = b;
            gen(ax + 1, left - b);
        }
        beta[ax] = 0;
    };
    gen(0, k);

    std::vector<int> ix(d);
    for (const auto& bb : betas) {
        int nb = 0;
        for (int b : bb) nb += b;
        ComplexGrid der = f;
        if (nb > 0) {
            der.fft_forward();
            Vec kk(d);
            for (std::size_t i = 0; i < der.v.size(); ++i) {
                der.unravel(i, ix.data());
                cplx factor = 1.0;
                for (int ax = 0; ax < d; ++ax) {
                    double kv = box.wavenumber(ix[ax]);
                    for (int b = 0; b < bb[ax]; ++b) factor *= cplx(0.0, epsilon * kv);
                }
                der.v[i] *= factor;
            }
            der.fft_backward();
        }
        // moments x^alpha with |alpha| <= k - |beta|
        std::vector<std::vector<int>> alphas;
        std::vector<int> alpha(d, 0);
        std::function<void(int, int)> gen_a = [&](int ax, int left) {
            if (ax == d) {
                alphas.push_back(alpha);
                return;
            }
            for (int a = 0; a <= left; ++a) {
                alpha[ax] = a;
                gen_a(ax + 1, left - a);
            }
            alpha[ax] = 0;
        };
        gen_a(0, k - nb);
        for (const auto& aa : alphas) {
            double acc = 0.0;
            for (std::size_t i = 0; i < der.v.size(); ++i) {
                der.unravel(i, ix.data());
                double wgt = 1.0;
                for (int ax = 0; ax < d; ++ax) {
                    double xv = box.coord(ix[ax]);
                    for (int a = 0; a < aa[ax]; ++a) wgt *= xv;
                }
                acc += wgt * wgt * std::norm(der.v[i]);
            }
            sup = std::max(sup, std::sqrt(acc * der.cell_volume()));
        }
    }
    return sup;
}

double sigma_norm(const Field2& f, int k, double epsilon) {
    double a = sigma_norm(f.c1, k, epsilon);
    double b = sigma_norm(f.c2, k, epsilon);
    return std::sqrt(a * a + b * b);
}

std::pair<double, double> wigner_masses(const ProfileGrid* u_in_plus,
                                        const ProfileGrid& u_in_minus,
                                        const CrossingGeometry& geom) {
    const BoxSpec& box = u_in_minus.box;
    double sq_r = std::sqrt(geom.r);
    std::vector<int> ix(box.d);
    Vec y(box.d);
    double cp = 0, cm = 0;
    for (std::size_t i = 0; i < u_in_minus.v.size(); ++i) {
        u_in_minus.unravel(i, ix.data());
        for (int ax = 0; ax < box.d; ++ax) y(ax) = box.coord(ix[ax]);
        double eta2r = eta_of(geom, y)(1) / sq_r;
        double a2 = std::exp(-M_PI * eta2r * eta2r);  // a(eta2r)^2
        double mm = std::norm(u_in_minus.v[i]);
        double pp = u_in_plus ? std::norm(u_in_plus->v[i]) : 0.0;
        cp += a2 * mm + (1.0 - a2) * pp;
        cm += (1.0 - a2) * mm + a2 * pp;
    }
    double dv = u_in_minus.cell_volume();
    return {cp * dv, cm * dv};
}

} // namespace coniwave
