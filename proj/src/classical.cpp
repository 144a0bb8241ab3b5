#include "coniwave/classical.hpp"

#include <algorithm>
#include <cmath>

namespace coniwave {

namespace {

Vec pack(const PhasePoint& z) {
    Vec y(z.q.size() * 2);
    y << z.q, z.p;
    return y;
}

PhasePoint unpack(const Vec& y) {
    int d = static_cast<int>(y.size()) / 2;
    return {y.head(d), y.tail(d)};
}

// Mode gradient without the tol_gap guard; the flow integrator evaluates
// arbitrarily close to the crossing where the branch limit is still fine.
Vec grad_lambda_raw(const PotentialModel& model, const Vec& q, Mode mode) {
    Vec g = model.grad_v(q);
    int s = mode_sign(mode);
    if (s != 0) {
        Vec2 wq = model.w(q);
        double n = wq.norm();
        if (n > 0.0) g += s * model.dw(q).transpose() * (wq / n);
    }
    return g;
}

// RHS of the mode flow, qdot = p, pdot = -grad lambda.
struct FlowRhs {
    const PotentialModel* model;
    Mode mode;
    void operator()(double, const Vec& y, Vec& dy) const {
        int d = static_cast<int>(y.size()) / 2;
        dy.resize(2 * d);
        dy.head(d) = y.tail(d);
        dy.tail(d) = -grad_lambda_raw(*model, y.head(d), mode);
    }
};

double w_norm(const PotentialModel& model, const Vec& y) {
    int d = static_cast<int>(y.size()) / 2;
    return model.w(y.head(d)).norm();
}

// d/dt |w(q(t))|^2 / 2 = w . dw p
double gap_slope(const PotentialModel& model, const Vec& y) {
    int d = static_cast<int>(y.size()) / 2;
    Vec q = y.head(d), p = y.tail(d);
    return model.w(q).dot(model.dw(q) * p);
}

} // namespace

double hamiltonian(const PotentialModel& model, const PhasePoint& z, Mode m) {
    return 0.5 * z.p.squaredNorm() + model.lambda(z.q, m);
}

std::size_t Trajectory::locate(double t) const {
    auto it = std::upper_bound(times.begin(), times.end(), t);
    std::size_t k = (it == times.begin()) ? 0 : static_cast<std::size_t>(it - times.begin() - 1);
    return std::min(k, times.size() - 2);
}

PhasePoint Trajectory::at(double t) const {
    if (times.size() == 1) return states.front();
    std::size_t k = locate(t);
    double h = times[k + 1] - times[k];
    double th = (t - times[k]) / h;
    Vec y = hermite_interp(th, h, pack(states[k]), pack(derivs[k]),
                           pack(states[k + 1]), pack(derivs[k + 1]));
    return unpack(y);
}

PhasePoint Trajectory::deriv_at(double t) const {
    if (times.size() == 1) return derivs.front();
    std::size_t k = locate(t);
    double h = times[k + 1] - times[k];
    double th = (t - times[k]) / h;
    // derivative of the cubic Hermite interpolant
    Vec y0 = pack(states[k]), y1 = pack(states[k + 1]);
    Vec f0 = pack(derivs[k]), f1 = pack(derivs[k + 1]);
    double t2 = th * th;
    Vec dy = (6 * t2 - 6 * th) / h * y0 + (3 * t2 - 4 * th + 1) * f0 +
             (-6 * t2 + 6 * th) / h * y1 + (3 * t2 - 2 * th) * f1;
    return unpack(dy);
}

double ActionCurve::at(double t) const {
    if (times.size() == 1) return S.front();
    auto it = std::upper_bound(times.begin(), times.end(), t);
    std::size_t k = (it == times.begin()) ? 0 : static_cast<std::size_t>(it - times.begin() - 1);
    k = std::min(k, times.size() - 2);
    double h = times[k + 1] - times[k];
    double th = (t - times[k]) / h;
    double t2 = th * th, t3 = t2 * th;
    return (2 * t3 - 3 * t2 + 1) * S[k] + h * (t3 - 2 * t2 + th) * Sdot[k] +
           (-2 * t3 + 3 * t2) * S[k + 1] + h * (t3 - t2) * Sdot[k + 1];
}

namespace {

// Minimum of |w| over one accepted step, on the Hermite interpolant
// (golden-section search).
std::pair<double, double> step_gap_min(const PotentialModel& model, double ta, double tb,
                                       const Vec& ya, const Vec& fa, const Vec& yb,
                                       const Vec& fb) {
    double h = tb - ta;
    auto gap = [&](double th) {
        Vec y = hermite_interp(th, h, ya, fa, yb, fb);
        return w_norm(model, y);
    };
    double lo = 0.0, hi = 1.0;
    const double gr = 0.5 * (std::sqrt(5.0) - 1.0);
    double c = hi - gr * (hi - lo), d = lo + gr * (hi - lo);
    double fc = gap(c), fd = gap(d);
    for (int i = 0; i < 80 && (hi - lo) * std::abs(h) > 1e-13; ++i) {
        if (fc < fd) {
            hi = d; d = c; fd = fc;
            c = hi - gr * (hi - lo);
            fc = gap(c);
        } else {
            lo = c; c = d; fc = fd;
            d = lo + gr * (hi - lo);
            fd = gap(d);
        }
    }
    double th = 0.5 * (lo + hi);
    return {ta + th * h, gap(th)};
}

struct CrossingCandidate {
    double t = 0;
    Vec y;  // state at the last safe sample before the crossing
    double t_safe = 0;
};

} // namespace

Trajectory integrate_flow(const PotentialModel& model, Mode mode, const PhasePoint& z0,
                          double t0, double t1, const FlowOptions& opt) {
    if (mode != Mode::reference && model.w(z0.q).norm() < kTolGap)
        throw OnCrossingSet("integrate_flow: initial point lies on the crossing set");

    FlowRhs rhs{&model, mode};
    OdeOptions oo;
    oo.rtol = opt.rtol;
    oo.atol = opt.atol;
    oo.h_max = opt.h_max;
    oo.h_init = std::min(1e-4, std::abs(t1 - t0));

    Trajectory traj;
    traj.mode = mode;
    Vec y0 = pack(z0);
    Vec f0(y0.size());
    rhs(t0, y0, f0);
    traj.times.push_back(t0);
    traj.states.push_back(z0);
    traj.derivs.push_back(unpack(f0));

    std::optional<CrossingCandidate> cand;
    bool watch = (mode != Mode::reference) && (t1 > t0);
    // A restarted branch begins next to the crossing it just left; the monitor
    // arms once the gap has opened up.
    bool armed = watch && w_norm(model, y0) > 2.0 * opt.near_miss_gap;

    Dopri5<Vec> stepper(rhs, oo);
    stepper.integrate(t0, y0, t1,
        [&](double ta, const Vec& ya, const Vec& fa, double tb, const Vec& yb, const Vec& fb) {
            double wb = w_norm(model, yb);
            if (watch && !armed && wb > 2.0 * opt.near_miss_gap) armed = true;
            if (watch && armed) {
                double sa = gap_slope(model, ya), sb = gap_slope(model, yb);
                bool interior_min = (sa < 0.0 && sb > 0.0);
                double wm = wb;
                if (interior_min)
                    wm = std::min(wm, step_gap_min(model, ta, tb, ya, fa, yb, fb).second);
                if (wm < opt.near_miss_gap) {
                    cand = CrossingCandidate{ta, ya, ta};
                    return false;
                }
            }
            traj.times.push_back(tb);
            traj.states.push_back(unpack(yb));
            traj.derivs.push_back(unpack(fb));
            return true;
        });

    if (t1 < t0) {  // keep samples in increasing time order
        std::reverse(traj.times.begin(), traj.times.end());
        std::reverse(traj.states.begin(), traj.states.end());
        std::reverse(traj.derivs.begin(), traj.derivs.end());
    }
    if (!cand) return traj;

    // Polish t_flat by Newton on psi(t) = w . dw p (half the gap-squared slope),
    // re-integrating short arcs from the last safe sample.
    OdeOptions tight = oo;
    tight.rtol = 1e-12;
    tight.atol = 1e-14;
    Dopri5<Vec> fine(rhs, tight);
    double tf = cand->t;
    Vec ys = cand->y;
    double ts = cand->t_safe;
    Vec ycur;
    for (int it = 0; it < 12; ++it) {
        ycur = fine.integrate(ts, ys, tf);
        int d = model.dim();
        Vec q = ycur.head(d), p = ycur.tail(d);
        Vec2 wq = model.w(q);
        Mat2X dwq = model.dw(q);
        Vec2 e = dwq * p;
        double psi = wq.dot(e);
        // dpsi/dt = |dw p|^2 + w . d/dt(dw p); the second term vanishes at the crossing
        Vec pdot = -grad_lambda_raw(model, q, mode);
        Vec2 de = dwq * pdot;
        de(0) += p.dot(model.hess_w(0) * p);
        de(1) += p.dot(model.hess_w(1) * p);
        double dpsi = e.squaredNorm() + wq.dot(de);
        double step = -psi / dpsi;
        tf += step;
        if (std::abs(step) < 1e-13) break;
    }
    ycur = fine.integrate(ts, ys, tf);
    PhasePoint zf = unpack(ycur);
    double wmin = model.w(zf.q).norm();
    if (wmin >= opt.crossing_gap)
        throw NearMissCrossing("integrate_flow: trajectory grazes the crossing set (min gap " +
                               std::to_string(wmin) + ")");

    // Project q onto {w = 0}; the transverse residual is integration noise.
    for (int it = 0; it < 3; ++it) {
        Mat2X dwq = model.dw(zf.q);
        Vec2 wq = model.w(zf.q);
        Mat2 gram = dwq * dwq.transpose();
        zf.q -= dwq.transpose() * gram.ldlt().solve(wq);
    }

    CrossingGeometry geom = crossing_geometry(model, tf, zf);

    // Drop stored samples at or beyond t_flat, then append the crossing point with
    // the ingoing limit derivative (w-hat -> -omega).
    while (traj.times.size() > 1 && traj.times.back() >= tf - 1e-14) {
        traj.times.pop_back();
        traj.states.pop_back();
        traj.derivs.pop_back();
    }
    PhasePoint df;
    df.q = zf.p;
    df.p = -(model.grad_v(zf.q) - mode_sign(mode) * (geom.dw.transpose() * geom.omega));
    traj.times.push_back(tf);
    traj.states.push_back(zf);
    traj.derivs.push_back(df);
    traj.crossing = geom;
    return traj;
}

Trajectory continue_through_crossing(const PotentialModel& model, const Trajectory& traj_in,
                                     Mode out_mode, double t1, const FlowOptions& opt) {
    if (!traj_in.crossing)
        throw NoCrossing("continue_through_crossing: trajectory has no crossing");
    const CrossingGeometry& geom = *traj_in.crossing;
    double tf = geom.t_flat;
    double h = opt.h_restart;
    int m = mode_sign(out_mode);

    // Second-order Taylor restart (position to O(h^2), momentum to O(h)).
    Vec gv = model.grad_v(geom.q_flat);
    Vec dtw = geom.dw.transpose() * geom.omega;
    Vec q0 = geom.q_flat + h * geom.p_flat - 0.5 * h * h * gv;
    Vec p0 = geom.p_flat - h * gv;
    PhasePoint zr{q0 - m * 0.5 * h * h * dtw, p0 - m * h * dtw};

    Trajectory out = integrate_flow(model, out_mode, zr, tf + h, t1, opt);

    // Prepend the crossing point with the outgoing limit derivative (w-hat -> +omega).
    PhasePoint zf{geom.q_flat, geom.p_flat};
    PhasePoint df;
    df.q = geom.p_flat;
    df.p = -(gv + m * dtw);
    out.times.insert(out.times.begin(), tf);
    out.states.insert(out.states.begin(), zf);
    out.derivs.insert(out.derivs.begin(), df);
    if (!out.crossing) out.crossing = geom;
    return out;
}

Trajectory backward_from_crossing(const PotentialModel& model, const CrossingGeometry& geom,
                                  Mode in_mode, double t0, const FlowOptions& opt) {
    if (t0 >= geom.t_flat)
        throw std::invalid_argument("backward_from_crossing: t0 must precede t_flat");
    double h = opt.h_restart;
    int m = mode_sign(in_mode);
    Vec gv = model.grad_v(geom.q_flat);
    Vec dtw = geom.dw.transpose() * geom.omega;
    // Taylor state on the ingoing side, t = t_flat - h
    Vec q0 = geom.q_flat - h * geom.p_flat - 0.5 * h * h * gv;
    Vec p0 = geom.p_flat + h * gv;
    PhasePoint zr{q0 + m * 0.5 * h * h * dtw, p0 - m * h * dtw};

    Trajectory out = integrate_flow(model, in_mode, zr, geom.t_flat - h, t0, opt);
    out.mode = in_mode;
    PhasePoint zf{geom.q_flat, geom.p_flat};
    PhasePoint df;
    df.q = geom.p_flat;
    df.p = -(gv - m * dtw);  // ingoing limit, w-hat -> -omega
    out.times.push_back(geom.t_flat);
    out.states.push_back(zf);
    out.derivs.push_back(df);
    out.crossing = geom;
    return out;
}

ActionCurve action_along(const PotentialModel& model, const Trajectory& traj) {
    ActionCurve a;
    a.mode = traj.mode;
    a.times = traj.times;
    std::size_t n = traj.times.size();
    a.S.resize(n);
    a.Sdot.resize(n);
    double E = hamiltonian(model, traj.states.front(), traj.mode);
    for (std::size_t k = 0; k < n; ++k)
        a.Sdot[k] = traj.states[k].p.squaredNorm() - E;
    a.S[0] = 0.0;
    for (std::size_t k = 0; k + 1 < n; ++k) {
        double h = traj.times[k + 1] - traj.times[k];
        PhasePoint zm = traj.at(traj.times[k] + 0.5 * h);
        double fm = zm.p.squaredNorm() - E;
        a.S[k + 1] = a.S[k] + h / 6.0 * (a.Sdot[k] + 4.0 * fm + a.Sdot[k + 1]);
    }
    return a;
}

std::pair<Trajectory, ActionCurve> reference_frame(const PotentialModel& model,
                                                   const CrossingGeometry& geom,
                                                   double t0, double t1,
                                                   const FlowOptions& opt) {
    PhasePoint zf{geom.q_flat, geom.p_flat};
    double tf = geom.t_flat;

    auto single_point = [&](double t) {
        Trajectory tr;
        tr.mode = Mode::reference;
        tr.times = {t};
        tr.states = {zf};
        PhasePoint df;
        df.q = zf.p;
        df.p = -model.grad_v(zf.q);
        tr.derivs = {df};
        return tr;
    };

    Trajectory merged;
    merged.mode = Mode::reference;
    if (t0 > tf || t1 < tf)
        throw std::invalid_argument("reference_frame: [t0,t1] must contain t_flat");

    if (t0 < tf) {
        merged = integrate_flow(model, Mode::reference, zf, tf, t0, opt);
        merged.mode = Mode::reference;
    } else {
        merged = single_point(tf);
    }
    if (t1 > tf) {
        Trajectory fwd = integrate_flow(model, Mode::reference, zf, tf, t1, opt);
        for (std::size_t i = 1; i < fwd.times.size(); ++i) {
            merged.times.push_back(fwd.times[i]);
            merged.states.push_back(fwd.states[i]);
            merged.derivs.push_back(fwd.derivs[i]);
        }
    }

    ActionCurve s0;
    s0.mode = Mode::reference;
    s0.times = merged.times;
    std::size_t n = merged.times.size();
    s0.S.resize(n);
    s0.Sdot.resize(n);
    double E = hamiltonian(model, zf, Mode::reference);
    for (std::size_t k = 0; k < n; ++k)
        s0.Sdot[k] = merged.states[k].p.squaredNorm() - E;
    // anchor S = 0 at t_flat, accumulate outward
    std::size_t kf = 0;
    for (std::size_t k = 0; k < n; ++k)
        if (std::abs(merged.times[k] - tf) < 1e-14) kf = k;
    s0.S[kf] = 0.0;
    for (std::size_t k = kf; k + 1 < n; ++k) {
        double h = merged.times[k + 1] - merged.times[k];
        PhasePoint zm = merged.at(merged.times[k] + 0.5 * h);
        double fm = zm.p.squaredNorm() - E;
        s0.S[k + 1] = s0.S[k] + h / 6.0 * (s0.Sdot[k] + 4.0 * fm + s0.Sdot[k + 1]);
    }
    for (std::size_t k = kf; k-- > 0;) {
        double h = merged.times[k + 1] - merged.times[k];
        PhasePoint zm = merged.at(merged.times[k] + 0.5 * h);
        double fm = zm.p.squaredNorm() - E;
        s0.S[k] = s0.S[k + 1] - h / 6.0 * (s0.Sdot[k] + 4.0 * fm + s0.Sdot[k + 1]);
    }
    return {merged, s0};
}

} // namespace coniwave
