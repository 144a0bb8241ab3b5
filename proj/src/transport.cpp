#include "coniwave/transport.hpp"

#include <cmath>

namespace coniwave {

Vec2 rotate_quarter(const Vec2& v) { return Vec2(-v(1), v(0)); }

Vec2 EigenframePath::at(double t) const {
    if (times.size() == 1) return Y.front();
    auto it = std::upper_bound(times.begin(), times.end(), t);
    std::size_t k = (it == times.begin()) ? 0 : static_cast<std::size_t>(it - times.begin() - 1);
    k = std::min(k, times.size() - 2);
    double h = times[k + 1] - times[k];
    double th = (t - times[k]) / h;
    Vec2 y = hermite_interp<Vec2>(th, h, Y[k], dY[k], Y[k + 1], dY[k + 1]);
    return y / y.norm();  // the frame is a unit field
}

Mat2 b_matrix(const PotentialModel& model, Mode mode, const Vec& x, const Vec& xi) {
    if (mode == Mode::reference)
        throw std::invalid_argument("b_matrix: mode must be plus or minus");
    Vec2 wx = model.w(x);
    double n = wx.norm();
    if (n < kTolGap)
        throw OnCrossingSet("b_matrix: point lies on the crossing set");
    // xi.grad Pi_+ = -(xi.grad w ^ w) / (2|w|^3) A(w_perp)   (w_perp = (-w2, w1))
    Vec2 dwxi = model.dw(x) * xi;
    double wedge = dwxi(0) * wx(1) - dwxi(1) * wx(0);
    Mat2 grad_pi = -(wedge / (2.0 * n * n * n)) * trace_free(rotate_quarter(wx));
    EigenData e = eigen_at(model, x);
    if (mode == Mode::plus) return e.pi_minus * grad_pi * e.pi_plus;
    return -(e.pi_plus * grad_pi * e.pi_minus);
}

EigenframePath parallel_transport(const PotentialModel& model, const Trajectory& traj,
                                  const Vec2& Y0) {
    Mode mode = traj.mode;
    // An outgoing branch starts at the crossing point itself; transport begins at
    // the restart sample next to it.
    std::size_t k0 = 0;
    while (k0 + 1 < traj.times.size() && model.w(traj.states[k0].q).norm() < 1e-9) ++k0;
    const PhasePoint& z0 = traj.states[k0];
    EigenData e0 = eigen_at(model, z0.q);
    const Mat2& pi0 = (mode == Mode::plus) ? e0.pi_plus : e0.pi_minus;
    Vec2 y0 = Y0 / Y0.norm();
    if ((pi0 * y0 - y0).norm() > 1e-8)
        throw NotAnEigenvector("parallel_transport: Y0 is not a mode eigenvector at q(t0)");

    double t0 = traj.times[k0];
    double t1 = traj.t_end();
    if (traj.crossing && std::abs(traj.crossing->t_flat - t1) < 1e-12)
        t1 = traj.crossing->t_flat - 1e-9;

    auto rhs = [&](double t, const Vec& y, Vec& dy) {
        PhasePoint z = traj.at(t);
        Mat2 b = b_matrix(model, mode, z.q, z.p);
        Vec2 v(y(0), y(1));
        Vec2 dv = b * v;
        dy.resize(2);
        dy << dv(0), dv(1);
    };

    EigenframePath frame;
    frame.mode = mode;
    Vec v0(2);
    v0 << y0(0), y0(1);
    Vec f0(2);
    rhs(t0, v0, f0);
    frame.times.push_back(t0);
    frame.Y.push_back(y0);
    frame.dY.push_back(Vec2(f0(0), f0(1)));

    OdeOptions oo;
    oo.rtol = 1e-12;
    oo.atol = 1e-14;
    oo.h_max = 0.005;
    oo.h_init = std::min(1e-4, std::abs(t1 - t0));
    Dopri5<Vec> stepper(rhs, oo);
    stepper.integrate(t0, v0, t1,
        [&](double, const Vec&, const Vec&, double tb, const Vec& yb, const Vec& fb) {
            // |Y| = 1 is exact for the continuous flow; strip the tiny drift the
            // interpolated trajectory feeds into B
            double n = std::hypot(yb(0), yb(1));
            frame.times.push_back(tb);
            frame.Y.push_back(Vec2(yb(0) / n, yb(1) / n));
            frame.dY.push_back(Vec2(fb(0) / n, fb(1) / n));
            return true;
        });
    return frame;
}

Vec2 crossing_limit(const EigenframePath& frame, const CrossingGeometry& geom) {
    double tf = geom.t_flat;
    double h = 1e-4;
    if (frame.times.back() < tf - 2.0 * h)
        throw NoCrossing("crossing_limit: frame does not reach the crossing time");
    // quadratic extrapolation from t_flat - {4h, 2h, h}
    Vec2 v = (1.0 / 3.0) * frame.at(tf - 4 * h) - 2.0 * frame.at(tf - 2 * h) +
             (8.0 / 3.0) * frame.at(tf - h);
    Mat2 proj = 0.5 * (Mat2::Identity() + trace_free(geom.omega));
    Vec2 vw = proj * v;
    double n = vw.norm();
    if (n < 0.5)
        throw NoCrossing("crossing_limit: extrapolated frame far from ker(A(omega) - Id)");
    vw /= n;
    if ((trace_free(geom.omega) * vw - vw).norm() > 1e-6)
        throw NoCrossing("crossing_limit: A(omega) eigenvector residual too large");
    return vw;
}

std::pair<Vec2, Vec2> outgoing_frames(const PotentialModel& model, const CrossingGeometry& geom,
                                      const Vec2& v_omega, double h_restart) {
    Vec2 v_perp = rotate_quarter(v_omega);
    double h = h_restart;
    Vec gv = model.grad_v(geom.q_flat);
    Vec dtw = geom.dw.transpose() * geom.omega;
    Vec q0 = geom.q_flat + h * geom.p_flat - 0.5 * h * h * gv;

    Vec q_plus = q0 - 0.5 * h * h * dtw;
    Vec q_minus = q0 + 0.5 * h * h * dtw;
    EigenData ep = eigen_at(model, q_plus);
    EigenData em = eigen_at(model, q_minus);
    Vec2 yp = ep.pi_plus * v_omega;
    Vec2 ym = em.pi_minus * v_perp;
    return {yp / yp.norm(), ym / ym.norm()};
}

int align_pair_signs(const EigenframePath& frame_minus, const EigenframePath& frame_plus,
                     const CrossingGeometry& geom) {
    Vec2 v_omega = crossing_limit(frame_minus, geom);
    double tf = geom.t_flat, h = 1e-4;
    Vec2 lim_plus = (1.0 / 3.0) * frame_plus.at(tf - 4 * h) - 2.0 * frame_plus.at(tf - 2 * h) +
                    (8.0 / 3.0) * frame_plus.at(tf - h);
    if (std::abs(lim_plus.dot(v_omega)) > 1e-6)
        throw CrossingMismatch("align_pair_signs: plus-frame limit not orthogonal to V_omega");
    return lim_plus.dot(rotate_quarter(v_omega)) >= 0.0 ? +1 : -1;
}

} // namespace coniwave
