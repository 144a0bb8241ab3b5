#include "coniwave/gaussian.hpp"

#include "coniwave/ode.hpp"

namespace coniwave {

namespace {
using VecC = Eigen::VectorXcd;
using MatC = Eigen::MatrixXcd;
} // namespace

GaussianParams evolve_gaussian(const QuadPath& path, const GaussianParams& g0,
                               double t0, double t1, double rtol) {
    int d = static_cast<int>(g0.A.rows());
    // state: Q (d^2), P (d^2), amp (1)
    auto pack = [d](const MatC& q, const MatC& p, cplx amp) {
        VecC y(2 * d * d + 1);
        for (int i = 0; i < d; ++i)
            for (int j = 0; j < d; ++j) {
                y(i * d + j) = q(i, j);
                y(d * d + i * d + j) = p(i, j);
            }
        y(2 * d * d) = amp;
        return y;
    };
    auto unpackQ = [d](const VecC& y, MatC& q, MatC& p) {
        for (int i = 0; i < d; ++i)
            for (int j = 0; j < d; ++j) {
                q(i, j) = y(i * d + j);
                p(i, j) = y(d * d + i * d + j);
            }
    };

    auto rhs = [&](double t, const VecC& y, VecC& dy) {
        MatC q(d, d), p(d, d);
        unpackQ(y, q, p);
        Mat w = path.W(t);
        Mat c = path.C ? path.C(t) : Mat::Zero(d, d);
        MatC qdot = c.cast<cplx>() * q + p;
        MatC pdot = -(w.cast<cplx>() * q) - c.transpose().cast<cplx>() * p;
        // amp follows det(Q)^{-1/2}: amp' = -amp (tr C + tr(P Q^{-1})) / 2
        cplx tr = c.trace() + (p * q.inverse()).trace();
        dy = pack(qdot, pdot, -0.5 * tr * y(2 * d * d));
    };

    MatC q0 = MatC::Identity(d, d);
    VecC y0 = pack(q0, g0.A, g0.amp);
    OdeOptions oo;
    oo.rtol = rtol;
    oo.atol = 1e-14;
    Dopri5<VecC> stepper(rhs, oo);
    VecC y1 = stepper.integrate(t0, y0, t1);

    MatC q(d, d), p(d, d);
    unpackQ(y1, q, p);
    GaussianParams out;
    out.A = p * q.inverse();
    out.amp = y1(2 * d * d);
    return out;
}

ProfileGrid sample_gaussian(const BoxSpec& box, const GaussianParams& g) {
    ProfileGrid out(box);
    std::vector<int> ix(box.d);
    Vec y(box.d);
    for (std::size_t i = 0; i < out.v.size(); ++i) {
        out.unravel(i, ix.data());
        for (int ax = 0; ax < box.d; ++ax) y(ax) = box.coord(ix[ax]);
        cplx quad = y.cast<cplx>().dot(g.A * y.cast<cplx>());
        out.v[i] = g.amp * std::exp(cplx(0, 0.5) * quad);
    }
    return out;
}

QuadPath profile_quad_path(const PotentialModel& model, const Trajectory& traj) {
    QuadPath p;
    p.W = [&model, &traj](double t) {
        return model.hess_lambda(traj.at(t).q, traj.mode);
    };
    return p;
}

QuadPath compensated_quad_path(const PotentialModel& model, const Trajectory& traj,
                               const CrossingGeometry& geom) {
    int m = mode_sign(traj.mode);
    double tf = geom.t_flat;
    Mat gamma0 = geom.gamma0;
    QuadPath p;
    p.W = [&model, &traj, gamma0, m, tf](double t) {
        double tau = std::abs(t - tf);
        double g = m * ((t >= tf) ? 1.0 : -1.0) * std::log(tau);
        Mat mm = model.hess_lambda(traj.at(t).q, traj.mode) - (m / tau) * gamma0;
        return (mm + g * g * gamma0 * gamma0).eval();
    };
    p.C = [gamma0, m, tf](double t) {
        double tau = std::abs(t - tf);
        double g = m * ((t >= tf) ? 1.0 : -1.0) * std::log(tau);
        return (-g * gamma0).eval();
    };
    return p;
}

GaussianParams gaussian_ground_state(int d) {
    GaussianParams g;
    g.A = cplx(0, 1) * Eigen::MatrixXcd::Identity(d, d);
    g.amp = std::pow(M_PI, -0.25 * d);
    return g;
}

} // namespace coniwave
