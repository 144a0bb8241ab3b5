#ifndef CONIWAVE_ODE_HPP
#define CONIWAVE_ODE_HPP

#include <algorithm>
#include <cmath>
#include <complex>
#include <functional>
#include <limits>
#include <vector>

#include "coniwave/errors.hpp"

namespace coniwave {

struct OdeOptions {
    double rtol = 1e-10;
    double atol = 1e-12;
    double h_init = 1e-4;
    double h_max = std::numeric_limits<double>::infinity();
    long max_steps = 5'000'000;
};

// Cubic Hermite interpolant on one step, using the ODE right-hand side at the
// endpoints. theta in [0,1].
template <class VecT>
VecT hermite_interp(double theta, double h, const VecT& y0, const VecT& f0,
                    const VecT& y1, const VecT& f1) {
    double t2 = theta * theta, t3 = t2 * theta;
    return (2 * t3 - 3 * t2 + 1) * y0 + (h * (t3 - 2 * t2 + theta)) * f0 +
           (-2 * t3 + 3 * t2) * y1 + (h * (t3 - t2)) * f1;
}

// Adaptive Dormand-Prince 5(4). RHS signature: f(t, y, dydt).
// The observer sees every accepted step and may return false to halt.
template <class VecT>
class Dopri5 {
public:
    using Rhs = std::function<void(double, const VecT&, VecT&)>;
    using Observer = std::function<bool(double t0, const VecT& y0, const VecT& f0,
                                        double t1, const VecT& y1, const VecT& f1)>;

    Dopri5(Rhs rhs, OdeOptions opt = {}) : rhs_(std::move(rhs)), opt_(opt) {}

    // Integrates from (t0, y0) to t1 (either direction). Returns the state at the
    // final time reached (t1, or the observer's halt step endpoint).
    VecT integrate(double t0, const VecT& y0, double t1, Observer obs = nullptr) {
        double dir = (t1 >= t0) ? 1.0 : -1.0;
        double span = std::abs(t1 - t0);
        if (span == 0.0) return y0;
        double h = dir * std::min({opt_.h_init, opt_.h_max, span});
        double t = t0;
        VecT y = y0;
        VecT f0(y.size());
        rhs_(t, y, f0);
        VecT k2(y.size()), k3(y.size()), k4(y.size()), k5(y.size()), k6(y.size()),
            f1(y.size()), ytmp(y.size());
        long steps = 0;
        while (dir * (t1 - t) > 0) {
            if (++steps > opt_.max_steps)
                throw StiffnessFailure("dopri5: step budget exhausted");
            if (dir * (t + h) > dir * t1) h = t1 - t;
            if (std::abs(h) < 1e-14 * std::max(1.0, std::abs(t)))
                throw StiffnessFailure("dopri5: step size collapsed");

            ytmp = y + h * (a21 * f0);
            rhs_(t + c2 * h, ytmp, k2);
            ytmp = y + h * (a31 * f0 + a32 * k2);
            rhs_(t + c3 * h, ytmp, k3);
            ytmp = y + h * (a41 * f0 + a42 * k2 + a43 * k3);
            rhs_(t + c4 * h, ytmp, k4);
            ytmp = y + h * (a51 * f0 + a52 * k2 + a53 * k3 + a54 * k4);
            rhs_(t + c5 * h, ytmp, k5);
            ytmp = y + h * (a61 * f0 + a62 * k2 + a63 * k3 + a64 * k4 + a65 * k5);
            rhs_(t + h, ytmp, k6);
            VecT y1 = y + h * (a71 * f0 + a73 * k3 + a74 * k4 + a75 * k5 + a76 * k6);
            rhs_(t + h, y1, f1);  // FSAL
            VecT yerr = h * (e1 * f0 + e3 * k3 + e4 * k4 + e5 * k5 + e6 * k6 + e7 * f1);

            double err = 0.0;
            for (int i = 0; i < y.size(); ++i) {
                double sc = opt_.atol +
                            opt_.rtol * std::max(std::abs(y[i]), std::abs(y1[i]));
                double r = std::abs(yerr[i]) / sc;
                err += r * r;
            }
            err = std::sqrt(err / std::max<long>(1, y.size()));

            if (err <= 1.0) {
                double tp = t, hp = h;
                VecT fp = f0;
                VecT yp = y;
                t += h;
                y = y1;
                f0 = f1;
                if (obs && !obs(tp, yp, fp, t, y, f0)) return y;
            }
            double fac = 0.9 * std::pow(std::max(err, 1e-10), -0.2);
            fac = std::clamp(fac, 0.2, 5.0);
            h *= fac;
            if (std::abs(h) > opt_.h_max) h = dir * opt_.h_max;
        }
        return y;
    }

private:
    Rhs rhs_;
    OdeOptions opt_;

    static constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
    static constexpr double a21 = 1.0 / 5;
    static constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
    static constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
    static constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187,
                            a53 = 64448.0 / 6561, a54 = -212.0 / 729;
    static constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33,
                            a63 = 46732.0 / 5247, a64 = 49.0 / 176,
                            a65 = -5103.0 / 18656;
    static constexpr double a71 = 35.0 / 384, a73 = 500.0 / 1113, a74 = 125.0 / 192,
                            a75 = -2187.0 / 6784, a76 = 11.0 / 84;
    // b - b* (5th minus embedded 4th order weights)
    static constexpr double e1 = 35.0 / 384 - 5179.0 / 57600;
    static constexpr double e3 = 500.0 / 1113 - 7571.0 / 16695;
    static constexpr double e4 = 125.0 / 192 - 393.0 / 640;
    static constexpr double e5 = -2187.0 / 6784 + 92097.0 / 339200;
    static constexpr double e6 = 11.0 / 84 - 187.0 / 2100;
    static constexpr double e7 = -1.0 / 40;
};

} // namespace coniwave

#endif
