#include "coniwave/landau_zener.hpp"

#include <cmath>

#include "coniwave/special.hpp"

namespace coniwave {

double coeff_a(double eta2) { return std::exp(-M_PI * eta2 * eta2 / 2.0); }

std::complex<double> coeff_b(double eta2) {
    using namespace std::complex_literals;
    double y = eta2 * eta2 / 2.0;
    if (std::abs(eta2) < 1e-4) {
        // b = i sqrt(pi) eta2 (1 + O(eta2^2)); the prefactor 1/eta2 is removable
        return 1i * std::sqrt(M_PI) * eta2;
    }
    std::complex<double> two_pow = std::exp(-1i * y * std::log(2.0));
    return (2.0i / (std::sqrt(M_PI) * eta2)) * two_pow * std::exp(-M_PI * y / 2.0) *
           complex_gamma(1.0 + 1i * y) * std::sinh(M_PI * y);
}

Mat2c scattering_matrix(double eta2) {
    using namespace std::complex_literals;
    Mat2c s;
    double a = coeff_a(eta2);
    // b carries the Landau-Zener Stokes phase on top of the Gamma-function
    // formula; the value is pinned against the model-problem ODE.
    std::complex<double> b = std::exp(1i * M_PI / 4.0) * coeff_b(eta2);
    s << a, std::conj(b), -b, a;
    return s;
}

double theta_eps(const TransferSpec& spec, const Vec2& eta) {
    double r = spec.geom.r;
    return eta(1) * eta(1) / (2.0 * r) * std::log(r / spec.epsilon) + eta(0) * eta(0) / r;
}

double lambda_phase(double s, const Vec2& eta, double r) {
    if (s == 0.0) throw std::invalid_argument("lambda_phase: s must be nonzero");
    double a = eta(0) + r * s;  // omega.eta + rs, eta given in the (omega, omega_perp) frame
    return a * a / (2.0 * r) +
           eta(1) * eta(1) / (2.0 * r) * std::log(std::sqrt(r) * std::abs(s));
}

Mat2 rotate_frame(double theta) {
    Mat2 rot;
    double c = std::cos(theta / 2.0), s = std::sin(theta / 2.0);
    rot << c, -s, s, c;
    return rot;
}

Vec2c lz_integrate_span(const Vec2& eta, double r, double s_from, double s_to,
                        const Vec2c& u0, const Vec2& omega, double tol) {
    using namespace std::complex_literals;
    const int K = 26;  // Taylor order
    double dir = (s_to >= s_from) ? 1.0 : -1.0;
    Mat2c m1 = -1i * r * trace_free(omega).cast<cplx>();
    Vec2c u = u0;
    double s = s_from;
    const double s_eps = 1e-14 * std::max({1.0, std::abs(s_from), std::abs(s_to)});
    std::vector<Vec2c> c(K + 1);
    while (dir * (s_to - s) > s_eps) {
        Vec2 w = s * r * omega + eta;
        Mat2c m0 = -1i * trace_free(w).cast<cplx>();
        c[0] = u;
        c[1] = m0 * c[0];
        for (int k = 1; k < K; ++k)
            c[k + 1] = (m0 * c[k] + m1 * c[k - 1]) / double(k + 1);
        // step size from the magnitude of the last two coefficients
        double h = std::abs(s_to - s);
        for (int k = K - 1; k <= K; ++k) {
            double nk = c[k].norm();
            if (nk > 0.0) h = std::min(h, 0.8 * std::pow(tol / nk, 1.0 / k));
        }
        if (h <= 0.0 || !std::isfinite(h)) h = 1e-3;
        double hs = dir * h;
        Vec2c acc = c[K];
        for (int k = K - 1; k >= 0; --k) acc = c[k] + hs * acc;
        u = acc;
        s += hs;
    }
    return u;
}

Vec2c lz_integrate(const Vec2& eta, double r, double s0, const Vec2c& u0,
                   const Vec2& omega, double tol) {
    return lz_integrate_span(eta, r, -s0, s0, u0, omega, tol);
}

namespace {

std::pair<ProfileGrid, ProfileGrid> apply_transfer(
    const TransferSpec& spec, const ProfileGrid* u_plus, const ProfileGrid& u_minus) {
    using namespace std::complex_literals;
    const CrossingGeometry& geom = spec.geom;
    double r = geom.r;
    double sq_r = std::sqrt(r);
    cplx phase_m = std::exp(1i * spec.S_flat_minus / spec.epsilon);
    cplx phase_p = std::exp(1i * spec.S_flat_plus / spec.epsilon);

    ProfileGrid out_plus(u_minus.box), out_minus(u_minus.box);
    out_plus.time = out_minus.time = geom.t_flat;
    out_plus.mode = Mode::plus;
    out_minus.mode = Mode::minus;

    const cplx stokes = std::exp(1i * M_PI / 4.0);
    std::vector<int> ix(u_minus.box.d);
    Vec y(u_minus.box.d);
    for (std::size_t i = 0; i < u_minus.v.size(); ++i) {
        u_minus.unravel(i, ix.data());
        for (int ax = 0; ax < u_minus.box.d; ++ax) y(ax) = u_minus.box.coord(ix[ax]);
        Vec2 eta = eta_of(geom, y);
        double eta2r = eta(1) / sq_r;
        double a = coeff_a(eta2r);
        cplx b = stokes * coeff_b(eta2r);
        cplx eith = std::exp(1i * theta_eps(spec, eta));
        cplx um = phase_m * u_minus.v[i];
        cplx up = u_plus ? phase_p * u_plus->v[i] : cplx(0.0, 0.0);
        out_plus.v[i] = a * um - b / eith * up;
        out_minus.v[i] = eith * std::conj(b) * um + a * up;
    }
    return {std::move(out_plus), std::move(out_minus)};
}

} // namespace

std::pair<ProfileGrid, ProfileGrid> transfer_single(const TransferSpec& spec,
                                                    const ProfileGrid& u_in_minus) {
    return apply_transfer(spec, nullptr, u_in_minus);
}

std::pair<ProfileGrid, ProfileGrid> transfer_pair(const TransferSpec& spec,
                                                  const ProfileGrid& u_in_plus,
                                                  const ProfileGrid& u_in_minus) {
    if (!(u_in_plus.box == u_in_minus.box))
        throw std::invalid_argument("transfer_pair: profile grids differ");
    return apply_transfer(spec, &u_in_plus, u_in_minus);
}

} // namespace coniwave
