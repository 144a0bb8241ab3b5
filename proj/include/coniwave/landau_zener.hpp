#ifndef CONIWAVE_LANDAU_ZENER_HPP
#define CONIWAVE_LANDAU_ZENER_HPP

#include <Eigen/Dense>
#include <complex>

#include "coniwave/grid.hpp"
#include "coniwave/potential.hpp"

namespace coniwave {

using Vec2c = Eigen::Vector2cd;
using Mat2c = Eigen::Matrix2cd;

// a(eta2) = exp(-pi eta2^2 / 2), the mode-swap amplitude.
double coeff_a(double eta2);

// b(eta2) = (2i / sqrt(pi) eta2) 2^{-i eta2^2/2} e^{-pi eta2^2/4}
//           Gamma(1 + i eta2^2/2) sinh(pi eta2^2/2),
// with the removable singularity at 0 handled by series.
std::complex<double> coeff_b(double eta2);

// Scattering matrix in the direct basis (V_omega, V_omega-perp with the +pi/2
// rotation convention):  [alpha1_out; alpha2_out] = S [alpha1_in; alpha2_in],
// S = [[a, conj(b)], [-b, a]].
Mat2c scattering_matrix(double eta2);

struct TransferSpec {
    CrossingGeometry geom;
    double epsilon = 0;
    double S_flat_minus = 0;
    double S_flat_plus = 0;
};

// theta_eps(eta) = (eta2^2 / 2r) ln(r/eps) + eta1^2 / r
double theta_eps(const TransferSpec& spec, const Vec2& eta);

// Lambda(s, eta) = |omega.eta + rs|^2 / 2r + |omega_perp.eta|^2 ln(sqrt(r)|s|) / 2r
double lambda_phase(double s, const Vec2& eta, double r);

// R(theta), the half-angle rotation matrix with
// R(theta)' A(w) R(theta) = (e_theta.w  e_theta^w ; e_theta^w  -e_theta.w).
Mat2 rotate_frame(double theta);

// Landau-Zener oracle: integrates i du/ds = A(s r omega + eta) u from -s0 to
// +s0 with a high-order Taylor scheme (the system is linear with polynomial
// coefficients). |u| is conserved.
Vec2c lz_integrate(const Vec2& eta, double r, double s0, const Vec2c& u0,
                   const Vec2& omega = Vec2(1.0, 0.0), double tol = 1e-13);

// Same model over an arbitrary span [s_from, s_to], either direction.
Vec2c lz_integrate_span(const Vec2& eta, double r, double s_from, double s_to,
                        const Vec2c& u0, const Vec2& omega = Vec2(1.0, 0.0),
                        double tol = 1e-13);

// Crossing transfer of a single ingoing minus-mode profile:
//   u_out_plus  = a(eta2r) e^{i S_minus/eps} u_in
//   u_out_minus = e^{i theta_eps(eta)} conj(b)(eta2r) e^{i S_minus/eps} u_in
// with eta = dw y, eta2r = omega_perp.eta / sqrt(r).
std::pair<ProfileGrid, ProfileGrid> transfer_single(const TransferSpec& spec,
                                                    const ProfileGrid& u_in_minus);

// Two-packet transfer (both ingoing profiles already sign-aligned):
//   u_out_plus  = -e^{-i theta} b e^{i S_plus/eps} u_in_plus + a e^{i S_minus/eps} u_in_minus
//   u_out_minus =  a e^{i S_plus/eps} u_in_plus + e^{i theta} conj(b) e^{i S_minus/eps} u_in_minus
std::pair<ProfileGrid, ProfileGrid> transfer_pair(const TransferSpec& spec,
                                                  const ProfileGrid& u_in_plus,
                                                  const ProfileGrid& u_in_minus);

} // namespace coniwave

#endif
