#include "coniwave/special.hpp"

#include <cmath>

#include "coniwave/errors.hpp"

namespace coniwave {

namespace {
constexpr int g = 7;
const double lanczos_p[g + 2] = {
    0.99999999999980993,  676.5203681218851,    -1259.1392167224028,
    771.32342877765313,   -176.61502916214059,  12.507343278686905,
    -0.13857109526572012, 9.9843695780195716e-6, 1.5056327351493116e-7};
} // namespace

std::complex<double> complex_gamma(std::complex<double> z) {
    const double pi = M_PI;
    if (z.imag() == 0.0 && z.real() <= 0.0 && z.real() == std::floor(z.real()))
        throw PoleOfGamma("complex_gamma: nonpositive integer argument");
    if (z.real() < 0.5)
        return pi / (std::sin(pi * z) * complex_gamma(1.0 - z));
    z -= 1.0;
    std::complex<double> x = lanczos_p[0];
    for (int i = 1; i < g + 2; ++i) x += lanczos_p[i] / (z + double(i));
    std::complex<double> t = z + (g + 0.5);
    return std::sqrt(2 * pi) * std::pow(t, z + 0.5) * std::exp(-t) * x;
}

} // namespace coniwave
