#ifndef CONIWAVE_SPECIAL_HPP
#define CONIWAVE_SPECIAL_HPP

#include <complex>

namespace coniwave {

// Complex gamma function, Lanczos approximation (g = 7, 9 coefficients) with
// reflection for Re z < 1/2. Throws PoleOfGamma at nonpositive integers.
std::complex<double> complex_gamma(std::complex<double> z);

} // namespace coniwave

#endif
