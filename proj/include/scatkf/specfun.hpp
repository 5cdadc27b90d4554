#ifndef SCATKF_SPECFUN_HPP
#define SCATKF_SPECFUN_HPP

#include <complex>

// Real-argument Bessel functions of orders 0 and 1 and the Hankel functions
// of the first kind built from them.  These back the Helmholtz fundamental
// solution (i/4) H0^(1)(k|x-y|), so arguments are always positive reals.
//
// Accuracy target: ~1e-13 of the amplitude envelope sqrt(2/(pi x)) across
// x in [1e-3, 200], enough for every tolerance downstream.

namespace scatkf::specfun {

// J0(x). Throws std::domain_error unless x > 0 and finite.
double bessel_j0(double x);

// Y0(x). Throws std::domain_error unless x > 0 and finite.
double bessel_y0(double x);

// J1(x). Throws std::domain_error unless x > 0 and finite.
double bessel_j1(double x);

// Y1(x). Throws std::domain_error unless x > 0 and finite.
double bessel_y1(double x);

// H0^(1)(x) = J0(x) + i Y0(x). The imaginary part diverges logarithmically
// as x -> 0+, so callers must keep source and evaluation points distinct.
std::complex<double> hankel1_0(double x);

// H1^(1)(x) = J1(x) + i Y1(x).
std::complex<double> hankel1_1(double x);

} // namespace scatkf::specfun

#endif
