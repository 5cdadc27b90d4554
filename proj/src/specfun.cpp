#include "scatkf/specfun.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace scatkf::specfun {

namespace detail_ {

constexpr long double kEulerGamma = 0.5772156649015328606065120900824024L;
constexpr long double kPi = 3.1415926535897932384626433832795029L;

// Ascending series and asymptotic expansion cross over here.  Below 14 the
// alternating series loses at most ~4e-14 of the envelope to cancellation in
// long double; above 14 the optimally truncated Hankel expansion is already
// below 8e-14 of the envelope (its error scales like e^{-2x}).
constexpr long double kAsymptoticCutoff = 14.0L;

struct JyPair {
  long double j;
  long double y;
};

// Power series about 0 (Abramowitz & Stegun 9.1.10-9.1.13), order 0:
//   J0 = sum (-1)^m t_m,                 t_m = (x^2/4)^m / (m!)^2
//   Y0 = (2/pi)(ln(x/2)+gamma) J0 + (2/pi) sum (-1)^{m+1} H_m t_m
// with H_m the m-th harmonic number.
JyPair jy0_series(long double x) {
  const long double z = x * x / 4.0L;
  long double t = 1.0L;     // t_m
  long double h = 0.0L;     // H_m
  long double j = 1.0L;
  long double ys = 0.0L;    // harmonic-weighted sum
  long double sign = 1.0L;
  for (int m = 1; m <= 90; ++m) {
    t *= z / (static_cast<long double>(m) * m);
    h += 1.0L / m;
    sign = -sign;
    j += sign * t;
    ys -= sign * h * t;     // (-1)^{m+1} H_m t_m
    if (t < 1e-24L * (1.0L + std::fabs(j))) break;
  }
  const long double lg = std::log(x / 2.0L) + kEulerGamma;
  return {j, (2.0L / kPi) * (lg * j + ys)};
}

// Order 1:
//   J1 = (x/2) sum (-1)^m s_m,           s_m = (x^2/4)^m / (m!(m+1)!)
//   Y1 = (2/pi)(ln(x/2)+gamma) J1 - 2/(pi x)
//        - (x/(2 pi)) sum (-1)^m (H_m + H_{m+1}) s_m
JyPair jy1_series(long double x) {
  const long double z = x * x / 4.0L;
  long double s = 1.0L;     // s_m
  long double h = 0.0L;     // H_m
  long double jsum = 1.0L;
  long double ysum = 1.0L;  // (H_0 + H_1) s_0 = 1
  long double sign = 1.0L;
  for (int m = 1; m <= 90; ++m) {
    s *= z / (static_cast<long double>(m) * (m + 1));
    h += 1.0L / m;
    sign = -sign;
    jsum += sign * s;
    ysum += sign * (2.0L * h + 1.0L / (m + 1)) * s;  // H_m + H_{m+1}
    if (s < 1e-24L * (1.0L + std::fabs(jsum))) break;
  }
  const long double j = (x / 2.0L) * jsum;
  const long double lg = std::log(x / 2.0L) + kEulerGamma;
  const long double y =
      (2.0L / kPi) * lg * j - 2.0L / (kPi * x) - (x / (2.0L * kPi)) * ysum;
  return {j, y};
}

// Hankel asymptotic expansion (Abramowitz & Stegun 9.2.5-9.2.10):
//   J_nu = sqrt(2/(pi x)) [P cos(chi) - Q sin(chi)],  chi = x - nu pi/2 - pi/4
//   Y_nu = sqrt(2/(pi x)) [P sin(chi) + Q cos(chi)]
// with P, Q built from a_k = (4 nu^2 - 1)(4 nu^2 - 9)...(4 nu^2 - (2k-1)^2)
// / (k! 4^k), summed to optimal truncation (stop once terms stop shrinking).
JyPair jy_asymptotic(int nu, long double x) {
  const long double fournu2 = 4.0L * nu * nu;
  long double p = 1.0L;
  long double q = 0.0L;
  long double term = 1.0L;          // a_k / (2x)^k
  long double prev_mag = 1.0e30L;
  for (int k = 0; k < 240; ++k) {
    const long double next =
        term * (fournu2 - (2.0L * k + 1) * (2.0L * k + 1)) /
        (4.0L * (k + 1) * 2.0L * x);
    const long double mag = std::fabs(next);
    if (mag >= prev_mag || mag < 1e-25L) break;
    prev_mag = mag;
    term = next;
    // i^{k+1} rotation: odd k+1 feeds Q, even feeds P, alternating signs.
    switch ((k + 1) & 3) {
      case 0: p += term; break;
      case 1: q += term; break;
      case 2: p -= term; break;
      default: q -= term; break;
    }
  }
  const long double chi = x - nu * (kPi / 2.0L) - kPi / 4.0L;
  const long double c = std::cos(chi);
  const long double s = std::sin(chi);
  const long double env = std::sqrt(2.0L / (kPi * x));
  return {env * (p * c - q * s), env * (p * s + q * c)};
}

JyPair jy(int nu, long double x) {
  if (x < kAsymptoticCutoff) {
    return nu == 0 ? jy0_series(x) : jy1_series(x);
  }
  return jy_asymptotic(nu, x);
}

void require_positive(double x, const char* func) {
  if (!std::isfinite(x) || x <= 0.0) {
    throw std::domain_error(std::string(func) + ": requires finite x > 0, got " +
                            std::to_string(x));
  }
}

} // namespace detail_

double bessel_j0(double x) {
  detail_::require_positive(x, "bessel_j0");
  return static_cast<double>(detail_::jy(0, x).j);
}

double bessel_y0(double x) {
  detail_::require_positive(x, "bessel_y0");
  return static_cast<double>(detail_::jy(0, x).y);
}

double bessel_j1(double x) {
  detail_::require_positive(x, "bessel_j1");
  return static_cast<double>(detail_::jy(1, x).j);
}

double bessel_y1(double x) {
  detail_::require_positive(x, "bessel_y1");
  return static_cast<double>(detail_::jy(1, x).y);
}

std::complex<double> hankel1_0(double x) {
  detail_::require_positive(x, "hankel1_0");
  const auto p = detail_::jy(0, x);
  return {static_cast<double>(p.j), static_cast<double>(p.y)};
}

std::complex<double> hankel1_1(double x) {
  detail_::require_positive(x, "hankel1_1");
  const auto p = detail_::jy(1, x);
  return {static_cast<double>(p.j), static_cast<double>(p.y)};
}

} // namespace scatkf::specfun
