#pragma once

// Bessel functions of the first kind, integer order, on |x| < 50.
//
// |x| <= 2 : ascending power series.
// |x| >  2 : Bessel's integral J_n(x) = (1/2pi) int_0^{2pi} cos(n t - x sin t) dt
//            by the trapezoidal rule, which is spectrally accurate for a
//            periodic analytic integrand. The aliasing error is bounded by
//            |J_{N-n}(x)| + |J_{N+n}(x)|, negligible for N = 256 on this range.

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

namespace wolf {

inline constexpr double kBesselMaxArg = 50.0;

namespace detail {

inline double bessel_series(int n, double x) {
  const double half = 0.5 * x;
  double term = 1.0;
  for (int k = 1; k <= n; ++k) term *= half / k;
  const double q = -half * half;
  double sum = term;
  for (int k = 1; k < 200; ++k) {
    term *= q / (static_cast<double>(k) * (k + n));
    sum += term;
    if (std::abs(term) < 1e-17 * std::abs(sum) || term == 0.0) break;
  }
  return sum;
}

inline double bessel_trapezoid(int n, double x) {
  constexpr int kNodes = 256;
  const double h = 2.0 * std::numbers::pi / kNodes;
  double sum = 0.0;
  for (int j = 0; j < kNodes; ++j) {
    const double t = j * h;
    sum += std::cos(n * t - x * std::sin(t));
  }
  return sum / kNodes;
}

}  // namespace detail

inline double bessel_j(int n, double x) {
  if (n < 0) throw std::domain_error("bessel_j: order must be >= 0");
  if (!(std::abs(x) < kBesselMaxArg))
    throw std::domain_error("bessel_j: |x| must be < 50, got " + std::to_string(x));
  if (std::abs(x) <= 2.0) return detail::bessel_series(n, x);
  return detail::bessel_trapezoid(n, x);
}

/// Any integer order, using J_{-n}(x) = (-1)^n J_n(x).
inline double bessel_j_any(int n, double x) {
  if (n >= 0) return bessel_j(n, x);
  const double v = bessel_j(-n, x);
  return (n % 2 == 0) ? v : -v;
}

}  // namespace wolf
