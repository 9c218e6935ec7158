#pragma once

// Independent reference computations used only by the tests.

#include "wolf/spin_core.hpp"

#include <cmath>
#include <complex>
#include <functional>
#include <numbers>
#include <random>

namespace oracle {

/// exp(M) by scaling and squaring of a truncated Taylor series.
inline wolf::Operator expm_taylor(const wolf::Operator& m) {
  const double norm = m.cwiseAbs().rowwise().sum().maxCoeff();
  int squarings = 0;
  double scaled = norm;
  while (scaled > 0.25) {
    scaled *= 0.5;
    ++squarings;
  }
  const wolf::Operator a = m / std::pow(2.0, squarings);
  wolf::Operator term = wolf::Operator::Identity();
  wolf::Operator sum = wolf::Operator::Identity();
  for (int k = 1; k <= 30; ++k) {
    term = term * a / static_cast<double>(k);
    sum += term;
  }
  for (int s = 0; s < squarings; ++s) sum = sum * sum;
  return sum;
}

/// Adaptive Simpson quadrature.
inline double simpson(const std::function<double(double)>& f, double a, double b, double tol = 1e-13,
                      int depth = 50) {
  std::function<double(double, double, double, double, double, double, int, double)> rec =
      [&](double lo, double hi, double flo, double fmid, double fhi, double whole, int d, double eps) {
        const double mid = 0.5 * (lo + hi);
        const double lm = 0.5 * (lo + mid), rm = 0.5 * (mid + hi);
        const double flm = f(lm), frm = f(rm);
        const double left = (mid - lo) / 6.0 * (flo + 4.0 * flm + fmid);
        const double right = (hi - mid) / 6.0 * (fmid + 4.0 * frm + fhi);
        if (d <= 0 || std::abs(left + right - whole) <= 15.0 * eps)
          return left + right + (left + right - whole) / 15.0;
        return rec(lo, mid, flo, flm, fmid, left, d - 1, 0.5 * eps) +
               rec(mid, hi, fmid, frm, fhi, right, d - 1, 0.5 * eps);
      };
  const double fa = f(a), fb = f(b), fm = f(0.5 * (a + b));
  const double whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
  return rec(a, b, fa, fm, fb, whole, depth, tol);
}

/// J_n(x) = (1/pi) int_0^pi cos(n t - x sin t) dt by adaptive Simpson.
inline double bessel_quadrature(int n, double x) {
  return simpson([n, x](double t) { return std::cos(n * t - x * std::sin(t)); }, 0.0, std::numbers::pi,
                 1e-14) /
         std::numbers::pi;
}

/// Golden-section maximisation of a unimodal function.
inline double argmax(const std::function<double(double)>& f, double lo, double hi) {
  const double g = 0.5 * (std::sqrt(5.0) - 1.0);
  double x1 = hi - g * (hi - lo), x2 = lo + g * (hi - lo);
  double f1 = f(x1), f2 = f(x2);
  for (int i = 0; i < 200; ++i) {
    if (f1 > f2) {
      hi = x2; x2 = x1; f2 = f1; x1 = hi - g * (hi - lo); f1 = f(x1);
    } else {
      lo = x1; x1 = x2; f1 = f2; x2 = lo + g * (hi - lo); f2 = f(x2);
    }
  }
  return 0.5 * (lo + hi);
}

inline wolf::Operator random_hermitian(std::mt19937_64& rng, double scale) {
  std::normal_distribution<double> n(0.0, scale);
  wolf::Operator a;
  for (int i = 0; i < wolf::kDim; ++i)
    for (int j = 0; j < wolf::kDim; ++j) a(i, j) = {n(rng), n(rng)};
  return 0.5 * (a + a.adjoint());
}

inline double max_abs(const wolf::Operator& m) { return m.cwiseAbs().maxCoeff(); }

}  // namespace oracle
