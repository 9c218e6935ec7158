#pragma once

// Jolting-frame reduction of the resonantly driven singlet-triplet
// transition: modulation index, jolting phase, Fourier-Bessel expansion of
// the frame Hamiltonian, first-order average, nutation frequency and the
// closed-form populations.

#include "wolf/bessel.hpp"
#include "wolf/hamiltonian.hpp"

#include <cmath>
#include <complex>
#include <numbers>
#include <stdexcept>

namespace wolf {

struct AnalyticModel {
  double omega_st = 0.0;          // rad/s
  double omega_x = 0.0;           // rad/s
  double modulation_index = 0.0;  // A
  double omega_nut = 0.0;         // rad/s, signed
  double validity_ratio = 0.0;    // |omega_x / omega_st|
  double phase = 0.0;             // drive phase at t = 0

  double tau_pi() const { return std::numbers::pi / std::abs(omega_nut); }
  double period() const { return kTwoPi / std::abs(omega_st); }
};

/// On-resonance model: the drive is taken at omega_st regardless of
/// field.omega_wolf.
inline AnalyticModel analytic_model(const SpinSystem& sys, const FieldSchedule& field) {
  AnalyticModel m;
  m.omega_st = omega_st(sys, field.b_bias);
  if (m.omega_st == 0.0) throw std::domain_error("analytic model: omega_ST = 0, A undefined");
  m.omega_x = two_level_model(sys, field).omega_x;
  m.modulation_index = sys.delta_gamma() * field.b_wolf_peak / m.omega_st;
  m.omega_nut = m.omega_x * bessel_j(1, m.modulation_index);
  m.validity_ratio = std::abs(m.omega_x / m.omega_st);
  m.phase = field.phase;
  return m;
}

/// psi(t) = int_0^t omega_z(s) ds for the resonant two-level model.
inline double jolting_phase(const AnalyticModel& m, double t) {
  const double w = m.omega_st;
  return -m.modulation_index * (std::sin(w * t + m.phase) - std::sin(m.phase)) - w * t;
}

/// omega_z(t) on resonance; the integrand of jolting_phase.
inline double jolting_rate(const AnalyticModel& m, double t) {
  return -m.modulation_index * m.omega_st * std::cos(m.omega_st * t + m.phase) - m.omega_st;
}

struct AverageHamiltonianReport {
  /// Period average of the sigma_x/2 coefficient omega_x cos(psi(t)).
  double numeric_average = 0.0;
  /// omega_x J1(A).
  double bessel_prediction = 0.0;
  /// | |numeric| - |prediction| |
  double difference = 0.0;
  /// difference / |omega_x|
  double relative_difference = 0.0;
  /// max_t |exp(i psi) - truncated Fourier-Bessel series| over one period.
  double truncation_error = 0.0;
  /// Sum of |J_n(A)| over the oscillating harmonics kept in the series.
  double oscillating_weight = 0.0;
};

/// Checks the first-order average of the jolting-frame Hamiltonian against
/// the Bessel prediction. The static harmonic of exp(i psi) is J_{-1}(A),
/// so the signed average is -omega_x J1(A); the magnitudes are compared.
inline AverageHamiltonianReport average_hamiltonian_check(const AnalyticModel& m, int n_max) {
  if (n_max < 3) throw std::invalid_argument("average_hamiltonian_check: n_max must be >= 3");
  if (m.phase != 0.0)
    throw std::invalid_argument("average_hamiltonian_check: requires zero drive phase");
  const double period = m.period();
  constexpr int kNodes = 1024;
  const double h = period / kNodes;
  const double w = m.omega_st;
  const double a = m.modulation_index;

  AverageHamiltonianReport r;
  double acc = 0.0;
  for (int k = 0; k < kNodes; ++k) {
    const double t = k * h;
    const double psi = jolting_phase(m, t);
    acc += std::cos(psi);
    const std::complex<double> exact = std::polar(1.0, psi);
    std::complex<double> series = 0.0;
    for (int n = -n_max; n <= n_max; ++n)
      series += bessel_j_any(n, a) * std::polar(1.0, -(n + 1) * w * t);
    r.truncation_error = std::max(r.truncation_error, std::abs(exact - series));
  }
  r.numeric_average = m.omega_x * acc / kNodes;
  r.bessel_prediction = m.omega_x * bessel_j(1, a);
  r.difference = std::abs(std::abs(r.numeric_average) - std::abs(r.bessel_prediction));
  r.relative_difference = m.omega_x == 0.0 ? 0.0 : r.difference / std::abs(m.omega_x);
  for (int n = -n_max; n <= n_max; ++n)
    if (n != -1) r.oscillating_weight += std::abs(bessel_j_any(n, a));
  return r;
}

/// Signed nutation angular frequency omega_x J1(A).
inline double nutation_frequency(const SpinSystem& sys, const FieldSchedule& field) {
  return analytic_model(sys, field).omega_nut;
}

struct TwoLevelPopulations {
  double s0_beta = 1.0;
  double tm1_alpha = 0.0;
};

/// Closed-form resonant populations, normalised to a fully populated S0 beta.
inline TwoLevelPopulations analytic_populations(const SpinSystem& sys, const FieldSchedule& field,
                                                double tau) {
  const double c = std::cos(nutation_frequency(sys, field) * tau);
  return {0.5 * (1.0 + c), 0.5 * (1.0 - c)};
}

/// S-spin polarization predicted from the PHIP state: half of the singlet
/// population is in S0 beta and moves to T-1 alpha.
inline double analytic_s_polarization(double omega_nut, double tau) {
  return 0.5 * (1.0 - std::cos(omega_nut * tau));
}

struct ValidityMetrics {
  double omega_ratio = 0.0;        // |omega_x / omega_ST|
  double omega_ratio_bound = 0.0;  // 2 pi sqrt(J13^2 + J23^2) / |omega_ST|
  double near_equivalence = 0.0;   // |J13 - J23| / |J12|
  double weak_coupling = 0.0;      // (2 pi)^2 (J13^2 + J23^2) / omega_ST^2
  double threshold = 0.2;
  bool omega_ratio_flag = false;
  bool near_equivalence_flag = false;
  bool weak_coupling_flag = false;

  bool in_regime() const { return !omega_ratio_flag && !near_equivalence_flag && !weak_coupling_flag; }
};

inline ValidityMetrics validity_metrics(const SpinSystem& sys, const FieldSchedule& field,
                                        double threshold = 0.2) {
  ValidityMetrics v;
  v.threshold = threshold;
  const double wst = std::abs(omega_st(sys, field.b_bias));
  const double jnorm = std::sqrt(sys.j13 * sys.j13 + sys.j23 * sys.j23);
  const double wx = std::abs(two_level_model(sys, field).omega_x);
  v.omega_ratio = wst == 0.0 ? INFINITY : wx / wst;
  v.omega_ratio_bound = wst == 0.0 ? INFINITY : kTwoPi * jnorm / wst;
  v.near_equivalence = sys.near_equivalence_ratio();
  v.weak_coupling = wst == 0.0 ? INFINITY : (kTwoPi * jnorm) * (kTwoPi * jnorm) / (wst * wst);
  v.omega_ratio_flag = v.omega_ratio > threshold;
  v.near_equivalence_flag = v.near_equivalence > threshold;
  v.weak_coupling_flag = v.weak_coupling > threshold;
  return v;
}

}  // namespace wolf
