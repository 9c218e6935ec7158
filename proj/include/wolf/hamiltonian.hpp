#pragma once

// Three-spin low-field Hamiltonian under a bias field plus a longitudinal
// oscillating (WOLF) field, its Mz-block restrictions, the rotated W-block
// and the reduced two-level model.
//
// Internally every frequency is an angular frequency in rad/s, fields are in
// tesla and couplings are stored in Hz (they only ever appear multiplied by
// pi).

#include "wolf/spin_core.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

namespace wolf {

inline constexpr double kTwoPi = 2.0 * std::numbers::pi;

namespace gyro {
/// Standard tabulated gyromagnetic ratios, rad s^-1 T^-1.
inline constexpr double kProton = kTwoPi * 42.577478e6;
inline constexpr double kCarbon13 = kTwoPi * 10.7084e6;
inline constexpr double kNitrogen15 = kTwoPi * -4.316e6;
inline constexpr double kFluorine19 = kTwoPi * 40.078e6;
inline constexpr double kPhosphorus31 = kTwoPi * 17.235e6;
}  // namespace gyro

inline constexpr double kMicroTesla = 1e-6;

struct SpinSystem {
  double gamma_i = gyro::kProton;     // I-spin pair, rad s^-1 T^-1
  double gamma_s = gyro::kCarbon13;   // S-spin, rad s^-1 T^-1
  double j12 = 0.0;                   // Hz
  double j13 = 0.0;                   // Hz
  double j23 = 0.0;                   // Hz

  double delta_gamma() const { return gamma_i - gamma_s; }
  /// |J13 - J23| / |J12|; infinite when J12 = 0.
  double near_equivalence_ratio() const {
    const double d = std::abs(j13 - j23);
    if (j12 == 0.0) return d == 0.0 ? 0.0 : INFINITY;
    return d / std::abs(j12);
  }

  void validate() const {
    if (!std::isfinite(gamma_i) || !std::isfinite(gamma_s) || !std::isfinite(j12) ||
        !std::isfinite(j13) || !std::isfinite(j23))
      throw std::invalid_argument("SpinSystem: non-finite parameter");
    if (gamma_i == gamma_s)
      throw std::invalid_argument("SpinSystem: gamma_I must differ from gamma_S");
  }

  bool operator==(const SpinSystem&) const = default;
};

/// Literature couplings (Hz) for the 1-13C fumarate and maleate spin systems.
inline SpinSystem fumarate() { return {gyro::kProton, gyro::kCarbon13, 15.9, 3.3, 5.8}; }
inline SpinSystem maleate() { return {gyro::kProton, gyro::kCarbon13, 12.3, 2.5, 12.9}; }

struct FieldSchedule {
  double b_bias = 0.0;       // T
  double b_wolf_peak = 0.0;  // T
  double omega_wolf = 0.0;   // rad/s
  double phase = 0.0;        // rad, cosine convention
  double duration = 0.0;     // s

  double field(double t) const { return b_bias + b_wolf_peak * std::cos(omega_wolf * t + phase); }
  double wolf_field(double t) const { return b_wolf_peak * std::cos(omega_wolf * t + phase); }
  /// WOLF period 2 pi / omega; infinite for a static field.
  double period() const { return omega_wolf == 0.0 ? INFINITY : kTwoPi / std::abs(omega_wolf); }

  void validate() const {
    if (!std::isfinite(b_bias) || !std::isfinite(b_wolf_peak) || !std::isfinite(omega_wolf) ||
        !std::isfinite(phase) || !std::isfinite(duration))
      throw std::invalid_argument("FieldSchedule: non-finite parameter");
    if (duration < 0.0) throw std::invalid_argument("FieldSchedule: duration must be >= 0");
    if (b_wolf_peak < 0.0) throw std::invalid_argument("FieldSchedule: b_wolf_peak must be >= 0");
  }

  bool operator==(const FieldSchedule&) const = default;
};

struct HamiltonianTerms {
  Operator a, b, c, d;

  Operator static_sum() const { return a + b + c + d; }
};

/// -(gamma_I (I1z + I2z) + gamma_S S3z); multiply by a field to get a Zeeman term.
inline Operator zeeman_generator(const SpinSystem& sys) {
  return -(sys.gamma_i * (op(1, Component::z) + op(2, Component::z)) +
           sys.gamma_s * op(3, Component::z));
}

inline HamiltonianTerms build_terms(const SpinSystem& sys, double b_bias) {
  using std::numbers::pi;
  const Operator i1z = op(1, Component::z), i2z = op(2, Component::z), s3z = op(3, Component::z);
  const Operator i1p = op(1, Component::plus), i1m = op(1, Component::minus);
  const Operator i2p = op(2, Component::plus), i2m = op(2, Component::minus);
  const Operator s3p = op(3, Component::plus), s3m = op(3, Component::minus);
  const double sum = sys.j13 + sys.j23;
  const double diff = sys.j13 - sys.j23;

  HamiltonianTerms h;
  h.a = b_bias * zeeman_generator(sys) + 2.0 * pi * sys.j12 * i1_dot_i2() +
        pi * sum * (i1z + i2z) * s3z;
  h.b = pi * diff * (i1z - i2z) * s3z;
  h.c = 0.5 * pi * sum * (i1p * s3m + i2p * s3m + i1m * s3p + i2m * s3p);
  h.d = 0.5 * pi * diff * (i1p * s3m - i2p * s3m + i1m * s3p - i2m * s3p);
  return h;
}

inline Operator build_wolf(const SpinSystem& sys, const FieldSchedule& field, double t) {
  return field.wolf_field(t) * zeeman_generator(sys);
}

/// Precomputed static part and field generator so the time-dependent
/// Hamiltonian is one scaled add per evaluation.
class TimeDependentHamiltonian {
 public:
  TimeDependentHamiltonian(const SpinSystem& sys, const FieldSchedule& field)
      : field_(field), static_(build_terms(sys, field.b_bias).static_sum()),
        generator_(zeeman_generator(sys)) {}

  Operator operator()(double t) const { return static_ + field_.wolf_field(t) * generator_; }
  const FieldSchedule& field() const { return field_; }

 private:
  FieldSchedule field_;
  Operator static_;
  Operator generator_;
};

inline Operator total_hamiltonian(const SpinSystem& sys, const FieldSchedule& field, double t) {
  if (!std::isfinite(t)) throw std::invalid_argument("total_hamiltonian: t must be finite");
  return build_terms(sys, field.b_bias).static_sum() + build_wolf(sys, field, t);
}

/// Restriction of H(t) onto an ordered Mz block basis, computed from the
/// closed-form matrix elements.
inline Block3 block_restrict(const SpinSystem& sys, const FieldSchedule& field, double t, Block block) {
  using std::numbers::pi;
  const double bt = field.field(t);
  const double gi = sys.gamma_i, gs = sys.gamma_s;
  const double j12 = sys.j12, sum = sys.j13 + sys.j23, diff = sys.j13 - sys.j23;
  const double r2 = std::numbers::sqrt2;
  Block3 h = Block3::Zero();
  switch (block) {
    case Block::W:
      // {S0 beta, T0 beta, T-1 alpha}
      h(0, 0) = 0.5 * (bt * gs - 3.0 * pi * j12);
      h(1, 1) = 0.5 * (bt * gs + pi * j12);
      h(2, 2) = (gi - 0.5 * gs) * bt + 0.5 * pi * (j12 - sum);
      h(0, 1) = h(1, 0) = -0.5 * pi * diff;
      h(0, 2) = h(2, 0) = pi / r2 * diff;
      h(1, 2) = h(2, 1) = pi / r2 * sum;
      break;
    case Block::V:
      // {S0 alpha, T0 alpha, T+1 beta}
      h(0, 0) = 0.5 * (-bt * gs - 3.0 * pi * j12);
      h(1, 1) = 0.5 * (-bt * gs + pi * j12);
      h(2, 2) = -(gi - 0.5 * gs) * bt + 0.5 * pi * (j12 - sum);
      h(0, 1) = h(1, 0) = 0.5 * pi * diff;
      h(0, 2) = h(2, 0) = -pi / r2 * diff;
      h(1, 2) = h(2, 1) = pi / r2 * sum;
      break;
    default:
      throw std::invalid_argument("block_restrict: invalid block label");
  }
  return h;
}

struct MixingAngles {
  double theta = 0.0;
  double phi = 0.0;
};

/// theta has tangent (J13 - J23) / (2 J12); phi has tangent
/// (J13 - J23) / (J13 + J23). Both are small near equivalence.
inline MixingAngles mixing_angles(const SpinSystem& sys) {
  const double diff = sys.j13 - sys.j23;
  const double sum = sys.j13 + sys.j23;
  if (sys.j12 == 0.0 && diff == 0.0)
    throw std::domain_error("mixing_angles: theta undefined for J12 = 0 and J13 = J23");
  if (sum == 0.0 && diff == 0.0)
    throw std::domain_error("mixing_angles: phi undefined for J13 = J23 = 0");
  return {std::atan2(diff, 2.0 * sys.j12), std::atan2(diff, sum)};
}

/// H(t) in the W_theta basis by exact conjugation of the W block.
inline Block3 rotated_block(const SpinSystem& sys, const FieldSchedule& field, double t, double theta) {
  const Block3 r = rotation_in_w(theta);
  return r.transpose() * block_restrict(sys, field, t, Block::W) * r;
}

inline Block3 rotated_block(const SpinSystem& sys, const FieldSchedule& field, double t) {
  return rotated_block(sys, field, t, mixing_angles(sys).theta);
}

/// Closed-form near-equivalence approximation of the W_theta block, in which
/// the S'0/T'0 coupling and the O(theta^2) diagonal shifts are dropped.
inline Block3 rotated_block_approx(const SpinSystem& sys, const FieldSchedule& field, double t) {
  using std::numbers::pi;
  const double theta = mixing_angles(sys).theta;
  const double c = std::cos(theta / 2.0), s = std::sin(theta / 2.0);
  const double sum = sys.j13 + sys.j23, diff = sys.j13 - sys.j23;
  const double r2 = std::numbers::sqrt2;
  const Block3 w = block_restrict(sys, field, t, Block::W);
  Block3 h = Block3::Zero();
  h(0, 0) = w(0, 0);
  h(1, 1) = w(1, 1);
  h(2, 2) = w(2, 2);
  h(0, 2) = h(2, 0) = pi / r2 * (c * diff + s * sum);
  h(1, 2) = h(2, 1) = pi / r2 * (c * sum - s * diff);
  return h;
}

inline double omega_st(const SpinSystem& sys, double b_bias) {
  using std::numbers::pi;
  return b_bias * sys.delta_gamma() + 0.5 * pi * (4.0 * sys.j12 - sys.j13 - sys.j23);
}

inline double omega_tt(const SpinSystem& sys, double b_bias) {
  using std::numbers::pi;
  return b_bias * sys.delta_gamma() - 0.5 * pi * (sys.j13 + sys.j23);
}

/// h(t) = omega0(t) sigma0 + omega_x sigma_x / 2 + omega_z(t) sigma_z / 2 with
/// omega0(t) = omega0_static + omega0_cos_amp cos(w t + phase) and likewise for
/// omega_z. The cosine runs at the drive frequency.
struct PauliModel {
  double omega0_static = 0.0;
  double omega0_cos_amp = 0.0;
  double omega_x = 0.0;
  double omega_x_alt = 0.0;  // 2 pi sqrt(J13^2 + J23^2) sin(phi + theta/2)
  double omega_z_static = 0.0;
  double omega_z_cos_amp = 0.0;
  double omega_drive = 0.0;
  double phase = 0.0;

  double omega0(double t) const { return omega0_static + omega0_cos_amp * std::cos(omega_drive * t + phase); }
  double omega_z(double t) const {
    return omega_z_static + omega_z_cos_amp * std::cos(omega_drive * t + phase);
  }
  Eigen::Matrix2cd matrix(double t) const {
    Eigen::Matrix2cd h;
    h << omega0(t) + 0.5 * omega_z(t), 0.5 * omega_x, 0.5 * omega_x, omega0(t) - 0.5 * omega_z(t);
    return h;
  }
};

inline PauliModel two_level_model(const SpinSystem& sys, const FieldSchedule& field) {
  using std::numbers::pi;
  const auto [theta, phi] = mixing_angles(sys);
  const double sum = sys.j13 + sys.j23, diff = sys.j13 - sys.j23;
  PauliModel m;
  m.omega0_static = 0.5 * sys.gamma_i * field.b_bias - 0.25 * pi * (2.0 * sys.j12 + sum);
  m.omega0_cos_amp = 0.5 * sys.gamma_i * field.b_wolf_peak;
  m.omega_x = pi * std::numbers::sqrt2 * (std::cos(theta / 2.0) * diff + std::sin(theta / 2.0) * sum);
  m.omega_x_alt =
      kTwoPi * std::sqrt(sys.j13 * sys.j13 + sys.j23 * sys.j23) * std::sin(phi + theta / 2.0);
  m.omega_z_static = field.b_bias * (sys.gamma_s - sys.gamma_i) + 0.5 * pi * (sum - 4.0 * sys.j12);
  m.omega_z_cos_amp = -field.b_wolf_peak * sys.delta_gamma();
  m.omega_drive = field.omega_wolf;
  m.phase = field.phase;
  return m;
}

}  // namespace wolf
