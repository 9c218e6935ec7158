#pragma once

// Exact numerical evolution of the 8x8 density operator under the full
// time-dependent Hamiltonian. H(t) is sampled at the midpoint of each step
// and every step exponential is formed from a Hermitian eigendecomposition.

#include "wolf/hamiltonian.hpp"
#include "wolf/spin_core.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <bit>
#include <cmath>
#include <sstream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace wolf {

/// Raised when a propagated quantity leaves its conservation tolerance.
class InvariantError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

inline double max_abs(const Operator& m) { return m.cwiseAbs().maxCoeff(); }

inline double hermiticity_error(const Operator& m) { return max_abs(m - m.adjoint()); }

inline double unitarity_error(const Operator& u) {
  return max_abs(u.adjoint() * u - Operator::Identity());
}

/// Largest |rho_ij| linking Zeeman product states of different total Mz.
inline double mz_block_coherence(const Operator& rho) {
  double worst = 0.0;
  for (int i = 0; i < kDim; ++i)
    for (int j = 0; j < kDim; ++j)
      if (std::popcount(static_cast<unsigned>(i)) != std::popcount(static_cast<unsigned>(j)))
        worst = std::max(worst, std::abs(rho(i, j)));
  return worst;
}

class DensityOperator {
 public:
  DensityOperator() : m_(Operator::Identity() / static_cast<double>(kDim)) {}

  /// Validates Hermiticity, unit trace and positivity at `tol`.
  static DensityOperator from_matrix(const Operator& m, double tol = 1e-9) {
    DensityOperator rho(m, Unchecked{});
    const auto msg = rho.violation(tol);
    if (!msg.empty()) throw std::invalid_argument("DensityOperator: " + msg);
    return rho;
  }

  static DensityOperator pure(const StateVector& v) {
    const StateVector n = v / v.norm();
    return DensityOperator(n * n.adjoint(), Unchecked{});
  }

  const Operator& matrix() const { return m_; }

  double trace_error() const { return std::abs(m_.trace() - 1.0); }
  double hermiticity() const { return hermiticity_error(m_); }
  double min_eigenvalue() const {
    const Operator herm = 0.5 * (m_ + m_.adjoint());
    Eigen::SelfAdjointEigenSolver<Operator> es(herm, Eigen::EigenvaluesOnly);
    return es.eigenvalues().minCoeff();
  }

  /// Empty when all invariants hold.
  std::string violation(double tol) const {
    std::ostringstream os;
    if (trace_error() > tol) os << "trace error " << trace_error() << "; ";
    if (hermiticity() > tol) os << "hermiticity error " << hermiticity() << "; ";
    if (min_eigenvalue() < -1e-10) os << "negative eigenvalue " << min_eigenvalue() << "; ";
    return os.str();
  }

  DensityOperator evolved(const Operator& u) const {
    return DensityOperator(u * m_ * u.adjoint(), Unchecked{});
  }

 private:
  struct Unchecked {};
  DensityOperator(Operator m, Unchecked) : m_(std::move(m)) {}
  Operator m_;
};

/// |S0><S0| on spins 1,2 tensored with the unpolarised S-spin.
inline DensityOperator phip_initial_state() {
  const StateVector a = product_state(PairState::S0, SState::alpha);
  const StateVector b = product_state(PairState::S0, SState::beta);
  return DensityOperator::from_matrix(0.5 * (a * a.adjoint() + b * b.adjoint()));
}

inline double population(const DensityOperator& rho, const StateVector& v) {
  return std::real(matrix_element(v, rho.matrix(), v));
}

inline double population(const DensityOperator& rho, const BasisState& s) {
  return population(rho, s.vector);
}

/// 2 Tr(rho S3z).
inline double s_polarization(const DensityOperator& rho) {
  static const Operator s3z = op(3, Component::z);
  return 2.0 * std::real(expectation(rho.matrix(), s3z));
}

/// exp(-i H dt) for Hermitian H.
inline Operator step_propagator(const Operator& h, double dt) {
  if (!(dt > 0.0)) throw std::invalid_argument("step_propagator: dt must be > 0");
  const double scale = std::max(1.0, max_abs(h));
  if (hermiticity_error(h) > 1e-12 * scale)
    throw std::invalid_argument("step_propagator: Hamiltonian is not Hermitian");
  Eigen::SelfAdjointEigenSolver<Operator> es(h);
  if (es.info() != Eigen::Success) throw InvariantError("step_propagator: eigensolver failed");
  Eigen::Matrix<cplx, kDim, 1> phases;
  for (int k = 0; k < kDim; ++k) phases(k) = std::polar(1.0, -es.eigenvalues()(k) * dt);
  return es.eigenvectors() * phases.asDiagonal() * es.eigenvectors().adjoint();
}

/// Worst-case conservation figures observed during a propagation.
struct ConservationLog {
  double max_unitarity_error = 0.0;            // single step propagators
  double max_composite_unitarity_error = 0.0;  // products over whole periods
  double max_trace_error = 0.0;
  double max_hermiticity_error = 0.0;
  double max_block_coherence = 0.0;
  double min_eigenvalue = 0.0;
  long steps = 0;

  void merge(const ConservationLog& o) {
    max_unitarity_error = std::max(max_unitarity_error, o.max_unitarity_error);
    max_composite_unitarity_error =
        std::max(max_composite_unitarity_error, o.max_composite_unitarity_error);
    max_trace_error = std::max(max_trace_error, o.max_trace_error);
    max_hermiticity_error = std::max(max_hermiticity_error, o.max_hermiticity_error);
    max_block_coherence = std::max(max_block_coherence, o.max_block_coherence);
    min_eigenvalue = std::min(min_eigenvalue, o.min_eigenvalue);
    steps += o.steps;
  }
};

struct PropagationTolerances {
  double unitarity = 1e-12;
  double state = 1e-9;
  double block_coherence = 1e-10;
};

struct Trajectory {
  std::vector<double> times;
  std::vector<DensityOperator> states;
  ConservationLog log;

  std::size_t size() const { return times.size(); }
  std::vector<double> s_polarization() const {
    std::vector<double> out;
    out.reserve(states.size());
    for (const auto& r : states) out.push_back(wolf::s_polarization(r));
    return out;
  }
  std::vector<double> population(const StateVector& v) const {
    std::vector<double> out;
    out.reserve(states.size());
    for (const auto& r : states) out.push_back(wolf::population(r, v));
    return out;
  }
};

/// Piecewise-constant midpoint propagator for one system and field. The
/// step length is period / steps_per_period; for a periodic drive the
/// one-period propagator is built once at construction, so an instance is
/// immutable afterwards and may be shared between threads.
class Propagator {
 public:
  Propagator(const SpinSystem& sys, const FieldSchedule& field, int steps_per_period,
             PropagationTolerances tol = {})
      : ham_(sys, field), steps_per_period_(steps_per_period), tol_(tol) {
    sys.validate();
    field.validate();
    if (steps_per_period < 100)
      throw std::invalid_argument("Propagator: steps_per_period must be >= 100");
    periodic_ = field.omega_wolf != 0.0 && field.b_wolf_peak != 0.0;
    // A static field needs no time resolution; use the pulse duration (or a
    // nominal second) as the stepping "period".
    period_ = periodic_ ? field.period() : (field.duration > 0.0 ? field.duration : 1.0);
    dt_ = period_ / steps_per_period_;
    if (periodic_) {
      period_u_ = Operator::Identity();
      for (int k = 0; k < steps_per_period_; ++k)
        period_u_ = checked_step((k + 0.5) * dt_, dt_, build_log_) * period_u_;
      build_log_.max_composite_unitarity_error = unitarity_error(period_u_);
    }
  }

  double dt() const { return dt_; }
  double period() const { return period_; }
  const ConservationLog& build_log() const { return build_log_; }

  /// Propagator from 0 to `duration`.
  Operator propagator_to(double duration, ConservationLog& log) const {
    if (!(duration >= 0.0) || !std::isfinite(duration))
      throw std::invalid_argument("Propagator: duration must be finite and >= 0");
    if (!periodic_) return advance(Operator::Identity(), 0.0, duration, log);
    const auto n_periods = static_cast<long>(std::floor(duration / period_ * (1.0 + 1e-12)));
    Operator u = power(period_u_, n_periods);
    log.merge(build_log_);
    log.max_composite_unitarity_error =
        std::max(log.max_composite_unitarity_error, unitarity_error(u));
    const double start = n_periods * period_;
    if (duration - start > 1e-12 * period_) u = advance(u, start, duration, log);
    return u;
  }

  DensityOperator final_state(const DensityOperator& rho0, double duration, ConservationLog& log) const {
    const Operator u = propagator_to(duration, log);
    DensityOperator rho = rho0.evolved(u);
    record(rho, rho0, log);
    return rho;
  }

  /// States at t = k * period for k = 0..n_periods (periodic drive only).
  Trajectory period_samples(const DensityOperator& rho0, long n_periods) const {
    if (!periodic_) throw std::logic_error("period_samples: field is not periodic");
    Trajectory tr;
    tr.log.merge(build_log_);
    DensityOperator rho = rho0;
    for (long k = 0; k <= n_periods; ++k) {
      if (k > 0) rho = rho.evolved(period_u_);
      record(rho, rho0, tr.log);
      tr.times.push_back(k * period_);
      tr.states.push_back(rho);
    }
    return tr;
  }

  bool periodic() const { return periodic_; }

  /// Step-by-step trajectory sampled every `sample_stride` steps and at the end.
  Trajectory trajectory(const DensityOperator& rho0, double duration, int sample_stride) const {
    if (sample_stride < 1) throw std::invalid_argument("trajectory: sample_stride must be >= 1");
    if (!(duration >= 0.0) || !std::isfinite(duration))
      throw std::invalid_argument("trajectory: duration must be finite and >= 0");
    Trajectory tr;
    tr.times.push_back(0.0);
    tr.states.push_back(rho0);
    record(rho0, rho0, tr.log);
    const auto n_full = static_cast<long>(std::floor(duration / dt_ * (1.0 + 1e-12)));
    DensityOperator rho = rho0;
    double t = 0.0;
    for (long k = 0; k < n_full; ++k) {
      t = k * dt_;
      rho = rho.evolved(checked_step(t + 0.5 * dt_, dt_, tr.log));
      if ((k + 1) % sample_stride == 0) {
        record(rho, rho0, tr.log);
        tr.times.push_back((k + 1) * dt_);
        tr.states.push_back(rho);
      }
    }
    const double done = n_full * dt_;
    const double rest = duration - done;
    if (rest > 1e-12 * dt_) {
      rho = rho.evolved(checked_step(done + 0.5 * rest, rest, tr.log));
    }
    if (tr.times.back() < duration && duration > 0.0) {
      record(rho, rho0, tr.log);
      tr.times.push_back(duration);
      tr.states.push_back(rho);
    }
    return tr;
  }

 private:
  Operator checked_step(double t_mid, double dt, ConservationLog& log) const {
    Operator u = step_propagator(ham_(t_mid), dt);
    const double err = unitarity_error(u);
    log.max_unitarity_error = std::max(log.max_unitarity_error, err);
    ++log.steps;
    if (err > tol_.unitarity) {
      std::ostringstream os;
      os << "step propagator unitarity error " << err << " at t = " << t_mid;
      throw InvariantError(os.str());
    }
    return u;
  }

  Operator advance(Operator u, double from, double to, ConservationLog& log) const {
    double t = from;
    while (to - t > 1e-12 * dt_) {
      const double h = std::min(dt_, to - t);
      u = checked_step(t + 0.5 * h, h, log) * u;
      t += h;
    }
    return u;
  }

  static Operator power(Operator base, long n) {
    Operator out = Operator::Identity();
    while (n > 0) {
      if (n & 1) out = base * out;
      base = base * base;
      n >>= 1;
    }
    return out;
  }

  void record(const DensityOperator& rho, const DensityOperator& rho0, ConservationLog& log) const {
    log.max_trace_error = std::max(log.max_trace_error, rho.trace_error());
    log.max_hermiticity_error = std::max(log.max_hermiticity_error, rho.hermiticity());
    const double coh = mz_block_coherence(rho.matrix());
    // Block coherences are only conserved when they start at zero.
    if (mz_block_coherence(rho0.matrix()) <= tol_.block_coherence)
      log.max_block_coherence = std::max(log.max_block_coherence, coh);
    log.min_eigenvalue = std::min(log.min_eigenvalue, rho.min_eigenvalue());
    std::ostringstream os;
    if (rho.trace_error() > tol_.state) os << "trace drift " << rho.trace_error() << "; ";
    if (rho.hermiticity() > tol_.state) os << "hermiticity drift " << rho.hermiticity() << "; ";
    if (mz_block_coherence(rho0.matrix()) <= tol_.block_coherence && coh > tol_.block_coherence)
      os << "Mz block coherence " << coh << "; ";
    if (!os.str().empty()) throw InvariantError("propagation invariant violated: " + os.str());
  }

  TimeDependentHamiltonian ham_;
  int steps_per_period_;
  PropagationTolerances tol_;
  bool periodic_ = false;
  double period_ = 1.0;
  double dt_ = 1.0;
  Operator period_u_ = Operator::Identity();
  ConservationLog build_log_;
};

/// Full trajectory over field.duration.
inline Trajectory evolve(const SpinSystem& sys, const FieldSchedule& field, const DensityOperator& rho0,
                         int steps_per_period, int sample_stride) {
  return Propagator(sys, field, steps_per_period).trajectory(rho0, field.duration, sample_stride);
}

}  // namespace wolf
