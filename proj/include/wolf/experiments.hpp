#pragma once

// Parameter scans over the exact propagator with analytic overlays:
// pulse duration, drive frequency and drive amplitude, plus an
// analytic-versus-numeric comparison of the resonant nutation.

#include "wolf/analytic.hpp"
#include "wolf/propagator.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <functional>
#include <limits>
#include <optional>
#include <stdexcept>
#include <string>
#include <thread>
#include <utility>
#include <vector>

namespace wolf {

inline constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

/// Evaluates fn(i) for i in [0, n) on `workers` threads; results keep index
/// order. The first exception (lowest index) is rethrown after all workers
/// join.
template <typename T, typename Fn>
std::vector<T> parallel_map(std::size_t n, int workers, Fn&& fn) {
  std::vector<T> out(n);
  std::vector<std::exception_ptr> errors(n);
  std::atomic<std::size_t> next{0};
  auto work = [&] {
    for (std::size_t i = next++; i < n; i = next++) {
      try {
        out[i] = fn(i);
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  };
  const auto nthreads = static_cast<std::size_t>(std::max(1, workers));
  if (nthreads == 1 || n < 2) {
    work();
  } else {
    std::vector<std::jthread> pool;
    for (std::size_t k = 0; k < std::min(nthreads, n); ++k) pool.emplace_back(work);
  }
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
  return out;
}

struct ScanOptions {
  int steps_per_period = 1000;
  int workers = 1;
  bool snap_to_period = false;
};

struct Series {
  std::string name;
  std::vector<double> values;
};

struct ScanResult {
  std::string parameter_name;
  std::string parameter_unit;
  std::vector<double> grid;
  std::vector<Series> observables;
  SpinSystem system;
  FieldSchedule field;
  ConservationLog log;

  const std::vector<double>& series(const std::string& name) const {
    for (const auto& s : observables)
      if (s.name == name) return s.values;
    throw std::out_of_range("ScanResult: no series named " + name);
  }
  void add(std::string name, std::vector<double> values) {
    if (values.size() != grid.size())
      throw std::logic_error("ScanResult: series length differs from grid");
    observables.push_back({std::move(name), std::move(values)});
  }
};

// ---------------------------------------------------------------------------
// Curve analysis

/// Index of the maximum of the first lobe: the running maximum is tracked
/// until the curve falls below half of it, after that maximum has reached
/// half of the global maximum.
inline std::size_t first_peak_index(const std::vector<double>& values) {
  if (values.empty()) throw std::invalid_argument("first_peak_index: empty series");
  const double global = *std::max_element(values.begin(), values.end());
  std::size_t best = 0;
  for (std::size_t i = 1; i < values.size(); ++i) {
    if (values[i] > values[best]) best = i;
    if (values[best] >= 0.5 * global && values[best] > 0.0 && values[i] < 0.5 * values[best]) break;
  }
  return best;
}

struct PeakWidth {
  std::size_t peak_index = 0;
  double peak_location = 0.0;
  double peak_value = 0.0;
  std::optional<double> fwhm;
  std::optional<double> left_half;
  std::optional<double> right_half;
};

/// Global maximum and full width at half maximum by linear interpolation
/// between the samples bracketing the half level on each side.
inline PeakWidth peak_and_fwhm(const std::vector<double>& grid, const std::vector<double>& values) {
  if (grid.size() != values.size() || grid.empty())
    throw std::invalid_argument("peak_and_fwhm: grid and values must be non-empty and equal length");
  PeakWidth p;
  p.peak_index = static_cast<std::size_t>(std::max_element(values.begin(), values.end()) - values.begin());
  p.peak_location = grid[p.peak_index];
  p.peak_value = values[p.peak_index];
  const double half = 0.5 * p.peak_value;
  auto cross = [&](std::size_t a, std::size_t b) {
    const double f = (half - values[a]) / (values[b] - values[a]);
    return grid[a] + f * (grid[b] - grid[a]);
  };
  for (std::size_t i = p.peak_index; i > 0; --i)
    if (values[i - 1] <= half) {
      p.left_half = cross(i - 1, i);
      break;
    }
  for (std::size_t i = p.peak_index; i + 1 < values.size(); ++i)
    if (values[i + 1] <= half) {
      p.right_half = cross(i + 1, i);
      break;
    }
  if (p.left_half && p.right_half) p.fwhm = std::abs(*p.right_half - *p.left_half);
  return p;
}

struct CosineFit {
  double omega = kNaN;  // rad/s
  double offset = kNaN;
  double cos_amp = kNaN;
  double sin_amp = kNaN;
  double rms_residual = kNaN;
};

/// Least-squares fit of offset + a cos(w t) + b sin(w t); the linear part
/// is solved exactly for each trial w, which is located by a grid search
/// over [w_lo, w_hi] followed by golden-section refinement.
inline CosineFit fit_cosine(const std::vector<double>& t, const std::vector<double>& y, double w_lo,
                            double w_hi, int grid_points = 2001) {
  if (t.size() != y.size() || t.size() < 4)
    throw std::invalid_argument("fit_cosine: need at least four samples");
  const auto n = static_cast<Eigen::Index>(t.size());
  const Eigen::Map<const Eigen::VectorXd> yv(y.data(), n);
  auto solve = [&](double w, CosineFit* out) {
    Eigen::MatrixXd a(n, 3);
    for (Eigen::Index i = 0; i < n; ++i) {
      a(i, 0) = 1.0;
      a(i, 1) = std::cos(w * t[i]);
      a(i, 2) = std::sin(w * t[i]);
    }
    const Eigen::Vector3d c = a.colPivHouseholderQr().solve(yv);
    const double rss = (a * c - yv).squaredNorm();
    if (out) *out = {w, c(0), c(1), c(2), std::sqrt(rss / n)};
    return rss;
  };
  double best_w = w_lo, best = std::numeric_limits<double>::infinity();
  const double step = (w_hi - w_lo) / (grid_points - 1);
  for (int k = 0; k < grid_points; ++k) {
    const double w = w_lo + k * step;
    const double r = solve(w, nullptr);
    if (r < best) {
      best = r;
      best_w = w;
    }
  }
  double lo = std::max(w_lo, best_w - step), hi = std::min(w_hi, best_w + step);
  const double g = 0.5 * (std::sqrt(5.0) - 1.0);
  double x1 = hi - g * (hi - lo), x2 = lo + g * (hi - lo);
  double f1 = solve(x1, nullptr), f2 = solve(x2, nullptr);
  for (int it = 0; it < 100 && hi - lo > 1e-12 * std::abs(hi); ++it) {
    if (f1 < f2) {
      hi = x2;
      x2 = x1;
      f2 = f1;
      x1 = hi - g * (hi - lo);
      f1 = solve(x1, nullptr);
    } else {
      lo = x1;
      x1 = x2;
      f1 = f2;
      x2 = lo + g * (hi - lo);
      f2 = solve(x2, nullptr);
    }
  }
  CosineFit fit;
  solve(0.5 * (lo + hi), &fit);
  return fit;
}

// ---------------------------------------------------------------------------
// Scans

/// Rounds each duration to the nearest whole number of WOLF periods and
/// drops values that collapse onto an earlier one.
inline std::vector<double> snap_to_periods(const std::vector<double>& taus, double period) {
  std::vector<double> out;
  for (double tau : taus) {
    const double snapped = std::round(tau / period) * period;
    if (out.empty() || snapped > out.back()) out.push_back(snapped);
  }
  return out;
}

namespace detail {

inline void require_monotonic(const std::vector<double>& grid, const char* what) {
  if (grid.empty()) throw std::invalid_argument(std::string(what) + ": empty grid");
  for (double g : grid)
    if (!std::isfinite(g)) throw std::invalid_argument(std::string(what) + ": non-finite grid value");
  const bool up = std::adjacent_find(grid.begin(), grid.end(), std::greater_equal<>()) == grid.end();
  const bool down = std::adjacent_find(grid.begin(), grid.end(), std::less_equal<>()) == grid.end();
  if (!up && !down) throw std::invalid_argument(std::string(what) + ": grid must be strictly monotonic");
}

struct PointResult {
  double s_pol = 0.0;
  double p_s0b = 0.0;
  double p_t0b = 0.0;
  double p_tm1a = 0.0;
  ConservationLog log;
};

inline PointResult measure(const DensityOperator& rho, ConservationLog log) {
  return {s_polarization(rho), population(rho, product_state(PairState::S0, SState::beta)),
          population(rho, product_state(PairState::T0, SState::beta)),
          population(rho, product_state(PairState::Tm1, SState::alpha)), log};
}

inline void fill_standard(ScanResult& r, const std::vector<PointResult>& pts, std::vector<double> analytic) {
  std::vector<double> s, sn, a, b, c;
  for (const auto& p : pts) {
    s.push_back(p.s_pol);
    a.push_back(p.p_s0b);
    b.push_back(p.p_t0b);
    c.push_back(p.p_tm1a);
    r.log.merge(p.log);
  }
  const double peak = s.empty() ? 0.0 : *std::max_element(s.begin(), s.end());
  for (double v : s) sn.push_back(peak > 0.0 ? v / peak : 0.0);
  r.add("s_polarization", std::move(s));
  r.add("s_polarization_normalized", std::move(sn));
  r.add("p_S0beta", std::move(a));
  r.add("p_T0beta", std::move(b));
  r.add("p_Tm1alpha", std::move(c));
  r.add("analytic_prediction", std::move(analytic));
}

}  // namespace detail

/// Final S-polarization and W-block populations against pulse duration,
/// starting from the PHIP state, with the closed-form resonant overlay.
inline ScanResult duration_scan(const SpinSystem& sys, const FieldSchedule& field_template,
                                std::vector<double> tau_grid, const ScanOptions& opt = {}) {
  detail::require_monotonic(tau_grid, "duration_scan");
  for (double tau : tau_grid)
    if (tau < 0.0) throw std::invalid_argument("duration_scan: durations must be >= 0");
  const Propagator prop(sys, field_template, opt.steps_per_period);
  if (opt.snap_to_period && prop.periodic()) {
    if (tau_grid.front() > tau_grid.back()) std::reverse(tau_grid.begin(), tau_grid.end());
    tau_grid = snap_to_periods(tau_grid, prop.period());
  }
  const DensityOperator rho0 = phip_initial_state();
  auto pts = parallel_map<detail::PointResult>(tau_grid.size(), opt.workers, [&](std::size_t i) {
    ConservationLog log;
    const DensityOperator rho = prop.final_state(rho0, tau_grid[i], log);
    return detail::measure(rho, log);
  });

  ScanResult r;
  r.parameter_name = "tau";
  r.parameter_unit = "s";
  r.grid = tau_grid;
  r.system = sys;
  r.field = field_template;
  const double w_nut = nutation_frequency(sys, field_template);
  std::vector<double> analytic;
  for (double tau : tau_grid) analytic.push_back(analytic_s_polarization(w_nut, tau));
  detail::fill_standard(r, pts, std::move(analytic));
  return r;
}

/// Location of the first S-polarization maximum of a duration scan.
inline double first_maximum(const ScanResult& r) {
  return r.grid[first_peak_index(r.series("s_polarization"))];
}

/// Final S-polarization against drive angular frequency at fixed duration.
inline ScanResult frequency_scan(const SpinSystem& sys, const FieldSchedule& field_template,
                                 const std::vector<double>& omega_grid, double tau,
                                 const ScanOptions& opt = {}) {
  detail::require_monotonic(omega_grid, "frequency_scan");
  if (!(tau > 0.0)) throw std::invalid_argument("frequency_scan: tau must be > 0");
  const DensityOperator rho0 = phip_initial_state();
  auto pts = parallel_map<detail::PointResult>(omega_grid.size(), opt.workers, [&](std::size_t i) {
    FieldSchedule f = field_template;
    f.omega_wolf = omega_grid[i];
    f.duration = tau;
    ConservationLog log;
    const Propagator prop(sys, f, opt.steps_per_period);
    const DensityOperator rho = prop.final_state(rho0, tau, log);
    return detail::measure(rho, log);
  });
  ScanResult r;
  r.parameter_name = "omega_wolf";
  r.parameter_unit = "rad/s";
  r.grid = omega_grid;
  r.system = sys;
  r.field = field_template;
  r.field.duration = tau;
  // No closed form off resonance.
  detail::fill_standard(r, pts, std::vector<double>(omega_grid.size(), kNaN));
  return r;
}

inline PeakWidth frequency_peak(const ScanResult& r) {
  std::vector<double> g = r.grid, v = r.series("s_polarization");
  if (g.size() > 1 && g.front() > g.back()) {
    std::reverse(g.begin(), g.end());
    std::reverse(v.begin(), v.end());
  }
  return peak_and_fwhm(g, v);
}

struct AmplitudeScanOptions : ScanOptions {
  /// Short pulse length for the numeric transfer; <= 0 selects a whole number
  /// of periods close to a quarter of the fastest achievable pi time.
  double tau_short = 0.0;
};

/// Short-pulse duration used by amplitude_scan when none is given.
inline double default_short_pulse(const SpinSystem& sys, const FieldSchedule& field) {
  constexpr double kJ1Max = 0.5818652249567;  // max_x J1(x)
  const double wst = std::abs(omega_st(sys, field.b_bias));
  const double wx = std::abs(two_level_model(sys, field).omega_x);
  const double tau = 0.25 * std::numbers::pi / (wx * kJ1Max);
  const double period = kTwoPi / wst;
  return std::max(1.0, std::round(tau / period)) * period;
}

/// Analytic |omega_nut| and numeric short-pulse transfer against the drive
/// amplitude, on resonance at omega_ST.
inline ScanResult amplitude_scan(const SpinSystem& sys, const FieldSchedule& field_template,
                                 const std::vector<double>& b_peak_grid,
                                 const AmplitudeScanOptions& opt = {}) {
  detail::require_monotonic(b_peak_grid, "amplitude_scan");
  for (double b : b_peak_grid)
    if (b < 0.0) throw std::invalid_argument("amplitude_scan: amplitudes must be >= 0");
  const double tau = opt.tau_short > 0.0 ? opt.tau_short : default_short_pulse(sys, field_template);
  const DensityOperator rho0 = phip_initial_state();
  auto pts = parallel_map<detail::PointResult>(b_peak_grid.size(), opt.workers, [&](std::size_t i) {
    FieldSchedule f = field_template;
    f.b_wolf_peak = b_peak_grid[i];
    f.duration = tau;
    ConservationLog log;
    const Propagator prop(sys, f, opt.steps_per_period);
    return detail::measure(prop.final_state(rho0, tau, log), log);
  });
  ScanResult r;
  r.parameter_name = "b_wolf_peak";
  r.parameter_unit = "T";
  r.grid = b_peak_grid;
  r.system = sys;
  r.field = field_template;
  r.field.duration = tau;
  std::vector<double> analytic, w_nut_hz, a_index;
  for (double b : b_peak_grid) {
    FieldSchedule f = field_template;
    f.b_wolf_peak = b;
    const AnalyticModel m = analytic_model(sys, f);
    analytic.push_back(analytic_s_polarization(m.omega_nut, tau));
    w_nut_hz.push_back(std::abs(m.omega_nut) / kTwoPi);
    a_index.push_back(m.modulation_index);
  }
  detail::fill_standard(r, pts, std::move(analytic));
  r.add("omega_nut_Hz", std::move(w_nut_hz));
  r.add("modulation_index", std::move(a_index));
  return r;
}

struct AmplitudeOptimum {
  double analytic_argmax_b = 0.0;
  double analytic_argmax_a = 0.0;
  double numeric_argmax_b = 0.0;
  double numeric_argmax_a = 0.0;
};

inline AmplitudeOptimum amplitude_optimum(const ScanResult& r) {
  const auto& w = r.series("omega_nut_Hz");
  const auto& s = r.series("s_polarization");
  const auto& a = r.series("modulation_index");
  const auto ia = static_cast<std::size_t>(std::max_element(w.begin(), w.end()) - w.begin());
  const auto in = static_cast<std::size_t>(std::max_element(s.begin(), s.end()) - s.begin());
  return {r.grid[ia], a[ia], r.grid[in], a[in]};
}

struct ReportOptions {
  int steps_per_period = 1000;
  /// Comparison window in units of the analytic pi time.
  double span_tau_pi = 2.0;
  /// Window used when the analytic nutation frequency vanishes.
  double fallback_span = 1.0;
};

struct AnalyticNumericReport {
  std::vector<double> tau;
  std::vector<double> numeric_normalized;  // p_S0beta(tau) / p_S0beta(0)
  std::vector<double> analytic;            // (1 + cos(omega_nut tau)) / 2
  std::vector<double> s_polarization;
  double rms_deviation = 0.0;
  double max_deviation = 0.0;
  double predicted_omega = 0.0;  // |omega_nut|
  double fitted_omega = kNaN;
  double relative_error = kNaN;
  double max_transfer = 0.0;  // max over tau of 1 - normalized S0 beta population
  ConservationLog log;
};

/// Samples the exact resonant trajectory once per WOLF period and compares
/// the normalised S0 beta population with the closed-form cosine.
inline AnalyticNumericReport analytic_vs_numeric_report(const SpinSystem& sys, const FieldSchedule& field,
                                                        const ReportOptions& opt = {}) {
  const AnalyticModel m = analytic_model(sys, field);
  const double w_nut = std::abs(m.omega_nut);
  const double span = w_nut > 0.0 ? opt.span_tau_pi * m.tau_pi() : opt.fallback_span;
  const Propagator prop(sys, field, opt.steps_per_period);
  const DensityOperator rho0 = phip_initial_state();
  const StateVector s0b = product_state(PairState::S0, SState::beta);
  const double p0 = population(rho0, s0b);

  Trajectory tr;
  if (prop.periodic()) {
    tr = prop.period_samples(rho0, static_cast<long>(std::ceil(span / prop.period())));
  } else {
    tr = prop.trajectory(rho0, span, std::max(1, opt.steps_per_period / 100));
  }
  AnalyticNumericReport rep;
  rep.log = tr.log;
  rep.predicted_omega = w_nut;
  double ss = 0.0;
  for (std::size_t i = 0; i < tr.size(); ++i) {
    const double tau = tr.times[i];
    const double num = population(tr.states[i], s0b) / p0;
    const double ana = 0.5 * (1.0 + std::cos(m.omega_nut * tau));
    rep.tau.push_back(tau);
    rep.numeric_normalized.push_back(num);
    rep.analytic.push_back(ana);
    rep.s_polarization.push_back(s_polarization(tr.states[i]));
    ss += (num - ana) * (num - ana);
    rep.max_deviation = std::max(rep.max_deviation, std::abs(num - ana));
    rep.max_transfer = std::max(rep.max_transfer, 1.0 - num);
  }
  rep.rms_deviation = std::sqrt(ss / static_cast<double>(tr.size()));
  if (w_nut > 0.0 && tr.size() >= 4) {
    const CosineFit fit = fit_cosine(rep.tau, rep.numeric_normalized, 0.5 * w_nut, 1.5 * w_nut);
    rep.fitted_omega = fit.omega;
    rep.relative_error = std::abs(fit.omega - w_nut) / w_nut;
  }
  return rep;
}

}  // namespace wolf
