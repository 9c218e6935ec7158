#pragma once

// Command-line front end. run_cli() is the whole program so it can be
// driven in-process from tests; tools/wolfsim.cpp only forwards argv.
//
// Precedence, lowest to highest: built-in defaults, --config file, --set
// overrides in command-line order, then the dedicated flags --out,
// --workers and --steps-per-period.
//
// Exit codes: 0 success, 2 configuration or usage error, 3 runtime or
// invariant failure (including an unwritable output path).

#include "wolf/config.hpp"
#include "wolf/experiments.hpp"

#include <CLI11.hpp>

#include <fstream>
#include <iomanip>
#include <iostream>
#include <map>
#include <memory>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

namespace wolf {

inline constexpr int kExitOk = 0;
inline constexpr int kExitConfig = 2;
inline constexpr int kExitRuntime = 3;

namespace cli {

inline const std::vector<std::string>& commands() {
  static const std::vector<std::string> names{"info",          "simulate",       "scan-duration",
                                              "scan-frequency", "scan-amplitude", "report"};
  return names;
}

struct Column {
  std::string header;  // name[unit]
  std::vector<double> values;
};

inline void write_csv(std::ostream& os, const std::string& provenance, const std::vector<Column>& cols) {
  std::istringstream prov(provenance);
  for (std::string line; std::getline(prov, line);) os << "# " << line << '\n';
  for (std::size_t c = 0; c < cols.size(); ++c) os << (c ? "," : "") << cols[c].header;
  os << '\n';
  const std::size_t rows = cols.empty() ? 0 : cols.front().values.size();
  for (std::size_t r = 0; r < rows; ++r) {
    for (std::size_t c = 0; c < cols.size(); ++c) os << (c ? "," : "") << format_double(cols[c].values[r]);
    os << '\n';
  }
}

inline std::vector<Column> scan_columns(const ScanResult& r) {
  std::vector<Column> cols;
  Column param;
  if (r.parameter_name == "omega_wolf") {
    param.header = "f_wolf[Hz]";
    for (double w : r.grid) param.values.push_back(w / kTwoPi);
  } else if (r.parameter_name == "b_wolf_peak") {
    param.header = "B_wolf[uT]";
    for (double b : r.grid) param.values.push_back(b / kMicroTesla);
  } else {
    param.header = r.parameter_name + "[" + r.parameter_unit + "]";
    param.values = r.grid;
  }
  cols.push_back(std::move(param));
  for (const auto& s : r.observables) {
    const bool hz = s.name.size() > 3 && s.name.ends_with("_Hz");
    cols.push_back({hz ? s.name.substr(0, s.name.size() - 3) + "[Hz]" : s.name + "[1]", s.values});
  }
  return cols;
}

/// Where CSV goes and where the human-readable summary goes.
struct Sinks {
  std::ostream* csv = nullptr;
  std::ostream* summary = nullptr;
  std::unique_ptr<std::ofstream> file;
};

inline Sinks open_sinks(const std::string& path, std::ostream& out, std::ostream& err) {
  Sinks s;
  if (path.empty() || path == "-") {
    s.csv = &out;
    s.summary = &err;
    return s;
  }
  s.file = std::make_unique<std::ofstream>(path, std::ios::binary | std::ios::trunc);
  if (!*s.file) throw std::runtime_error("cannot write output file '" + path + "'");
  s.csv = s.file.get();
  s.summary = &out;
  return s;
}

inline std::string provenance(const std::string& command, const RunConfig& cfg) {
  return "wolfsim " + command + "\n" + dump_config(cfg);
}

inline void print_log(std::ostream& os, const ConservationLog& log) {
  os << "max step unitarity error: " << log.max_unitarity_error << '\n'
     << "max trace error: " << log.max_trace_error << '\n'
     << "max hermiticity error: " << log.max_hermiticity_error << '\n'
     << "max Mz block coherence: " << log.max_block_coherence << '\n';
}

inline void run_info(const RunConfig& cfg, std::ostream& out) {
  const SpinSystem sys = to_system(cfg);
  const FieldSchedule f = to_field(cfg);
  const auto [theta, phi] = mixing_angles(sys);
  const AnalyticModel m = analytic_model(sys, f);
  const ValidityMetrics v = validity_metrics(sys, f);
  out << std::setprecision(6);
  out << "system: " << cfg.name << " (" << cfg.isotopes << ")\n";
  out << "omega_ST/2pi [Hz]: " << omega_st(sys, f.b_bias) / kTwoPi << '\n';
  out << "omega_TT/2pi [Hz]: " << omega_tt(sys, f.b_bias) / kTwoPi << '\n';
  out << "omega_WOLF/2pi [Hz]: " << f.omega_wolf / kTwoPi << '\n';
  out << "theta [rad]: " << theta << '\n';
  out << "phi [rad]: " << phi << '\n';
  out << "omega_x/2pi [Hz]: " << m.omega_x / kTwoPi << '\n';
  out << "A: " << m.modulation_index << '\n';
  out << "|omega_nut|/2pi [Hz]: " << std::abs(m.omega_nut) / kTwoPi << '\n';
  out << "tau_pi [s]: " << m.tau_pi() << '\n';
  out << "|omega_x/omega_ST|: " << v.omega_ratio << (v.omega_ratio_flag ? "  [outside regime]" : "") << '\n';
  out << "bound 2pi sqrt(J13^2+J23^2)/|omega_ST|: " << v.omega_ratio_bound << '\n';
  out << "|J13-J23|/|J12|: " << v.near_equivalence << (v.near_equivalence_flag ? "  [outside regime]" : "")
      << '\n';
  out << "(2pi)^2 (J13^2+J23^2)/omega_ST^2: " << v.weak_coupling
      << (v.weak_coupling_flag ? "  [outside regime]" : "") << '\n';
}

inline void run_simulate(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
  const SpinSystem sys = to_system(cfg);
  const FieldSchedule f = to_field(cfg);
  const Trajectory tr = evolve(sys, f, phip_initial_state(), cfg.steps_per_period, cfg.sample_stride);
  std::vector<Column> cols{{"t[s]", tr.times}, {"s_polarization[1]", tr.s_polarization()}};
  for (const auto& b : coupled_basis()) {
    std::string label = b.label();
    for (auto& ch : label) {
      if (ch == '+') ch = 'p';
      if (ch == '-') ch = 'm';
    }
    cols.push_back({"p_" + label + "[1]", tr.population(b.vector)});
  }
  Sinks sinks = open_sinks(cfg.output, out, err);
  write_csv(*sinks.csv, provenance("simulate", cfg), cols);
  *sinks.summary << "samples: " << tr.size() << '\n'
                 << "final s_polarization: " << tr.s_polarization().back() << '\n';
  print_log(*sinks.summary, tr.log);
}

inline ScanOptions scan_options(const RunConfig& cfg) {
  return {cfg.steps_per_period, cfg.workers, cfg.snap_to_period};
}

inline void run_scan(const std::string& command, const RunConfig& cfg, std::ostream& out, std::ostream& err) {
  const SpinSystem sys = to_system(cfg);
  const FieldSchedule f = to_field(cfg);
  const AnalyticModel m = analytic_model(sys, f);
  ScanResult r;
  std::ostringstream summary;
  if (command == "scan-duration") {
    const auto grid = cfg.grid ? cfg.grid->expand() : GridSpec{0.0, 3.0 * m.tau_pi(), 100, {}}.expand();
    r = duration_scan(sys, f, grid, scan_options(cfg));
    summary << "first maximum at tau [s]: " << first_maximum(r) << '\n'
            << "analytic tau_pi [s]: " << m.tau_pi() << '\n';
  } else if (command == "scan-frequency") {
    const double f_st = m.omega_st / kTwoPi;
    const double f_nut = std::abs(m.omega_nut) / kTwoPi;
    const auto hz = cfg.grid ? cfg.grid->expand()
                             : GridSpec{f_st - 4.0 * f_nut, f_st + 4.0 * f_nut, 101, {}}.expand();
    std::vector<double> omega;
    for (double x : hz) omega.push_back(kTwoPi * x);
    const double tau = cfg.scan_tau_s.value_or(m.tau_pi());
    r = frequency_scan(sys, f, omega, tau, scan_options(cfg));
    const PeakWidth p = frequency_peak(r);
    summary << "pulse duration [s]: " << tau << '\n'
            << "peak at f_wolf [Hz]: " << p.peak_location / kTwoPi << '\n'
            << "omega_ST/2pi [Hz]: " << f_st << '\n'
            << "FWHM [Hz]: ";
    if (p.fwhm) summary << *p.fwhm / kTwoPi << '\n';
    else summary << "unavailable (grid does not bracket the half maximum)\n";
  } else {
    std::vector<double> b;
    if (cfg.grid) {
      for (double x : cfg.grid->expand()) b.push_back(x * kMicroTesla);
    } else {
      const double b_at_a4 = 4.0 * m.omega_st / sys.delta_gamma();
      b = GridSpec{0.0, std::abs(b_at_a4), 81, {}}.expand();
    }
    AmplitudeScanOptions opt;
    static_cast<ScanOptions&>(opt) = scan_options(cfg);
    opt.tau_short = cfg.tau_short_s.value_or(0.0);
    r = amplitude_scan(sys, f, b, opt);
    const AmplitudeOptimum o = amplitude_optimum(r);
    summary << "short pulse [s]: " << r.field.duration << '\n'
            << "analytic argmax: A = " << o.analytic_argmax_a << ", B_wolf [uT] = "
            << o.analytic_argmax_b / kMicroTesla << '\n'
            << "numeric argmax: A = " << o.numeric_argmax_a << ", B_wolf [uT] = "
            << o.numeric_argmax_b / kMicroTesla << '\n';
  }
  Sinks sinks = open_sinks(cfg.output, out, err);
  write_csv(*sinks.csv, provenance(command, cfg), scan_columns(r));
  *sinks.summary << summary.str();
  print_log(*sinks.summary, r.log);
}

inline void run_report(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
  const SpinSystem sys = to_system(cfg);
  const FieldSchedule f = to_field(cfg);
  ReportOptions opt;
  opt.steps_per_period = cfg.steps_per_period;
  opt.span_tau_pi = cfg.report_span_tau_pi;
  if (cfg.tau_s > 0.0) opt.fallback_span = cfg.tau_s;
  const AnalyticNumericReport rep = analytic_vs_numeric_report(sys, f, opt);
  std::ostringstream s;
  s << std::setprecision(8) << "rms deviation: " << rep.rms_deviation << '\n'
    << "max deviation: " << rep.max_deviation << '\n'
    << "predicted |omega_nut|/2pi [Hz]: " << rep.predicted_omega / kTwoPi << '\n'
    << "fitted omega/2pi [Hz]: " << rep.fitted_omega / kTwoPi << '\n'
    << "relative frequency error: " << rep.relative_error << '\n';
  Sinks sinks = open_sinks(cfg.output, out, err);
  write_csv(*sinks.csv, provenance("report", cfg) + s.str(),
            {{"tau[s]", rep.tau},
             {"p_S0beta_normalized[1]", rep.numeric_normalized},
             {"analytic_p_S0beta[1]", rep.analytic},
             {"s_polarization[1]", rep.s_polarization}});
  *sinks.summary << s.str();
  print_log(*sinks.summary, rep.log);
}

}  // namespace cli

/// Entire wolfsim program.
inline int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Low-frequency singlet-triplet excitation simulator"};
  app.set_version_flag("--version", "wolfsim 1.0");
  std::string config_path;
  std::vector<std::string> overrides;
  std::string out_path;
  int workers = 0;
  int steps = 0;
  bool dump = false;
  app.add_option("--config", config_path, "Run configuration file (key = value)");
  app.add_option("--set", overrides, "Override one configuration key, KEY=VALUE (repeatable)")
      ->allow_extra_args(false);
  app.add_option("--out", out_path, "Output file ('-' for stdout)");
  app.add_option("--workers", workers, "Worker threads for scans")->check(CLI::PositiveNumber);
  app.add_option("--steps-per-period", steps, "Propagation steps per WOLF period")->check(CLI::Range(100, 100000000));
  app.fallthrough();
  app.require_subcommand(0, 1);
  const std::map<std::string, std::string> about{
      {"info", "Print resonance frequencies, mixing angles and regime metrics"},
      {"simulate", "Propagate one pulse and write the trajectory"},
      {"scan-duration", "Final-state scan over pulse duration (s)"},
      {"scan-frequency", "Final-state scan over WOLF frequency (Hz)"},
      {"scan-amplitude", "Final-state scan over WOLF amplitude (uT)"},
      {"report", "Compare numeric and analytic S-polarization"}};
  for (const auto& name : cli::commands()) {
    auto* sub = app.add_subcommand(name, about.at(name));
    if (name == "info") sub->add_flag("--dump-config", dump, "Print the resolved configuration");
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::Success& e) {
    app.exit(e, out, err);
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    app.exit(e, out, err);
    return kExitConfig;
  }

  RunConfig cfg;
  std::string command;
  try {
    if (!config_path.empty()) load_config_file(cfg, config_path);
    for (const auto& o : overrides) apply_override(cfg, o);
    if (!out_path.empty()) cfg.output = out_path;
    if (workers > 0) cfg.workers = workers;
    if (steps > 0) cfg.steps_per_period = steps;
    validate(cfg);
    command = app.get_subcommands().empty() ? cfg.command : app.get_subcommands().front()->get_name();
    if (command.empty()) throw ConfigError("no command given (use a subcommand or run.command)");
    if (std::find(cli::commands().begin(), cli::commands().end(), command) == cli::commands().end())
      throw ConfigError("unknown command '" + command + "'");
    cfg.command = command;
    to_system(cfg);
  } catch (const ConfigError& e) {
    err << "wolfsim: config error: " << e.what() << '\n';
    return kExitConfig;
  }

  try {
    if (command == "info") {
      if (dump) out << dump_config(cfg);
      else cli::run_info(cfg, out);
    } else if (command == "simulate") {
      cli::run_simulate(cfg, out, err);
    } else if (command == "report") {
      cli::run_report(cfg, out, err);
    } else {
      cli::run_scan(command, cfg, out, err);
    }
  } catch (const ConfigError& e) {
    err << "wolfsim: config error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const std::exception& e) {
    err << "wolfsim: error: " << e.what() << '\n';
    return kExitRuntime;
  }
  return kExitOk;
}

}  // namespace wolf
