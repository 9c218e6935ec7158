#pragma once

// Flat key = value run configuration with dotted section prefixes, e.g.
//
//   system.J12_Hz = 15.9
//   field.f_wolf_Hz = auto
//
// '#' starts a comment. Values given later (or through apply_override)
// replace earlier ones.

#include "wolf/hamiltonian.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <system_error>
#include <vector>

namespace wolf {

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Shortest decimal text that parses back to the same double.
inline std::string format_double(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

struct GridSpec {
  double start = 0.0;
  double stop = 0.0;
  int count = 1;
  std::vector<double> values;  // explicit list; overrides start/stop/count

  std::vector<double> expand() const {
    if (!values.empty()) return values;
    if (count < 1) throw ConfigError("run.grid.count: must be >= 1");
    if (count == 1) return {start};
    std::vector<double> out(static_cast<std::size_t>(count));
    for (int k = 0; k < count; ++k) out[k] = start + (stop - start) * k / (count - 1);
    return out;
  }
  bool operator==(const GridSpec&) const = default;
};

struct RunConfig {
  // system
  std::string name = "custom";
  std::string isotopes = "1H/13C";
  std::optional<double> gamma_i;  // rad s^-1 T^-1, overrides the isotope pair
  std::optional<double> gamma_s;
  double j12_hz = 0.0;
  double j13_hz = 0.0;
  double j23_hz = 0.0;
  // field
  double b_bias_ut = 2.0;
  double b_wolf_ut = 2.0;
  std::optional<double> f_wolf_hz;  // nullopt means "auto" (omega_ST)
  double phase_rad = 0.0;
  double tau_s = 0.0;
  // run
  std::string command;
  std::optional<GridSpec> grid;  // nullopt selects a command-specific default
  int steps_per_period = 1000;
  bool snap_to_period = false;
  int workers = 1;
  std::string output;
  int sample_stride = 10;
  std::optional<double> scan_tau_s;   // frequency scan duration, nullopt = analytic pi time
  std::optional<double> tau_short_s;  // amplitude scan pulse, nullopt = automatic
  double report_span_tau_pi = 2.0;

  bool operator==(const RunConfig&) const = default;
};

namespace detail {

inline std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return std::string(s.substr(b, e - b + 1));
}

inline double parse_number(const std::string& key, const std::string& text) {
  double v = 0.0;
  const char* first = text.data();
  const char* last = first + text.size();
  if (!text.empty() && *first == '+') ++first;
  const auto res = std::from_chars(first, last, v);
  if (res.ec != std::errc() || res.ptr != last || text.empty())
    throw ConfigError(key + ": expected a number, got '" + text + "'");
  if (!std::isfinite(v)) throw ConfigError(key + ": value must be finite");
  return v;
}

inline int parse_int(const std::string& key, const std::string& text) {
  int v = 0;
  const auto res = std::from_chars(text.data(), text.data() + text.size(), v);
  if (res.ec != std::errc() || res.ptr != text.data() + text.size() || text.empty())
    throw ConfigError(key + ": expected an integer, got '" + text + "'");
  return v;
}

inline bool parse_bool(const std::string& key, const std::string& text) {
  if (text == "true" || text == "yes" || text == "1") return true;
  if (text == "false" || text == "no" || text == "0") return false;
  throw ConfigError(key + ": expected true/false, got '" + text + "'");
}

inline std::optional<double> parse_auto(const std::string& key, const std::string& text) {
  if (text == "auto") return std::nullopt;
  return parse_number(key, text);
}

inline std::vector<double> parse_list(const std::string& key, const std::string& text) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) out.push_back(parse_number(key, trim(item)));
  if (out.empty()) throw ConfigError(key + ": empty list");
  return out;
}

inline std::string list_text(const std::vector<double>& v) {
  std::string s;
  for (std::size_t i = 0; i < v.size(); ++i) s += (i ? ", " : "") + format_double(v[i]);
  return s;
}

inline std::string auto_text(const std::optional<double>& v) { return v ? format_double(*v) : "auto"; }

inline GridSpec& grid(RunConfig& c) {
  if (!c.grid) c.grid.emplace();
  return *c.grid;
}

}  // namespace detail

/// Gyromagnetic ratio for an isotope label such as "1H" or "13C".
inline double isotope_gamma(const std::string& label) {
  static const std::map<std::string, double> table{{"1H", gyro::kProton},
                                                   {"13C", gyro::kCarbon13},
                                                   {"15N", gyro::kNitrogen15},
                                                   {"19F", gyro::kFluorine19},
                                                   {"31P", gyro::kPhosphorus31}};
  const auto it = table.find(label);
  if (it == table.end()) throw ConfigError("system.isotopes: unknown isotope '" + label + "'");
  return it->second;
}

/// Sets one key; throws ConfigError naming the key on any problem.
inline void apply_setting(RunConfig& c, const std::string& key, const std::string& value) {
  using namespace detail;
  if (key == "system.name") c.name = value;
  else if (key == "system.isotopes") {
    const auto slash = value.find('/');
    if (slash == std::string::npos) throw ConfigError(key + ": expected I/S, e.g. 1H/13C");
    isotope_gamma(value.substr(0, slash));
    isotope_gamma(value.substr(slash + 1));
    c.isotopes = value;
  } else if (key == "system.gamma_I") c.gamma_i = parse_auto(key, value);
  else if (key == "system.gamma_S") c.gamma_s = parse_auto(key, value);
  else if (key == "system.J12_Hz") c.j12_hz = parse_number(key, value);
  else if (key == "system.J13_Hz") c.j13_hz = parse_number(key, value);
  else if (key == "system.J23_Hz") c.j23_hz = parse_number(key, value);
  else if (key == "field.B_bias_uT") c.b_bias_ut = parse_number(key, value);
  else if (key == "field.B_wolf_uT") c.b_wolf_ut = parse_number(key, value);
  else if (key == "field.f_wolf_Hz") c.f_wolf_hz = parse_auto(key, value);
  else if (key == "field.phase_rad") c.phase_rad = parse_number(key, value);
  else if (key == "field.tau_s") c.tau_s = parse_number(key, value);
  else if (key == "run.command") c.command = value;
  else if (key == "run.grid.start") grid(c).start = parse_number(key, value);
  else if (key == "run.grid.stop") grid(c).stop = parse_number(key, value);
  else if (key == "run.grid.count") grid(c).count = parse_int(key, value);
  else if (key == "run.grid.values") grid(c).values = value.empty() ? std::vector<double>{} : parse_list(key, value);
  else if (key == "run.steps_per_period") c.steps_per_period = parse_int(key, value);
  else if (key == "run.snap_to_period") c.snap_to_period = parse_bool(key, value);
  else if (key == "run.workers") c.workers = parse_int(key, value);
  else if (key == "run.output") c.output = value;
  else if (key == "run.sample_stride") c.sample_stride = parse_int(key, value);
  else if (key == "run.scan_tau_s") c.scan_tau_s = parse_auto(key, value);
  else if (key == "run.tau_short_s") c.tau_short_s = parse_auto(key, value);
  else if (key == "run.report_span_tau_pi") c.report_span_tau_pi = parse_number(key, value);
  else throw ConfigError("unknown key '" + key + "'");
}

/// Checks the cross-field invariants.
inline void validate(const RunConfig& c) {
  if (c.grid && c.grid->count < 1) throw ConfigError("run.grid.count: must be >= 1");
  if (c.steps_per_period < 100) throw ConfigError("run.steps_per_period: must be >= 100");
  if (c.workers < 1) throw ConfigError("run.workers: must be >= 1");
  if (c.sample_stride < 1) throw ConfigError("run.sample_stride: must be >= 1");
  if (c.tau_s < 0.0) throw ConfigError("field.tau_s: must be >= 0");
  if (c.b_wolf_ut < 0.0) throw ConfigError("field.B_wolf_uT: must be >= 0");
  if (c.report_span_tau_pi <= 0.0) throw ConfigError("run.report_span_tau_pi: must be > 0");
}

inline void parse_config_text(RunConfig& c, std::istream& in, const std::string& source) {
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    const std::string body = detail::trim(line);
    if (body.empty()) continue;
    const auto eq = body.find('=');
    if (eq == std::string::npos)
      throw ConfigError(source + ":" + std::to_string(lineno) + ": expected 'key = value'");
    const std::string key = detail::trim(body.substr(0, eq));
    const std::string value = detail::trim(body.substr(eq + 1));
    try {
      apply_setting(c, key, value);
    } catch (const ConfigError& e) {
      throw ConfigError(source + ":" + std::to_string(lineno) + ": " + e.what());
    }
  }
}

inline RunConfig parse_config_string(const std::string& text, const std::string& source = "<string>") {
  RunConfig c;
  std::istringstream in(text);
  parse_config_text(c, in, source);
  validate(c);
  return c;
}

inline void load_config_file(RunConfig& c, const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError(path + ": cannot open config file");
  parse_config_text(c, in, path);
}

/// Applies a KEY=VALUE override.
inline void apply_override(RunConfig& c, const std::string& assignment) {
  const auto eq = assignment.find('=');
  if (eq == std::string::npos) throw ConfigError("--set " + assignment + ": expected KEY=VALUE");
  try {
    apply_setting(c, detail::trim(assignment.substr(0, eq)), detail::trim(assignment.substr(eq + 1)));
  } catch (const ConfigError& e) {
    throw ConfigError(std::string("--set: ") + e.what());
  }
}

/// Canonical text form; parse_config_string(dump_config(c)) == c.
inline std::string dump_config(const RunConfig& c) {
  using detail::auto_text;
  using std::string;
  std::ostringstream os;
  auto kv = [&os](const string& k, const string& v) { os << k << " = " << v << '\n'; };
  kv("system.name", c.name);
  kv("system.isotopes", c.isotopes);
  if (c.gamma_i) kv("system.gamma_I", format_double(*c.gamma_i));
  if (c.gamma_s) kv("system.gamma_S", format_double(*c.gamma_s));
  kv("system.J12_Hz", format_double(c.j12_hz));
  kv("system.J13_Hz", format_double(c.j13_hz));
  kv("system.J23_Hz", format_double(c.j23_hz));
  kv("field.B_bias_uT", format_double(c.b_bias_ut));
  kv("field.B_wolf_uT", format_double(c.b_wolf_ut));
  kv("field.f_wolf_Hz", auto_text(c.f_wolf_hz));
  kv("field.phase_rad", format_double(c.phase_rad));
  kv("field.tau_s", format_double(c.tau_s));
  kv("run.command", c.command);
  if (c.grid) {
    kv("run.grid.start", format_double(c.grid->start));
    kv("run.grid.stop", format_double(c.grid->stop));
    kv("run.grid.count", std::to_string(c.grid->count));
    if (!c.grid->values.empty()) kv("run.grid.values", detail::list_text(c.grid->values));
  }
  kv("run.steps_per_period", std::to_string(c.steps_per_period));
  kv("run.snap_to_period", c.snap_to_period ? "true" : "false");
  kv("run.workers", std::to_string(c.workers));
  kv("run.output", c.output);
  kv("run.sample_stride", std::to_string(c.sample_stride));
  kv("run.scan_tau_s", auto_text(c.scan_tau_s));
  kv("run.tau_short_s", auto_text(c.tau_short_s));
  kv("run.report_span_tau_pi", format_double(c.report_span_tau_pi));
  return os.str();
}

inline SpinSystem to_system(const RunConfig& c) {
  const auto slash = c.isotopes.find('/');
  if (slash == std::string::npos) throw ConfigError("system.isotopes: expected I/S, e.g. 1H/13C");
  SpinSystem s;
  s.gamma_i = c.gamma_i.value_or(isotope_gamma(c.isotopes.substr(0, slash)));
  s.gamma_s = c.gamma_s.value_or(isotope_gamma(c.isotopes.substr(slash + 1)));
  s.j12 = c.j12_hz;
  s.j13 = c.j13_hz;
  s.j23 = c.j23_hz;
  if (s.gamma_i == s.gamma_s) throw ConfigError("system: gamma_I must differ from gamma_S");
  return s;
}

/// Resolved field; an "auto" drive frequency becomes omega_ST.
inline FieldSchedule to_field(const RunConfig& c) {
  const SpinSystem sys = to_system(c);
  FieldSchedule f;
  f.b_bias = c.b_bias_ut * kMicroTesla;
  f.b_wolf_peak = c.b_wolf_ut * kMicroTesla;
  f.omega_wolf = c.f_wolf_hz ? kTwoPi * *c.f_wolf_hz : omega_st(sys, f.b_bias);
  f.phase = c.phase_rad;
  f.duration = c.tau_s;
  return f;
}

}  // namespace wolf
