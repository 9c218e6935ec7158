#include "wolf/cli.hpp"

#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <regex>

using namespace wolf;

namespace {

struct Result {
  int code;
  std::string out;
  std::string err;
};

Result run(std::vector<std::string> args) {
  args.insert(args.begin(), "wolfsim");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  const int code = run_cli(static_cast<int>(argv.size()), argv.data(), out, err);
  return {code, out.str(), err.str()};
}

std::string config_path(const std::string& name) { return std::string(WOLF_CONFIG_DIR) + "/" + name; }

double field_value(const std::string& text, const std::string& label) {
  const auto pos = text.find(label + ": ");
  if (pos == std::string::npos) return NAN;
  return std::stod(text.substr(pos + label.size() + 2));
}

std::vector<std::string> data_lines(const std::string& csv) {
  std::vector<std::string> rows;
  std::istringstream in(csv);
  for (std::string line; std::getline(in, line);)
    if (!line.empty() && line[0] != '#') rows.push_back(line);
  return rows;
}

std::string read_file(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), {}};
}

}  // namespace

TEST(Cli, InfoFumarate) {
  const Result r = run({"--config", config_path("fumarate.cfg"), "info"});
  ASSERT_EQ(r.code, kExitOk) << r.err;
  EXPECT_NEAR(field_value(r.out, "omega_ST/2pi [Hz]"), 77.3, 0.5);
  EXPECT_NEAR(field_value(r.out, "tau_pi [s]"), 0.65, 0.01);
  for (const char* key : {"omega_TT/2pi [Hz]", "theta [rad]", "phi [rad]", "omega_x/2pi [Hz]", "A",
                          "|omega_nut|/2pi [Hz]", "|omega_x/omega_ST|", "|J13-J23|/|J12|"})
    EXPECT_FALSE(std::isnan(field_value(r.out, key))) << key;
}

TEST(Cli, InfoFlagsMaleateOutsideRegime) {
  const Result r = run({"--config", config_path("maleate.cfg"), "info"});
  ASSERT_EQ(r.code, kExitOk);
  EXPECT_NE(r.out.find("[outside regime]"), std::string::npos);
  EXPECT_NEAR(field_value(r.out, "tau_pi [s]"), 0.133, 0.005);
}

TEST(Cli, DumpConfigRoundTrip) {
  const Result r = run({"--config", config_path("maleate.cfg"), "--set", "field.phase_rad=0.25", "info",
                        "--dump-config"});
  ASSERT_EQ(r.code, kExitOk);
  RunConfig file;
  load_config_file(file, config_path("maleate.cfg"));
  file.phase_rad = 0.25;
  file.command = "info";
  EXPECT_EQ(parse_config_string(r.out), file);
}

TEST(Cli, Precedence) {
  // file < --set (in order) < dedicated flags
  const Result r = run({"--config", config_path("fumarate.cfg"), "--set", "run.workers=3", "--set",
                        "run.workers=5", "--set", "run.steps_per_period=200", "--steps-per-period", "300",
                        "info", "--dump-config"});
  ASSERT_EQ(r.code, kExitOk) << r.err;
  const RunConfig c = parse_config_string(r.out);
  EXPECT_EQ(c.workers, 5);
  EXPECT_EQ(c.steps_per_period, 300);
  const Result w = run({"--set", "run.workers=3", "--workers", "2", "info", "--dump-config"});
  EXPECT_EQ(parse_config_string(w.out).workers, 2);
}

TEST(Cli, SimulateZeroDurationSingleRow) {
  const Result r = run({"--config", config_path("fumarate.cfg"), "--set", "field.tau_s=0", "simulate"});
  ASSERT_EQ(r.code, kExitOk) << r.err;
  const auto rows = data_lines(r.out);
  ASSERT_EQ(rows.size(), 2u);
  EXPECT_EQ(rows[0].rfind("t[s],s_polarization[1],p_Tp1alpha[1],", 0), 0u) << rows[0];
  EXPECT_EQ(rows[1].rfind("0,0,", 0), 0u) << rows[1];
}

TEST(Cli, SimulateTrajectory) {
  const Result r = run({"--config", config_path("maleate.cfg"), "--set", "field.tau_s=0.02", "--set",
                        "run.sample_stride=100", "--steps-per-period", "200", "simulate"});
  ASSERT_EQ(r.code, kExitOk) << r.err;
  const auto rows = data_lines(r.out);
  EXPECT_GT(rows.size(), 3u);
  EXPECT_NE(r.err.find("final s_polarization"), std::string::npos);
  // every row has the header's column count
  const auto cols = std::count(rows[0].begin(), rows[0].end(), ',');
  for (const auto& row : rows) EXPECT_EQ(std::count(row.begin(), row.end(), ','), cols);
}

TEST(Cli, ScanDurationIsByteIdenticalOnRerun) {
  const std::vector<std::string> args{"--config", config_path("maleate.cfg"), "--set", "run.grid.start=0",
                                      "--set", "run.grid.stop=0.3", "--set", "run.grid.count=12",
                                      "--steps-per-period", "200", "scan-duration"};
  const Result a = run(args), b = run(args);
  ASSERT_EQ(a.code, kExitOk) << a.err;
  EXPECT_EQ(a.out, b.out);
  const auto rows = data_lines(a.out);
  EXPECT_EQ(rows[0],
            "tau[s],s_polarization[1],s_polarization_normalized[1],p_S0beta[1],p_T0beta[1],p_Tm1alpha[1],"
            "analytic_prediction[1]");
  EXPECT_NE(a.out.find("# system.J12_Hz = 12.3"), std::string::npos);
  EXPECT_EQ(a.out.find('\r'), std::string::npos);
}

TEST(Cli, ScanDurationWorkerCountDoesNotChangeData) {
  const std::vector<std::string> base{"--config", config_path("fumarate.cfg"), "--set", "run.grid.values=0, 0.1, 0.2, 0.3",
                                      "--steps-per-period", "200", "scan-duration"};
  auto a = base, b = base;
  a.insert(a.begin(), {"--workers", "1"});
  b.insert(b.begin(), {"--workers", "3"});
  EXPECT_EQ(data_lines(run(a).out), data_lines(run(b).out));
}

TEST(Cli, ScanFrequencyAndAmplitudeWriteFiles) {
  const auto dir = std::filesystem::temp_directory_path() / "wolfsim_cli_test";
  std::filesystem::create_directories(dir);
  const auto freq = dir / "freq.csv";
  Result r = run({"--config", config_path("maleate.cfg"), "--set", "run.grid.values=70, 72.188, 74",
                  "--steps-per-period", "200", "--out", freq.string(), "scan-frequency"});
  ASSERT_EQ(r.code, kExitOk) << r.err;
  EXPECT_NE(r.out.find("peak at f_wolf [Hz]"), std::string::npos);
  const std::string csv = read_file(freq);
  EXPECT_EQ(data_lines(csv).size(), 4u);
  EXPECT_EQ(data_lines(csv)[0].rfind("f_wolf[Hz],", 0), 0u);

  const auto amp = dir / "amp.csv";
  r = run({"--config", config_path("fumarate.cfg"), "--set", "run.grid.values=0, 2, 4", "--steps-per-period",
           "200", "--out", amp.string(), "scan-amplitude"});
  ASSERT_EQ(r.code, kExitOk) << r.err;
  const auto rows = data_lines(read_file(amp));
  EXPECT_EQ(rows[0].rfind("B_wolf[uT],", 0), 0u);
  EXPECT_NE(rows[0].find("omega_nut[Hz]"), std::string::npos);
  EXPECT_NE(rows[0].find("modulation_index[1]"), std::string::npos);
  std::filesystem::remove_all(dir);
}

TEST(Cli, ReportSummary) {
  const Result r = run({"--config", config_path("fumarate.cfg"), "--steps-per-period", "400", "report"});
  ASSERT_EQ(r.code, kExitOk) << r.err;
  EXPECT_LT(field_value(r.err, "rms deviation"), 0.1);
  EXPECT_LT(field_value(r.err, "relative frequency error"), 0.05);
}

TEST(Cli, CommandFromConfig) {
  const Result r = run({"--config", config_path("fumarate.cfg"), "--set", "run.command=info"});
  EXPECT_EQ(r.code, kExitOk) << r.err;
  EXPECT_NE(r.out.find("omega_ST/2pi"), std::string::npos);
}

TEST(Cli, ExitCodes) {
  // default couplings are all zero, so the mixing angles are undefined
  EXPECT_EQ(run({"info"}).code, kExitRuntime);
  EXPECT_EQ(run({"--config", "/nonexistent.cfg", "info"}).code, kExitConfig);
  EXPECT_EQ(run({"--set", "system.J12_Hz=abc", "info"}).code, kExitConfig);
  EXPECT_EQ(run({"--set", "run.command=frobnicate"}).code, kExitConfig);
  EXPECT_EQ(run({}).code, kExitConfig);
  EXPECT_EQ(run({"bogus-command"}).code, kExitConfig);
  EXPECT_EQ(run({"--workers", "0", "info"}).code, kExitConfig);
  EXPECT_EQ(run({"--steps-per-period", "10", "info"}).code, kExitConfig);
  const Result r = run({"--config", config_path("fumarate.cfg"), "--out", "/nonexistent/dir/x.csv", "--set",
                        "field.tau_s=0", "simulate"});
  EXPECT_EQ(r.code, kExitRuntime);
  EXPECT_NE(r.err.find("cannot write"), std::string::npos);
  const Result bad = run({"--set", "system.J13_Hz=oops", "info"});
  EXPECT_NE(bad.err.find("system.J13_Hz"), std::string::npos);
  EXPECT_EQ(run({"--help"}).code, kExitOk);
}
