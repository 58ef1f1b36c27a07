#include <gtest/gtest.h>

#include <sys/wait.h>

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "directwf/commands.hpp"
#include "directwf/config.hpp"
#include "directwf/error.hpp"

using namespace directwf;
namespace fs = std::filesystem;

namespace {

class CommandTest : public ::testing::Test {
 protected:
  void SetUp() override {
    const auto* info = ::testing::UnitTest::GetInstance()->current_test_info();
    dir_ = fs::temp_directory_path() / (std::string("directwf_") + info->name());
    fs::remove_all(dir_);
    fs::create_directories(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }

  fs::path write(const std::string& name, const std::string& text) const {
    std::ofstream(dir_ / name) << text;
    return dir_ / name;
  }

  int cli(const std::string& args) const {
    const std::string cmd = std::string(DIRECTWF_CLI_PATH) + " --quiet " + args + " >" +
                            (dir_ / "stdout.txt").string() + " 2>" + (dir_ / "stderr.txt").string();
    const int status = std::system(cmd.c_str());
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  }

  std::string stderr_text() const { return read(dir_ / "stderr.txt"); }

  static std::string read(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
  }

  fs::path dir_;
};

const char* kSmallGrid =
    "[grid]\nn_points = 64\nx_min_mm = -4\nx_max_mm = 4\n"
    "[optics]\naperture_mm = 6\ngauss_diameter_mm = 7\n";

std::vector<std::vector<std::string>> csv_rows(const std::string& text) {
  std::vector<std::vector<std::string>> rows;
  std::istringstream in(text);
  std::string line;
  bool header = true;
  while (std::getline(in, line)) {
    if (line.empty() || line.front() == '#') continue;
    if (header) {
      header = false;
      continue;
    }
    std::vector<std::string> fields;
    std::stringstream ls(line);
    std::string f;
    while (std::getline(ls, f, ',')) fields.push_back(f);
    rows.push_back(fields);
  }
  return rows;
}

}  // namespace

TEST_F(CommandTest, DefaultRunMeetsFidelityTarget) {
  auto r = run_pipeline(parse_run_config({}));
  ASSERT_TRUE(r.fidelity.has_value());
  EXPECT_GE(*r.fidelity, 0.995);
  EXPECT_EQ(cli("run --out " + (dir_ / "out").string()), 0);
  const auto report = read(dir_ / "out" / "report.json");
  EXPECT_NE(report.find("\"fidelity\": 0.9999"), std::string::npos);
  EXPECT_EQ(csv_rows(read(dir_ / "out" / "profile.csv")).size(), 2048u);
}

TEST_F(CommandTest, SeededCountingRunIsReproducible) {
  const auto cfg = write("count.ini", "[counting]\nenabled = true\nn_incident = 10000\n");
  ASSERT_EQ(cli("--config " + cfg.string() + " --seed 42 --out " + (dir_ / "a").string() + " run"), 0);
  ASSERT_EQ(cli("run --config " + cfg.string() + " --seed 42 --out " + (dir_ / "b").string()), 0);
  for (const char* name : {"profile.csv", "reconstruction.csv", "counts.csv", "estimate.csv", "report.json"}) {
    const auto a = read(dir_ / "a" / name);
    EXPECT_FALSE(a.empty()) << name;
    EXPECT_EQ(a, read(dir_ / "b" / name)) << name;
    if (std::string(name).ends_with(".csv")) {
      EXPECT_NE(a.find("# counting.seed = 42\n"), std::string::npos) << name;
      EXPECT_NE(a.find("# counting.n_incident = 10000\n"), std::string::npos) << name;
    }
  }
  EXPECT_NE(read(dir_ / "a" / "report.json").find("\"seed\": 42"), std::string::npos);
}

TEST_F(CommandTest, EmbeddedConfigReproducesOutputs) {
  const auto cfg = write("grad.ini",
                         "scenario.kind = glass_step\nscenario.step_phase_rad = 1\n"
                         "counting.enabled = true\ncounting.n_incident = 1000\ncounting.seed = 7\n");
  ASSERT_EQ(cli("run --config " + cfg.string() + " --out " + (dir_ / "a").string()), 0);
  const auto counts = read(dir_ / "a" / "counts.csv");
  std::string embedded;
  std::istringstream in(counts);
  std::string line;
  while (std::getline(in, line) && line.rfind("# ", 0) == 0) embedded += line.substr(2) + "\n";
  const auto replay = write("replay.ini", embedded);
  ASSERT_EQ(cli("run --config " + replay.string() + " --out " + (dir_ / "b").string()), 0);
  EXPECT_EQ(read(dir_ / "b" / "counts.csv"), counts);
  EXPECT_EQ(read(dir_ / "b" / "profile.csv"), read(dir_ / "a" / "profile.csv"));
}

TEST_F(CommandTest, ValidationFailuresExitWithTwo) {
  const auto zero_phi = write("zero.ini", "measurement.phi_deg = 0\n");
  EXPECT_EQ(cli("run --config " + zero_phi.string() + " --out " + dir_.string()), kExitValidation);
  EXPECT_NE(stderr_text().find("phi > 0"), std::string::npos);
  EXPECT_EQ(cli("--out " + dir_.string()), kExitValidation);
  EXPECT_EQ(cli("sweep --param grid.n_points --values 1,2 --out " + dir_.string()), kExitValidation);
  EXPECT_NE(stderr_text().find("not sweepable"), std::string::npos);
  const auto big = write("big.ini", "grid.n_points = 512\n");
  EXPECT_EQ(cli("oracle --config " + big.string() + " --out " + dir_.string()), kExitValidation);
  EXPECT_EQ(cli("run --bogus"), kExitValidation);
}

TEST_F(CommandTest, NullPostSelectionExceedingLimitExitsWithThree) {
  std::string state = "x_mm,re,im\n";
  for (int i = 0; i < 64; ++i) {
    const double x = -4.0 + 0.125 * i;
    const double re = i == 20 ? 1.0 : (i == 40 ? -1.0 : 0.0);
    state += std::to_string(x) + "," + std::to_string(re) + ",0\n";
  }
  write("odd.csv", state);
  const auto cfg = write("odd.ini", std::string(kSmallGrid) + "[scenario]\nstate_csv = odd.csv\n");
  EXPECT_EQ(cli("run --config " + cfg.string() + " --out " + (dir_ / "o").string()), kExitDegenerate);
  const auto rows = csv_rows(read(dir_ / "o" / "profile.csv"));
  EXPECT_EQ(rows[20][4], "0");
  EXPECT_EQ(rows[0][4], "1");

  const auto tolerant = write("tolerant.ini", std::string(kSmallGrid) +
                                                  "[scenario]\nstate_csv = odd.csv\n"
                                                  "[measurement]\nmax_flagged_fraction = 1\n");
  EXPECT_EQ(cli("run --config " + tolerant.string() + " --out " + (dir_ / "t").string()), kExitSuccess);
}

TEST_F(CommandTest, ErrorKindsMapToExitCodes) {
  EXPECT_EQ(exit_code_for(Error(ErrorKind::InvalidArgument, "x")), kExitValidation);
  EXPECT_EQ(exit_code_for(Error(ErrorKind::UnknownParameter, "x")), kExitValidation);
  EXPECT_EQ(exit_code_for(Error(ErrorKind::GridTooCoarse, "x")), kExitValidation);
  EXPECT_EQ(exit_code_for(Error(ErrorKind::NullPostSelection, "x")), kExitDegenerate);
  EXPECT_EQ(exit_code_for(Error(ErrorKind::EmptyBin, "x")), kExitDegenerate);
  EXPECT_EQ(exit_code_for(Error(ErrorKind::Io, "x")), kExitFailure);
}

TEST_F(CommandTest, DiscreteQubitAndPostSelectionFreedom) {
  const auto qubit = write("qubit.csv", "index,re,im\n0,0.70710678118654757,0\n1,0.70710678118654757,0\n");
  ASSERT_EQ(cli("discrete --dim 2 --b0 0 --state " + qubit.string() + " --out " + (dir_ / "q").string()), 0);
  for (const auto& row : csv_rows(read(dir_ / "q" / "discrete_weak_values.csv"))) {
    EXPECT_NEAR(std::stod(row[2]), 0.5, 1e-15);
    EXPECT_NEAR(std::stod(row[3]), 0.0, 1e-15);
  }

  std::string eight = "index,re,im\n";
  double norm = 0.0;
  for (int a = 0; a < 8; ++a) norm += 1.0 + std::pow(0.1 * a + std::sin(a), 2);
  for (int a = 0; a < 8; ++a) {
    std::ostringstream line;
    line.precision(17);
    line << a << ',' << 1.0 / std::sqrt(norm) << ',' << (0.1 * a + std::sin(a)) / std::sqrt(norm) << '\n';
    eight += line.str();
  }
  const auto path = write("eight.csv", eight);
  std::ostringstream log;
  EXPECT_EQ(cmd_discrete(8, path, std::nullopt, dir_ / "e", log), kExitSuccess);
  EXPECT_NE(read(dir_ / "e" / "discrete_report.json").find("\"passed\": true"), std::string::npos);
  EXPECT_EQ(csv_rows(read(dir_ / "e" / "discrete_weak_values.csv")).size(), 64u);

  const auto basis = write("basis.csv", "index,re,im\n0,0,0\n1,0,0\n2,1,0\n");
  ASSERT_EQ(cli("discrete --dim 3 --state " + basis.string() + " --out " + (dir_ / "b").string()), 0);
  for (const auto& row : csv_rows(read(dir_ / "b" / "discrete_weak_values.csv"))) {
    EXPECT_NEAR(std::stod(row[2]), row[1] == "2" ? 1.0 : 0.0, 1e-15);
  }

  const auto unnormalized = write("bad.csv", "index,re,im\n0,1,0\n1,1,0\n");
  EXPECT_EQ(cli("discrete --dim 2 --state " + unnormalized.string() + " --out " + dir_.string()),
            kExitValidation);
}

TEST_F(CommandTest, OracleCommandAndNegativeControl) {
  const auto point = write("point.ini", kSmallGrid);
  EXPECT_EQ(cli("oracle --config " + point.string() + " --out " + (dir_ / "p").string()), kExitSuccess);
  EXPECT_NE(read(dir_ / "p" / "oracle_report.json").find("\"passed\": true"), std::string::npos);
  const auto window = write("window.ini", std::string(kSmallGrid) +
                                              "[measurement]\npostselect = window\n"
                                              "[optics]\nslit_width_um = 400\n");
  EXPECT_EQ(cli("oracle --config " + window.string() + " --out " + (dir_ / "w").string()), kExitSuccess);
  const auto tilted = write("tilt.ini", std::string(kSmallGrid) +
                                            "[scenario]\nkind = phase_gradient\n"
                                            "[optics]\nslit_offset_um = 20\n");
  EXPECT_EQ(cli("oracle --inject-fault --config " + tilted.string() + " --out " + (dir_ / "f").string()),
            kExitOracleMismatch);
}

TEST_F(CommandTest, SweepOverPhiIsSortedAndMonotone) {
  std::ostringstream log;
  ASSERT_EQ(cmd_sweep(parse_run_config({}), "phi", {5.0, 20.0, 2.5, 10.0}, dir_, log), kExitSuccess);
  const auto rows = csv_rows(read(dir_ / "sweep.csv"));
  ASSERT_EQ(rows.size(), 4u);
  EXPECT_EQ(rows[0][0], "2.5");
  EXPECT_EQ(rows[3][0], "20");
  for (std::size_t i = 1; i < rows.size(); ++i) EXPECT_GT(std::stod(rows[i - 1][1]), std::stod(rows[i][1]));
}

TEST_F(CommandTest, SweepOverSlitOffsetsTracksTheGradientLine) {
  RunConfig c = parse_run_config({{"scenario.kind", "phase_gradient"}});
  std::ostringstream log;
  ASSERT_EQ(cmd_sweep(c, "dx_slit", {-30, -20, -10, 10, 20, 30, 40}, dir_, log), kExitSuccess);
  const auto rows = csv_rows(read(dir_ / "sweep.csv"));
  ASSERT_EQ(rows.size(), 7u);
  for (const auto& row : rows) {
    EXPECT_EQ(row[5], "m");
    EXPECT_NEAR(std::stod(row[6]), std::stod(row[7]), 0.01 * std::abs(std::stod(row[7])));
  }
}

TEST_F(CommandTest, SweepOverPhotonBudgetGivesInverseRootErrors) {
  RunConfig c = parse_run_config({{"measurement.sliver_bins", "32"}});
  std::ostringstream log;
  ASSERT_EQ(cmd_sweep(c, "n_incident", {100, 10000, 1000000}, dir_, log), kExitSuccess);
  const auto rows = csv_rows(read(dir_ / "sweep.csv"));
  ASSERT_EQ(rows.size(), 3u);
  const double slope = std::log(std::stod(rows[2][9]) / std::stod(rows[0][9])) / std::log(1e4);
  EXPECT_NEAR(slope, -0.5, 0.05);
}

TEST_F(CommandTest, CountingWithoutPhotonsIsDegenerate) {
  // A tilted beam post-selected at k0 = 0 almost never passes the slit.
  const auto cfg = write("tilt.ini",
                         "scenario.kind = phase_gradient\noptics.slit_offset_um = 20\n"
                         "counting.enabled = true\ncounting.n_incident = 1000\n");
  EXPECT_EQ(cli("run --config " + cfg.string() + " --out " + dir_.string()), kExitDegenerate);
  EXPECT_NE(stderr_text().find("EmptyBin"), std::string::npos);
}
