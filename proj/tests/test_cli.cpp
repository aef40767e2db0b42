#include <gtest/gtest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <sys/wait.h>

#include "commands.hpp"
#include "pmc/io/formats.hpp"

namespace pmc::cli {
namespace {

namespace fs = std::filesystem;

class Cli : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() /
           ("pmc_cli_" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
    fs::remove_all(dir_);
    fs::create_directories(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }

  fs::path write_config(const std::string& name, const std::string& text) {
    const auto p = dir_ / name;
    std::ofstream(p) << text;
    return p;
  }

  // Runs the installed binary from inside dir_, returning its exit status.
  int shell(const std::string& args, const std::string& env = {}) {
    const std::string cmd = "cd '" + dir_.string() + "' && " + env + " '" PMC_BINARY "' " +
                            args + " > out.txt 2> err.txt";
    const int rc = std::system(cmd.c_str());
    return WIFEXITED(rc) ? WEXITSTATUS(rc) : -1;
  }

  std::string slurp(const fs::path& p) { return io::read_file(p); }

  std::size_t file_count(const fs::path& d) {
    std::size_t n = 0;
    for ([[maybe_unused]] const auto& e : fs::directory_iterator(d)) ++n;
    return n;
  }

  fs::path fixture(const std::string& name) { return fs::path(PMC_FIXTURE_DIR) / name; }

  fs::path dir_;
};

TEST_F(Cli, EverySubcommandHonoursHelp) {
  for (const auto& c : commands()) {
    EXPECT_EQ(shell(std::string(c.name) + " --help"), 0) << c.name;
    EXPECT_NE(slurp(dir_ / "out.txt").find("config"), std::string::npos) << c.name;
    EXPECT_EQ(file_count(dir_), 2u) << c.name;  // only the captured streams
  }
  EXPECT_EQ(shell("--help"), 0);
}

TEST_F(Cli, ClassifyTableFixture) {
  EXPECT_EQ(shell("classify '" + fixture("table1.ini").string() + "' -o ."), 0);
  const auto rep = io::parse_verdict_json(slurp(dir_ / "table1_verdict.json"));
  std::string col;
  for (const auto& r : rep.rows) col += r.verdict.purcell() ? 'Y' : 'N';
  EXPECT_EQ(col, "NNNNNYY");
}

TEST_F(Cli, EigenTableFixtureHasSevenRows) {
  EXPECT_EQ(shell("eigen '" + fixture("table1.ini").string() + "' -o ."), 0);
  EXPECT_EQ(io::parse_eigen_csv(slurp(dir_ / "table1_eigen.csv")).size(), 7u);
}

TEST_F(Cli, EmptySweepsGiveHeaderOnlyFiles) {
  const auto cfg = write_config("empty.ini",
                                "[photon]\nfrequency_GHz = 5.33\n[sweep]\nalphas =\nfields_Oe =\n");
  EXPECT_EQ(shell("eigen empty.ini"), 0);
  EXPECT_EQ(slurp(dir_ / "eigen.csv"),
            "alpha,re_plus_Hz,im_plus_Hz,re_minus_Hz,im_minus_Hz,gap_Hz\n");
  EXPECT_EQ(shell("map empty.ini"), 0);
  EXPECT_EQ(slurp(dir_ / "map.csv"), "H_Oe,freq_Hz,mag_dB\n");
}

TEST_F(Cli, ConfigErrorExitsOneAndNamesField) {
  write_config("bad.ini", "[photon]\nfrequency_GHz = 5.33\n[magnon]\ndamping = -0.01\n");
  EXPECT_EQ(shell("spectrum bad.ini"), kExitConfig);
  const auto err = slurp(dir_ / "err.txt");
  EXPECT_NE(err.find("damping"), std::string::npos) << err;
  EXPECT_NE(err.find(":4"), std::string::npos) << err;
  EXPECT_FALSE(fs::exists(dir_ / "spectrum.csv"));
  EXPECT_EQ(shell("spectrum missing.ini"), kExitConfig);
  EXPECT_NE(shell("nonsense x.ini"), 0);
}

TEST_F(Cli, NumericErrorExitsTwoWithoutPartialFile) {
  // Fully lossless, closed system with a grid point exactly on resonance.
  write_config("lossless.ini",
               "[photon]\nfrequency_GHz = 5.33\n[grid]\nstart_GHz = 5\nstop_GHz = 5.66\n"
               "points = 23\n");
  EXPECT_EQ(shell("spectrum lossless.ini"), kExitNumeric);
  const auto err = slurp(dir_ / "err.txt");
  EXPECT_NE(err.find("spectrum"), std::string::npos) << err;
  EXPECT_NE(err.find("lossless.ini"), std::string::npos) << err;
  EXPECT_NE(err.find("index 11"), std::string::npos) << err;
  EXPECT_EQ(file_count(dir_), 3u);

  // Closed ports everywhere else: S21 ≡ 0 has no dB view.
  write_config("closed.ini",
               "[photon]\nfrequency_GHz = 5.33\ndamping = 1e-3\n[coupling]\ng_MHz = 50\n");
  EXPECT_EQ(shell("spectrum closed.ini"), kExitNumeric);
  EXPECT_FALSE(fs::exists(dir_ / "spectrum.csv"));
}

TEST_F(Cli, OutputDirectoryPrecedence) {
  write_config("s.ini", "[spin]\nthicknesses_um = 10, 20\nreference_g_MHz = 127.3\n"
                        "[output]\ndir = from_config\n");
  EXPECT_EQ(shell("spinscale s.ini"), 0);
  EXPECT_TRUE(fs::exists(dir_ / "from_config" / "spin.csv"));
  EXPECT_EQ(shell("spinscale s.ini", "PMC_OUTPUT_DIR=from_env"), 0);
  EXPECT_TRUE(fs::exists(dir_ / "from_env" / "spin.csv"));
  EXPECT_EQ(shell("spinscale s.ini --output-dir from_flag", "PMC_OUTPUT_DIR=from_env2"), 0);
  EXPECT_TRUE(fs::exists(dir_ / "from_flag" / "spin.csv"));
  EXPECT_FALSE(fs::exists(dir_ / "from_env2"));
}

TEST_F(Cli, TimedomainReportsDecayRate) {
  std::ostringstream out, err;
  ASSERT_EQ(run_command("timedomain", fixture("lorentzian.ini"), dir_, out, err), 0) << err.str();
  std::istringstream lines(out.str());
  std::string key;
  double rate = 0.0;
  while (lines >> key)
    if (key == "decay_rate_per_s") lines >> rate;
  const double kappa = units::angular(24.99e6);
  EXPECT_NEAR(rate, kappa, 0.05 * kappa);
  EXPECT_TRUE(fs::exists(dir_ / "lorentzian_time.csv"));
}

TEST_F(Cli, FitFixtureConverges) {
  std::ostringstream out, err;
  ASSERT_EQ(run_command("fit", fixture("fit.ini"), dir_, out, err), 0) << err.str();
  const auto fit = io::parse_fit_json(slurp(dir_ / "row1_fit.json"));
  EXPECT_TRUE(fit.converged);
  EXPECT_NEAR(units::hertz(fit.params.g), 127.3e6, 0.01 * 127.3e6);
}

}  // namespace
}  // namespace pmc::cli
