#include <gtest/gtest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>
#include <string>

namespace fs = std::filesystem;

namespace {

struct CliRun {
  int exit_code;
  fs::path dir;
};

class CliTest : public ::testing::Test {
 protected:
  void SetUp() override {
    root_ = fs::temp_directory_path() /
            ("hardy_cli_" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
    fs::remove_all(root_);
    fs::create_directories(root_);
  }
  void TearDown() override { fs::remove_all(root_); }

  CliRun invoke(const std::string& args, const std::string& out = "out") {
    const fs::path dir = root_ / out;
    const std::string cmd = std::string(HARDY_CLI_PATH) + " " + args + " --out " + dir.string() + " > " +
                            (root_ / (out + ".log")).string() + " 2>&1";
    const int status = std::system(cmd.c_str());
    return {WIFEXITED(status) ? WEXITSTATUS(status) : -1, dir};
  }

  fs::path root_;
};

std::string slurp(const fs::path& p) {
  std::ifstream is(p);
  std::stringstream ss;
  ss << is.rdbuf();
  return ss.str();
}

std::map<std::string, std::string> summary(const fs::path& dir) {
  std::map<std::string, std::string> kv;
  std::ifstream is(dir / "summary.txt");
  for (std::string line; std::getline(is, line);) {
    const auto eq = line.find(" = ");
    if (eq != std::string::npos) kv[line.substr(0, eq)] = line.substr(eq + 3);
  }
  return kv;
}

}  // namespace

TEST_F(CliTest, IterateDelta3) {
  const auto r = invoke("iterate --delta 3 --K 50");
  EXPECT_EQ(r.exit_code, 0);
  EXPECT_EQ(slurp(r.dir / "verdict.txt").rfind("PASS", 0), 0u);
  const auto kv = summary(r.dir);
  EXPECT_EQ(kv.at("iterates"), "50");
  EXPECT_NEAR(std::stod(kv.at("ndelta")), 1.042271, 1e-5);
  const std::string csv = slurp(r.dir / "trace.csv");
  EXPECT_EQ(std::count(csv.begin(), csv.end(), '\n'), 51);
}

TEST_F(CliTest, SharpnessCriticalIsDivergent) {
  const auto r = invoke("sharpness --R 1 --gamma-factor 1.0");
  EXPECT_EQ(r.exit_code, 0);
  EXPECT_EQ(summary(r.dir).at("verdict"), "divergent");
  EXPECT_NE(slurp(r.dir / "verdict.txt").find("verdict=divergent"), std::string::npos);
}

TEST_F(CliTest, SharpnessBelowCriticalIsConvergent) {
  const auto r = invoke("sharpness --R 1 --gamma-factor 0.5");
  EXPECT_EQ(r.exit_code, 0);
  EXPECT_EQ(summary(r.dir).at("verdict"), "convergent");
}

TEST_F(CliTest, ConvexityWithoutPotential) {
  const auto r = invoke("verify-convexity --potential none");
  EXPECT_EQ(r.exit_code, 0);
  const auto kv = summary(r.dir);
  EXPECT_GE(std::stod(kv.at("min_slack")), -1e-4 * std::stod(kv.at("scale")));
  EXPECT_TRUE(fs::exists(r.dir / "convexity.csv"));
}

TEST_F(CliTest, EvolveAndBound) {
  EXPECT_EQ(invoke("evolve", "evolve").exit_code, 0);
  EXPECT_TRUE(fs::exists(root_ / "evolve" / "energy.csv"));
  EXPECT_TRUE(fs::is_directory(root_ / "evolve" / "trajectory"));
  const auto b = invoke("verify-bound --potential gauss-imag", "bound");
  EXPECT_EQ(b.exit_code, 0);
  EXPECT_NEAR(std::stod(summary(b.dir).at("ratio")), 0.592258, 1e-5);
}

TEST_F(CliTest, ConfigErrorsExitTwo) {
  const fs::path bad = root_ / "bad.cfg";
  std::ofstream(bad) << "delta = 3\nno_such_key = 1\n";
  EXPECT_EQ(invoke("iterate --config " + bad.string()).exit_code, 2);
  EXPECT_EQ(invoke("iterate --delta 1.5").exit_code, 2);
  EXPECT_EQ(invoke("evolve --grid-N 1000").exit_code, 2);
  EXPECT_EQ(invoke("no-such-command").exit_code, 2);
}

TEST_F(CliTest, ConfigFileIsRead) {
  const fs::path cfg = root_ / "ok.cfg";
  std::ofstream(cfg) << "delta = 2.5\nK = 7\n";
  const auto r = invoke("iterate --config " + cfg.string());
  EXPECT_EQ(r.exit_code, 0);
  const std::string manifest = slurp(r.dir / "manifest.txt");
  EXPECT_NE(manifest.find("delta = 2.5"), std::string::npos);
  EXPECT_NE(manifest.find("K = 7"), std::string::npos);
  // command-line flags win over the file
  const auto o = invoke("iterate --config " + cfg.string() + " --K 3", "override");
  EXPECT_EQ(summary(o.dir).at("iterates"), "3");
}

TEST_F(CliTest, RerunsAreByteIdentical) {
  for (const char* out : {"a", "b"}) ASSERT_EQ(invoke("sharpness --gamma-factor 1.1 --plot", out).exit_code, 0);
  for (const char* f : {"sharpness.csv", "summary.txt", "verdict.txt", "manifest.txt", "sharpness.svg"})
    EXPECT_EQ(slurp(root_ / "a" / f), slurp(root_ / "b" / f)) << f;
}

TEST_F(CliTest, ManifestHasConfigAndNoClock) {
  const auto r = invoke("sharpness");
  const std::string m = slurp(r.dir / "manifest.txt");
  for (const char* key : {"tool = hardy_cli", "fftw = ", "compiler = ", "command = sharpness", "gamma-factor = 1",
                          "output = sharpness.csv", "output = verdict.txt"})
    EXPECT_NE(m.find(key), std::string::npos) << key;
  for (const char* clock : {"time =", "date", "2026", ":"}) EXPECT_EQ(m.find(clock), std::string::npos) << clock;
}

TEST_F(CliTest, PlotFlagWritesSvg) {
  const auto r = invoke("construct-weights --delta 3 --plot");
  EXPECT_EQ(r.exit_code, 0);
  bool any = false;
  for (const auto& e : fs::directory_iterator(r.dir)) any = any || e.path().extension() == ".svg";
  EXPECT_TRUE(any);
  EXPECT_EQ(slurp(r.dir / "weights.csv").rfind("t,a,A,b,T,convexity\n", 0), 0u);
}
