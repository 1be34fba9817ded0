#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include <gtest/gtest.h>

#include "cli.hpp"

namespace fs = std::filesystem;
using rapidtail::cli::run;

namespace {

class CliTest : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() /
           ("rapidtail_cli_" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
    fs::remove_all(dir_);
    fs::create_directories(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }

  std::string path(const std::string& name) const { return (dir_ / name).string(); }

  static std::string read(const std::string& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream s;
    s << in.rdbuf();
    return s.str();
  }

  static std::string body(const std::string& p) {
    std::istringstream in(read(p));
    std::string line, out;
    while (std::getline(in, line))
      if (line.rfind("#", 0) != 0) out += line + "\n";
    return out;
  }

  void write(const std::string& name, const std::string& text) const {
    std::ofstream(path(name)) << text;
  }

  fs::path dir_;
};

}  // namespace

TEST_F(CliTest, BivariateBundleWritesReports) {
  const auto out = path("r.csv");
  EXPECT_EQ(run({"rapidtail", "example31", "--rho", "0.5", "--delta", "0.6,0.6", "--out", out}), 0);
  ASSERT_TRUE(fs::exists(out));
  for (const char* name : {"tail_constant_a2", "kappa_u", "tail_density", "rapid_variation"})
    EXPECT_TRUE(fs::exists(path(std::string("r.") + name + ".csv"))) << name;
  const auto text = read(out);
  EXPECT_NE(text.find("# spec_hash="), std::string::npos);
  EXPECT_NE(text.find("# seed="), std::string::npos);
  EXPECT_NE(body(path("r.rapid_variation.csv")).find("probe,raw,target,rel_err"), std::string::npos);
}

TEST_F(CliTest, SameSeedSameBodies) {
  const auto a = path("a.csv"), b = path("b.csv");
  ASSERT_EQ(run({"rapidtail", "example31", "--rho", "0.5", "--delta", "0.6,0.6", "--seed", "3", "--out", a}), 0);
  ASSERT_EQ(run({"rapidtail", "example31", "--rho", "0.5", "--delta", "0.6,0.6", "--seed", "3", "--out", b}), 0);
  EXPECT_EQ(body(a), body(b));
  EXPECT_EQ(body(path("a.tail_density.csv")), body(path("b.tail_density.csv")));
  const auto s1 = path("s1.csv"), s2 = path("s2.csv");
  ASSERT_EQ(run({"rapidtail", "sample", "--n", "200", "--seed", "9", "--rho", "0.5", "--out", s1}), 0);
  ASSERT_EQ(run({"rapidtail", "sample", "--n", "200", "--seed", "9", "--rho", "0.5", "--out", s2}), 0);
  EXPECT_EQ(body(s1), body(s2));
}

TEST_F(CliTest, MissingConfigIsUsageError) {
  EXPECT_EQ(run({"rapidtail", "verify", "--config", path("missing.toml")}), 2);
}

TEST_F(CliTest, MixedSignSkewnessIsRejected) {
  ::testing::internal::CaptureStderr();
  const int code = run({"rapidtail", "verify", "--rho", "0.5", "--delta", "0.3,-0.3", "--out", path("v.csv")});
  const auto err = ::testing::internal::GetCapturedStderr();
  EXPECT_EQ(code, 2);
  EXPECT_NE(err.find("not right-tail equivalent"), std::string::npos) << err;
}

TEST_F(CliTest, UsageErrors) {
  EXPECT_EQ(run({"rapidtail"}), 2);
  EXPECT_EQ(run({"rapidtail", "frobnicate"}), 2);
  EXPECT_EQ(run({"rapidtail", "example31", "--rho", "abc"}), 2);
  EXPECT_EQ(run({"rapidtail", "example31", "--rho", "-0.3"}), 2);
  EXPECT_EQ(run({"rapidtail", "density", "--at", "1,2,3"}), 2);
  ::testing::internal::CaptureStdout();
  EXPECT_EQ(run({"rapidtail", "--help"}), 0);
  ::testing::internal::GetCapturedStdout();
}

TEST_F(CliTest, ConfigFileWithFlagOverrides) {
  write("spec.toml", R"(mu = [0, 0]
sigma = [[1, 0.5], [0.5, 1]]
delta = [0.6, 0.6]

[run]
t_grid = [3, 4, 5, 6]
x = [1.0, 1.0]
threshold = 5e-3
)");
  const auto out = path("v.csv");
  EXPECT_EQ(run({"rapidtail", "verify", "--config", path("spec.toml"), "--out", out}), 0);
  EXPECT_NE(read(out).find("# t_grid=3;4;5;6"), std::string::npos);
  // A zero threshold cannot pass.
  EXPECT_EQ(run({"rapidtail", "verify", "--config", path("spec.toml"), "--threshold", "0", "--out", out}), 1);
  EXPECT_NE(read(out).find("# verdict=fail"), std::string::npos);
}

TEST_F(CliTest, OtherCommands) {
  EXPECT_EQ(run({"rapidtail", "tail-density", "--rho", "0.5", "--w=1,-1", "--out", path("t.csv")}), 0);
  EXPECT_EQ(run({"rapidtail", "copula", "--rho", "0.5", "--u-grid", "1e-5,1e-6", "--out", path("c.csv")}), 0);
  EXPECT_NE(read(path("c.csv")).find("u,lambda_u_ratio"), std::string::npos);
  EXPECT_EQ(run({"rapidtail", "density", "--at", "0,0", "--at", "1,2", "--out", path("d.csv")}), 0);
  EXPECT_NE(body(path("d.csv")).find("0,0,-1.8378770664093"), std::string::npos);
}
