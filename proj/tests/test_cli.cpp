#include "copies_lab/cli.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <sstream>
#include <string>
#include <vector>

using copies_lab::Json;

namespace {

struct Result {
  int code = -1;
  std::string out;
  std::string err;

  [[nodiscard]] Json json() const { return Json::parse(out); }
};

Result run(std::vector<std::string> args) {
  std::ostringstream out;
  std::ostringstream err;
  Result r;
  r.code = copies_lab::cli::run(args, out, err);
  r.out = out.str();
  r.err = err.str();
  return r;
}

std::string without_timestamp(const std::string& text) {
  Json j = Json::parse(text);
  j["manifest"].erase("timestamp");
  return j.dump();
}

std::string slurp(const std::filesystem::path& path) {
  std::ifstream in(path);
  std::stringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

class TempDir {
 public:
  TempDir() {
    const auto* info = ::testing::UnitTest::GetInstance()->current_test_info();
    path_ = std::filesystem::temp_directory_path() /
            (std::string("copies_lab_") + info->test_suite_name() + "_" + info->name());
    std::filesystem::create_directories(path_);
  }
  ~TempDir() { std::filesystem::remove_all(path_); }
  [[nodiscard]] std::string file(const std::string& name) const { return (path_ / name).string(); }

 private:
  std::filesystem::path path_;
};

}  // namespace

TEST(Cli, KernelIntegralCheck) {
  const auto r = run({"kernel", "--dim", "2", "--radius", "1", "--check-integral"});
  ASSERT_EQ(r.code, 0) << r.err;
  auto j = r.json();
  const double pi = std::numbers::pi;
  EXPECT_NEAR(j["result"]["lhs"].get<double>(), 39.4784, 1e-4);
  EXPECT_NEAR(j["result"]["rhs"].get<double>(), 4.0 * pi * pi, 1e-12);
  EXPECT_EQ(j["manifest"]["subcommand"], "kernel");
  EXPECT_EQ(j["manifest"]["seed"], 42);
  EXPECT_EQ(j["manifest"]["tool_version"], std::string(copies_lab::kToolVersion));
  EXPECT_EQ(j["manifest"]["parameters"]["check-integral"], true);
  EXPECT_TRUE(j["manifest"].contains("timestamp"));
}

TEST(Cli, KernelValueAtSingularPointIsInfinite) {
  const auto r = run({"kernel", "--dim", "2", "--v-norm", "2"});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_EQ(r.json()["result"]["kernel_value"], "inf");
}

TEST(Cli, BoundsExamples) {
  const auto two = run({"bounds", "--n", "2"});
  ASSERT_EQ(two.code, 0);
  EXPECT_EQ(two.json()["result"], (Json{{"lower", 0.0}, {"upper", 0.0}}));
  const auto big = run({"bounds", "--n", "1e15"});
  ASSERT_EQ(big.code, 0) << big.err;
  EXPECT_NEAR(big.json()["result"]["lower"].get<double>(), 0.65461, 1e-5);
}

TEST(Cli, UsageErrorsExitTwo) {
  EXPECT_EQ(run({}).code, 2);
  EXPECT_EQ(run({"bounds"}).code, 2);
  EXPECT_EQ(run({"bounds", "--n", "2.5"}).code, 2);
  EXPECT_EQ(run({"bounds", "--n", "abc"}).code, 2);
  EXPECT_EQ(run({"kernel", "--dim", "1"}).code, 2);
  EXPECT_EQ(run({"nonsense"}).code, 2);
  EXPECT_EQ(run({"measure", "--check", "bogus"}).code, 2);
  const auto r = run({"kernel", "--dim", "2", "--phi-table", "--samples", "10"});
  EXPECT_EQ(r.code, 2);
  EXPECT_NE(r.err.find("invalid-sampler"), std::string::npos);
}

TEST(Cli, ComputationFailureExitsOne) {
  // Below the range of the analytic bound.
  EXPECT_EQ(run({"discrepancy", "--n", "1000", "--full"}).code, 1);
  // A two-term certificate cannot succeed.
  const auto r = run({"certify-ap", "--n", "2", "--eps0", "0.999", "--recheck", "0", "--expect-pass"});
  EXPECT_EQ(r.code, 1);
  EXPECT_EQ(r.json()["result"]["certificate"]["verdict"], false);
  EXPECT_EQ(run({"certify-ap", "--n", "2", "--eps0", "0.999", "--recheck", "0"}).code, 0);
}

TEST(Cli, HelpAndVersion) {
  const auto help = run({"--help"});
  EXPECT_EQ(help.code, 0);
  EXPECT_NE(help.out.find("certify-ap"), std::string::npos);
  const auto version = run({"--version"});
  EXPECT_EQ(version.code, 0);
  EXPECT_EQ(version.out, std::string(copies_lab::kToolVersion) + "\n");
}

TEST(Cli, DiscrepancyFullReport) {
  const auto r = run({"discrepancy", "--n", "100000", "--offset", "1", "--A", "0", "--B", "0", "--full",
                      "--expect-pass"});
  ASSERT_EQ(r.code, 0) << r.err;
  auto res = r.json()["result"];
  EXPECT_LE(res["exact_extreme"].get<double>(), res["et_bound"].get<double>());
  EXPECT_EQ(res["M"], 40);
  EXPECT_EQ(res["H"], 4);
  EXPECT_EQ(res["rows"].size(), 40u);
}

TEST(Cli, DiscrepancyGoldenAndViete) {
  const auto r = run({"discrepancy", "--n", "64", "--M", "10", "--golden-q-max", "1e4", "--viete-range", "50",
                      "--expect-pass"});
  ASSERT_EQ(r.code, 0) << r.err;
  auto res = r.json()["result"];
  EXPECT_GE(res["golden_quality"]["min_product"].get<double>(), 1.0 / 3.0);
  EXPECT_EQ(res["viete"]["min_abs"], 1);
  EXPECT_LE(res["exact_extreme"].get<double>(), res["et_bound"].get<double>());
}

TEST(Cli, ConstructSequence) {
  const auto r = run({"construct", "--n", "64", "--offset", "1", "--eps", "0.5"});
  ASSERT_EQ(r.code, 0) << r.err;
  auto res = r.json()["result"];
  EXPECT_EQ(res["terms"].size(), 64u);
  EXPECT_EQ(res["gap_hit"], 1);
  EXPECT_NEAR(res["scale"]["r"].get<double>(), 1.27202, 1e-5);
}

TEST(Cli, ScientificNotationForIntegers) {
  const auto a = run({"construct", "--n", "1e2", "--seed", "7"});
  const auto b = run({"construct", "--n", "100", "--seed", "7"});
  ASSERT_EQ(a.code, 0) << a.err;
  EXPECT_EQ(a.json()["result"], b.json()["result"]);
  EXPECT_EQ(run({"construct", "--n", "1.55e1"}).code, 2);
  EXPECT_EQ(run({"construct", "--n", "1.5e1"}).code, 0);
}

TEST(Cli, DeterministicApartFromTimestamp) {
  const std::vector<std::string> args{"measure", "--set", "ball", "--check", "mean", "--radius", "0.5",
                                      "--samples", "200000"};
  const auto a = run(args);
  const auto b = run(args);
  ASSERT_EQ(a.code, 0) << a.err;
  EXPECT_EQ(without_timestamp(a.out), without_timestamp(b.out));
  auto threaded = args;
  threaded.insert(threaded.end(), {"--threads", "3"});
  const auto c = run(threaded);
  EXPECT_EQ(Json::parse(a.out)["result"], Json::parse(c.out)["result"]);
}

TEST(Cli, OutputFiles) {
  const TempDir dir;
  const auto r = run({"discrepancy", "--n", "100000", "--full", "--csv", dir.file("rows.csv"), "--json-out",
                      dir.file("report.json")});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_EQ(Json::parse(slurp(dir.file("report.json"))), r.json());
  const auto csv = slurp(dir.file("rows.csv"));
  EXPECT_EQ(csv.rfind("m,exact_sum,analytic_bound\n", 0), 0u);
  EXPECT_EQ(std::count(csv.begin(), csv.end(), '\n'), 41);

  const auto b = run({"bounds", "--n", "10", "--plot-data", dir.file("plot.csv")});
  ASSERT_EQ(b.code, 0) << b.err;
  const auto plot = slurp(dir.file("plot.csv"));
  EXPECT_EQ(plot.rfind("n,final_bound,theorem_bound,rho_lower,rho_upper\n", 0), 0u);

  const auto bad = run({"bounds", "--n", "10", "--csv", dir.file("missing/dir/x.csv")});
  EXPECT_EQ(bad.code, 1);
}

TEST(Cli, PatternFileInput) {
  const TempDir dir;
  {
    std::ofstream f(dir.file("pattern.json"));
    f << R"({"dimension": 2, "points": [[0, 0], [1, 0], [0.5, 0.8660254037844386]]})";
  }
  const auto stats = run({"search", "--mode", "stats", "--pattern", dir.file("pattern.json")});
  ASSERT_EQ(stats.code, 0) << stats.err;
  EXPECT_NEAR(stats.json()["result"]["pattern_stats"]["sep"].get<double>(), 1.0, 1e-12);

  const auto found = run({"search", "--pattern", dir.file("pattern.json"), "--r", "40", "--expect-pass"});
  ASSERT_EQ(found.code, 0) << found.err;
  EXPECT_EQ(found.json()["result"]["verified"], true);

  {
    std::ofstream f(dir.file("bad.json"));
    f << R"({"dimension": 2, "points": [[0, 0], [0, 0]]})";
  }
  EXPECT_EQ(run({"search", "--mode", "stats", "--pattern", dir.file("bad.json")}).code, 1);
  EXPECT_EQ(run({"search", "--pattern", dir.file("nope.json")}).code, 2);
}

TEST(Cli, TranslatedSearchOnCells) {
  const auto r = run({"search", "--mode", "translated", "--set", "cell", "--hole", "0.31622776601683794",
                      "--preset", "collinear", "--r", "5", "--expect-pass"});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_EQ(r.json()["result"]["verified"], true);
}

TEST(Cli, RotationMode) {
  const auto r = run({"search", "--mode", "rotation", "--set", "halfspace", "--normal", "0", "1", "--preset",
                      "collinear", "--r", "1", "--samples", "20000", "--expect-pass"});
  ASSERT_EQ(r.code, 0) << r.err;
  auto m = r.json()["result"]["rotation_measure"];
  EXPECT_NEAR(m["estimate"].get<double>(), 0.5, 0.03);
}
