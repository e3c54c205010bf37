#include <gtest/gtest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "cli.hpp"

namespace {

struct Result {
  int code;
  std::string out;
  std::string err;
};

Result run(std::vector<std::string> args) {
  std::ostringstream out, err;
  const int code = tscatter::cli::run(args, out, err);
  return Result{code, out.str(), err.str()};
}

std::string data(const std::string& name) { return std::string(TSCATTER_TEST_DATA_DIR) + "/" + name; }

}  // namespace

TEST(Cli, FitQ1) {
  const Result r = run({"fit", "--nu", "2", data("q1.csv")});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto j = nlohmann::json::parse(r.out);
  EXPECT_EQ(j["schema"], "tscatter/1");
  EXPECT_EQ(j["config"]["command"], "fit");
  EXPECT_EQ(j["config"]["nu"], 2.0);
  const auto& sigma = j["result"]["sigma"];
  EXPECT_NEAR(sigma[0][0].get<double>(), 5.0 / 6, 1e-8);
  EXPECT_NEAR(sigma[1][1].get<double>(), 1.0 / 6, 1e-8);
  EXPECT_NEAR(j["result"]["mu"][0].get<double>(), 0.0, 1e-12);
  // 17 significant digits.
  EXPECT_NE(r.out.find("0.83333333333246928"), std::string::npos);
}

TEST(Cli, FitUnivariateDegenerate) {
  const Result r = run({"fit", "--nu", "2", data("univariate_atom.csv")});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto j = nlohmann::json::parse(r.out);
  EXPECT_EQ(j["result"]["mu"][0], 3.0);
  EXPECT_EQ(j["result"]["sigma"][0][0], 0.0);
  EXPECT_TRUE(j["result"]["degenerate"].get<bool>());
  EXPECT_TRUE(j["result"]["weight_sum"].is_null());
}

TEST(Cli, CheckDomainCollinear) {
  const Result r = run({"check-domain", "--nu", "2", data("collinear.csv")});
  EXPECT_EQ(r.code, 2);
  const auto e = nlohmann::json::parse(r.err);
  EXPECT_EQ(e["code"], "DomainViolation");
  EXPECT_EQ(e["witness"], nlohmann::json::parse("[0, 1, 2]"));
  EXPECT_EQ(e["subspace_dim"], 1);
  const auto j = nlohmann::json::parse(r.out);
  EXPECT_FALSE(j["result"]["member"].get<bool>());
}

TEST(Cli, CheckDomainMember) {
  const Result r = run({"check-domain", "--nu", "2", data("p1.csv")});
  EXPECT_EQ(r.code, 0) << r.err;
  EXPECT_TRUE(r.err.empty());
  const Result lin = run({"check-domain", "--nu", "2", "--linear", data("p1.csv")});
  EXPECT_EQ(lin.code, 0) << lin.err;
  EXPECT_EQ(nlohmann::json::parse(lin.out)["result"]["kind"], "linear");
}

TEST(Cli, FitOutsideDomainExitsTwo) {
  const Result r = run({"fit", "--nu", "2", data("collinear.csv")});
  EXPECT_EQ(r.code, 2);
  EXPECT_TRUE(r.out.empty());
  EXPECT_EQ(nlohmann::json::parse(r.err)["witness"].size(), 3u);
}

TEST(Cli, NoConvergenceExitsThree) {
  const Result r = run({"fit", "--nu", "2", "--max-iter", "3", data("q1.csv")});
  EXPECT_EQ(r.code, 3);
  const auto e = nlohmann::json::parse(r.err);
  EXPECT_EQ(e["code"], "NoConvergence");
  EXPECT_EQ(e["iterations"], 3);
}

TEST(Cli, SkippedDomainCheckCollapses) {
  const Result r = run({"fit", "--nu", "2", "--skip-domain-check", data("collinear.csv")});
  EXPECT_EQ(r.code, 3);
  EXPECT_FALSE(nlohmann::json::parse(r.err)["min_eigenvalue_trace"].empty());
}

TEST(Cli, Counterexample) {
  const Result r = run({"counterexample", "--nu", "2", "--k-max", "100"});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto j = nlohmann::json::parse(r.out);
  EXPECT_NEAR(j["result"]["limits"]["a"].get<double>(), 1.0 / 3, 1e-15);
  EXPECT_NEAR(j["result"]["limits"]["b"].get<double>(), 5.0 / 6, 1e-15);
  EXPECT_NEAR(j["result"]["limits"]["c"].get<double>(), 1.0 / 6, 1e-15);
  const auto& table = j["result"]["table"];
  ASSERT_EQ(table.size(), 6u);
  EXPECT_EQ(table.back()["k"], 100);
  EXPECT_LT(table.back()["P_sigma22"].get<double>(), 1e-3);
  EXPECT_NEAR(table.back()["Q_sigma11"].get<double>(), 5.0 / 6, 1e-8);

  const Result seven = run({"counterexample", "--nu", "2", "--k-max", "7"});
  const auto j7 = nlohmann::json::parse(seven.out);
  const auto& t7 = j7["result"]["table"];
  ASSERT_EQ(t7.size(), 4u);
  EXPECT_EQ(t7.back()["k"], 7);
}

TEST(Cli, UsageErrors) {
  EXPECT_EQ(run({}).code, 1);
  EXPECT_EQ(run({"frobnicate"}).code, 1);
  EXPECT_EQ(run({"fit", data("q1.csv")}).code, 1);
  EXPECT_EQ(run({"fit", "--nu", "abc", data("q1.csv")}).code, 1);
  EXPECT_EQ(run({"fit", "--nu", "1", data("q1.csv")}).code, 1);
  EXPECT_EQ(run({"fit", "--nu", "2", "--init", "random", data("q1.csv")}).code, 1);
  EXPECT_EQ(run({"fit", "--nu", "2", "/nonexistent.csv"}).code, 1);
  EXPECT_EQ(run({"influence", "--nu", "2", "--x", "1", data("q1.csv")}).code, 1);
  EXPECT_EQ(run({"mc-normality", "--nu", "2", "--n", "0", data("q1.csv")}).code, 1);
  const Result bad = run({"fit", "--nu", "-1", data("q1.csv")});
  EXPECT_EQ(bad.code, 1);
  EXPECT_TRUE(nlohmann::json::parse(bad.err).contains("message"));
  EXPECT_EQ(run({"--help"}).code, 0);
}

TEST(Cli, Influence) {
  const Result r = run({"influence", "--nu", "3", "--x", "0.5,-0.25", data("p1.csv")});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto j = nlohmann::json::parse(r.out);
  EXPECT_LT(j["result"]["relative_discrepancy"].get<double>(), 1e-3);
  EXPECT_EQ(j["result"]["implicit"]["d_sigma"].size(), 2u);
}

TEST(Cli, EquivarianceTest) {
  const Result r = run({"equivariance-test", "--nu", "3", "--maps", "10", "--seed", "4", data("plane_heavy.csv")});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto j = nlohmann::json::parse(r.out);
  EXPECT_LT(j["result"]["max_mu_relative"].get<double>(), 1e-8);
  EXPECT_LT(j["result"]["max_sigma_relative"].get<double>(), 1e-8);
  EXPECT_EQ(j["result"]["maps"].size(), 10u);
}

TEST(Cli, GcDiagnostic) {
  const Result r = run({"gc-diagnostic", "--nu", "3", "--grid-size", "20", "--n-list", "50,5000", "--seed", "2",
                        data("p1.csv")});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto j = nlohmann::json::parse(r.out);
  const auto& t = j["result"]["table"];
  ASSERT_EQ(t.size(), 2u);
  EXPECT_EQ(t[1]["n"], 5000);
  EXPECT_EQ(run({"gc-diagnostic", "--nu", "3", "--n-list", "50,x", data("p1.csv")}).code, 1);
}

TEST(Cli, ReportsAreByteIdentical) {
  const std::vector<std::string> mc = {"mc-normality", "--nu", "3", "--n", "100", "--R", "30", "--seed", "9",
                                       data("p1.csv")};
  setenv("TSCATTER_THREADS", "1", 1);
  const Result a = run(mc);
  setenv("TSCATTER_THREADS", "4", 1);
  const Result b = run(mc);
  unsetenv("TSCATTER_THREADS");
  ASSERT_EQ(a.code, 0) << a.err;
  EXPECT_EQ(a.out, b.out);
  const auto j = nlohmann::json::parse(a.out);
  EXPECT_EQ(j["config"]["seed"], 9);
  EXPECT_EQ(j["config"]["R"], 30);
  EXPECT_EQ(j["result"]["scaled_errors"].size(), j["result"]["kept"].get<std::size_t>());

  const std::vector<std::string> fit = {"fit", "--nu", "4", "--init", "covariance", data("plane_heavy.csv")};
  EXPECT_EQ(run(fit).out, run(fit).out);
  const Result changed = run({"mc-normality", "--nu", "3", "--n", "100", "--R", "30", "--seed", "10", data("p1.csv")});
  EXPECT_NE(changed.out, a.out);
}

TEST(Cli, OutputFile) {
  const auto path = std::filesystem::temp_directory_path() / "tscatter_cli_test.json";
  const Result r = run({"fit", "--nu", "2", "--output", path.string(), data("q1.csv")});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_TRUE(r.out.empty());
  std::ifstream in(path);
  const auto j = nlohmann::json::parse(in);
  EXPECT_EQ(j["config"]["output"], path.string());
  std::filesystem::remove(path);
}
