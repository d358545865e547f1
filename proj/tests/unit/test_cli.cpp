#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <sstream>

#include "severfit/cli.hpp"
#include "severfit/csv.hpp"
#include "severfit/dist.hpp"

using namespace severfit;
namespace fs = std::filesystem;

namespace {

struct Outcome {
  int code;
  std::string out;
  std::string err;
};

Outcome invoke(const std::vector<std::string>& args) {
  std::ostringstream out, err;
  const int code = cli::run(args, out, err);
  return {code, out.str(), err.str()};
}

class CliTest : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() /
           ("severfit_cli_" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
    fs::create_directories(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }

  std::string write(const std::string& name, const std::string& text) {
    const auto p = dir_ / name;
    std::ofstream(p) << text;
    return p.string();
  }
  std::string path(const std::string& name) const { return (dir_ / name).string(); }

  static std::string slurp(const std::string& p) {
    std::ifstream in(p);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
  }

  static CsvTable table(const std::string& text) {
    std::istringstream in(text);
    return read_csv(in, true);
  }

  fs::path dir_;
};

std::size_t column(const CsvTable& t, const std::string& name) {
  for (std::size_t i = 0; i < t.header.size(); ++i)
    if (t.header[i] == name) return i;
  ADD_FAILURE() << "missing column " << name;
  return 0;
}

}  // namespace

TEST_F(CliTest, FitMleOnHandExample) {
  const auto data = write("x.csv", "2,4,6\n");
  const auto r = invoke({"fit", "--method", "mle", "--data", data});
  EXPECT_EQ(r.code, cli::kExitOk) << r.err;
  const auto t = table(r.out);
  ASSERT_EQ(t.rows.size(), 1u);
  EXPECT_EQ(*parse_double(t.rows[0][column(t, "estimate")]), 4.0);
  EXPECT_EQ(t.rows[0][column(t, "exists")], "true");
  EXPECT_NE(r.out.find("# theta_hat = 4"), std::string::npos);
}

TEST_F(CliTest, FitTrimmedMeanOnLargeSample) {
  RandomSource rng(7, 0);
  const auto x = sample(ExponentialModel(10.0), 100000, rng);
  std::ostringstream csv;
  csv << "loss\n" << std::setprecision(17);
  for (double v : x) csv << v << "\n";
  const auto data = write("big.csv", csv.str());
  const auto r = invoke({"fit", "--method", "mtum", "--data", data, "--d", "1", "--u", "30"});
  ASSERT_EQ(r.code, cli::kExitOk) << r.err;
  const auto t = table(r.out);
  const double est = *parse_double(t.rows[0][column(t, "estimate")]);
  EXPECT_GE(est, 9.5);
  EXPECT_LE(est, 10.5);
  const double se = *parse_double(t.rows[0][column(t, "se")]);
  EXPECT_GT(se, 0.0);
  EXPECT_LT(se, 0.1);
}

TEST_F(CliTest, NoSolutionExitsWithTwo) {
  const auto data = write("x.csv", "9\n9.5\n");
  const auto r = invoke({"fit", "--method", "mtum", "--data", data, "--d", "0", "--u", "10"});
  EXPECT_EQ(r.code, cli::kExitNoSolution);
  const auto t = table(r.out);
  EXPECT_EQ(t.rows[0][column(t, "reason")], "AboveUpperBound");
  EXPECT_EQ(t.rows[0][column(t, "exists")], "false");
  EXPECT_EQ(t.rows[0][column(t, "estimate")], "");

  const auto empty = invoke({"fit", "--method", "mtum", "--data", data, "--d", "20", "--u", "30"});
  EXPECT_EQ(empty.code, cli::kExitNoSolution);
  EXPECT_NE(empty.out.find("EmptyWindow"), std::string::npos);
}

TEST_F(CliTest, MalformedDataExitsWithOneAndLine) {
  const auto data = write("bad.csv", "loss\n1\n2\nabc\n");
  const auto r = invoke({"fit", "--method", "mle", "--data", data});
  EXPECT_EQ(r.code, cli::kExitInputError);
  EXPECT_NE(r.err.find("line 4"), std::string::npos) << r.err;
  const auto missing = invoke({"fit", "--method", "mle", "--data", path("nope.csv")});
  EXPECT_EQ(missing.code, cli::kExitInputError);
  const auto unknown = invoke({"fit", "--method", "median", "--data", data});
  EXPECT_EQ(unknown.code, cli::kExitInputError);
  EXPECT_EQ(invoke({}).code, cli::kExitInputError);
  EXPECT_EQ(invoke({"frobnicate"}).code, cli::kExitInputError);
}

TEST_F(CliTest, ThresholdStyles) {
  const auto data = write("x.csv", "1\n3\n5\n7\n9\n11\n");
  const auto r = invoke({"fit", "--method", "mcm", "--data", data, "--theta", "10", "--a", "0.05", "--b", "0.05"});
  ASSERT_EQ(r.code, cli::kExitOk) << r.err;
  const auto t = table(r.out);
  EXPECT_NEAR(*parse_double(t.rows[0][column(t, "d")]), -10.0 * std::log(0.95), 1e-12);
  EXPECT_NEAR(*parse_double(t.rows[0][column(t, "u")]), -10.0 * std::log(0.05), 1e-12);

  const auto mixed = invoke({"fit", "--method", "mcm", "--data", data, "--theta", "10", "--a", "0.05", "--u", "5"});
  EXPECT_EQ(mixed.code, cli::kExitInputError);
  const auto no_theta = invoke({"fit", "--method", "mcm", "--data", data, "--a", "0.05"});
  EXPECT_EQ(no_theta.code, cli::kExitInputError);
  const auto pareto_no_x0 = invoke({"fit", "--method", "mle", "--model", "pareto1", "--data", data});
  EXPECT_EQ(pareto_no_x0.code, cli::kExitInputError);
}

TEST_F(CliTest, ParetoFitReportsAlpha) {
  const auto data = write("x.csv", "2\n4\n8\n");
  const auto r = invoke({"fit", "--method", "mle", "--model", "pareto1", "--x0", "1", "--data", data});
  ASSERT_EQ(r.code, cli::kExitOk) << r.err;
  const auto t = table(r.out);
  EXPECT_NEAR(*parse_double(t.rows[0][column(t, "estimate")]), 3.0 / (6.0 * std::log(2.0)), 1e-12);
  EXPECT_NE(r.out.find("alpha_hat"), std::string::npos);
}

TEST_F(CliTest, AreDefaultGrid) {
  const auto r = invoke({"are"});
  ASSERT_EQ(r.code, cli::kExitOk) << r.err;
  const auto t = table(r.out);
  EXPECT_EQ(t.header, (std::vector<std::string>{"method", "a", "b", "d", "u", "are"}));
  ASSERT_EQ(t.rows.size(), 3u * 64u);
  for (std::size_t i = 0; i < t.rows.size(); ++i) EXPECT_EQ(t.rows[i][0], t.rows[(i / 64) * 64][0]);
  bool found = false;
  for (const auto& row : t.rows)
    if (row[0] == "MCM" && row[1] == "0.85" && row[2] == "0.15") {
      found = true;
      EXPECT_EQ(row[5], "");
    }
  EXPECT_TRUE(found);

  const auto out = path("are.csv");
  const auto single = invoke({"are", "--methods", "mtcm", "--a-grid", "0.1", "--b-grid", "0.1", "--out", out});
  ASSERT_EQ(single.code, cli::kExitOk);
  const auto st = table(slurp(out));
  ASSERT_EQ(st.rows.size(), 1u);
  EXPECT_NEAR(*parse_double(st.rows[0][5]), 0.749, 0.0005);
  EXPECT_EQ(invoke({"are", "--a-grid", "0.1,x"}).code, cli::kExitInputError);
}

TEST_F(CliTest, InfluenceWithoutTrimmingIsCentredIdentity) {
  const auto r = invoke({"influence", "--a", "0", "--b", "0", "--points", "11", "--x-max", "50"});
  ASSERT_EQ(r.code, cli::kExitOk) << r.err;
  const auto t = table(r.out);
  EXPECT_EQ(t.header, (std::vector<std::string>{"x", "if_mtm", "if_mcm"}));
  ASSERT_EQ(t.rows.size(), 11u);
  for (const auto& row : t.rows) {
    const double x = *parse_double(row[0]);
    EXPECT_NEAR(*parse_double(row[1]), x - 10.0, 1e-9);
    EXPECT_NEAR(*parse_double(row[2]), x - 10.0, 1e-9);
  }
}

TEST_F(CliTest, InfluenceIsBoundedWithTrimming) {
  const auto r = invoke({"influence"});
  ASSERT_EQ(r.code, cli::kExitOk) << r.err;
  const auto t = table(r.out);
  ASSERT_EQ(t.rows.size(), 101u);
  const double last_x = *parse_double(t.rows.back()[0]);
  EXPECT_NEAR(last_x, -10.0 * std::log(0.005), 1e-9);
  const double flat = *parse_double(t.rows.back()[1]);
  const double u = -10.0 * std::log(0.05);
  for (const auto& row : t.rows)
    if (*parse_double(row[0]) > u) EXPECT_NEAR(*parse_double(row[1]), flat, 1e-9);
  EXPECT_EQ(invoke({"influence", "--a", "0.6", "--b", "0.5"}).code, cli::kExitInputError);
  EXPECT_EQ(invoke({"influence", "--model", "pareto1"}).code, cli::kExitInputError);
}

TEST_F(CliTest, HistIsReproducible) {
  const std::vector<std::string> args{"hist", "--n-list", "30,50", "--count", "20", "--methods", "mcm,mtcm"};
  const auto a = invoke(args);
  const auto b = invoke(args);
  ASSERT_EQ(a.code, cli::kExitOk) << a.err;
  EXPECT_EQ(a.out, b.out);
  const auto t = table(a.out);
  EXPECT_EQ(t.header, (std::vector<std::string>{"method", "n", "replicate", "theta_hat", "skewness"}));
  EXPECT_EQ(t.rows.size(), 80u);

  const auto bins = path("bins.csv");
  auto with_bins = args;
  with_bins.insert(with_bins.end(), {"--bins-out", bins});
  ASSERT_EQ(invoke(with_bins).code, cli::kExitOk);
  const auto bt = table(slurp(bins));
  std::size_t total = 0;
  for (const auto& row : bt.rows) total += std::stoul(row[4]);
  EXPECT_EQ(total, 80u);
}

TEST_F(CliTest, SimulateIsByteIdenticalAcrossRuns) {
  const auto cfg = write("study.cfg",
                         "methods = mcm, mtum\n"
                         "design_points = (0.05, 0.05), (0.25, 0)\n"
                         "n_list = 40\n"
                         "blocks = 3\n"
                         "reps = 50\n"
                         "seed = 11\n");
  const auto first = path("a.csv");
  const auto second = path("b.csv");
  ASSERT_EQ(invoke({"simulate", "--config", cfg, "--out", first}).code, cli::kExitOk);
  ASSERT_EQ(invoke({"simulate", "--config", cfg, "--out", second}).code, cli::kExitOk);
  const auto text = slurp(first);
  EXPECT_EQ(text, slurp(second));
  const auto t = table(text);
  EXPECT_EQ(t.header.size(), 12u);
  EXPECT_EQ(t.rows.size(), 8u);

  const auto bad = write("bad.cfg", "reps = 10\nwidth = 3\n");
  const auto r = invoke({"simulate", "--config", bad});
  EXPECT_EQ(r.code, cli::kExitInputError);
  EXPECT_NE(r.err.find("width"), std::string::npos);
}

TEST_F(CliTest, CsvOutputRoundTripsByteForByte) {
  const auto r = invoke({"are", "--a-grid", "0,0.05,0.85", "--b-grid", "0,0.15"});
  ASSERT_EQ(r.code, cli::kExitOk);
  const auto t = table(r.out);
  std::ostringstream again;
  CsvWriter w(again);
  w.row(t.header);
  for (const auto& row : t.rows) w.row(row);
  EXPECT_EQ(again.str(), r.out);
}

TEST_F(CliTest, HelpExitsCleanly) {
  const auto r = invoke({"--help"});
  EXPECT_EQ(r.code, cli::kExitOk);
  EXPECT_NE(r.out.find("simulate"), std::string::npos);
}
