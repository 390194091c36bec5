#include <gtest/gtest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>

#include <json.hpp>

#include "regen_cli.hpp"

namespace fs = std::filesystem;
using regen::cli::run;

namespace {

fs::path tmp(const std::string& name) { return fs::temp_directory_path() / ("regen_cli_test_" + name); }

std::string slurp(const fs::path& p) {
  std::ifstream f(p, std::ios::binary);
  std::stringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

int run_to(const std::vector<std::string>& args, const fs::path& out, const std::string& format,
           std::string* err = nullptr) {
  fs::remove(out);
  std::vector<std::string> a = args;
  a.insert(a.end(), {"--out", out.string(), "--format", format});
  std::ostringstream e;
  const int rc = run(a, e);
  if (err) *err = e.str();
  return rc;
}

// Small instances of every command.
const std::map<std::string, std::vector<std::string>> kSmall = {
    {"sample-overshoot", {"sample-overshoot", "--reps", "50"}},
    {"intersection-cdf", {"intersection-cdf", "--x", "0.5,2"}},
    {"sample-intersection", {"sample-intersection", "--reps", "50"}},
    {"shift-law", {"shift-law", "--reps", "20", "--resolution", "200"}},
    {"phi", {"phi", "--beta", "0.25,0.75"}},
    {"simulate-eta", {"simulate-eta", "--resolution", "100", "--trunc", "8"}},
    {"eta-tail", {"eta-tail", "--reps", "1e4", "--resolution", "100", "--trunc", "8"}},
    {"self-similarity", {"self-similarity", "--reps", "1e4", "--resolution", "100", "--trunc", "8"}},
    {"stationarity", {"stationarity", "--reps", "1e4", "--resolution", "100", "--trunc", "8"}},
    {"interpolation", {"interpolation", "--reps", "200", "--resolution", "100", "--beta-grid", "0.4,0.8",
                       "--stable-terms", "64"}},
    {"simulate-process", {"simulate-process", "--n", "30", "--trunc", "8"}},
    {"limit-experiment", {"limit-experiment", "--n", "50", "--reps", "1e3", "--resolution", "100", "--trunc", "8"}},
    {"renewal-asymptotics", {"renewal-asymptotics", "--n", "200"}},
    {"dp-oracle", {"dp-oracle", "--n", "100"}},
    {"verify", {"verify", "--criteria", "6,12"}},
};

}  // namespace

TEST(Cli, CsvHeadersAreFrozen) {
  std::ifstream golden(std::string(REGEN_TEST_DIR) + "/golden/csv_headers.txt");
  ASSERT_TRUE(golden);
  std::string cmd, header;
  int seen = 0;
  while (golden >> cmd >> header) {
    ASSERT_TRUE(kSmall.count(cmd)) << cmd;
    const auto out = tmp(cmd + ".csv");
    std::string err;
    ASSERT_EQ(run_to(kSmall.at(cmd), out, "csv", &err), 0) << cmd << ": " << err;
    const std::string body = slurp(out);
    EXPECT_EQ(body.substr(0, body.find('\n')), header) << cmd;
    EXPECT_GT(std::count(body.begin(), body.end(), '\n'), 1) << cmd;
    ++seen;
  }
  EXPECT_EQ(seen, int(kSmall.size()));
}

TEST(Cli, JsonEnvelopeRoundTrips) {
  for (const auto& [cmd, args] : kSmall) {
    const auto out = tmp(cmd + ".json");
    ASSERT_EQ(run_to(args, out, "json"), 0) << cmd;
    const auto j = nlohmann::json::parse(slurp(out));
    EXPECT_EQ(j.at("command"), cmd);
    EXPECT_EQ(j.at("seed"), 7u);
    EXPECT_TRUE(j.at("config").is_object());
    EXPECT_FALSE(j.at("config").contains("threads"));
    EXPECT_TRUE(j.at("diagnostics").is_object());
    const auto& cols = j.at("columns");
    for (const auto& row : j.at("rows")) ASSERT_EQ(row.size(), cols.size()) << cmd;
    EXPECT_EQ(j.contains("wall_clock_seconds"), cmd != "verify") << cmd;
  }
}

TEST(Cli, NumbersCarrySeventeenDigits) {
  const auto out = tmp("digits.json");
  ASSERT_EQ(run_to({"intersection-cdf", "--x", "0.7", "--a", "1.3", "--beta1", "0.6", "--beta2", "0.9"}, out, "json"), 0);
  const auto j = nlohmann::json::parse(slurp(out));
  const double v = j["rows"][0][4].get<double>();
  EXPECT_EQ(v, regen::intersectlaw::intersection_cdf(0.7, 1.3, 0.6, 0.9));
  EXPECT_EQ(j["config"]["quad_tol"].get<double>(), 1e-10);
}

TEST(Cli, ValidationFailureExitsTwoWithoutOutput) {
  const auto out = tmp("bad.json");
  std::string err;
  EXPECT_EQ(run_to({"phi", "--beta", "1.5"}, out, "json", &err), 2);
  EXPECT_FALSE(fs::exists(out));
  EXPECT_NE(err.find("validation error"), std::string::npos);
  EXPECT_EQ(run_to({"intersection-cdf", "--x", "1", "--beta1", "0.3", "--beta2", "0.4"}, out, "json"), 2);
  EXPECT_EQ(run_to({"sample-overshoot", "--reps", "1.5"}, out, "json"), 2);
  EXPECT_EQ(run_to({"sample-overshoot", "--no-such-flag", "1"}, out, "json"), 2);
  EXPECT_EQ(run_to({"simulate-eta", "--trunc", "2"}, out, "json"), 2);
  EXPECT_EQ(run_to({"limit-experiment", "--intervals", "0-1"}, out, "json"), 2);
  EXPECT_EQ(run_to({"phi"}, out, "xml"), 2);
  EXPECT_FALSE(fs::exists(out));
}

TEST(Cli, UnwritableOutputIsInternalFailure) {
  std::ostringstream e;
  EXPECT_EQ(run({"phi", "--out", "/nonexistent-dir/x.json"}, e), 1);
}

TEST(Cli, SeedFromEnvironmentUnlessFlagGiven) {
  const auto out = tmp("seed.json");
  ::setenv("REGEN_SEED", "1234", 1);
  ASSERT_EQ(run_to({"sample-overshoot", "--reps", "5"}, out, "json"), 0);
  EXPECT_EQ(nlohmann::json::parse(slurp(out))["seed"], 1234u);
  ASSERT_EQ(run_to({"sample-overshoot", "--reps", "5", "--seed", "99"}, out, "json"), 0);
  EXPECT_EQ(nlohmann::json::parse(slurp(out))["seed"], 99u);
  ::unsetenv("REGEN_SEED");
  ASSERT_EQ(run_to({"sample-overshoot", "--reps", "5"}, out, "json"), 0);
  EXPECT_EQ(nlohmann::json::parse(slurp(out))["seed"], 7u);
}

TEST(Cli, OutputIndependentOfThreads) {
  for (const char* cmd : {"sample-intersection", "eta-tail", "limit-experiment"}) {
    auto args = kSmall.at(cmd);
    auto one = args, many = args;
    one.insert(one.end(), {"--threads", "1"});
    many.insert(many.end(), {"--threads", "6"});
    ASSERT_EQ(run_to(one, tmp("t1.csv"), "csv"), 0);
    ASSERT_EQ(run_to(many, tmp("t6.csv"), "csv"), 0);
    EXPECT_EQ(slurp(tmp("t1.csv")), slurp(tmp("t6.csv"))) << cmd;
  }
}

TEST(Cli, VerifyJsonIsByteIdenticalAcrossThreads) {
  ASSERT_EQ(run_to({"verify", "--criteria", "6,12", "--threads", "1"}, tmp("v1.json"), "json"), 0);
  ASSERT_EQ(run_to({"verify", "--criteria", "6,12", "--threads", "4"}, tmp("v4.json"), "json"), 0);
  EXPECT_EQ(slurp(tmp("v1.json")), slurp(tmp("v4.json")));
  EXPECT_EQ(run_to({"verify", "--criteria", "14"}, tmp("v.json"), "json"), 2);
}

TEST(Cli, FormattingHelpers) {
  using regen::cli::format_number;
  EXPECT_EQ(format_number(0.1), "0.10000000000000001");
  EXPECT_EQ(format_number(INFINITY), "inf");
  EXPECT_EQ(regen::cli::json_cell(regen::cli::Cell{-INFINITY}), "\"-inf\"");
  EXPECT_EQ(regen::cli::json_cell(regen::cli::Cell{std::string("a\"b")}), "\"a\\\"b\"");
  EXPECT_EQ(regen::cli::csv_cell(regen::cli::Cell{std::string("a,b")}), "\"a,b\"");
  EXPECT_EQ(regen::cli::csv_cell(regen::cli::Cell{std::monostate{}}), "");
}
