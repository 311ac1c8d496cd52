// Copyright 2026 The rrbins Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "cli_commands.h"

#include <algorithm>
#include <cstdlib>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "gmock/gmock.h"
#include "gtest/gtest.h"
#include "json.hpp"
#include "label_io.h"

namespace rrbins::cli {
namespace {

using ::testing::DoubleNear;
using ::testing::ElementsAre;
using ::testing::HasSubstr;

struct CliRun {
  int code;
  std::string out;
  std::string err;
};

CliRun Invoke(std::vector<std::string> args) {
  args.insert(args.begin(), "rrbins");
  std::ostringstream out, err;
  const int code = RunCli(args, out, err);
  return {code, out.str(), err.str()};
}

std::string TempPath(const std::string& name) {
  return ::testing::TempDir() + "/" + name;
}

std::string Write(const std::string& name, const std::string& contents) {
  const std::string path = TempPath(name);
  EXPECT_TRUE(WriteFile(path, contents).ok());
  return path;
}

std::string Slurp(const std::string& path) { return *ReadFile(path); }

TEST(ParseTest, Eps) {
  EXPECT_EQ(*ParseEps("1.5"), 1.5);
  EXPECT_DOUBLE_EQ(*ParseEps("ln7"), std::log(7.0));
  EXPECT_DOUBLE_EQ(*ParseEps("ln(3)"), std::log(3.0));
  EXPECT_FALSE(ParseEps("-1").ok());
  EXPECT_FALSE(ParseEps("lnx").ok());
  EXPECT_THAT(*ParseEpsList("0.5,1,2,4"), ElementsAre(0.5, 1, 2, 4));
}

TEST(ParseTest, Universe) {
  EXPECT_EQ(ParseUniverse("0:400:1")->size(), 401u);
  EXPECT_THAT(ParseUniverse("3,1,2")->values(), ElementsAre(1, 2, 3));
  EXPECT_FALSE(ParseUniverse("0:1").ok());
  EXPECT_FALSE(ParseUniverse("1:0:1").ok());
  EXPECT_FALSE(ParseUniverse("0:1:0").ok());
}

TEST(LabelIoTest, HeaderAndColumns) {
  EXPECT_THAT(*ParseLabels("y\n1\n2\n\n3\n", {}), ElementsAre(1, 2, 3));
  EXPECT_THAT(*ParseLabels("a,b\n1,10\n2,20\n", {.name = "b"}),
              ElementsAre(10, 20));
  EXPECT_THAT(*ParseLabels("1,10\n2,20\n", {.index = 1}), ElementsAre(10, 20));
  auto bad = ParseLabels("1\n2\nfoo\n", {});
  ASSERT_FALSE(bad.ok());
  EXPECT_THAT(bad.status().message(), HasSubstr("line 3"));
}

TEST(LabelIoTest, PriorFile) {
  auto prior = ParsePrior("label,probability\n1,0.75\n0,0.25\n");
  ASSERT_TRUE(prior.ok());
  EXPECT_THAT(prior->probs(), ElementsAre(0.25, 0.75));
  EXPECT_FALSE(ParsePrior("0,0.5\n1,0.4\n").ok());
  EXPECT_FALSE(ParsePrior("0,0.5\n0,0.5\n").ok());
}

TEST(RandomizeTest, NoPrivacyLimitReproducesInput) {
  const std::string in = Write("binary.txt", "0\n0\n1\n1\n");
  const std::string out = TempPath("binary.out");
  // An explicit eps1 makes the prior estimate effectively exact.
  CliRun r = Invoke({"randomize", "--input", in, "--output", out, "--eps", "1e6",
                  "--eps1", "1e5", "--loss", "squared", "--universe", "0:1:1",
                  "--seed", "3"});
  ASSERT_EQ(r.code, kExitOk) << r.err;
  EXPECT_EQ(Slurp(out), "0\n0\n1\n1\n");

  auto report = nlohmann::json::parse(Slurp(out + ".report.json"));
  for (const char* key :
       {"budget", "estimated_prior", "layout", "mechanism_loss_on_inputs",
        "n", "loss_kind", "seed"}) {
    EXPECT_TRUE(report.contains(key)) << key;
  }
  EXPECT_EQ(report["n"], 4);
  EXPECT_EQ(report["seed"], 3);
  EXPECT_EQ(report["loss_kind"], "squared");
}

TEST(RandomizeTest, SameSeedIsByteIdentical) {
  std::string labels;
  for (int i = 0; i < 500; ++i) labels += std::to_string(i % 40) + "\n";
  const std::string in = Write("det.txt", labels);
  const std::vector<std::string> common = {"--input", in, "--eps", "2",
                                           "--universe", "0:39:1", "--seed",
                                           "17"};
  std::vector<std::string> a = {"randomize", "--output", TempPath("det.a")};
  std::vector<std::string> b = {"randomize", "--output", TempPath("det.b")};
  a.insert(a.end(), common.begin(), common.end());
  b.insert(b.end(), common.begin(), common.end());
  ASSERT_EQ(Invoke(a).code, kExitOk);
  ASSERT_EQ(Invoke(b).code, kExitOk);
  EXPECT_EQ(Slurp(TempPath("det.a")), Slurp(TempPath("det.b")));
}

TEST(RandomizeTest, SeedFromEnvironment) {
  const std::string in = Write("env.txt", "0\n1\n2\n3\n4\n5\n6\n7\n8\n9\n");
  setenv("RRBINS_SEED", "99", 1);
  CliRun from_env = Invoke({"randomize", "--input", in, "--output",
                         TempPath("env.a"), "--eps", "1", "--mechanism",
                         "laplace", "--universe", "0:9:1"});
  CliRun from_flag = Invoke({"randomize", "--input", in, "--output",
                          TempPath("env.b"), "--eps", "1", "--mechanism",
                          "laplace", "--universe", "0:9:1", "--seed", "99"});
  CliRun flag_wins = Invoke({"randomize", "--input", in, "--output",
                          TempPath("env.c"), "--eps", "1", "--mechanism",
                          "laplace", "--universe", "0:9:1", "--seed", "5"});
  unsetenv("RRBINS_SEED");
  ASSERT_EQ(from_env.code, kExitOk);
  ASSERT_EQ(from_flag.code, kExitOk);
  ASSERT_EQ(flag_wins.code, kExitOk);
  EXPECT_EQ(Slurp(TempPath("env.a")), Slurp(TempPath("env.b")));
  EXPECT_NE(Slurp(TempPath("env.a")), Slurp(TempPath("env.c")));
}

TEST(RandomizeTest, ClippedLaplaceStaysInRange) {
  std::string labels;
  for (int i = 0; i <= 400; ++i) labels += std::to_string(i) + "\n";
  const std::string in = Write("wide.txt", labels);
  const std::string out = TempPath("wide.out");
  CliRun r = Invoke({"randomize", "--input", in, "--output", out, "--eps", "0.5",
                  "--mechanism", "laplace", "--clip", "--universe",
                  "0:400:1"});
  ASSERT_EQ(r.code, kExitOk) << r.err;
  for (double y : *ParseLabels(Slurp(out), {})) {
    EXPECT_GE(y, 0.0);
    EXPECT_LE(y, 400.0);
  }
}

TEST(RandomizeTest, ExitCodes) {
  const std::string bad = Write("bad.txt", "label\n1\n2\nx\n");
  CliRun parse = Invoke({"randomize", "--input", bad, "--output",
                      TempPath("bad.out"), "--eps", "1", "--universe",
                      "0:2:1"});
  EXPECT_EQ(parse.code, kExitParseError);
  EXPECT_THAT(parse.err, HasSubstr("line 4"));

  const std::string tiny = Write("tiny.txt", "0\n1\n2\n3\n");
  CliRun split = Invoke({"randomize", "--input", tiny, "--output",
                      TempPath("tiny.out"), "--eps", "1", "--universe",
                      "0:400:1"});
  EXPECT_EQ(split.code, kExitConfigError);
  EXPECT_THAT(split.err, HasSubstr("sqrt(k/n)"));

  CliRun missing = Invoke({"randomize", "--input", TempPath("nope.txt"),
                        "--output", TempPath("nope.out"), "--eps", "1",
                        "--universe", "0:1:1"});
  EXPECT_EQ(missing.code, kExitConfigError);

  CliRun no_universe = Invoke({"randomize", "--input", tiny, "--output",
                            TempPath("x.out"), "--eps", "1"});
  EXPECT_EQ(no_universe.code, kExitConfigError);
}

TEST(OptimizeBinsTest, ZeroEps) {
  const std::string prior = Write("uniform.csv", "0,0.5\n1,0.5\n");
  CliRun r = Invoke({"optimize-bins", "--prior", prior, "--eps", "0", "--loss",
                  "squared", "--json"});
  ASSERT_EQ(r.code, kExitOk) << r.err;
  auto j = nlohmann::json::parse(r.out);
  EXPECT_EQ(j["d"], 1);
  EXPECT_EQ(j["outputs"][0].get<double>(), 0.5);
  EXPECT_EQ(j["objective"].get<double>(), 0.25);
}

TEST(OptimizeBinsTest, Ln7) {
  const std::string prior = Write("uniform7.csv", "0,0.5\n1,0.5\n");
  CliRun r = Invoke({"optimize-bins", "--prior", prior, "--eps", "ln7", "--json"});
  ASSERT_EQ(r.code, kExitOk) << r.err;
  auto j = nlohmann::json::parse(r.out);
  EXPECT_EQ(j["d"], 2);
  EXPECT_NEAR(j["outputs"][0].get<double>(), 0.125, 1e-12);
  EXPECT_NEAR(j["outputs"][1].get<double>(), 0.875, 1e-12);
  EXPECT_NEAR(j["objective"].get<double>(), 0.109375, 1e-12);

  CliRun table = Invoke({"optimize-bins", "--prior", prior, "--eps", "ln7"});
  EXPECT_THAT(table.out, HasSubstr("d = 2"));
  EXPECT_THAT(table.out, HasSubstr("objective = 0.109375"));
}

TEST(OptimizeBinsTest, LargeEpsIdentity) {
  const std::string prior =
      Write("three.csv", "0,0.2\n1,0.5\n2,0.3\n");
  CliRun r = Invoke({"optimize-bins", "--prior", prior, "--eps", "50", "--json"});
  ASSERT_EQ(r.code, kExitOk);
  auto j = nlohmann::json::parse(r.out);
  EXPECT_EQ(j["d"], 3);
  EXPECT_LT(j["objective"].get<double>(), 1e-10);
}

TEST(OptimizeBinsTest, PublicPriorFromLabels) {
  const std::string in = Write("pub.txt", "0\n1\n");
  CliRun r = Invoke({"optimize-bins", "--input", in, "--public-prior",
                  "--universe", "0:1:1", "--eps", "ln7", "--json"});
  ASSERT_EQ(r.code, kExitOk) << r.err;
  EXPECT_NEAR(nlohmann::json::parse(r.out)["objective"].get<double>(),
              0.109375, 1e-12);
  CliRun missing = Invoke({"optimize-bins", "--eps", "1"});
  EXPECT_EQ(missing.code, kExitConfigError);
  const std::string bad_prior = Write("badprior.csv", "0,0.5\n1,zz\n");
  EXPECT_EQ(Invoke({"optimize-bins", "--prior", bad_prior, "--eps", "1"}).code,
            kExitParseError);
}

TEST(BenchTest, CsvIsDeterministic) {
  const std::vector<std::string> args = {
      "bench", "--zipf", "1.2", "--n", "3000", "--universe", "0:40:1",
      "--eps", "1,4", "--reps", "2", "--seed", "4"};
  CliRun a = Invoke(args);
  CliRun b = Invoke(args);
  ASSERT_EQ(a.code, kExitOk) << a.err;
  EXPECT_EQ(a.out, b.out);
  EXPECT_THAT(a.out, ::testing::StartsWith("mechanism,eps,rep,loss\n"));
  // 4 mechanisms x 2 eps x 2 reps + header.
  EXPECT_EQ(std::count(a.out.begin(), a.out.end(), '\n'), 17);
  EXPECT_THAT(a.err, HasSubstr("rr-on-bins"));
}

// Mean loss per (mechanism, eps) from the per-repetition CSV.
std::map<std::pair<std::string, double>, double> MeanLossByCell(
    const std::string& csv) {
  std::map<std::pair<std::string, double>, std::pair<double, int>> acc;
  std::istringstream lines(csv);
  std::string line;
  std::getline(lines, line);  // header
  while (std::getline(lines, line)) {
    std::istringstream fields(line);
    std::string mechanism, eps, rep, loss;
    std::getline(fields, mechanism, ',');
    std::getline(fields, eps, ',');
    std::getline(fields, rep, ',');
    std::getline(fields, loss, ',');
    auto& [sum, count] = acc[{mechanism, std::stod(eps)}];
    sum += std::stod(loss);
    ++count;
  }
  std::map<std::pair<std::string, double>, double> means;
  for (const auto& [key, value] : acc) means[key] = value.first / value.second;
  return means;
}

TEST(BenchTest, RrOnBinsHasTheLowestLossOnZipf) {
  CliRun r = Invoke({"bench", "--zipf", "1.1", "--n", "5000", "--universe",
                     "0:400:1", "--eps", "0.5,1,2,4", "--reps", "5", "--seed",
                     "11"});
  ASSERT_EQ(r.code, kExitOk) << r.err;
  const auto means = MeanLossByCell(r.out);
  for (double eps : {0.5, 1.0, 2.0, 4.0}) {
    const double rr = means.at({"rr-on-bins", eps});
    for (const char* other : {"laplace", "staircase", "exponential"}) {
      EXPECT_LE(rr, means.at({other, eps})) << other << " at eps " << eps;
    }
  }
}

TEST(BenchTest, NoNoiseLimit) {
  CliRun r = Invoke({"bench", "--zipf", "1.1", "--n", "5000", "--universe",
                     "0:400:1", "--eps", "1e6", "--reps", "2", "--seed", "12"});
  ASSERT_EQ(r.code, kExitOk) << r.err;
  const double range_sq = 400.0 * 400.0;
  for (const auto& [cell, mean] : MeanLossByCell(r.out)) {
    EXPECT_LT(mean, 1e-3 * range_sq) << cell.first;
  }
}

TEST(BenchTest, NeedsOneDataSource) {
  EXPECT_EQ(Invoke({"bench", "--universe", "0:4:1", "--eps", "1"}).code,
            kExitConfigError);
}

TEST(VerifyTest, QuickPassesAndFaultFails) {
  CliRun ok = Invoke({"verify", "--quick"});
  EXPECT_EQ(ok.code, kExitOk) << ok.out;
  CliRun fault = Invoke({"verify", "--quick", "--inject-eps-fault"});
  EXPECT_EQ(fault.code, kExitVerifyFailed);
  EXPECT_THAT(fault.out, HasSubstr("FAIL dp_ratio"));
}

TEST(CliTest, UnknownSubcommandIsConfigError) {
  EXPECT_EQ(Invoke({"frobnicate"}).code, kExitConfigError);
  EXPECT_EQ(Invoke({"verify", "--bogus"}).code, kExitConfigError);
}

}  // namespace
}  // namespace rrbins::cli
