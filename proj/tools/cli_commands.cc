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
#include <cmath>
#include <cstdlib>
#include <numeric>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "CLI11.hpp"
#include "absl/status/status.h"
#include "absl/strings/match.h"
#include "absl/strings/numbers.h"
#include "absl/strings/str_cat.h"
#include "absl/strings/str_format.h"
#include "absl/strings/str_split.h"
#include "absl/strings/strip.h"
#include "json.hpp"
#include "rrbins/binopt.h"
#include "rrbins/pipeline.h"
#include "rrbins/prior_estimation.h"
#include "rrbins/rng.h"
#include "rrbins/verify.h"

namespace rrbins::cli {
namespace {

using Json = nlohmann::json;

int Fail(std::ostream& err, int code, const absl::Status& status) {
  err << "error: " << status.message() << "\n";
  return code;
}

Json LayoutJson(const BinLayout& layout) {
  Json bins = Json::array();
  for (size_t b = 0; b < layout.num_bins(); ++b) {
    bins.push_back({{"first_label", layout.labels()[layout.bin_begin(b)]},
                    {"last_label", layout.labels()[layout.bin_ends()[b] - 1]},
                    {"output", layout.outputs()[b]}});
  }
  return {{"eps", layout.eps()},
          {"d", layout.num_bins()},
          {"objective", layout.objective()},
          {"bin_ends", std::vector<size_t>(layout.bin_ends().begin(),
                                           layout.bin_ends().end())},
          {"outputs", std::vector<double>(layout.outputs().begin(),
                                          layout.outputs().end())},
          {"bins", bins}};
}

absl::StatusOr<std::vector<double>> LoadLabels(const RunConfig& config,
                                               int& code) {
  auto text = ReadFile(config.input_path);
  if (!text.ok()) {
    code = kExitConfigError;
    return text.status();
  }
  auto labels = ParseLabels(*text, config.column);
  if (!labels.ok()) {
    code = kExitParseError;
    return absl::InvalidArgumentError(
        absl::StrCat(config.input_path, ": ", labels.status().message()));
  }
  return labels;
}

absl::StatusOr<EpsilonBudget> SplitBudget(const RunConfig& config, double eps,
                                          size_t k, size_t n) {
  if (!config.eps1.has_value()) return DefaultBudgetSplit(eps, k, n);
  if (!(*config.eps1 > 0.0) || *config.eps1 > eps) {
    return absl::InvalidArgumentError(absl::StrFormat(
        "--eps1 must lie in (0, eps = %.6g], got %.6g", eps, *config.eps1));
  }
  return EpsilonBudget::Create(*config.eps1, eps - *config.eps1);
}

// Zipf-distributed labels over the universe: P(i) ∝ (i + 1)^-s.
std::vector<double> SyntheticZipfLabels(const LabelSet& universe, double s,
                                        size_t n, Rng& rng) {
  std::vector<double> cdf(universe.size());
  double total = 0.0;
  for (size_t i = 0; i < universe.size(); ++i) {
    total += std::pow(i + 1.0, -s);
    cdf[i] = total;
  }
  std::vector<double> labels(n);
  for (double& y : labels) {
    const double u = rng.Uniform() * total;
    const size_t i = std::min<size_t>(
        std::lower_bound(cdf.begin(), cdf.end(), u) - cdf.begin(),
        universe.size() - 1);
    y = universe[i];
  }
  return labels;
}

// Mean mechanism loss of one bench cell.
absl::StatusOr<double> BenchCell(const RunConfig& config, MechanismKind kind,
                                 double eps, absl::Span<const double> labels,
                                 const LossSpec& loss, uint64_t seed) {
  Rng rng(seed);
  const LabelSet& universe = *config.universe;
  if (kind == MechanismKind::kRrOnBins) {
    auto budget = SplitBudget(config, eps, universe.size(), labels.size());
    if (!budget.ok()) return budget.status();
    auto result = LabelRandomizer(labels, universe, budget->eps1,
                                  budget->eps2, loss, rng, Execution::kSerial);
    if (!result.ok()) return result.status();
    return result->report.mechanism_loss_on_inputs;
  }
  auto noisy = RandomizeWithBaseline(
      labels, universe, {.kind = kind, .eps = eps, .clip = config.clip}, rng,
      Execution::kSerial);
  if (!noisy.ok()) return noisy.status();
  return MeanLoss(*noisy, labels, loss);
}

}  // namespace

absl::StatusOr<double> ParseEps(absl::string_view text) {
  absl::string_view t = absl::StripAsciiWhitespace(text);
  double value;
  if (absl::ConsumePrefix(&t, "ln")) {
    if (absl::ConsumePrefix(&t, "(") && !absl::ConsumeSuffix(&t, ")")) {
      return absl::InvalidArgumentError(
          absl::StrCat("unbalanced parenthesis in eps '", text, "'"));
    }
    if (!absl::SimpleAtod(t, &value) || !(value >= 1.0) ||
        !std::isfinite(value)) {
      return absl::InvalidArgumentError(
          absl::StrCat("eps '", text, "' needs ln of a finite number >= 1"));
    }
    return std::log(value);
  }
  if (!absl::SimpleAtod(t, &value) || !std::isfinite(value) || value < 0.0) {
    return absl::InvalidArgumentError(
        absl::StrCat("eps '", text, "' is not a finite non-negative number"));
  }
  return value;
}

absl::StatusOr<std::vector<double>> ParseEpsList(absl::string_view text) {
  std::vector<double> out;
  for (absl::string_view part : absl::StrSplit(text, ',')) {
    auto eps = ParseEps(part);
    if (!eps.ok()) return eps.status();
    out.push_back(*eps);
  }
  return out;
}

absl::StatusOr<LabelSet> ParseUniverse(absl::string_view text) {
  std::vector<absl::string_view> parts = absl::StrSplit(text, ':');
  std::vector<double> values;
  if (parts.size() == 3) {
    double v[3];
    for (int i = 0; i < 3; ++i) {
      if (!absl::SimpleAtod(absl::StripAsciiWhitespace(parts[i]), &v[i])) {
        return absl::InvalidArgumentError(
            absl::StrCat("universe '", text, "' is not lo:hi:step"));
      }
    }
    return LabelSet::Range(v[0], v[1], v[2]);
  }
  if (parts.size() != 1) {
    return absl::InvalidArgumentError(
        absl::StrCat("universe '", text, "' is not lo:hi:step or a list"));
  }
  for (absl::string_view part : absl::StrSplit(text, ',')) {
    double v;
    if (!absl::SimpleAtod(absl::StripAsciiWhitespace(part), &v)) {
      return absl::InvalidArgumentError(
          absl::StrCat("universe value '", part, "' is not a number"));
    }
    values.push_back(v);
  }
  return LabelSet::Create(values);
}

int CmdRandomize(const RunConfig& config, std::ostream& out,
                 std::ostream& err) {
  int code = kExitOk;
  auto labels = LoadLabels(config, code);
  if (!labels.ok()) return Fail(err, code, labels.status());
  const LabelSet& universe = *config.universe;
  const double eps = config.eps.front();
  auto loss = LossSpec::FromKind(config.loss);
  if (!loss.ok()) return Fail(err, kExitConfigError, loss.status());
  Rng rng(config.seed);

  std::vector<double> noisy;
  Json report;
  if (config.mechanism == MechanismKind::kRrOnBins) {
    auto budget = SplitBudget(config, eps, universe.size(), labels->size());
    if (!budget.ok()) return Fail(err, kExitConfigError, budget.status());
    auto result = LabelRandomizer(*labels, universe, budget->eps1,
                                  budget->eps2, *loss, rng, Execution::kSerial);
    if (!result.ok()) return Fail(err, kExitConfigError, result.status());
    const RandomizationReport& r = result->report;
    report = {
        {"mechanism", "rr-on-bins"},
        {"budget",
         {{"eps1", r.budget.eps1},
          {"eps2", r.budget.eps2},
          {"total", r.budget.total()}}},
        {"estimated_prior",
         {{"labels", std::vector<double>(r.estimated_prior.labels().values().begin(),
                                         r.estimated_prior.labels().values().end())},
          {"probs", std::vector<double>(r.estimated_prior.probs().begin(),
                                        r.estimated_prior.probs().end())}}},
        {"layout", LayoutJson(r.layout)},
        {"mechanism_loss_on_inputs", r.mechanism_loss_on_inputs},
        {"mechanism_loss_is_private", false},
        {"n", r.n},
        {"loss_kind", std::string(LossKindName(r.loss_kind))},
        {"seed", r.seed}};
    noisy = std::move(result->noisy_labels);
  } else {
    BaselineConfig baseline{
        .kind = config.mechanism, .eps = eps, .clip = config.clip};
    auto result =
        RandomizeWithBaseline(*labels, universe, baseline, rng,
                              Execution::kSerial);
    if (!result.ok()) return Fail(err, kExitConfigError, result.status());
    auto mean = MeanLoss(*result, *labels, *loss);
    if (!mean.ok()) return Fail(err, kExitConfigError, mean.status());
    report = {{"mechanism", std::string(MechanismKindName(config.mechanism))},
              {"budget", {{"eps1", 0.0}, {"eps2", eps}, {"total", eps}}},
              {"clip", baseline.clip && IsAdditive(config.mechanism)},
              {"mechanism_loss_on_inputs", *mean},
              {"mechanism_loss_is_private", false},
              {"n", labels->size()},
              {"loss_kind", std::string(LossKindName(config.loss))},
              {"seed", config.seed}};
    noisy = *std::move(result);
  }

  if (absl::Status s = WriteFile(config.output_path, FormatLabels(noisy));
      !s.ok()) {
    return Fail(err, kExitConfigError, s);
  }
  if (absl::Status s = WriteFile(config.output_path + ".report.json",
                                 report.dump(2) + "\n");
      !s.ok()) {
    return Fail(err, kExitConfigError, s);
  }
  out << absl::StrFormat("wrote %d noisy labels to %s\n", noisy.size(),
                         config.output_path);
  return kExitOk;
}

int CmdOptimizeBins(const RunConfig& config, std::ostream& out,
                    std::ostream& err) {
  std::optional<Prior> prior;
  if (!config.prior_path.empty()) {
    auto text = ReadFile(config.prior_path);
    if (!text.ok()) return Fail(err, kExitConfigError, text.status());
    auto parsed = ParsePrior(*text);
    if (!parsed.ok()) {
      return Fail(err, kExitParseError,
                  absl::InvalidArgumentError(absl::StrCat(
                      config.prior_path, ": ", parsed.status().message())));
    }
    prior = *std::move(parsed);
  } else {
    if (!config.public_prior || !config.universe.has_value()) {
      return Fail(err, kExitConfigError,
                  absl::InvalidArgumentError(
                      "optimize-bins needs --prior FILE, or --input FILE with "
                      "--public-prior and --universe"));
    }
    int code = kExitOk;
    auto labels = LoadLabels(config, code);
    if (!labels.ok()) return Fail(err, code, labels.status());
    std::vector<double> snapped;
    for (size_t i : SnapToUniverse(*labels, *config.universe)) {
      snapped.push_back((*config.universe)[i]);
    }
    auto empirical = Prior::FromLabels(*config.universe, snapped);
    if (!empirical.ok()) return Fail(err, kExitConfigError, empirical.status());
    prior = *std::move(empirical);
  }

  auto loss = LossSpec::FromKind(config.loss);
  if (!loss.ok()) return Fail(err, kExitConfigError, loss.status());
  auto layout = OptimizeBins(*prior, config.eps.front(), *loss,
                             {.execution = Execution::kSerial});
  if (!layout.ok()) return Fail(err, kExitConfigError, layout.status());

  if (config.json) {
    out << LayoutJson(*layout).dump(2) << "\n";
  } else {
    out << absl::StrFormat("%-6s %-12s %-12s %-12s\n", "bin", "first", "last",
                           "output");
    for (size_t b = 0; b < layout->num_bins(); ++b) {
      out << absl::StrFormat(
          "%-6d %-12.6g %-12.6g %-12.6g\n", b,
          layout->labels()[layout->bin_begin(b)],
          layout->labels()[layout->bin_ends()[b] - 1], layout->outputs()[b]);
    }
    out << absl::StrFormat("d = %d\nobjective = %.6g\n", layout->num_bins(),
                           layout->objective());
  }
  if (!config.output_path.empty()) {
    if (absl::Status s =
            WriteFile(config.output_path, LayoutJson(*layout).dump(2) + "\n");
        !s.ok()) {
      return Fail(err, kExitConfigError, s);
    }
  }
  return kExitOk;
}

int CmdBench(const RunConfig& config, std::ostream& out, std::ostream& err) {
  const LabelSet& universe = *config.universe;
  std::vector<double> labels;
  if (config.zipf_exponent.has_value()) {
    Rng data_rng(Rng::SplitSeed(config.seed, 0));
    labels = SyntheticZipfLabels(universe, *config.zipf_exponent,
                                 config.synthetic_n, data_rng);
  } else {
    int code = kExitOk;
    auto loaded = LoadLabels(config, code);
    if (!loaded.ok()) return Fail(err, code, loaded.status());
    labels = *std::move(loaded);
  }
  auto loss = LossSpec::FromKind(config.loss);
  if (!loss.ok()) return Fail(err, kExitConfigError, loss.status());
  if (config.reps == 0) {
    return Fail(err, kExitConfigError,
                absl::InvalidArgumentError("--reps must be positive"));
  }
  for (double eps : config.eps) {
    if (!(eps > 0.0)) {
      return Fail(err, kExitConfigError,
                  absl::InvalidArgumentError("bench needs every eps > 0"));
    }
  }

  const std::vector<MechanismKind>& mechanisms = config.bench_mechanisms;
  const size_t num_eps = config.eps.size();
  const size_t reps = config.reps;
  const auto cells = static_cast<int64_t>(mechanisms.size() * num_eps * reps);
  std::vector<double> losses(cells, 0.0);
  std::vector<absl::Status> status(cells);
#pragma omp parallel for schedule(dynamic)
  for (int64_t c = 0; c < cells; ++c) {
    const size_t m = c / (num_eps * reps);
    const size_t e = (c / reps) % num_eps;
    auto value = BenchCell(config, mechanisms[m], config.eps[e], labels, *loss,
                           Rng::SplitSeed(config.seed, c + 1));
    if (value.ok()) {
      losses[c] = *value;
    } else {
      status[c] = value.status();
    }
  }
  for (int64_t c = 0; c < cells; ++c) {
    if (!status[c].ok()) {
      return Fail(err, kExitConfigError,
                  absl::Status(status[c].code(),
                               absl::StrCat(MechanismKindName(
                                                mechanisms[c / (num_eps * reps)]),
                                            ": ", status[c].message())));
    }
  }

  std::string csv = "mechanism,eps,rep,loss\n";
  for (int64_t c = 0; c < cells; ++c) {
    absl::StrAppendFormat(&csv, "%s,%.17g,%d,%.17g\n",
                          MechanismKindName(mechanisms[c / (num_eps * reps)]),
                          config.eps[(c / reps) % num_eps], c % reps,
                          losses[c]);
  }
  std::ostream& summary = config.output_path.empty() ? err : out;
  if (config.output_path.empty()) {
    out << csv;
  } else if (absl::Status s = WriteFile(config.output_path, csv); !s.ok()) {
    return Fail(err, kExitConfigError, s);
  }

  summary << absl::StrFormat("%-20s %-10s %-14s %-14s\n", "mechanism", "eps",
                             "mean", "std");
  for (size_t m = 0; m < mechanisms.size(); ++m) {
    for (size_t e = 0; e < num_eps; ++e) {
      const size_t base = (m * num_eps + e) * reps;
      double mean = 0.0;
      for (size_t r = 0; r < reps; ++r) mean += losses[base + r];
      mean /= reps;
      double var = 0.0;
      for (size_t r = 0; r < reps; ++r) {
        var += (losses[base + r] - mean) * (losses[base + r] - mean);
      }
      const double sd = reps > 1 ? std::sqrt(var / (reps - 1)) : 0.0;
      summary << absl::StrFormat("%-20s %-10.6g %-14.6g %-14.6g\n",
                                 MechanismKindName(mechanisms[m]),
                                 config.eps[e], mean, sd);
    }
  }
  return kExitOk;
}

int CmdVerify(const RunConfig& config, std::ostream& out, std::ostream& err) {
  verify::SuiteOptions options{.quick = config.quick,
                               .eps_fault = config.eps_fault,
                               .seed = config.seed};
  const std::vector<verify::CheckResult> results =
      verify::RunVerificationSuite(options);
  size_t passed = 0;
  for (const verify::CheckResult& r : results) {
    out << (r.passed ? "PASS " : "FAIL ") << r.name << "  " << r.detail
        << "\n";
    if (r.passed) ++passed;
  }
  out << absl::StrFormat("%d/%d checks passed\n", passed, results.size());
  if (passed != results.size()) {
    err << "verification failed\n";
    return kExitVerifyFailed;
  }
  return kExitOk;
}

int RunCli(const std::vector<std::string>& args, std::ostream& out,
           std::ostream& err) {
  CLI::App app{"Loss-optimal label randomization under label differential "
               "privacy"};
  app.require_subcommand(1);

  std::string eps_text, eps1_text, loss_text = "squared",
                                   mechanism_text = "rr-on-bins",
                                   universe_text, column_text,
                                   mechanisms_text =
                                       "rr-on-bins,laplace,staircase,exponential";
  bool no_clip = false;
  bool inject_fault = false;
  double fault_size = 0.1;
  RunConfig config;
  auto add_seed = [&](CLI::App* cmd) {
    cmd->add_option("--seed", config.seed, "random seed")
        ->envname("RRBINS_SEED");
  };
  auto add_common = [&](CLI::App* cmd) {
    cmd->add_option("--loss", loss_text, "squared, absolute or poisson");
    cmd->add_option("--column", column_text,
                    "column name or zero-based index in a CSV input");
  };

  CLI::App* randomize = app.add_subcommand("randomize", "randomize labels");
  randomize->add_option("--input", config.input_path)->required();
  randomize->add_option("--output", config.output_path)->required();
  randomize->add_option("--eps", eps_text, "total budget; accepts ln7")
      ->required();
  randomize->add_option("--eps1", eps1_text, "prior-estimation budget");
  randomize->add_option("--mechanism", mechanism_text);
  randomize->add_option("--universe", universe_text, "lo:hi:step or a list")
      ->required();
  randomize->add_flag("--no-clip", no_clip, "keep out-of-range noisy labels");
  randomize->add_flag("--clip", "clip additive noise (default)");
  add_common(randomize);
  add_seed(randomize);

  CLI::App* optimize =
      app.add_subcommand("optimize-bins", "compute the optimal bins");
  optimize->add_option("--prior", config.prior_path,
                       "label,probability rows");
  optimize->add_option("--input", config.input_path, "raw labels");
  optimize->add_flag("--public-prior", config.public_prior,
                     "use the empirical prior of --input without noise");
  optimize->add_option("--universe", universe_text);
  optimize->add_option("--eps", eps_text)->required();
  optimize->add_option("--output", config.output_path, "JSON layout file");
  optimize->add_flag("--json", config.json, "print JSON instead of a table");
  add_common(optimize);

  CLI::App* bench = app.add_subcommand("bench", "sweep eps across mechanisms");
  bench->add_option("--input", config.input_path, "raw labels");
  bench->add_option("--zipf", config.zipf_exponent,
                    "draw synthetic Zipf labels with this exponent");
  bench->add_option("--n", config.synthetic_n, "synthetic sample size");
  bench->add_option("--eps", eps_text, "comma-separated list")->required();
  bench->add_option("--eps1", eps1_text);
  bench->add_option("--mechanisms", mechanisms_text);
  bench->add_option("--universe", universe_text)->required();
  bench->add_option("--reps", config.reps);
  bench->add_option("--output", config.output_path, "CSV file");
  bench->add_flag("--no-clip", no_clip);
  add_common(bench);
  add_seed(bench);

  CLI::App* verify_cmd = app.add_subcommand("verify", "run the oracle suite");
  verify_cmd->add_flag("--quick", config.quick, "small instances only");
  verify_cmd->add_flag("--inject-eps-fault", inject_fault,
                       "check DP ratios at a reduced eps; must fail");
  verify_cmd->add_option("--eps-fault-size", fault_size);
  add_seed(verify_cmd);

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    if (!reversed.empty()) reversed.pop_back();  // program name
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitConfigError;
  }

  auto config_error = [&](const absl::Status& s) {
    return Fail(err, kExitConfigError, s);
  };
  if (!eps_text.empty()) {
    auto eps = ParseEpsList(eps_text);
    if (!eps.ok()) return config_error(eps.status());
    config.eps = *std::move(eps);
    if (!bench->parsed() && config.eps.size() != 1) {
      return config_error(absl::InvalidArgumentError("--eps takes one value"));
    }
  }
  if (!eps1_text.empty()) {
    auto eps1 = ParseEps(eps1_text);
    if (!eps1.ok()) return config_error(eps1.status());
    config.eps1 = *eps1;
  }
  auto loss = ParseLossKind(loss_text);
  if (!loss.ok()) return config_error(loss.status());
  config.loss = *loss;
  auto mechanism = ParseMechanismKind(mechanism_text);
  if (!mechanism.ok()) return config_error(mechanism.status());
  config.mechanism = *mechanism;
  for (absl::string_view name : absl::StrSplit(mechanisms_text, ',')) {
    auto kind = ParseMechanismKind(name);
    if (!kind.ok()) return config_error(kind.status());
    config.bench_mechanisms.push_back(*kind);
  }
  if (!universe_text.empty()) {
    auto universe = ParseUniverse(universe_text);
    if (!universe.ok()) return config_error(universe.status());
    config.universe = *std::move(universe);
  }
  if (!column_text.empty()) {
    size_t index;
    if (absl::SimpleAtoi(column_text, &index)) {
      config.column.index = index;
    } else {
      config.column.name = column_text;
    }
  }
  config.clip = !no_clip;
  config.eps_fault = inject_fault ? fault_size : 0.0;

  if (randomize->parsed()) {
    if (!(config.eps.front() > 0.0)) {
      return config_error(absl::InvalidArgumentError("--eps must be > 0"));
    }
    return CmdRandomize(config, out, err);
  }
  if (optimize->parsed()) return CmdOptimizeBins(config, out, err);
  if (bench->parsed()) {
    if (config.input_path.empty() == !config.zipf_exponent.has_value()) {
      return config_error(absl::InvalidArgumentError(
          "bench needs exactly one of --input and --zipf"));
    }
    return CmdBench(config, out, err);
  }
  return CmdVerify(config, out, err);
}

}  // namespace rrbins::cli
