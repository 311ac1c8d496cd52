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

#include <algorithm>
#include <cmath>
#include <functional>
#include <string>
#include <vector>

#include "absl/strings/str_cat.h"
#include "absl/strings/str_format.h"
#include "rrbins/binopt.h"
#include "rrbins/mechanisms.h"
#include "rrbins/verify.h"

namespace rrbins::verify {
namespace {

constexpr double kEpsGrid[] = {0.0, 0.5, 1.0, 2.0, 5.0};

LossSpec LossAt(size_t i) {
  switch (i % 3) {
    case 0:
      return LossSpec::Squared();
    case 1:
      return LossSpec::Absolute();
    default:
      return LossSpec::Poisson();
  }
}

std::vector<double> IntegerCuts(int64_t lo, int64_t hi) {
  // Cells (-inf, lo - 1/2], (z - 1/2, z + 1/2] for z in [lo, hi], tail.
  std::vector<double> cuts;
  for (int64_t z = lo; z <= hi + 1; ++z) cuts.push_back(z - 0.5);
  return cuts;
}

std::vector<double> PmfCells(const std::function<double(int64_t)>& pmf,
                             int64_t lo, int64_t hi) {
  std::vector<double> cells{0.0};
  double inner = 0.0;
  for (int64_t z = lo; z <= hi; ++z) {
    cells.push_back(pmf(z));
    inner += cells.back();
  }
  // The pmfs used here are symmetric about zero and lo == -hi.
  const double tail = std::max(0.0, (1.0 - inner) / 2.0);
  cells.front() = tail;
  cells.push_back(tail);
  return cells;
}

std::vector<double> Grid(double lo, double hi, double step) {
  std::vector<double> cuts;
  for (double x = lo; x <= hi + 1e-9; x += step) cuts.push_back(x);
  return cuts;
}

CheckResult FromChiSquare(std::string name, const ChiSquareResult& chi) {
  return {std::move(name), chi.passed, chi.detail};
}

CheckResult OracleEquivalence(const SuiteOptions& options) {
  Rng rng(Rng::SplitSeed(options.seed, 1));
  const size_t max_k = options.quick ? 5 : 8;
  const int instances = options.quick ? 30 : 120;
  double worst = 0.0;
  for (int t = 0; t < instances; ++t) {
    const size_t k = 2 + rng.UniformInt(max_k - 1);
    const Prior prior = RandomPrior(k, rng);
    const double eps = kEpsGrid[rng.UniformInt(std::size(kEpsGrid))];
    const LossSpec loss = LossAt(t);
    auto fast = OptimizeBins(prior, eps, loss);
    auto slow = BruteForceOptimalBins(prior, eps, loss);
    if (!fast.ok() || !slow.ok()) {
      return {"oracle_equivalence", false,
              absl::StrCat("instance ", t, ": ",
                           (fast.ok() ? slow.status() : fast.status())
                               .ToString())};
    }
    const double gap = std::abs(fast->objective() - slow->objective());
    worst = std::max(worst, gap);
    if (gap > 1e-9) {
      return {"oracle_equivalence", false,
              absl::StrFormat("instance %d (k=%d eps=%g %s): %.17g vs %.17g",
                              t, k, eps, loss.name(), fast->objective(),
                              slow->objective())};
    }
  }
  return {"oracle_equivalence", true,
          absl::StrFormat("%d instances, max gap %.3g", instances, worst)};
}

CheckResult LpCrossCheck(const SuiteOptions& options) {
  Rng rng(Rng::SplitSeed(options.seed, 2));
  const int instances = options.quick ? 6 : 20;
  const size_t max_k = options.quick ? 4 : 5;
  double worst = 0.0;
  for (int t = 0; t < instances; ++t) {
    const size_t k = 2 + rng.UniformInt(max_k - 1);
    const Prior prior = RandomPrior(k, rng);
    const double eps = 0.25 + 2.75 * rng.Uniform();
    const LossSpec loss = LossAt(t);
    auto layout = OptimizeBins(prior, eps, loss);
    if (!layout.ok()) {
      return {"lp_cross_check", false, layout.status().ToString()};
    }
    // The optimizer's outputs plus perturbations, at most five points.
    std::vector<double> grid(layout->outputs().begin(),
                             layout->outputs().end());
    while (grid.size() < 5) {
      const double base = grid[rng.UniformInt(grid.size())];
      grid.push_back(std::max(0.01, base + (rng.Uniform() - 0.5)));
    }
    std::sort(grid.begin(), grid.end());
    grid.erase(std::unique(grid.begin(), grid.end()), grid.end());

    auto lp = LpOptimalMechanism(prior, grid, eps, loss);
    if (!lp.ok() || lp->status != LpStatus::kOptimal) {
      return {"lp_cross_check", false,
              lp.ok() ? absl::StrCat("simplex status ",
                                     LpStatusName(lp->status))
                      : lp.status().ToString()};
    }
    const double enumerated = BestGridRrOnBinsLoss(prior, grid, eps, loss);
    const double violation = MaxLpConstraintViolation(*lp->matrix, eps);
    const double gap = std::max(std::abs(lp->objective - enumerated),
                                std::abs(lp->objective - layout->objective()));
    worst = std::max(worst, gap);
    if (gap > 1e-6 || violation > 1e-7) {
      return {"lp_cross_check", false,
              absl::StrFormat("instance %d: lp %.12g, grid rr %.12g, "
                              "optimizer %.12g, violation %.3g",
                              t, lp->objective, enumerated,
                              layout->objective(), violation)};
    }
  }
  return {"lp_cross_check", true,
          absl::StrFormat("%d instances, max gap %.3g", instances, worst)};
}

CheckResult DpRatioCheck(const SuiteOptions& options) {
  Rng rng(Rng::SplitSeed(options.seed, 3));
  const int instances = options.quick ? 20 : 100;
  const size_t max_k = options.quick ? 5 : 12;
  for (int t = 0; t < instances; ++t) {
    const size_t k = 2 + rng.UniformInt(max_k - 1);
    const Prior prior = RandomPrior(k, rng);
    const double eps = 0.2 + 4.8 * rng.Uniform();
    auto layout = OptimizeBins(prior, eps, LossAt(t));
    if (!layout.ok()) return {"dp_ratio", false, layout.status().ToString()};
    const MechanismMatrix m = RrOnBinsMatrix(*layout, eps);
    if (!CheckEpsDp(m, eps - options.eps_fault)) {
      return {"dp_ratio", false,
              absl::StrFormat("instance %d: matrix at eps=%.6g fails the "
                              "ratio check at %.6g",
                              t, eps, eps - options.eps_fault)};
    }
    if (layout->num_bins() >= 2 && CheckEpsDp(m, eps - 0.1)) {
      return {"dp_ratio", false,
              absl::StrFormat("instance %d: matrix at eps=%.6g also passes "
                              "at eps - 0.1",
                              t, eps)};
    }
  }
  return {"dp_ratio", true, absl::StrCat(instances, " matrices")};
}

}  // namespace

std::vector<CheckResult> SamplerFidelityChecks(size_t trials, uint64_t seed) {
  std::vector<CheckResult> out;
  Rng rng(seed);

  {
    auto labels = LabelSet::Range(0, 4, 1);
    auto layout = BinLayout::Create(*labels, {1, 3, 5}, {0.0, 1.5, 4.0}, 1.0,
                                    0.0);
    const MechanismMatrix m = RrOnBinsMatrix(*layout, 1.0);
    auto row = m.row(2);
    out.push_back(FromChiSquare(
        "sampler/rr_on_bins",
        EmpiricalSamplerCheck(
            [&](Rng& r) {
              return SampleRrOnBinsIndex(layout->BinOf(2), 3, 1.0, r);
            },
            row, trials, rng)));
  }
  {
    const double stay = RandomizedResponseStayProbability(1.0, 5);
    std::vector<double> row(5, (1.0 - stay) / 4.0);
    row[2] = stay;
    out.push_back(FromChiSquare(
        "sampler/randomized_response",
        EmpiricalSamplerCheck(
            [](Rng& r) { return *RandomizedResponseSample(2, 5, 1.0, r); },
            row, trials, rng)));
  }
  {
    const NoiseParams p{.eps = 1.0, .sensitivity = 1.0};
    const std::vector<double> cuts = Grid(-6.0, 6.0, 0.5);
    out.push_back(FromChiSquare(
        "sampler/laplace",
        EmpiricalSamplerCheck(
            [&](Rng& r) { return CellOf(LaplaceSample(0.0, p, r), cuts); },
            CdfCellProbabilities([](double x) { return LaplaceCdf(x, 1.0); },
                                 cuts),
            trials, rng)));
  }
  {
    const NoiseParams p{.eps = 1.0, .sensitivity = 3.0};
    const std::vector<double> cuts = IntegerCuts(-30, 30);
    out.push_back(FromChiSquare(
        "sampler/discrete_laplace",
        EmpiricalSamplerCheck(
            [&](Rng& r) {
              return CellOf(static_cast<double>(
                                *DiscreteLaplaceSample(0.0, p, r)),
                            cuts);
            },
            PmfCells([](int64_t z) { return DiscreteLaplacePmf(z, 3.0); }, -30,
                     30),
            trials, rng)));
  }
  {
    const NoiseParams p{.eps = 1.0, .sensitivity = 2.0};
    const double gamma = DefaultStaircaseGamma(1.0);
    const std::vector<double> cuts = Grid(-12.0, 12.0, 0.25);
    out.push_back(FromChiSquare(
        "sampler/staircase",
        EmpiricalSamplerCheck(
            [&](Rng& r) { return CellOf(*StaircaseSample(0.0, p, r), cuts); },
            CdfCellProbabilities(
                [&](double x) { return StaircaseCdf(x, 1.0, 2.0, gamma); },
                cuts),
            trials, rng)));
  }
  {
    const NoiseParams p{.eps = 1.0, .sensitivity = 5.0};
    const int64_t r =
        std::clamp<int64_t>(std::llround(DefaultStaircaseGamma(1.0) * 5), 1, 5);
    const std::vector<double> cuts = IntegerCuts(-40, 40);
    out.push_back(FromChiSquare(
        "sampler/discrete_staircase",
        EmpiricalSamplerCheck(
            [&](Rng& g) {
              return CellOf(static_cast<double>(
                                *DiscreteStaircaseSample(0.0, p, g)),
                            cuts);
            },
            PmfCells(
                [&](int64_t z) { return DiscreteStaircasePmf(z, 1.0, 5, r); },
                -40, 40),
            trials, rng)));
  }
  {
    const std::vector<double> cuts = Grid(0.5, 9.5, 0.5);
    out.push_back(FromChiSquare(
        "sampler/exponential",
        EmpiricalSamplerCheck(
            [&](Rng& r) {
              return CellOf(*ExponentialMechanismSample(3.0, 0.0, 10.0, 1.0, r),
                            cuts);
            },
            CdfCellProbabilities(
                [](double x) {
                  return TruncatedLaplaceCdf(x, 3.0, 20.0, 0.0, 10.0);
                },
                cuts),
            trials, rng)));
  }
  return out;
}

std::vector<CheckResult> RunVerificationSuite(const SuiteOptions& options) {
  std::vector<CheckResult> results;
  results.push_back(OracleEquivalence(options));
  results.push_back(LpCrossCheck(options));
  results.push_back(DpRatioCheck(options));
  for (CheckResult& r : SamplerFidelityChecks(
           options.quick ? 20000 : 100000, Rng::SplitSeed(options.seed, 4))) {
    results.push_back(std::move(r));
  }
  return results;
}

}  // namespace rrbins::verify
