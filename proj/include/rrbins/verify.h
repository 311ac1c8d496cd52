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

// Independent oracles for the optimizer and the samplers: exhaustive
// partition search, the linear program over all eps-DP mechanisms on a fixed
// output grid, the eps-DP ratio test, and chi-square sampler checks.
//
// Nothing here calls into the optimizer's inner solvers or tables.

#ifndef RRBINS_VERIFY_H_
#define RRBINS_VERIFY_H_

#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "absl/status/statusor.h"
#include "absl/types/span.h"
#include "rrbins/binopt.h"
#include "rrbins/core.h"
#include "rrbins/losses.h"
#include "rrbins/rng.h"
#include "rrbins/simplex.h"

namespace rrbins::verify {

inline constexpr size_t kMaxBruteForceLabels = 16;
inline constexpr size_t kMaxLpCells = 400;

// Enumerates all 2^(k-1) interval partitions and solves each bin exactly.
// Ties go to fewer bins, then to the lexicographically smallest bin ends.
absl::StatusOr<BinLayout> BruteForceOptimalBins(const Prior& prior, double eps,
                                                const LossSpec& loss);

struct LpSolution {
  LpStatus status = LpStatus::kIterationLimit;
  // Set when status == kOptimal.
  std::optional<MechanismMatrix> matrix;
  double objective = 0.0;
};

// The optimal eps-DP mechanism from prior.labels() onto `outputs`:
// minimize Σ_y p_y Σ_o M[y -> o] loss(o, y) over row-stochastic M with
// M[y' -> o] <= e^eps M[y -> o] for every column. Each column's ratio
// constraints are expressed through an auxiliary column floor m_o with
// e^-eps M[y -> o] <= m_o <= M[y -> o], which has the same feasible set in M
// and needs 2k rows per column instead of k(k - 1).
absl::StatusOr<LpSolution> LpOptimalMechanism(const Prior& prior,
                                              absl::Span<const double> outputs,
                                              double eps, const LossSpec& loss);

// Largest violation of the mechanism-LP constraints (row sums, sign and
// every pairwise ratio) at `m`.
double MaxLpConstraintViolation(const MechanismMatrix& m, double eps);

// Best randomized response on bins whose outputs are a non-decreasing map
// from the labels onto a subset of `grid`, by enumeration.
double BestGridRrOnBinsLoss(const Prior& prior, absl::Span<const double> grid,
                            double eps, const LossSpec& loss);

// True iff every column satisfies max <= e^eps (1 + 1e-9) min. All-zero
// columns comply; a column mixing zero and non-zero entries does not.
bool CheckEpsDp(const MechanismMatrix& m, double eps);

struct ChiSquareResult {
  double statistic = 0.0;
  int degrees_of_freedom = 0;
  double p_value = 1.0;
  bool passed = true;
  std::string detail;
};

// Pearson goodness of fit. Cells with expected count below 5 are pooled.
// Any observation in a zero-probability cell fails outright.
ChiSquareResult ChiSquareGoodnessOfFit(absl::Span<const uint64_t> observed,
                                       absl::Span<const double> probabilities,
                                       double significance = 0.001);

// Draws `trials` category indices from `sampler` and tests them against
// `analytic_row`. Indices outside the row count as a failure.
ChiSquareResult EmpiricalSamplerCheck(
    const std::function<size_t(Rng&)>& sampler,
    absl::Span<const double> analytic_row, size_t trials, Rng& rng,
    double significance = 0.001);

// Reference distributions for the samplers.
double LaplaceCdf(double x, double scale);
double DiscreteLaplacePmf(int64_t z, double scale);
double StaircaseCdf(double x, double eps, double delta, double gamma);
double DiscreteStaircasePmf(int64_t i, double eps, int64_t delta, int64_t r);
// Laplace(center, scale) conditioned on [lo, hi].
double TruncatedLaplaceCdf(double x, double center, double scale, double lo,
                           double hi);

// Bin probabilities of a continuous CDF over the cut points, with the two
// unbounded tails as the first and last cells.
std::vector<double> CdfCellProbabilities(
    const std::function<double(double)>& cdf, absl::Span<const double> cuts);
size_t CellOf(double x, absl::Span<const double> cuts);

// Random prior over k distinct integer labels in [0, 4k] with Dirichlet(1)
// weights.
Prior RandomPrior(size_t k, Rng& rng);

struct CheckResult {
  std::string name;
  bool passed = false;
  std::string detail;
};

// Chi-square checks of every sampler against its analytic distribution,
// `trials` draws each.
std::vector<CheckResult> SamplerFidelityChecks(size_t trials, uint64_t seed);

struct SuiteOptions {
  // Only instances with at most five labels; finishes in a few seconds.
  bool quick = false;
  // Subtracted from eps in the DP ratio check; a positive value makes it
  // fail on purpose.
  double eps_fault = 0.0;
  uint64_t seed = 1;
};

std::vector<CheckResult> RunVerificationSuite(const SuiteOptions& options);

}  // namespace rrbins::verify

#endif  // RRBINS_VERIFY_H_
