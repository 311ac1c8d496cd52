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

#include "rrbins/prior_estimation.h"

#include <cmath>
#include <utility>
#include <vector>

#include "absl/status/status.h"
#include "absl/strings/str_cat.h"
#include "absl/strings/str_format.h"
#include "rrbins/mechanisms.h"

namespace rrbins {

absl::StatusOr<HistogramEstimate> LaplaceHistogram(
    absl::Span<const double> labels, const LabelSet& universe, double eps1,
    Rng& rng) {
  if (!(eps1 > 0.0) || !std::isfinite(eps1)) {
    return absl::InvalidArgumentError(
        absl::StrCat("eps1 must be positive and finite, got ", eps1));
  }
  if (labels.empty()) {
    return absl::InvalidArgumentError("histogram needs at least one label");
  }
  std::vector<double> counts(universe.size(), 0.0);
  for (size_t i = 0; i < labels.size(); ++i) {
    auto idx = universe.IndexOf(labels[i]);
    if (!idx.has_value()) {
      return absl::InvalidArgumentError(absl::StrFormat(
          "label %g at position %d is not in the universe", labels[i], i));
    }
    counts[*idx] += 1.0;
  }

  const NoiseParams noise{.eps = eps1, .sensitivity = 2.0};
  double total = 0.0;
  for (double& h : counts) {
    h = std::max(LaplaceSample(h, noise, rng), 0.0);
    total += h;
  }

  HistogramEstimate estimate{.prior = Prior::Uniform(universe),
                             .noised_counts = counts,
                             .eps_used = eps1};
  if (!(total > 0.0)) {
    estimate.fell_back_to_uniform = true;
    return estimate;
  }
  for (double& h : counts) h /= total;
  auto prior = Prior::Create(universe, counts);
  if (!prior.ok()) return prior.status();
  estimate.prior = *std::move(prior);
  return estimate;
}

absl::StatusOr<EpsilonBudget> DefaultBudgetSplit(double eps, size_t k,
                                                 size_t n) {
  if (!(eps > 0.0)) {
    return absl::InvalidArgumentError(
        absl::StrCat("eps must be positive, got ", eps));
  }
  if (k == 0 || n == 0) {
    return absl::InvalidArgumentError(
        "budget split needs a non-empty universe and at least one label");
  }
  const double eps1 = std::sqrt(static_cast<double>(k) / n);
  if (eps1 >= eps) {
    return absl::FailedPreconditionError(absl::StrFormat(
        "sqrt(k/n) = %.6g is not below eps = %.6g (k = %d, n = %d); supply "
        "eps1 explicitly or more labels",
        eps1, eps, k, n));
  }
  // By Sterbenz's lemma at least one of the two subtractions is exact, so
  // the returned parts sum to eps with no rounding.
  const double eps2 = eps - eps1;
  return EpsilonBudget::Create(eps - eps2, eps2);
}

}  // namespace rrbins
