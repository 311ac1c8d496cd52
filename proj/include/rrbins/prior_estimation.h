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

// Private estimation of the label prior and the budget split between prior
// estimation and label randomization.

#ifndef RRBINS_PRIOR_ESTIMATION_H_
#define RRBINS_PRIOR_ESTIMATION_H_

#include <cstddef>
#include <vector>

#include "absl/status/statusor.h"
#include "absl/types/span.h"
#include "rrbins/core.h"
#include "rrbins/rng.h"

namespace rrbins {

struct HistogramEstimate {
  Prior prior;
  // max(h_y + Lap(2 / eps1), 0) per universe element. The exact counts are
  // never part of the estimate.
  std::vector<double> noised_counts;
  double eps_used = 0.0;
  // True when every noised count clamped to zero and the prior fell back to
  // uniform.
  bool fell_back_to_uniform = false;
};

// Laplace noise scale for one histogram cell: a single label change moves
// two counts by one each, so the L1 sensitivity is 2.
inline double HistogramNoiseScale(double eps1) { return 2.0 / eps1; }

// Noisy histogram over `universe`, clamped at zero and normalized. Every
// label must be an exact member of `universe`, which is public metadata
// supplied by the caller.
absl::StatusOr<HistogramEstimate> LaplaceHistogram(
    absl::Span<const double> labels, const LabelSet& universe, double eps1,
    Rng& rng);

// eps1 = sqrt(k / n), eps2 = eps - eps1. Fails when sqrt(k / n) >= eps.
absl::StatusOr<EpsilonBudget> DefaultBudgetSplit(double eps, size_t k,
                                                 size_t n);

}  // namespace rrbins

#endif  // RRBINS_PRIOR_ESTIMATION_H_
