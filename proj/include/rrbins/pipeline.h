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

// End-to-end label randomization: estimate the prior privately, optimize the
// bins for it and randomize every label once. The noisy labels are a single
// one-way message that is (eps1 + eps2)-DP with respect to any one label.

#ifndef RRBINS_PIPELINE_H_
#define RRBINS_PIPELINE_H_

#include <cstddef>
#include <cstdint>
#include <vector>

#include "absl/status/statusor.h"
#include "absl/types/span.h"
#include "rrbins/binopt.h"
#include "rrbins/core.h"
#include "rrbins/losses.h"
#include "rrbins/mechanisms.h"
#include "rrbins/rng.h"

namespace rrbins {

// Labels are randomized in fixed-size chunks, each with its own derived
// generator, so the output does not depend on the thread count.
inline constexpr size_t kRandomizeChunkSize = 4096;

struct RandomizationReport {
  EpsilonBudget budget;
  Prior estimated_prior;
  BinLayout layout;
  // Mean loss(noisy_i, raw_i). This is a statistic of the raw labels and is
  // NOT covered by the privacy guarantee; it exists for evaluation only.
  double mechanism_loss_on_inputs = 0.0;
  size_t n = 0;
  LossKind loss_kind = LossKind::kSquared;
  uint64_t seed = 0;
};

struct RandomizationResult {
  std::vector<double> noisy_labels;
  RandomizationReport report;
};

// Maps each label to the largest universe element not above it (values
// below the universe map to its minimum).
std::vector<size_t> SnapToUniverse(absl::Span<const double> labels,
                                   const LabelSet& universe);

// Randomize `labels` with a budget of eps1 for the prior and eps2 for the
// per-label randomized response. Output order matches input order.
absl::StatusOr<RandomizationResult> LabelRandomizer(
    absl::Span<const double> labels, const LabelSet& universe, double eps1,
    double eps2, const LossSpec& loss, Rng& rng,
    Execution execution = Execution::kParallel);

// Randomized response on a fixed layout for already-snapped label indices.
std::vector<double> RandomizeWithLayout(absl::Span<const size_t> label_indices,
                                        const BinLayout& layout, double eps,
                                        uint64_t base_seed,
                                        Execution execution);

struct BaselineConfig {
  MechanismKind kind = MechanismKind::kLaplace;
  double eps = 1.0;
  // Clip additive-noise outputs back into [universe.min(), universe.max()].
  bool clip = true;
};

// One of the non-RR-on-bins mechanisms applied to every label. The label
// range, and hence the sensitivity, comes from the public universe.
absl::StatusOr<std::vector<double>> RandomizeWithBaseline(
    absl::Span<const double> labels, const LabelSet& universe,
    const BaselineConfig& config, Rng& rng,
    Execution execution = Execution::kParallel);

// Mean of loss(noisy_i, raw_i).
absl::StatusOr<double> MeanLoss(absl::Span<const double> noisy,
                                absl::Span<const double> raw,
                                const LossSpec& loss);

}  // namespace rrbins

#endif  // RRBINS_PIPELINE_H_
