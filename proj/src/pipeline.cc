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

#include "rrbins/pipeline.h"

#include <algorithm>
#include <cmath>
#include <optional>
#include <utility>
#include <vector>

#include "absl/status/status.h"
#include "absl/strings/str_cat.h"
#include "rrbins/internal/status_macros.h"
#include "rrbins/prior_estimation.h"

namespace rrbins {
namespace {

size_t NumChunks(size_t n) {
  return (n + kRandomizeChunkSize - 1) / kRandomizeChunkSize;
}

absl::Status CheckFinite(absl::Span<const double> labels) {
  for (size_t i = 0; i < labels.size(); ++i) {
    if (!std::isfinite(labels[i])) {
      return absl::InvalidArgumentError(
          absl::StrCat("label at position ", i, " is not finite"));
    }
  }
  return absl::OkStatus();
}

absl::StatusOr<double> BaselineDraw(MechanismKind kind, size_t index,
                                    const LabelSet& universe,
                                    const NoiseParams& params, Rng& rng) {
  const double y = universe[index];
  switch (kind) {
    case MechanismKind::kLaplace:
      return LaplaceSample(y, params, rng);
    case MechanismKind::kDiscreteLaplace: {
      ASSIGN_OR_RETURN(int64_t z, DiscreteLaplaceSample(y, params, rng));
      return static_cast<double>(z);
    }
    case MechanismKind::kStaircase:
      return StaircaseSample(y, params, rng);
    case MechanismKind::kDiscreteStaircase: {
      ASSIGN_OR_RETURN(int64_t z, DiscreteStaircaseSample(y, params, rng));
      return static_cast<double>(z);
    }
    case MechanismKind::kExponential:
      return ExponentialMechanismSample(y, universe.min(), universe.max(),
                                        params.eps, rng);
    case MechanismKind::kRandomizedResponse: {
      ASSIGN_OR_RETURN(size_t out, RandomizedResponseSample(
                                       index, universe.size(), params.eps,
                                       rng));
      return universe[out];
    }
    case MechanismKind::kRrOnBins:
      break;
  }
  return absl::InvalidArgumentError(
      "rr-on-bins is not a baseline; use LabelRandomizer");
}

}  // namespace

std::vector<size_t> SnapToUniverse(absl::Span<const double> labels,
                                   const LabelSet& universe) {
  std::vector<size_t> out(labels.size());
  for (size_t i = 0; i < labels.size(); ++i) {
    out[i] = universe.FloorIndex(labels[i]);
  }
  return out;
}

std::vector<double> RandomizeWithLayout(absl::Span<const size_t> label_indices,
                                        const BinLayout& layout, double eps,
                                        uint64_t base_seed,
                                        Execution execution) {
  const size_t n = label_indices.size();
  const size_t d = layout.num_bins();
  const auto chunks = static_cast<int64_t>(NumChunks(n));
  std::vector<double> out(n);
  auto run_chunk = [&](int64_t c) {
    Rng rng(Rng::SplitSeed(base_seed, static_cast<uint64_t>(c)));
    const size_t begin = static_cast<size_t>(c) * kRandomizeChunkSize;
    const size_t end = std::min(n, begin + kRandomizeChunkSize);
    for (size_t i = begin; i < end; ++i) {
      const size_t bin = layout.BinOf(label_indices[i]);
      out[i] = layout.outputs()[SampleRrOnBinsIndex(bin, d, eps, rng)];
    }
  };
  if (execution == Execution::kParallel) {
#pragma omp parallel for schedule(static)
    for (int64_t c = 0; c < chunks; ++c) run_chunk(c);
  } else {
    for (int64_t c = 0; c < chunks; ++c) run_chunk(c);
  }
  return out;
}

absl::StatusOr<RandomizationResult> LabelRandomizer(
    absl::Span<const double> labels, const LabelSet& universe, double eps1,
    double eps2, const LossSpec& loss, Rng& rng, Execution execution) {
  ASSIGN_OR_RETURN(EpsilonBudget budget, EpsilonBudget::Create(eps1, eps2));
  if (!(eps1 > 0.0)) {
    return absl::InvalidArgumentError(
        "label randomizer needs eps1 > 0 for the prior estimate");
  }
  if (labels.empty()) {
    return absl::InvalidArgumentError("label randomizer needs labels");
  }
  RETURN_IF_ERROR(CheckFinite(labels));

  const std::vector<size_t> indices = SnapToUniverse(labels, universe);
  std::vector<double> snapped(indices.size());
  for (size_t i = 0; i < indices.size(); ++i) snapped[i] = universe[indices[i]];

  auto histogram = LaplaceHistogram(snapped, universe, eps1, rng);
  if (!histogram.ok()) {
    return absl::Status(histogram.status().code(),
                        absl::StrCat("prior estimation: ",
                                     histogram.status().message()));
  }
  snapped.clear();
  snapped.shrink_to_fit();

  auto layout = OptimizeBins(histogram->prior, eps2, loss,
                             BinOptOptions{.execution = execution});
  if (!layout.ok()) {
    return absl::Status(layout.status().code(),
                        absl::StrCat("bin optimization: ",
                                     layout.status().message()));
  }

  const uint64_t base_seed = rng.NextU64();
  std::vector<double> noisy =
      RandomizeWithLayout(indices, *layout, eps2, base_seed, execution);
  ASSIGN_OR_RETURN(double mechanism_loss, MeanLoss(noisy, labels, loss));

  return RandomizationResult{
      .noisy_labels = std::move(noisy),
      .report = RandomizationReport{
          .budget = budget,
          .estimated_prior = std::move(histogram->prior),
          .layout = *std::move(layout),
          .mechanism_loss_on_inputs = mechanism_loss,
          .n = labels.size(),
          .loss_kind = loss.kind(),
          .seed = rng.seed(),
      }};
}

absl::StatusOr<std::vector<double>> RandomizeWithBaseline(
    absl::Span<const double> labels, const LabelSet& universe,
    const BaselineConfig& config, Rng& rng, Execution execution) {
  if (config.kind == MechanismKind::kRrOnBins) {
    return absl::InvalidArgumentError(
        "rr-on-bins is not a baseline; use LabelRandomizer");
  }
  if (!(config.eps > 0.0)) {
    return absl::InvalidArgumentError(
        absl::StrCat("baseline eps must be positive, got ", config.eps));
  }
  RETURN_IF_ERROR(CheckFinite(labels));
  const std::vector<size_t> indices = SnapToUniverse(labels, universe);
  const size_t n = indices.size();
  if (universe.size() == 1) return std::vector<double>(n, universe.min());

  const NoiseParams params{.eps = config.eps,
                           .sensitivity = universe.max() - universe.min()};
  RETURN_IF_ERROR(params.Validate());
  const bool clip = config.clip && IsAdditive(config.kind);

  const uint64_t base_seed = rng.NextU64();
  const auto chunks = static_cast<int64_t>(NumChunks(n));
  std::vector<double> out(n);
  std::vector<absl::Status> chunk_status(chunks);
  auto run_chunk = [&](int64_t c) {
    Rng chunk_rng(Rng::SplitSeed(base_seed, static_cast<uint64_t>(c)));
    const size_t begin = static_cast<size_t>(c) * kRandomizeChunkSize;
    const size_t end = std::min(n, begin + kRandomizeChunkSize);
    for (size_t i = begin; i < end; ++i) {
      auto draw =
          BaselineDraw(config.kind, indices[i], universe, params, chunk_rng);
      if (!draw.ok()) {
        chunk_status[c] = draw.status();
        return;
      }
      out[i] = clip ? std::clamp(*draw, universe.min(), universe.max())
                    : *draw;
    }
  };
  if (execution == Execution::kParallel) {
#pragma omp parallel for schedule(static)
    for (int64_t c = 0; c < chunks; ++c) run_chunk(c);
  } else {
    for (int64_t c = 0; c < chunks; ++c) run_chunk(c);
  }
  for (const absl::Status& s : chunk_status) RETURN_IF_ERROR(s);
  return out;
}

absl::StatusOr<double> MeanLoss(absl::Span<const double> noisy,
                                absl::Span<const double> raw,
                                const LossSpec& loss) {
  if (noisy.size() != raw.size()) {
    return absl::InvalidArgumentError(absl::StrCat(
        "have ", noisy.size(), " predictions for ", raw.size(), " labels"));
  }
  if (raw.empty()) return absl::InvalidArgumentError("no labels");
  double total = 0.0;
  for (size_t i = 0; i < raw.size(); ++i) {
    ASSIGN_OR_RETURN(double value, loss.Eval(noisy[i], raw[i]));
    total += value;
  }
  return total / static_cast<double>(raw.size());
}

}  // namespace rrbins
