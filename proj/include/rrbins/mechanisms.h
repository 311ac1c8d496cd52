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

// Label randomizers: randomized response on bins and the additive-noise
// baselines it is compared against.

#ifndef RRBINS_MECHANISMS_H_
#define RRBINS_MECHANISMS_H_

#include <cstddef>
#include <cstdint>
#include <optional>

#include "absl/status/statusor.h"
#include "absl/strings/string_view.h"
#include "rrbins/binopt.h"
#include "rrbins/core.h"
#include "rrbins/rng.h"

namespace rrbins {

enum class MechanismKind {
  kRrOnBins,
  kLaplace,
  kDiscreteLaplace,
  kStaircase,
  kDiscreteStaircase,
  kExponential,
  kRandomizedResponse,
};

absl::StatusOr<MechanismKind> ParseMechanismKind(absl::string_view name);
absl::string_view MechanismKindName(MechanismKind kind);
// Additive-noise mechanisms whose outputs can leave the label range.
bool IsAdditive(MechanismKind kind);

struct NoiseParams {
  double eps = 1.0;
  // Global sensitivity of a single label, normally y_max - y_min.
  double sensitivity = 1.0;
  // Continuous staircase shape; defaults to DefaultStaircaseGamma(eps).
  std::optional<double> staircase_gamma;
  // Discrete staircase step; defaults to round(gamma * sensitivity).
  std::optional<int64_t> staircase_r;

  absl::Status Validate() const;
};

// 1 / (1 + e^(eps/2)).
double DefaultStaircaseGamma(double eps);

// Probability that randomized response over `num_outputs` values keeps the
// true one: e^eps / (e^eps + num_outputs - 1).
double RandomizedResponseStayProbability(double eps, size_t num_outputs);

// Explicit RR-on-bins matrix over labels x layout outputs.
MechanismMatrix RrOnBinsMatrix(const BinLayout& layout, double eps);

// Bin index drawn for a label whose own bin is `bin`.
size_t SampleRrOnBinsIndex(size_t bin, size_t num_bins, double eps, Rng& rng);

absl::StatusOr<double> RrOnBinsSample(const BinLayout& layout, double eps,
                                      double y, Rng& rng);

// y + Lap(sensitivity / eps).
double LaplaceSample(double y, const NoiseParams& params, Rng& rng);

// Two-sided geometric noise: pmf ∝ exp(-|z| / b) with b = sensitivity / eps,
// sampled as the difference of two geometric variables. `y` must be integral.
absl::StatusOr<int64_t> DiscreteLaplaceSample(double y,
                                              const NoiseParams& params,
                                              Rng& rng);

// y + noise with the piecewise-constant staircase density: constant a on
// [0, gamma D), a e^-eps on [gamma D, D), repeating with decay e^-eps per
// period D and mirrored for negative noise.
absl::StatusOr<double> StaircaseSample(double y, const NoiseParams& params,
                                       Rng& rng);

// Integer staircase noise with period D = sensitivity (an integer >= 2) and
// step r in [1, D]. The decay base is e^-eps.
absl::StatusOr<int64_t> DiscreteStaircaseSample(double y,
                                                const NoiseParams& params,
                                                Rng& rng);

// Exponential mechanism with score -|r - y| on [lo, hi], implemented by
// redrawing y + Lap(2 (hi - lo) / eps) until it lands in range.
absl::StatusOr<double> ExponentialMechanismSample(double y, double lo,
                                                  double hi, double eps,
                                                  Rng& rng);

// Randomized response over categories {0, ..., q - 1}.
absl::StatusOr<size_t> RandomizedResponseSample(size_t y, size_t q, double eps,
                                                Rng& rng);

absl::StatusOr<double> Clip(double value, double lo, double hi);

}  // namespace rrbins

#endif  // RRBINS_MECHANISMS_H_
