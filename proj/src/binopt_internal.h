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

#ifndef RRBINS_SRC_BINOPT_INTERNAL_H_
#define RRBINS_SRC_BINOPT_INTERNAL_H_

#include <cmath>
#include <cstddef>
#include <functional>

#include "absl/status/status.h"
#include "rrbins/binopt.h"
#include "rrbins/core.h"
#include "rrbins/losses.h"

namespace rrbins::internal {

// Weight of a label outside the bin relative to one inside.
inline double OutsideWeight(double eps) { return std::exp(-eps); }

absl::Status ValidateEps(double eps);
// Poisson needs non-negative labels; custom losses must be convex.
absl::Status ValidateLossForPrior(const Prior& prior, const LossSpec& loss);

// Search interval for the inner problem, clamped to the loss domain.
void InnerSearchRange(const Prior& prior, const LossSpec& loss, double* lo,
                      double* hi);

// Single-bin problem with inside weight 1 and outside weight `outside`,
// solved from scratch in O(k) (O(k log(1/tol)) for custom losses).
InnerSolution NormalizedInnerMin(const Prior& prior, size_t first, size_t last,
                                 double outside, const LossSpec& loss);

// Minimizer of a unimodal function on [lo, hi] to `tol`.
double GoldenSectionMin(const std::function<double(double)>& f, double lo,
                        double hi, double tol);

}  // namespace rrbins::internal

#endif  // RRBINS_SRC_BINOPT_INTERNAL_H_
