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

#ifndef RRBINS_LOSSES_H_
#define RRBINS_LOSSES_H_

#include <cmath>
#include <functional>
#include <optional>
#include <string>

#include "absl/status/statusor.h"
#include "absl/strings/string_view.h"
#include "rrbins/core.h"

namespace rrbins {

enum class LossKind { kSquared, kAbsolute, kPoisson, kCustom };

absl::StatusOr<LossKind> ParseLossKind(absl::string_view name);
absl::string_view LossKindName(LossKind kind);

// Smallest prediction the Poisson inner solvers will propose.
inline constexpr double kPoissonFloor = 1e-12;

// A regression loss loss(yhat, y).
//
// Built-ins:
//   squared   (yhat - y)^2
//   absolute  |yhat - y|
//   poisson   yhat - y * log(yhat), defined for yhat > 0
//
// Squared loss is the plain squared error (no 1/2 factor) so that expected
// losses read directly as mean squared error.
class LossSpec {
 public:
  using Fn = std::function<double(double yhat, double y)>;

  static LossSpec Squared();
  static LossSpec Absolute();
  static LossSpec Poisson();
  static absl::StatusOr<LossSpec> FromKind(LossKind kind);
  // `domain_min`, when set, is an exclusive lower bound on yhat.
  static LossSpec Custom(std::string name, Fn fn, bool convex_in_first_arg,
                         std::optional<double> domain_min = std::nullopt);

  LossKind kind() const { return kind_; }
  absl::string_view name() const { return name_; }
  bool convex_in_first_arg() const { return convex_; }
  std::optional<double> domain_min() const { return domain_min_; }

  bool InDomain(double yhat) const {
    return !domain_min_.has_value() || yhat > *domain_min_;
  }

  // Checked evaluation: an out-of-domain yhat is an error, never NaN.
  absl::StatusOr<double> Eval(double yhat, double y) const;

  // Hot-path evaluation; the caller guarantees InDomain(yhat).
  double operator()(double yhat, double y) const {
    switch (kind_) {
      case LossKind::kSquared: {
        const double d = yhat - y;
        return d * d;
      }
      case LossKind::kAbsolute:
        return yhat > y ? yhat - y : y - yhat;
      case LossKind::kPoisson:
        return y == 0.0 ? yhat : yhat - y * std::log(yhat);
      case LossKind::kCustom:
        return fn_(yhat, y);
    }
    return 0.0;
  }

 private:
  LossSpec(LossKind kind, std::string name, Fn fn, bool convex,
           std::optional<double> domain_min)
      : kind_(kind),
        name_(std::move(name)),
        fn_(std::move(fn)),
        convex_(convex),
        domain_min_(domain_min) {}

  LossKind kind_;
  std::string name_;
  Fn fn_;
  bool convex_;
  std::optional<double> domain_min_;
};

struct AssumptionReport {
  bool satisfied = true;
  // Human-readable description of the first violating triple, if any.
  std::string violation;
};

// Grid check of the loss-shape assumption the optimality result relies on:
// on [y_min, y_max]^2, loss(., y) decreases then increases around y, and
// loss(yhat, .) decreases then increases around yhat. The second condition is
// checked on the excess loss loss(yhat, y) - loss(y, y), which differs from
// the raw loss by a function of y alone and so leaves every optimal mechanism
// unchanged. Continuity is checked as bounded variation between neighbouring
// grid points.
AssumptionReport CheckAssumption(const LossSpec& loss, const LabelSet& labels,
                                 int grid_size);

}  // namespace rrbins

#endif  // RRBINS_LOSSES_H_
