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

#include "rrbins/losses.h"

#include <algorithm>
#include <cmath>
#include <vector>

#include "absl/status/status.h"
#include "absl/strings/str_format.h"

namespace rrbins {

absl::StatusOr<LossKind> ParseLossKind(absl::string_view name) {
  if (name == "squared") return LossKind::kSquared;
  if (name == "absolute") return LossKind::kAbsolute;
  if (name == "poisson") return LossKind::kPoisson;
  return absl::InvalidArgumentError(
      absl::StrFormat("unknown loss '%s' (expected squared, absolute or poisson)",
                      name));
}

absl::string_view LossKindName(LossKind kind) {
  switch (kind) {
    case LossKind::kSquared:
      return "squared";
    case LossKind::kAbsolute:
      return "absolute";
    case LossKind::kPoisson:
      return "poisson";
    case LossKind::kCustom:
      return "custom";
  }
  return "unknown";
}

LossSpec LossSpec::Squared() {
  return LossSpec(LossKind::kSquared, "squared", nullptr, true, std::nullopt);
}

LossSpec LossSpec::Absolute() {
  return LossSpec(LossKind::kAbsolute, "absolute", nullptr, true, std::nullopt);
}

LossSpec LossSpec::Poisson() {
  return LossSpec(LossKind::kPoisson, "poisson", nullptr, true, 0.0);
}

absl::StatusOr<LossSpec> LossSpec::FromKind(LossKind kind) {
  switch (kind) {
    case LossKind::kSquared:
      return Squared();
    case LossKind::kAbsolute:
      return Absolute();
    case LossKind::kPoisson:
      return Poisson();
    case LossKind::kCustom:
      break;
  }
  return absl::InvalidArgumentError("custom losses need a function");
}

LossSpec LossSpec::Custom(std::string name, Fn fn, bool convex_in_first_arg,
                          std::optional<double> domain_min) {
  return LossSpec(LossKind::kCustom, std::move(name), std::move(fn),
                  convex_in_first_arg, domain_min);
}

absl::StatusOr<double> LossSpec::Eval(double yhat, double y) const {
  if (!std::isfinite(yhat) || !std::isfinite(y)) {
    return absl::InvalidArgumentError("loss arguments must be finite");
  }
  if (!InDomain(yhat)) {
    return absl::OutOfRangeError(absl::StrFormat(
        "%s loss is undefined at yhat = %g (requires yhat > %g)", name_, yhat,
        *domain_min_));
  }
  const double value = (*this)(yhat, y);
  if (std::isnan(value)) {
    return absl::InternalError(
        absl::StrFormat("%s loss returned NaN at (%g, %g)", name_, yhat, y));
  }
  return value;
}

namespace {

// Each adjacent pair must move in the allowed direction, up to rounding.
bool MonotoneStep(double from, double to, bool must_decrease) {
  const double slack = 1e-12 * (1.0 + std::max(std::abs(from), std::abs(to)));
  return must_decrease ? to <= from + slack : to >= from - slack;
}

double MaxJump(const std::vector<double>& f) {
  double jump = 0.0;
  for (size_t t = 0; t + 1 < f.size(); ++t) {
    jump = std::max(jump, std::abs(f[t + 1] - f[t]));
  }
  return jump;
}

std::vector<double> Grid(double lo, double hi, int n) {
  std::vector<double> g(n);
  for (int t = 0; t < n; ++t) {
    g[t] = n == 1 ? lo : lo + (hi - lo) * t / (n - 1);
  }
  return g;
}

}  // namespace

AssumptionReport CheckAssumption(const LossSpec& loss, const LabelSet& labels,
                                 int grid_size) {
  AssumptionReport report;
  grid_size = std::max(grid_size, 3);
  double lo = labels.min();
  const double hi = labels.max();
  // An open domain edge may carry a singularity; jumps are only compared
  // away from it.
  size_t skip = 0;
  if (loss.domain_min().has_value() && lo <= *loss.domain_min()) {
    lo = *loss.domain_min() + 1e-9 * std::max(1.0, hi - *loss.domain_min());
    skip = 1;
  }
  if (!(hi > lo)) return report;

  const std::vector<double> coarse = Grid(lo, hi, grid_size);
  const std::vector<double> fine = Grid(lo, hi, 2 * grid_size - 1);
  const std::vector<double> y_grid = Grid(labels.min(), hi, grid_size);

  auto fail = [&](std::string message) {
    report.satisfied = false;
    report.violation = std::move(message);
    return report;
  };

  // loss(., y): decreasing below y, increasing above, continuous.
  for (double y : y_grid) {
    std::vector<double> f(coarse.size());
    for (size_t t = 0; t < coarse.size(); ++t) f[t] = loss(coarse[t], y);
    for (size_t t = 0; t + 1 < coarse.size(); ++t) {
      const double a = coarse[t], b = coarse[t + 1];
      if (b <= y && !MonotoneStep(f[t], f[t + 1], true)) {
        return fail(absl::StrFormat(
            "loss(., %g) increases from yhat=%g to yhat=%g below y", y, a, b));
      }
      if (a >= y && !MonotoneStep(f[t], f[t + 1], false)) {
        return fail(absl::StrFormat(
            "loss(., %g) decreases from yhat=%g to yhat=%g above y", y, a, b));
      }
    }
    std::vector<double> g(fine.size());
    for (size_t t = 0; t < fine.size(); ++t) g[t] = loss(fine[t], y);
    f.erase(f.begin(), f.begin() + skip);
    g.erase(g.begin(), g.begin() + 2 * skip);
    const double coarse_jump = MaxJump(f);
    const double scale = 1.0 + *std::max_element(f.begin(), f.end());
    if (coarse_jump > 1e-9 * scale && MaxJump(g) > 0.9 * coarse_jump) {
      return fail(absl::StrFormat(
          "loss(., %g) does not shrink its jumps under refinement", y));
    }
  }

  // Excess loss in y for fixed yhat.
  auto base = [&](double y) {
    const double at = loss.InDomain(y) ? y : lo;
    return loss(at, y);
  };
  for (double yhat : coarse) {
    std::vector<double> g(y_grid.size());
    for (size_t t = 0; t < y_grid.size(); ++t) {
      g[t] = loss(yhat, y_grid[t]) - base(y_grid[t]);
    }
    for (size_t t = 0; t + 1 < y_grid.size(); ++t) {
      const double a = y_grid[t], b = y_grid[t + 1];
      if (b <= yhat && !MonotoneStep(g[t], g[t + 1], true)) {
        return fail(absl::StrFormat(
            "loss(%g, y) increases from y=%g to y=%g below yhat", yhat, a, b));
      }
      if (a >= yhat && !MonotoneStep(g[t], g[t + 1], false)) {
        return fail(absl::StrFormat(
            "loss(%g, y) decreases from y=%g to y=%g above yhat", yhat, a, b));
      }
    }
  }
  return report;
}

}  // namespace rrbins
