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

#include "rrbins/core.h"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "absl/status/status.h"
#include "absl/strings/str_cat.h"
#include "rrbins/losses.h"

namespace rrbins {

absl::StatusOr<LabelSet> LabelSet::Create(absl::Span<const double> values) {
  if (values.empty()) {
    return absl::InvalidArgumentError("label set must not be empty");
  }
  for (size_t i = 0; i < values.size(); ++i) {
    if (!std::isfinite(values[i])) {
      return absl::InvalidArgumentError(
          absl::StrCat("label at index ", i, " is not finite"));
    }
  }
  std::vector<double> sorted(values.begin(), values.end());
  std::sort(sorted.begin(), sorted.end());
  sorted.erase(std::unique(sorted.begin(), sorted.end()), sorted.end());
  return LabelSet(std::move(sorted));
}

absl::StatusOr<LabelSet> LabelSet::Range(double lo, double hi, double step) {
  if (!std::isfinite(lo) || !std::isfinite(hi) || !std::isfinite(step)) {
    return absl::InvalidArgumentError("universe bounds must be finite");
  }
  if (step <= 0.0) {
    return absl::InvalidArgumentError("universe step must be positive");
  }
  if (lo > hi) {
    return absl::InvalidArgumentError("universe min exceeds max");
  }
  const double span = (hi - lo) / step;
  if (span > 1e7) {
    return absl::InvalidArgumentError("universe has too many elements");
  }
  const auto count = static_cast<size_t>(std::floor(span + 1e-9)) + 1;
  std::vector<double> values(count);
  for (size_t i = 0; i < count; ++i) values[i] = lo + step * i;
  return Create(values);
}

std::optional<size_t> LabelSet::IndexOf(double y) const {
  auto it = std::lower_bound(values_.begin(), values_.end(), y);
  if (it == values_.end() || *it != y) return std::nullopt;
  return static_cast<size_t>(it - values_.begin());
}

size_t LabelSet::FloorIndex(double y) const {
  auto it = std::upper_bound(values_.begin(), values_.end(), y);
  if (it == values_.begin()) return 0;
  return static_cast<size_t>(it - values_.begin()) - 1;
}

absl::StatusOr<Prior> Prior::Create(LabelSet labels,
                                    absl::Span<const double> weights) {
  if (weights.size() != labels.size()) {
    return absl::InvalidArgumentError(
        absl::StrCat("prior has ", weights.size(), " weights for ",
                     labels.size(), " labels"));
  }
  double total = 0.0;
  for (size_t i = 0; i < weights.size(); ++i) {
    if (!(weights[i] >= 0.0) || !std::isfinite(weights[i])) {
      return absl::InvalidArgumentError(
          absl::StrCat("prior weight at index ", i, " is negative or not finite"));
    }
    total += weights[i];
  }
  if (total <= 0.0) {
    return absl::InvalidArgumentError("prior weights are all zero");
  }
  std::vector<double> probs(weights.begin(), weights.end());
  for (double& p : probs) p /= total;
  return Prior(std::move(labels), std::move(probs));
}

Prior Prior::Uniform(LabelSet labels) {
  std::vector<double> probs(labels.size(), 1.0 / labels.size());
  return Prior(std::move(labels), std::move(probs));
}

absl::StatusOr<Prior> Prior::FromLabels(LabelSet universe,
                                        absl::Span<const double> labels) {
  std::vector<double> counts(universe.size(), 0.0);
  for (size_t i = 0; i < labels.size(); ++i) {
    auto idx = universe.IndexOf(labels[i]);
    if (!idx.has_value()) {
      return absl::InvalidArgumentError(absl::StrCat(
          "label ", labels[i], " at index ", i, " is not in the universe"));
    }
    counts[*idx] += 1.0;
  }
  return Create(std::move(universe), counts);
}

double Prior::Mean() const {
  double mean = 0.0;
  for (size_t i = 0; i < probs_.size(); ++i) mean += probs_[i] * labels_[i];
  return mean;
}

absl::StatusOr<MechanismMatrix> MechanismMatrix::Create(
    LabelSet inputs, std::vector<double> outputs, std::vector<double> entries) {
  if (outputs.empty()) {
    return absl::InvalidArgumentError("mechanism needs at least one output");
  }
  if (entries.size() != inputs.size() * outputs.size()) {
    return absl::InvalidArgumentError(
        absl::StrCat("mechanism matrix has ", entries.size(),
                     " entries, expected ", inputs.size() * outputs.size()));
  }
  for (size_t r = 0; r < inputs.size(); ++r) {
    double sum = 0.0;
    for (size_t c = 0; c < outputs.size(); ++c) {
      const double v = entries[r * outputs.size() + c];
      if (!(v >= 0.0) || !std::isfinite(v)) {
        return absl::InvalidArgumentError(absl::StrCat(
            "mechanism entry (", r, ", ", c, ") is negative or not finite"));
      }
      sum += v;
    }
    if (std::abs(sum - 1.0) > kMatrixTolerance) {
      return absl::InvalidArgumentError(
          absl::StrCat("mechanism row ", r, " sums to ", sum));
    }
  }
  return MechanismMatrix(std::move(inputs), std::move(outputs),
                         std::move(entries));
}

MechanismMatrix MechanismMatrix::Identity(const LabelSet& labels) {
  const size_t k = labels.size();
  std::vector<double> entries(k * k, 0.0);
  for (size_t i = 0; i < k; ++i) entries[i * k + i] = 1.0;
  return MechanismMatrix(labels, {labels.values().begin(), labels.values().end()},
                         std::move(entries));
}

absl::StatusOr<EpsilonBudget> EpsilonBudget::Create(double eps1, double eps2) {
  if (!(eps1 >= 0.0) || !(eps2 >= 0.0)) {
    return absl::InvalidArgumentError("privacy budgets must be non-negative");
  }
  return EpsilonBudget{eps1, eps2};
}

absl::StatusOr<double> ExpectedLoss(const MechanismMatrix& m, const Prior& p,
                                    const LossSpec& loss) {
  if (!(m.inputs() == p.labels())) {
    return absl::InvalidArgumentError(
        "mechanism inputs differ from the prior's label set");
  }
  for (double o : m.outputs()) {
    if (!loss.InDomain(o)) {
      return absl::InvalidArgumentError(
          absl::StrCat("output ", o, " is outside the domain of the ",
                       loss.name(), " loss"));
    }
  }
  double total = 0.0;
  for (size_t r = 0; r < m.num_inputs(); ++r) {
    if (p.prob(r) == 0.0) continue;
    double row_loss = 0.0;
    for (size_t c = 0; c < m.num_outputs(); ++c) {
      row_loss += m.at(r, c) * loss(m.outputs()[c], m.inputs()[r]);
    }
    total += p.prob(r) * row_loss;
  }
  return total;
}

}  // namespace rrbins
