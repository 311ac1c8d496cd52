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

// Domain types shared by every part of the library: the finite label set,
// priors over it, explicit mechanism matrices and privacy budgets.

#ifndef RRBINS_CORE_H_
#define RRBINS_CORE_H_

#include <cstddef>
#include <optional>
#include <vector>

#include "absl/status/statusor.h"
#include "absl/types/span.h"

namespace rrbins {

class LossSpec;

// Tolerance on Σp = 1 for priors built by this library.
inline constexpr double kPriorTolerance = 1e-12;
// Tolerance on row sums of externally supplied mechanism matrices.
inline constexpr double kMatrixTolerance = 1e-9;

// The finite, strictly increasing set of label values y^1 < ... < y^k.
class LabelSet {
 public:
  // Sorts and deduplicates `values`. Fails on empty input or a non-finite
  // entry (the message names the offending index).
  static absl::StatusOr<LabelSet> Create(absl::Span<const double> values);

  // {lo, lo + step, ...} up to and including hi (within step * 1e-9).
  static absl::StatusOr<LabelSet> Range(double lo, double hi, double step);

  size_t size() const { return values_.size(); }
  double operator[](size_t i) const { return values_[i]; }
  absl::Span<const double> values() const { return values_; }
  double min() const { return values_.front(); }
  double max() const { return values_.back(); }

  // Index of an exact member, or nullopt.
  std::optional<size_t> IndexOf(double y) const;
  // Index of the largest member <= y; values below min() map to 0.
  size_t FloorIndex(double y) const;

  friend bool operator==(const LabelSet&, const LabelSet&) = default;

 private:
  explicit LabelSet(std::vector<double> values) : values_(std::move(values)) {}
  std::vector<double> values_;
};

// A probability distribution over a LabelSet.
class Prior {
 public:
  // Normalizes non-negative weights (one per label) to sum to one.
  static absl::StatusOr<Prior> Create(LabelSet labels,
                                      absl::Span<const double> weights);
  static Prior Uniform(LabelSet labels);
  // Empirical distribution of raw labels; every label must be a member of
  // `universe`. Duplicates are merged by counting.
  static absl::StatusOr<Prior> FromLabels(LabelSet universe,
                                          absl::Span<const double> labels);

  const LabelSet& labels() const { return labels_; }
  absl::Span<const double> probs() const { return probs_; }
  double prob(size_t i) const { return probs_[i]; }
  size_t size() const { return probs_.size(); }

  double Mean() const;

 private:
  Prior(LabelSet labels, std::vector<double> probs)
      : labels_(std::move(labels)), probs_(std::move(probs)) {}
  LabelSet labels_;
  std::vector<double> probs_;
};

// Row-stochastic matrix M[y -> o] over inputs Y and a finite output list O.
class MechanismMatrix {
 public:
  // `entries` is row-major, inputs.size() x outputs.size(). Rows must be
  // non-negative and sum to one within kMatrixTolerance.
  static absl::StatusOr<MechanismMatrix> Create(LabelSet inputs,
                                                std::vector<double> outputs,
                                                std::vector<double> entries);
  static MechanismMatrix Identity(const LabelSet& labels);

  const LabelSet& inputs() const { return inputs_; }
  absl::Span<const double> outputs() const { return outputs_; }
  size_t num_inputs() const { return inputs_.size(); }
  size_t num_outputs() const { return outputs_.size(); }
  double at(size_t row, size_t col) const {
    return entries_[row * outputs_.size() + col];
  }
  absl::Span<const double> row(size_t r) const {
    return absl::MakeConstSpan(entries_).subspan(r * outputs_.size(),
                                                 outputs_.size());
  }

 private:
  MechanismMatrix(LabelSet inputs, std::vector<double> outputs,
                  std::vector<double> entries)
      : inputs_(std::move(inputs)),
        outputs_(std::move(outputs)),
        entries_(std::move(entries)) {}
  LabelSet inputs_;
  std::vector<double> outputs_;
  std::vector<double> entries_;
};

// Split of a total privacy budget between prior estimation (eps1) and label
// randomization (eps2). Basic composition: the pipeline is (eps1 + eps2)-DP.
struct EpsilonBudget {
  double eps1 = 0.0;
  double eps2 = 0.0;

  static absl::StatusOr<EpsilonBudget> Create(double eps1, double eps2);
  double total() const { return eps1 + eps2; }
};

// L(M; P) = Σ_y p_y Σ_o M[y -> o] loss(o, y).
absl::StatusOr<double> ExpectedLoss(const MechanismMatrix& m, const Prior& p,
                                    const LossSpec& loss);

}  // namespace rrbins

#endif  // RRBINS_CORE_H_
