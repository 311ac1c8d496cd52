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

// Optimal bin layouts for randomized response on bins.
//
// A layout partitions the sorted labels y^1 < ... < y^k into consecutive
// bins S_1 < ... < S_d and assigns each bin an output value. Randomized
// response over the d outputs then keeps the label's own bin output with
// probability e^eps / (e^eps + d - 1). Its expected loss is
//
//   (1 / (d - 1 + e^eps)) * Σ_j min_yhat Σ_y p_y e^{eps 1[y in S_j]} loss(yhat, y)
//
// and the optimizer below minimizes it over all interval partitions.
//
// Internally every tilted sum is divided by e^eps: labels inside the bin get
// weight p_y and labels outside get p_y e^-eps. That keeps all quantities
// finite for arbitrarily large eps and turns the objective into
// A / (1 + (d - 1) e^-eps).

#ifndef RRBINS_BINOPT_H_
#define RRBINS_BINOPT_H_

#include <cstddef>
#include <cstdint>
#include <vector>

#include "absl/status/statusor.h"
#include "absl/types/span.h"
#include "rrbins/core.h"
#include "rrbins/losses.h"

namespace rrbins {

enum class Execution { kSerial, kParallel };

struct InnerSolution {
  double yhat = 0.0;
  double value = 0.0;
};

// Single-bin subproblems for the bin of zero-based label indices
// [first, last]. `value` is the e^eps-tilted sum, i.e. labels inside the bin
// carry weight p_y e^eps and labels outside carry p_y.
absl::StatusOr<InnerSolution> InnerMinSquared(const Prior& prior, size_t first,
                                              size_t last, double eps);
absl::StatusOr<InnerSolution> InnerMinPoisson(const Prior& prior, size_t first,
                                              size_t last, double eps);
absl::StatusOr<InnerSolution> InnerMinAbsolute(const Prior& prior, size_t first,
                                               size_t last, double eps);
// Golden-section search on [y_min, y_max] to 1e-10 in yhat. Refuses losses
// not flagged convex in their first argument.
absl::StatusOr<InnerSolution> InnerMinGeneric(const Prior& prior, size_t first,
                                              size_t last, double eps,
                                              const LossSpec& loss);
// Dispatches on loss.kind().
absl::StatusOr<InnerSolution> InnerMin(const Prior& prior, size_t first,
                                       size_t last, double eps,
                                       const LossSpec& loss);

// The minimum value a* with Σ_{a_j <= a*} w_j >= (Σ w_j) / 2. `values` must
// be sorted ascending and the same length as `weights`.
double WeightedMedian(absl::Span<const double> weights,
                      absl::Span<const double> values);

class BinLayout {
 public:
  // `bin_ends[b]` is the exclusive end index of bin b; the last entry must be
  // labels.size(). Outputs must be non-decreasing and lie in
  // [labels.min(), labels.max()] (Poisson outputs may sit at kPoissonFloor).
  static absl::StatusOr<BinLayout> Create(LabelSet labels,
                                          std::vector<size_t> bin_ends,
                                          std::vector<double> outputs,
                                          double eps, double objective);

  const LabelSet& labels() const { return labels_; }
  absl::Span<const size_t> bin_ends() const { return bin_ends_; }
  absl::Span<const double> outputs() const { return outputs_; }
  size_t num_bins() const { return outputs_.size(); }
  size_t bin_begin(size_t b) const { return b == 0 ? 0 : bin_ends_[b - 1]; }
  double eps() const { return eps_; }
  // Expected loss of randomized response on this layout at eps() under the
  // prior it was optimized for.
  double objective() const { return objective_; }

  size_t BinOf(size_t label_index) const { return label_bin_[label_index]; }
  double Map(size_t label_index) const {
    return outputs_[label_bin_[label_index]];
  }

 private:
  BinLayout(LabelSet labels, std::vector<size_t> bin_ends,
            std::vector<double> outputs, std::vector<uint32_t> label_bin,
            double eps, double objective)
      : labels_(std::move(labels)),
        bin_ends_(std::move(bin_ends)),
        outputs_(std::move(outputs)),
        label_bin_(std::move(label_bin)),
        eps_(eps),
        objective_(objective) {}

  LabelSet labels_;
  std::vector<size_t> bin_ends_;
  std::vector<double> outputs_;
  std::vector<uint32_t> label_bin_;
  double eps_;
  double objective_;
};

// Expected loss of randomized response at `eps` over the given partition
// and outputs, under `prior`. Outputs need not be distinct or sorted.
double RrOnBinsLoss(const Prior& prior, absl::Span<const size_t> bin_ends,
                    absl::Span<const double> outputs, double eps,
                    const LossSpec& loss);

// Normalized single-bin costs for every bin [first, last], stored packed by
// `last` so that a scan over `first` is contiguous. Minimizers are not kept;
// only the chosen bins need them.
class TiltedCostTable {
 public:
  TiltedCostTable() = default;
  explicit TiltedCostTable(size_t k)
      : k_(k), cost_(k * (k + 1) / 2) {}

  // Resizes for k labels, keeping previously allocated storage.
  void Resize(size_t k) {
    k_ = k;
    cost_.resize(k * (k + 1) / 2);
  }

  size_t size() const { return k_; }
  double cost(size_t first, size_t last) const { return cost_[Index(first, last)]; }
  // Contiguous costs of bins [0, last], ..., [last, last].
  absl::Span<const double> costs_ending_at(size_t last) const {
    return absl::MakeConstSpan(cost_).subspan(Index(0, last), last + 1);
  }
  void set(size_t first, size_t last, double cost) {
    cost_[Index(first, last)] = cost;
  }

 private:
  static size_t Index(size_t first, size_t last) {
    return last * (last + 1) / 2 + first;
  }
  size_t k_ = 0;
  std::vector<double> cost_;
};

// Fills every bin cost. Built-in losses use amortized O(1) updates as the
// bin grows to the right, so the whole table costs O(k^2). The parallel
// variant splits the work over `first` and produces bit-identical results.
absl::StatusOr<TiltedCostTable> FillTiltedCosts(const Prior& prior, double eps,
                                                const LossSpec& loss,
                                                Execution execution);

// Same, writing into `table` and reusing its storage.
absl::Status FillTiltedCosts(const Prior& prior, double eps,
                             const LossSpec& loss, Execution execution,
                             TiltedCostTable* table);

// best(i, j): minimum total cost of splitting labels [0, i) into j bins,
// and the split point r that achieves it (smallest r on ties).
class PartitionTables {
 public:
  explicit PartitionTables(size_t k);

  size_t size() const { return k_; }
  double best(size_t i, size_t j) const { return best_[j * (k_ + 1) + i]; }
  uint32_t parent(size_t i, size_t j) const {
    return parent_[j * (k_ + 1) + i];
  }
  void set(size_t i, size_t j, double value, uint32_t r) {
    best_[j * (k_ + 1) + i] = value;
    parent_[j * (k_ + 1) + i] = r;
  }

 private:
  size_t k_;
  // Column-major in j so that scanning r for fixed j is contiguous.
  std::vector<double> best_;
  std::vector<uint32_t> parent_;
};

// The full k x k recurrence best(i, j) = min_r best(r, j - 1) + cost(r, i - 1).
// This is O(k^3); the parallel variant distributes j for each i.
PartitionTables FillPartitionTables(const TiltedCostTable& costs,
                                    Execution execution);

// Exclusive bin ends of the d-bin optimum recorded in `tables`.
std::vector<size_t> BacktrackPartition(const PartitionTables& tables, size_t d);

// Minimizes A / (1 + (d - 1) q) over all partitions by iterating the
// parametric O(k^2) recurrence B(i) = min_r B(r) + cost(r, i - 1) - lambda q
// and updating lambda to the ratio of the partition it returns. Terminates
// once lambda stops decreasing. Returns exclusive bin ends.
std::vector<size_t> SolveRatioPartition(const TiltedCostTable& costs,
                                        double outside_weight);

enum class PartitionSolver {
  // Parametric search over the bin count: O(k^2) per round, a handful of
  // rounds in practice.
  kRatio,
  // Every entry of the (k+1) x (k+1) table, then the best ratio over d.
  kFullTable,
};

struct BinOptOptions {
  Execution execution = Execution::kParallel;
  PartitionSolver solver = PartitionSolver::kRatio;
};

// The loss-optimal layout for randomized response at `eps` under `prior`.
// Ties prefer fewer bins. Adjacent bins that end up with the same output are
// merged, which never increases the objective.
absl::StatusOr<BinLayout> OptimizeBins(const Prior& prior, double eps,
                                       const LossSpec& loss,
                                       const BinOptOptions& options = {});

}  // namespace rrbins

#endif  // RRBINS_BINOPT_H_
