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

// Table kernels behind OptimizeBins. Every kernel has a serial form and an
// OpenMP form that performs the same floating-point operations in the same
// order per output cell, so both produce identical tables.

#include <omp.h>

#include <algorithm>
#include <cmath>
#include <limits>
#include <utility>
#include <vector>

#include "absl/status/status.h"
#include "binopt_internal.h"
#include "rrbins/binopt.h"
#include "rrbins/internal/status_macros.h"

namespace rrbins {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

struct Totals {
  double mass = 0.0;
  double centered = 0.0;     // Σ p (y - center)
  double centered_sq = 0.0;  // Σ p (y - center)^2
  double raw = 0.0;          // Σ p y
  double center = 0.0;
};

Totals ComputeTotals(const Prior& prior) {
  Totals t;
  t.center = prior.Mean();
  for (size_t j = 0; j < prior.size(); ++j) {
    const double p = prior.prob(j);
    const double dy = prior.labels()[j] - t.center;
    t.mass += p;
    t.centered += p * dy;
    t.centered_sq += p * dy * dy;
    t.raw += p * prior.labels()[j];
  }
  return t;
}

// Squared and Poisson: one column of the table, growing the bin to the left
// so that writes stay contiguous. Squared moments are centred on the column's
// last label, which makes a singleton bin with no outside weight cost exactly
// zero.
void FillMomentColumn(const Prior& prior, const Totals& t, double outside,
                      LossKind kind, size_t last,
                      TiltedCostTable& table) {
  const double inside_gain = 1.0 - outside;
  const double c = prior.labels()[last];
  const double shift = t.center - c;
  const double out_c1 = t.centered + shift * t.mass;
  const double out_c2 =
      t.centered_sq + 2.0 * shift * t.centered + shift * shift * t.mass;
  double in_mass = 0.0, in_c1 = 0.0, in_c2 = 0.0, in_raw = 0.0;
  for (size_t first = last + 1; first-- > 0;) {
    const double p = prior.prob(first);
    const double y = prior.labels()[first];
    const double dy = y - c;
    in_mass += p;
    in_c1 += p * dy;
    in_c2 += p * dy * dy;
    in_raw += p * y;

    const double w = outside * t.mass + inside_gain * in_mass;
    if (w <= 0.0) {
      table.set(first, last, 0.0);
      continue;
    }
    if (kind == LossKind::kSquared) {
      const double w1 = outside * out_c1 + inside_gain * in_c1;
      const double w2 = outside * out_c2 + inside_gain * in_c2;
      table.set(first, last, std::max(0.0, w2 - w1 * w1 / w));
    } else {
      const double w1 = outside * t.raw + inside_gain * in_raw;
      const double yhat = std::max(w1 / w, kPoissonFloor);
      table.set(first, last,
                w * yhat - (w1 > 0.0 ? w1 * std::log(yhat) : 0.0));
    }
  }
}

// Absolute loss: weighted median pointer with (w_lo, s_lo) bookkeeping. For
// a fixed first the pointer moves O(k) times in total.
void FillMedianRow(const Prior& prior, double outside, size_t first,
                   TiltedCostTable& table) {
  const LabelSet& y = prior.labels();
  const size_t k = y.size();
  size_t last = first;
  auto weight = [&](size_t j) {
    return prior.prob(j) * (j >= first && j <= last ? 1.0 : outside);
  };

  double total = 0.0, total_y = 0.0;
  for (size_t j = 0; j < k; ++j) {
    const double w = weight(j);
    total += w;
    total_y += w * y[j];
  }
  // Median pointer m and the weight / weighted sum of labels <= y[m].
  size_t m = 0;
  double w_lo = weight(0), s_lo = weight(0) * y[0];
  while (2.0 * w_lo < total && m + 1 < k) {
    ++m;
    const double w = weight(m);
    w_lo += w;
    s_lo += w * y[m];
  }

  for (;; ++last) {
    if (last > first) {
      const double delta = prior.prob(last) * (1.0 - outside);
      total += delta;
      total_y += delta * y[last];
      if (last <= m) {
        w_lo += delta;
        s_lo += delta * y[last];
      }
    }
    while (2.0 * w_lo < total && m + 1 < k) {
      ++m;
      const double w = weight(m);
      w_lo += w;
      s_lo += w * y[m];
    }
    while (m > 0 && 2.0 * (w_lo - weight(m)) >= total) {
      const double w = weight(m);
      w_lo -= w;
      s_lo -= w * y[m];
      --m;
    }
    if (total <= 0.0) {
      table.set(first, last, 0.0);
    } else {
      const double med = y[m];
      const double value =
          (med * w_lo - s_lo) + ((total_y - s_lo) - med * (total - w_lo));
      table.set(first, last, std::max(0.0, value));
    }
    if (last + 1 == k) break;
  }
}

void FillGenericRow(const Prior& prior, double outside, const LossSpec& loss,
                    size_t first, TiltedCostTable& table) {
  for (size_t last = first; last < prior.size(); ++last) {
    const InnerSolution s =
        internal::NormalizedInnerMin(prior, first, last, outside, loss);
    table.set(first, last, s.value);
  }
}

}  // namespace

absl::StatusOr<TiltedCostTable> FillTiltedCosts(const Prior& prior, double eps,
                                                const LossSpec& loss,
                                                Execution execution) {
  TiltedCostTable table;
  RETURN_IF_ERROR(FillTiltedCosts(prior, eps, loss, execution, &table));
  return table;
}

absl::Status FillTiltedCosts(const Prior& prior, double eps,
                             const LossSpec& loss, Execution execution,
                             TiltedCostTable* out) {
  RETURN_IF_ERROR(internal::ValidateEps(eps));
  RETURN_IF_ERROR(internal::ValidateLossForPrior(prior, loss));
  const size_t k = prior.size();
  const double outside = internal::OutsideWeight(eps);
  const Totals totals = ComputeTotals(prior);
  out->Resize(k);
  TiltedCostTable& table = *out;

  // Moment kernels fill column `index`; the others fill row `index`.
  auto fill_row = [&](size_t index) {
    switch (loss.kind()) {
      case LossKind::kSquared:
      case LossKind::kPoisson:
        FillMomentColumn(prior, totals, outside, loss.kind(), index, table);
        break;
      case LossKind::kAbsolute:
        FillMedianRow(prior, outside, index, table);
        break;
      case LossKind::kCustom:
        FillGenericRow(prior, outside, loss, index, table);
        break;
    }
  };

  const auto n = static_cast<std::ptrdiff_t>(k);
  if (execution == Execution::kParallel) {
#pragma omp parallel for schedule(dynamic, 4)
    for (std::ptrdiff_t i = 0; i < n; ++i) fill_row(i);
  } else {
    for (std::ptrdiff_t i = 0; i < n; ++i) fill_row(i);
  }
  return absl::OkStatus();
}

PartitionTables::PartitionTables(size_t k)
    : k_(k), best_((k + 1) * (k + 1), kInf), parent_((k + 1) * (k + 1), 0) {}

namespace {

void FillPartitionCell(const TiltedCostTable& costs, size_t i, size_t j,
                       PartitionTables& tables) {
  const absl::Span<const double> bin_cost = costs.costs_ending_at(i - 1);
  double best = kInf;
  uint32_t arg = 0;
  for (size_t r = j - 1; r < i; ++r) {
    const double v = tables.best(r, j - 1) + bin_cost[r];
    if (v < best) {
      best = v;
      arg = static_cast<uint32_t>(r);
    }
  }
  tables.set(i, j, best, arg);
}

}  // namespace

PartitionTables FillPartitionTables(const TiltedCostTable& costs,
                                    Execution execution) {
  const size_t k = costs.size();
  PartitionTables tables(k);
  tables.set(0, 0, 0.0, 0);
  for (size_t i = 1; i <= k; ++i) {
    const auto n = static_cast<std::ptrdiff_t>(i);
    if (execution == Execution::kParallel) {
#pragma omp parallel for schedule(static)
      for (std::ptrdiff_t j = 1; j <= n; ++j) {
        FillPartitionCell(costs, i, j, tables);
      }
    } else {
      for (std::ptrdiff_t j = 1; j <= n; ++j) {
        FillPartitionCell(costs, i, j, tables);
      }
    }
  }
  return tables;
}

std::vector<size_t> BacktrackPartition(const PartitionTables& tables,
                                       size_t d) {
  std::vector<size_t> ends(d);
  size_t i = tables.size();
  for (size_t j = d; j >= 1; --j) {
    ends[j - 1] = i;
    i = tables.parent(i, j);
  }
  return ends;
}

namespace {

// min over r < n of a[r] + b[r] and the smallest r attaining it. Four
// independent lanes break the compare chain; the merge keeps the smallest
// index on ties, so the result equals a plain left-to-right scan.
std::pair<double, uint32_t> ArgminOfSum(const double* a, const double* b,
                                        size_t n) {
  double best[4] = {kInf, kInf, kInf, kInf};
  uint32_t arg[4] = {0, 0, 0, 0};
  size_t r = 0;
  for (; r + 4 <= n; r += 4) {
    for (int lane = 0; lane < 4; ++lane) {
      const double v = a[r + lane] + b[r + lane];
      if (v < best[lane]) {
        best[lane] = v;
        arg[lane] = static_cast<uint32_t>(r + lane);
      }
    }
  }
  for (; r < n; ++r) {
    const double v = a[r] + b[r];
    if (v < best[0] || (v == best[0] && r < arg[0])) {
      best[0] = v;
      arg[0] = static_cast<uint32_t>(r);
    }
  }
  double min = best[0];
  uint32_t where = arg[0];
  for (int lane = 1; lane < 4; ++lane) {
    if (best[lane] < min || (best[lane] == min && arg[lane] < where)) {
      min = best[lane];
      where = arg[lane];
    }
  }
  return {min, where};
}

}  // namespace

std::vector<size_t> SolveRatioPartition(const TiltedCostTable& costs,
                                        double outside) {
  const size_t k = costs.size();
  std::vector<size_t> best_ends = {k};
  double best_numerator = costs.cost(0, k - 1);
  double lambda = best_numerator;

  std::vector<double> value(k + 1);
  std::vector<uint32_t> parent(k + 1);
  for (size_t round = 0; round <= k + 1; ++round) {
    const double penalty = lambda * outside;
    value[0] = 0.0;
    for (size_t i = 1; i <= k; ++i) {
      const absl::Span<const double> bin_cost = costs.costs_ending_at(i - 1);
      const auto [best, arg] = ArgminOfSum(value.data(), bin_cost.data(), i);
      value[i] = best - penalty;
      parent[i] = arg;
    }
    std::vector<size_t> ends;
    double numerator = 0.0;
    for (size_t i = k; i > 0; i = parent[i]) {
      ends.push_back(i);
      numerator += costs.cost(parent[i], i - 1);
    }
    std::reverse(ends.begin(), ends.end());
    const double d = static_cast<double>(ends.size());
    const double ratio = numerator / (1.0 + (d - 1.0) * outside);
    if (!(ratio < lambda)) break;
    lambda = ratio;
    best_ends = std::move(ends);
  }
  return best_ends;
}

}  // namespace rrbins
