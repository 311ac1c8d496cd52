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

#include "rrbins/binopt.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

#include "absl/status/status.h"
#include "absl/strings/str_cat.h"
#include "binopt_internal.h"
#include "rrbins/internal/status_macros.h"

namespace rrbins {
namespace internal {

absl::Status ValidateEps(double eps) {
  if (!(eps >= 0.0)) {
    return absl::InvalidArgumentError(
        absl::StrCat("eps must be non-negative, got ", eps));
  }
  return absl::OkStatus();
}

absl::Status ValidateLossForPrior(const Prior& prior, const LossSpec& loss) {
  if (loss.kind() == LossKind::kPoisson && prior.labels().min() < 0.0) {
    return absl::InvalidArgumentError(
        "poisson loss requires non-negative labels");
  }
  if (loss.kind() == LossKind::kCustom && !loss.convex_in_first_arg()) {
    return absl::FailedPreconditionError(absl::StrCat(
        "loss '", loss.name(), "' is not flagged convex in its first argument"));
  }
  return absl::OkStatus();
}

void InnerSearchRange(const Prior& prior, const LossSpec& loss, double* lo,
                      double* hi) {
  *lo = prior.labels().min();
  *hi = prior.labels().max();
  if (loss.domain_min().has_value() && *lo <= *loss.domain_min()) {
    *lo = std::max(*loss.domain_min() + kPoissonFloor, *lo);
    *hi = std::max(*hi, *lo);
  }
}

double GoldenSectionMin(const std::function<double(double)>& f, double lo,
                        double hi, double tol) {
  constexpr double kInvPhi = 0.6180339887498949;
  double a = lo, b = hi;
  double c = b - kInvPhi * (b - a);
  double d = a + kInvPhi * (b - a);
  double fc = f(c), fd = f(d);
  while (b - a > tol) {
    if (fc <= fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - kInvPhi * (b - a);
      fc = f(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + kInvPhi * (b - a);
      fd = f(d);
    }
  }
  double best = 0.5 * (a + b);
  double f_best = f(best);
  // The bracket cannot reach an endpoint minimum exactly.
  for (double x : {lo, hi}) {
    const double fx = f(x);
    if (fx < f_best) {
      best = x;
      f_best = fx;
    }
  }
  return best;
}

InnerSolution NormalizedInnerMin(const Prior& prior, size_t first, size_t last,
                                 double outside, const LossSpec& loss) {
  const LabelSet& y = prior.labels();
  const size_t k = y.size();
  std::vector<double> w(k);
  double total = 0.0;
  for (size_t j = 0; j < k; ++j) {
    w[j] = prior.prob(j) * (j >= first && j <= last ? 1.0 : outside);
    total += w[j];
  }
  auto objective = [&](double yhat) {
    double v = 0.0;
    for (size_t j = 0; j < k; ++j) {
      if (w[j] != 0.0) v += w[j] * loss(yhat, y[j]);
    }
    return v;
  };
  double lo, hi;
  InnerSearchRange(prior, loss, &lo, &hi);
  if (total <= 0.0) {
    // Only reachable when outside == 0 and the bin carries no mass.
    return {std::clamp(y[first], lo, hi), 0.0};
  }

  double yhat = lo;
  switch (loss.kind()) {
    case LossKind::kSquared:
    case LossKind::kPoisson: {
      double sum_wy = 0.0;
      for (size_t j = 0; j < k; ++j) sum_wy += w[j] * y[j];
      yhat = sum_wy / total;
      if (loss.kind() == LossKind::kPoisson) yhat = std::max(yhat, kPoissonFloor);
      break;
    }
    case LossKind::kAbsolute:
      yhat = WeightedMedian(w, y.values());
      break;
    case LossKind::kCustom:
      yhat = lo < hi ? GoldenSectionMin(objective, lo, hi, 1e-10) : lo;
      break;
  }
  return {yhat, objective(yhat)};
}

}  // namespace internal

namespace {

constexpr size_t kMaxCachedLabels = 1024;

absl::Status ValidateBin(const Prior& prior, size_t first, size_t last) {
  if (first > last || last >= prior.size()) {
    return absl::OutOfRangeError(absl::StrCat("bin [", first, ", ", last,
                                              "] is invalid for ",
                                              prior.size(), " labels"));
  }
  return absl::OkStatus();
}

absl::StatusOr<InnerSolution> SolveScaled(const Prior& prior, size_t first,
                                          size_t last, double eps,
                                          const LossSpec& loss) {
  RETURN_IF_ERROR(ValidateBin(prior, first, last));
  RETURN_IF_ERROR(internal::ValidateEps(eps));
  RETURN_IF_ERROR(internal::ValidateLossForPrior(prior, loss));
  InnerSolution s = internal::NormalizedInnerMin(
      prior, first, last, internal::OutsideWeight(eps), loss);
  s.value *= std::exp(eps);
  return s;
}

}  // namespace

absl::StatusOr<InnerSolution> InnerMinSquared(const Prior& prior, size_t first,
                                              size_t last, double eps) {
  return SolveScaled(prior, first, last, eps, LossSpec::Squared());
}

absl::StatusOr<InnerSolution> InnerMinPoisson(const Prior& prior, size_t first,
                                              size_t last, double eps) {
  return SolveScaled(prior, first, last, eps, LossSpec::Poisson());
}

absl::StatusOr<InnerSolution> InnerMinAbsolute(const Prior& prior, size_t first,
                                               size_t last, double eps) {
  return SolveScaled(prior, first, last, eps, LossSpec::Absolute());
}

absl::StatusOr<InnerSolution> InnerMinGeneric(const Prior& prior, size_t first,
                                              size_t last, double eps,
                                              const LossSpec& loss) {
  if (!loss.convex_in_first_arg()) {
    return absl::FailedPreconditionError(absl::StrCat(
        "loss '", loss.name(), "' is not flagged convex in its first argument"));
  }
  RETURN_IF_ERROR(ValidateBin(prior, first, last));
  RETURN_IF_ERROR(internal::ValidateEps(eps));
  RETURN_IF_ERROR(internal::ValidateLossForPrior(prior, loss));
  const double outside = internal::OutsideWeight(eps);
  const LabelSet& y = prior.labels();
  auto objective = [&](double yhat) {
    double v = 0.0;
    for (size_t j = 0; j < y.size(); ++j) {
      const double w = prior.prob(j) * (j >= first && j <= last ? 1.0 : outside);
      if (w != 0.0) v += w * loss(yhat, y[j]);
    }
    return v;
  };
  double lo, hi;
  internal::InnerSearchRange(prior, loss, &lo, &hi);
  const double yhat = lo < hi ? internal::GoldenSectionMin(objective, lo, hi, 1e-10)
                              : lo;
  return InnerSolution{yhat, objective(yhat) * std::exp(eps)};
}

absl::StatusOr<InnerSolution> InnerMin(const Prior& prior, size_t first,
                                       size_t last, double eps,
                                       const LossSpec& loss) {
  return SolveScaled(prior, first, last, eps, loss);
}

double WeightedMedian(absl::Span<const double> weights,
                      absl::Span<const double> values) {
  double total = 0.0;
  for (double w : weights) total += w;
  double cumulative = 0.0;
  for (size_t j = 0; j < weights.size(); ++j) {
    cumulative += weights[j];
    if (2.0 * cumulative >= total) return values[j];
  }
  return values.back();
}

absl::StatusOr<BinLayout> BinLayout::Create(LabelSet labels,
                                            std::vector<size_t> bin_ends,
                                            std::vector<double> outputs,
                                            double eps, double objective) {
  const size_t k = labels.size();
  if (bin_ends.empty() || bin_ends.size() != outputs.size()) {
    return absl::InvalidArgumentError(
        "layout needs one output per bin and at least one bin");
  }
  if (bin_ends.back() != k) {
    return absl::InvalidArgumentError("bins must cover every label");
  }
  size_t prev = 0;
  for (size_t end : bin_ends) {
    if (end <= prev) {
      return absl::InvalidArgumentError("bins must be non-empty and ordered");
    }
    prev = end;
  }
  const double slack = 1e-9 * std::max(1.0, labels.max() - labels.min());
  for (size_t b = 0; b < outputs.size(); ++b) {
    if (!std::isfinite(outputs[b])) {
      return absl::InvalidArgumentError("layout outputs must be finite");
    }
    if (b > 0 && outputs[b] < outputs[b - 1]) {
      return absl::InvalidArgumentError(
          absl::StrCat("layout outputs decrease at bin ", b));
    }
    const bool poisson_floor = outputs[b] == kPoissonFloor;
    if (!poisson_floor && (outputs[b] < labels.min() - slack ||
                           outputs[b] > labels.max() + slack)) {
      return absl::InvalidArgumentError(absl::StrCat(
          "layout output ", outputs[b], " lies outside the label range"));
    }
  }
  std::vector<uint32_t> label_bin(k);
  size_t bin = 0;
  for (size_t i = 0; i < k; ++i) {
    while (i >= bin_ends[bin]) ++bin;
    label_bin[i] = static_cast<uint32_t>(bin);
  }
  return BinLayout(std::move(labels), std::move(bin_ends), std::move(outputs),
                   std::move(label_bin), eps, objective);
}

double RrOnBinsLoss(const Prior& prior, absl::Span<const size_t> bin_ends,
                    absl::Span<const double> outputs, double eps,
                    const LossSpec& loss) {
  const double outside = internal::OutsideWeight(eps);
  const LabelSet& y = prior.labels();
  double total = 0.0;
  size_t begin = 0;
  for (size_t b = 0; b < bin_ends.size(); ++b) {
    for (size_t j = 0; j < y.size(); ++j) {
      const double w = prior.prob(j) * (j >= begin && j < bin_ends[b] ? 1.0 : outside);
      if (w != 0.0) total += w * loss(outputs[b], y[j]);
    }
    begin = bin_ends[b];
  }
  const double d = static_cast<double>(bin_ends.size());
  return total / (1.0 + (d - 1.0) * outside);
}

absl::StatusOr<BinLayout> OptimizeBins(const Prior& prior, double eps,
                                       const LossSpec& loss,
                                       const BinOptOptions& options) {
  RETURN_IF_ERROR(internal::ValidateEps(eps));
  RETURN_IF_ERROR(internal::ValidateLossForPrior(prior, loss));
  const double outside = internal::OutsideWeight(eps);
  const size_t k = prior.size();
  // Small tables are reused per thread: refaulting fresh pages would
  // otherwise cost about as much as filling them.
  thread_local TiltedCostTable cached;
  TiltedCostTable fresh;
  TiltedCostTable& costs = k <= kMaxCachedLabels ? cached : fresh;
  RETURN_IF_ERROR(
      FillTiltedCosts(prior, eps, loss, options.execution, &costs));

  std::vector<size_t> ends;
  if (options.solver == PartitionSolver::kFullTable) {
    PartitionTables tables = FillPartitionTables(costs, options.execution);
    size_t best_d = 1;
    double best_ratio = std::numeric_limits<double>::infinity();
    for (size_t d = 1; d <= k; ++d) {
      const double ratio = tables.best(k, d) / (1.0 + (d - 1.0) * outside);
      if (ratio < best_ratio) {
        best_ratio = ratio;
        best_d = d;
      }
    }
    ends = BacktrackPartition(tables, best_d);
  } else {
    ends = SolveRatioPartition(costs, outside);
  }

  // Outputs of the chosen bins. Neighbours that share an output are merged:
  // randomized response needs a set of distinct outputs, and the merged
  // layout is never worse.
  auto output_of = [&](size_t first, size_t last) {
    return internal::NormalizedInnerMin(prior, first, last, outside, loss).yhat;
  };
  std::vector<double> outputs;
  for (size_t b = 0, begin = 0; b < ends.size(); begin = ends[b++]) {
    outputs.push_back(output_of(begin, ends[b] - 1));
  }
  const double same =
      1e-12 * std::max(1.0, prior.labels().max() - prior.labels().min());
  for (size_t b = 0; b + 1 < outputs.size();) {
    if (std::abs(outputs[b + 1] - outputs[b]) > same) {
      ++b;
      continue;
    }
    const size_t begin = b == 0 ? 0 : ends[b - 1];
    ends.erase(ends.begin() + b);
    outputs.erase(outputs.begin() + b + 1);
    outputs[b] = output_of(begin, ends[b] - 1);
    b = b == 0 ? 0 : b - 1;
  }

  double numerator = 0.0;
  size_t begin = 0;
  for (size_t end : ends) {
    numerator += costs.cost(begin, end - 1);
    begin = end;
  }
  const double d = static_cast<double>(ends.size());
  const double objective = numerator / (1.0 + (d - 1.0) * outside);
  auto layout = BinLayout::Create(prior.labels(), std::move(ends),
                                  std::move(outputs), eps, objective);
  if (!layout.ok()) {
    return absl::InternalError(
        absl::StrCat("optimizer produced an invalid layout: ",
                     layout.status().message()));
  }
  return layout;
}

}  // namespace rrbins
