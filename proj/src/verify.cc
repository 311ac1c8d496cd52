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

#include "rrbins/verify.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <utility>
#include <vector>

#include "absl/status/status.h"
#include "absl/strings/str_cat.h"
#include "absl/strings/str_format.h"
#include "boost/math/distributions/chi_squared.hpp"

namespace rrbins::verify {
namespace {

constexpr double kGoldenTolerance = 1e-12;

absl::Status CheckLossDomain(const Prior& prior, const LossSpec& loss) {
  if (!loss.convex_in_first_arg()) {
    return absl::FailedPreconditionError(
        absl::StrCat("loss '", loss.name(), "' is not convex"));
  }
  if (loss.domain_min().has_value() &&
      prior.labels().min() < *loss.domain_min()) {
    return absl::InvalidArgumentError(absl::StrCat(
        "labels go below the domain of loss '", loss.name(), "'"));
  }
  return absl::OkStatus();
}

// argmin over [lo, hi] of a convex function.
double GoldenSection(const std::function<double(double)>& f, double lo,
                     double hi) {
  const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
  double a = lo, b = hi;
  double c = b - inv_phi * (b - a), d = a + inv_phi * (b - a);
  double fc = f(c), fd = f(d);
  while (b - a > kGoldenTolerance * std::max(1.0, std::abs(a) + std::abs(b))) {
    if (fc <= fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - inv_phi * (b - a);
      fc = f(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + inv_phi * (b - a);
      fd = f(d);
    }
  }
  const double mid = 0.5 * (a + b);
  // The endpoints can beat the interior when the minimum sits on them.
  double best = mid;
  for (double x : {lo, hi}) {
    if (f(x) < f(best)) best = x;
  }
  return best;
}

// Minimizer of Σ_y w_y loss(yhat, y), computed from the definition of each
// loss's optimal constant.
double OptimalConstant(absl::Span<const double> w,
                       absl::Span<const double> y, const LossSpec& loss) {
  const double total = std::accumulate(w.begin(), w.end(), 0.0);
  if (!(total > 0.0)) return y.front();
  switch (loss.kind()) {
    case LossKind::kSquared:
    case LossKind::kPoisson: {
      double s = 0.0;
      for (size_t i = 0; i < y.size(); ++i) s += w[i] * y[i];
      const double mean = std::clamp(s / total, y.front(), y.back());
      return loss.kind() == LossKind::kPoisson ? std::max(mean, kPoissonFloor)
                                               : mean;
    }
    case LossKind::kAbsolute: {
      double cum = 0.0;
      for (size_t i = 0; i < y.size(); ++i) {
        cum += w[i];
        if (2.0 * cum >= total) return y[i];
      }
      return y.back();
    }
    case LossKind::kCustom:
      break;
  }
  double lo = y.front();
  if (loss.domain_min().has_value()) {
    lo = std::max(lo, *loss.domain_min() + kPoissonFloor);
  }
  const double hi = std::max(lo, y.back());
  return GoldenSection(
      [&](double t) {
        double v = 0.0;
        for (size_t i = 0; i < y.size(); ++i) v += w[i] * loss(t, y[i]);
        return v;
      },
      lo, hi);
}

struct Interval {
  double yhat;
  double value;  // Σ_y p_y e^{eps (1[y in bin] - 1)} loss(yhat, y)
};

}  // namespace

absl::StatusOr<BinLayout> BruteForceOptimalBins(const Prior& prior, double eps,
                                                const LossSpec& loss) {
  const size_t k = prior.size();
  if (k > kMaxBruteForceLabels) {
    return absl::InvalidArgumentError(absl::StrFormat(
        "brute force handles at most %d labels, got %d", kMaxBruteForceLabels,
        k));
  }
  if (!(eps >= 0.0) || std::isnan(eps)) {
    return absl::InvalidArgumentError(
        absl::StrCat("eps must be non-negative, got ", eps));
  }
  if (absl::Status s = CheckLossDomain(prior, loss); !s.ok()) return s;

  const double q = std::exp(-eps);
  const absl::Span<const double> y = prior.labels().values();
  std::vector<Interval> interval(k * k);
  std::vector<double> w(k);
  for (size_t first = 0; first < k; ++first) {
    for (size_t last = first; last < k; ++last) {
      for (size_t i = 0; i < k; ++i) {
        w[i] = prior.prob(i) * (i >= first && i <= last ? 1.0 : q);
      }
      const double yhat = OptimalConstant(w, y, loss);
      double value = 0.0;
      for (size_t i = 0; i < k; ++i) value += w[i] * loss(yhat, y[i]);
      interval[first * k + last] = {yhat, value};
    }
  }

  double best = std::numeric_limits<double>::infinity();
  std::vector<size_t> best_ends;
  std::vector<size_t> ends;
  const uint64_t num_masks = uint64_t{1} << (k - 1);
  for (uint64_t mask = 0; mask < num_masks; ++mask) {
    ends.clear();
    for (size_t i = 0; i + 1 < k; ++i) {
      if (mask >> i & 1) ends.push_back(i + 1);
    }
    ends.push_back(k);
    double total = 0.0;
    size_t begin = 0;
    for (size_t end : ends) {
      total += interval[begin * k + end - 1].value;
      begin = end;
    }
    const double objective = total / (1.0 + (ends.size() - 1.0) * q);
    const bool better =
        objective < best ||
        (objective == best &&
         (ends.size() < best_ends.size() ||
          (ends.size() == best_ends.size() && ends < best_ends)));
    if (better) {
      best = objective;
      best_ends = ends;
    }
  }

  std::vector<double> outputs;
  size_t begin = 0;
  for (size_t end : best_ends) {
    outputs.push_back(interval[begin * k + end - 1].yhat);
    begin = end;
  }
  return BinLayout::Create(prior.labels(), std::move(best_ends),
                           std::move(outputs), eps, best);
}

absl::StatusOr<LpSolution> LpOptimalMechanism(const Prior& prior,
                                              absl::Span<const double> outputs,
                                              double eps,
                                              const LossSpec& loss) {
  const size_t k = prior.size();
  const size_t g = outputs.size();
  if (g == 0) return absl::InvalidArgumentError("output grid is empty");
  if (k * g > kMaxLpCells) {
    return absl::InvalidArgumentError(absl::StrFormat(
        "LP has %d cells; the dense solver handles at most %d", k * g,
        kMaxLpCells));
  }
  if (!(eps >= 0.0) || !std::isfinite(eps)) {
    return absl::InvalidArgumentError(
        absl::StrCat("eps must be finite and non-negative, got ", eps));
  }
  for (double o : outputs) {
    if (!loss.InDomain(o)) {
      return absl::InvalidArgumentError(
          absl::StrCat("output ", o, " is outside the loss domain"));
    }
  }

  // Variables: M[y][o] at y * g + o, then the column floors m_o.
  const size_t floor0 = k * g;
  LinearProgram lp;
  lp.num_vars = floor0 + g;
  lp.objective.assign(lp.num_vars, 0.0);
  for (size_t yi = 0; yi < k; ++yi) {
    for (size_t o = 0; o < g; ++o) {
      lp.objective[yi * g + o] = prior.prob(yi) * loss(outputs[o], prior.labels()[yi]);
    }
  }
  for (size_t yi = 0; yi < k; ++yi) {
    LinearProgram::Row row{std::vector<double>(lp.num_vars, 0.0), 1.0};
    for (size_t o = 0; o < g; ++o) row.coeffs[yi * g + o] = 1.0;
    lp.equalities.push_back(std::move(row));
  }
  const double q = std::exp(-eps);
  for (size_t o = 0; o < g; ++o) {
    for (size_t yi = 0; yi < k; ++yi) {
      LinearProgram::Row upper{std::vector<double>(lp.num_vars, 0.0), 0.0};
      upper.coeffs[yi * g + o] = q;
      upper.coeffs[floor0 + o] = -1.0;
      lp.upper_bounds.push_back(std::move(upper));
      LinearProgram::Row lower{std::vector<double>(lp.num_vars, 0.0), 0.0};
      lower.coeffs[floor0 + o] = 1.0;
      lower.coeffs[yi * g + o] = -1.0;
      lp.upper_bounds.push_back(std::move(lower));
    }
  }

  const LpResult result = SolveDenseSimplex(lp);
  LpSolution solution{.status = result.status};
  if (result.status != LpStatus::kOptimal) return solution;

  std::vector<double> entries(k * g);
  for (size_t i = 0; i < k * g; ++i) entries[i] = std::max(result.x[i], 0.0);
  auto matrix = MechanismMatrix::Create(
      prior.labels(), {outputs.begin(), outputs.end()}, std::move(entries));
  if (!matrix.ok()) {
    return absl::InternalError(absl::StrCat(
        "simplex returned an invalid mechanism: ", matrix.status().message()));
  }
  solution.objective = result.objective;
  solution.matrix = *std::move(matrix);
  return solution;
}

double MaxLpConstraintViolation(const MechanismMatrix& m, double eps) {
  const double ratio = std::exp(eps);
  double worst = 0.0;
  for (size_t r = 0; r < m.num_inputs(); ++r) {
    double sum = 0.0;
    for (double v : m.row(r)) {
      sum += v;
      worst = std::max(worst, -v);
    }
    worst = std::max(worst, std::abs(sum - 1.0));
  }
  for (size_t c = 0; c < m.num_outputs(); ++c) {
    double lo = std::numeric_limits<double>::infinity();
    double hi = -lo;
    for (size_t r = 0; r < m.num_inputs(); ++r) {
      lo = std::min(lo, m.at(r, c));
      hi = std::max(hi, m.at(r, c));
    }
    worst = std::max(worst, hi - ratio * lo);
  }
  return worst;
}

double BestGridRrOnBinsLoss(const Prior& prior, absl::Span<const double> grid,
                            double eps, const LossSpec& loss) {
  const size_t k = prior.size();
  std::vector<double> sorted(grid.begin(), grid.end());
  std::sort(sorted.begin(), sorted.end());
  sorted.erase(std::unique(sorted.begin(), sorted.end()), sorted.end());
  const double stay = std::exp(eps);
  double best = std::numeric_limits<double>::infinity();
  std::vector<size_t> phi(k, 0);

  // Enumerate non-decreasing maps label index -> grid index.
  std::function<void(size_t, size_t)> visit = [&](size_t i, size_t from) {
    if (i == k) {
      std::vector<size_t> image(phi);
      image.erase(std::unique(image.begin(), image.end()), image.end());
      const double d = static_cast<double>(image.size());
      double total = 0.0;
      for (size_t yi = 0; yi < k; ++yi) {
        const double y = prior.labels()[yi];
        double row = 0.0;
        for (size_t o : image) {
          row += (o == phi[yi] ? stay : 1.0) * loss(sorted[o], y);
        }
        total += prior.prob(yi) * row;
      }
      best = std::min(best, total / (d - 1.0 + stay));
      return;
    }
    for (size_t o = from; o < sorted.size(); ++o) {
      phi[i] = o;
      visit(i + 1, o);
    }
  };
  visit(0, 0);
  return best;
}

bool CheckEpsDp(const MechanismMatrix& m, double eps) {
  const double bound = std::exp(eps) * (1.0 + 1e-9);
  for (size_t c = 0; c < m.num_outputs(); ++c) {
    double lo = std::numeric_limits<double>::infinity();
    double hi = 0.0;
    for (size_t r = 0; r < m.num_inputs(); ++r) {
      lo = std::min(lo, m.at(r, c));
      hi = std::max(hi, m.at(r, c));
    }
    if (hi == 0.0) continue;
    if (!(hi <= bound * lo)) return false;
  }
  return true;
}

ChiSquareResult ChiSquareGoodnessOfFit(absl::Span<const uint64_t> observed,
                                       absl::Span<const double> probabilities,
                                       double significance) {
  ChiSquareResult result;
  if (observed.size() != probabilities.size()) {
    result.passed = false;
    result.detail = "observed and expected have different lengths";
    return result;
  }
  const double n = std::accumulate(observed.begin(), observed.end(), 0.0);
  const double mass =
      std::accumulate(probabilities.begin(), probabilities.end(), 0.0);
  if (!(n > 0.0) || !(mass > 0.0)) {
    result.passed = false;
    result.detail = "no observations or no probability mass";
    return result;
  }

  std::vector<std::pair<double, double>> cells;  // (observed, expected)
  double obs_acc = 0.0, exp_acc = 0.0;
  for (size_t i = 0; i < observed.size(); ++i) {
    const double expected = n * probabilities[i] / mass;
    if (probabilities[i] <= 0.0 && observed[i] > 0) {
      result.passed = false;
      result.p_value = 0.0;
      result.detail = absl::StrCat(observed[i],
                                   " draws hit zero-probability cell ", i);
      return result;
    }
    obs_acc += static_cast<double>(observed[i]);
    exp_acc += expected;
    if (exp_acc >= 5.0) {
      cells.emplace_back(obs_acc, exp_acc);
      obs_acc = exp_acc = 0.0;
    }
  }
  if (exp_acc > 0.0 || obs_acc > 0.0) {
    if (cells.empty()) {
      cells.emplace_back(obs_acc, exp_acc);
    } else {
      cells.back().first += obs_acc;
      cells.back().second += exp_acc;
    }
  }

  result.degrees_of_freedom = static_cast<int>(cells.size()) - 1;
  for (const auto& [o, e] : cells) result.statistic += (o - e) * (o - e) / e;
  if (result.degrees_of_freedom < 1) {
    result.p_value = 1.0;
    result.passed = true;
    result.detail = "single pooled cell";
    return result;
  }
  boost::math::chi_squared dist(result.degrees_of_freedom);
  result.p_value = boost::math::cdf(boost::math::complement(dist, result.statistic));
  result.passed = result.p_value >= significance;
  result.detail = absl::StrFormat("chi2 = %.4g, df = %d, p = %.4g",
                                  result.statistic, result.degrees_of_freedom,
                                  result.p_value);
  return result;
}

ChiSquareResult EmpiricalSamplerCheck(
    const std::function<size_t(Rng&)>& sampler,
    absl::Span<const double> analytic_row, size_t trials, Rng& rng,
    double significance) {
  std::vector<uint64_t> counts(analytic_row.size(), 0);
  for (size_t t = 0; t < trials; ++t) {
    const size_t cell = sampler(rng);
    if (cell >= counts.size()) {
      ChiSquareResult result;
      result.passed = false;
      result.p_value = 0.0;
      result.detail = absl::StrCat("sampler produced cell ", cell,
                                   " outside a row of ", counts.size());
      return result;
    }
    ++counts[cell];
  }
  return ChiSquareGoodnessOfFit(counts, analytic_row, significance);
}

double LaplaceCdf(double x, double scale) {
  return x < 0.0 ? 0.5 * std::exp(x / scale)
                 : 1.0 - 0.5 * std::exp(-x / scale);
}

double DiscreteLaplacePmf(int64_t z, double scale) {
  const double alpha = std::exp(-1.0 / scale);
  return (1.0 - alpha) / (1.0 + alpha) *
         std::pow(alpha, static_cast<double>(std::abs(z)));
}

double StaircaseCdf(double x, double eps, double delta, double gamma) {
  const double b = std::exp(-eps);
  const double a = (1.0 - b) / (2.0 * delta * (gamma + b * (1.0 - gamma)));
  const double t = std::abs(x);
  const double rung = std::floor(t / delta);
  const double s = t - rung * delta;
  const double inside = std::min(s, gamma * delta) +
                        b * std::max(0.0, s - gamma * delta);
  const double mass =
      0.5 * (1.0 - std::exp(-rung * eps)) + std::exp(-rung * eps) * a * inside;
  return x >= 0.0 ? 0.5 + mass : 0.5 - mass;
}

double DiscreteStaircasePmf(int64_t i, double eps, int64_t delta, int64_t r) {
  const double b = std::exp(-eps);
  const double a =
      (1.0 - b) / (2.0 * r + 2.0 * b * (delta - r) - (1.0 - b));
  const int64_t mag = std::abs(i);
  const int64_t rung = mag / delta;
  const int64_t s = mag % delta;
  return a * std::exp(-eps * static_cast<double>(rung)) * (s < r ? 1.0 : b);
}

double TruncatedLaplaceCdf(double x, double center, double scale, double lo,
                           double hi) {
  if (x < lo) return 0.0;
  if (x >= hi) return 1.0;
  const double f_lo = LaplaceCdf(lo - center, scale);
  const double f_hi = LaplaceCdf(hi - center, scale);
  return (LaplaceCdf(x - center, scale) - f_lo) / (f_hi - f_lo);
}

std::vector<double> CdfCellProbabilities(
    const std::function<double(double)>& cdf, absl::Span<const double> cuts) {
  std::vector<double> probs;
  probs.reserve(cuts.size() + 1);
  double prev = 0.0;
  for (double c : cuts) {
    const double f = cdf(c);
    probs.push_back(std::max(f - prev, 0.0));
    prev = f;
  }
  probs.push_back(std::max(1.0 - prev, 0.0));
  return probs;
}

size_t CellOf(double x, absl::Span<const double> cuts) {
  return static_cast<size_t>(std::lower_bound(cuts.begin(), cuts.end(), x) -
                             cuts.begin());
}

Prior RandomPrior(size_t k, Rng& rng) {
  std::vector<double> pool(4 * k + 1);
  std::iota(pool.begin(), pool.end(), 0.0);
  // Partial Fisher-Yates for k distinct labels.
  for (size_t i = 0; i < k; ++i) {
    std::swap(pool[i], pool[i + rng.UniformInt(pool.size() - i)]);
  }
  pool.resize(k);
  auto labels = LabelSet::Create(pool);
  std::vector<double> weights(k);
  double total = 0.0;
  for (double& w : weights) total += (w = rng.Exponential());
  for (double& w : weights) w /= total;
  auto prior = Prior::Create(*std::move(labels), weights);
  return *std::move(prior);
}

}  // namespace rrbins::verify
