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

#include "rrbins/mechanisms.h"

#include <algorithm>
#include <cmath>
#include <vector>

#include "absl/status/status.h"
#include "absl/strings/str_cat.h"
#include "absl/strings/str_format.h"

namespace rrbins {
namespace {

constexpr double kMaxMagnitude = 0x1.0p62;
constexpr int kMaxRejections = 1000000;

bool IsIntegral(double y) {
  return std::isfinite(y) && std::abs(y) < 0x1.0p53 && std::floor(y) == y;
}

// Geometric on {0, 1, ...} with P(G >= m) = exp(-m * rate).
double Geometric(double rate, Rng& rng) {
  if (std::isinf(rate)) return 0.0;
  return std::min(std::floor(rng.Exponential() / rate), kMaxMagnitude);
}

}  // namespace

absl::StatusOr<MechanismKind> ParseMechanismKind(absl::string_view name) {
  if (name == "rr-on-bins") return MechanismKind::kRrOnBins;
  if (name == "laplace") return MechanismKind::kLaplace;
  if (name == "discrete-laplace") return MechanismKind::kDiscreteLaplace;
  if (name == "staircase") return MechanismKind::kStaircase;
  if (name == "discrete-staircase") return MechanismKind::kDiscreteStaircase;
  if (name == "exponential") return MechanismKind::kExponential;
  if (name == "rr") return MechanismKind::kRandomizedResponse;
  return absl::InvalidArgumentError(
      absl::StrCat("unknown mechanism '", name, "'"));
}

absl::string_view MechanismKindName(MechanismKind kind) {
  switch (kind) {
    case MechanismKind::kRrOnBins:
      return "rr-on-bins";
    case MechanismKind::kLaplace:
      return "laplace";
    case MechanismKind::kDiscreteLaplace:
      return "discrete-laplace";
    case MechanismKind::kStaircase:
      return "staircase";
    case MechanismKind::kDiscreteStaircase:
      return "discrete-staircase";
    case MechanismKind::kExponential:
      return "exponential";
    case MechanismKind::kRandomizedResponse:
      return "rr";
  }
  return "unknown";
}

bool IsAdditive(MechanismKind kind) {
  switch (kind) {
    case MechanismKind::kLaplace:
    case MechanismKind::kDiscreteLaplace:
    case MechanismKind::kStaircase:
    case MechanismKind::kDiscreteStaircase:
      return true;
    default:
      return false;
  }
}

absl::Status NoiseParams::Validate() const {
  if (!(eps > 0.0)) {
    return absl::InvalidArgumentError(
        absl::StrCat("noise eps must be positive, got ", eps));
  }
  if (!(sensitivity > 0.0) || !std::isfinite(sensitivity)) {
    return absl::InvalidArgumentError(
        absl::StrCat("sensitivity must be positive, got ", sensitivity));
  }
  if (staircase_gamma.has_value() &&
      !(*staircase_gamma > 0.0 && *staircase_gamma < 1.0)) {
    return absl::InvalidArgumentError(absl::StrCat(
        "staircase gamma must lie in (0, 1), got ", *staircase_gamma));
  }
  return absl::OkStatus();
}

double DefaultStaircaseGamma(double eps) {
  return 1.0 / (1.0 + std::exp(eps / 2.0));
}

double RandomizedResponseStayProbability(double eps, size_t num_outputs) {
  return 1.0 / (1.0 + (num_outputs - 1.0) * std::exp(-eps));
}

MechanismMatrix RrOnBinsMatrix(const BinLayout& layout, double eps) {
  const size_t k = layout.labels().size();
  const size_t d = layout.num_bins();
  const double stay = RandomizedResponseStayProbability(eps, d);
  const double move = d > 1 ? stay * std::exp(-eps) : 0.0;
  std::vector<double> entries(k * d);
  for (size_t i = 0; i < k; ++i) {
    for (size_t b = 0; b < d; ++b) {
      entries[i * d + b] = b == layout.BinOf(i) ? stay : move;
    }
  }
  auto m = MechanismMatrix::Create(
      layout.labels(), {layout.outputs().begin(), layout.outputs().end()},
      std::move(entries));
  return *std::move(m);
}

size_t SampleRrOnBinsIndex(size_t bin, size_t num_bins, double eps, Rng& rng) {
  if (num_bins == 1) return 0;
  if (rng.Uniform() < RandomizedResponseStayProbability(eps, num_bins)) {
    return bin;
  }
  const size_t other = rng.UniformInt(num_bins - 1);
  return other >= bin ? other + 1 : other;
}

absl::StatusOr<double> RrOnBinsSample(const BinLayout& layout, double eps,
                                      double y, Rng& rng) {
  auto idx = layout.labels().IndexOf(y);
  if (!idx.has_value()) {
    return absl::InvalidArgumentError(
        absl::StrCat("label ", y, " is not in the layout's label set"));
  }
  return layout.outputs()[SampleRrOnBinsIndex(layout.BinOf(*idx),
                                              layout.num_bins(), eps, rng)];
}

double LaplaceSample(double y, const NoiseParams& params, Rng& rng) {
  const double scale = params.sensitivity / params.eps;
  const double magnitude = scale * rng.Exponential();
  return rng.UniformInt(2) == 0 ? y + magnitude : y - magnitude;
}

absl::StatusOr<int64_t> DiscreteLaplaceSample(double y,
                                              const NoiseParams& params,
                                              Rng& rng) {
  if (!IsIntegral(y)) {
    return absl::InvalidArgumentError(absl::StrCat(
        "discrete Laplace needs an integer label, got ", y));
  }
  if (absl::Status s = params.Validate(); !s.ok()) return s;
  const double rate = params.eps / params.sensitivity;  // 1 / b
  const double noise = Geometric(rate, rng) - Geometric(rate, rng);
  return static_cast<int64_t>(y) + static_cast<int64_t>(noise);
}

absl::StatusOr<double> StaircaseSample(double y, const NoiseParams& params,
                                       Rng& rng) {
  if (absl::Status s = params.Validate(); !s.ok()) return s;
  const double gamma =
      params.staircase_gamma.value_or(DefaultStaircaseGamma(params.eps));
  const double delta = params.sensitivity;
  // b / gamma, written so that the default gamma's underflow at large eps
  // cannot produce 0 / 0.
  const double decay_over_gamma =
      params.staircase_gamma.has_value()
          ? std::exp(-params.eps) / gamma
          : std::exp(-params.eps) + std::exp(-0.5 * params.eps);
  const double rung = Geometric(params.eps, rng);
  const double low_odds = 1.0 / (1.0 + (1.0 - gamma) * decay_over_gamma);
  const double offset = rng.Uniform() < low_odds
                            ? rng.Uniform() * gamma * delta
                            : (gamma + rng.Uniform() * (1.0 - gamma)) * delta;
  const double magnitude = rung * delta + offset;
  return rng.UniformInt(2) == 0 ? y + magnitude : y - magnitude;
}

absl::StatusOr<int64_t> DiscreteStaircaseSample(double y,
                                                const NoiseParams& params,
                                                Rng& rng) {
  if (!IsIntegral(y)) {
    return absl::InvalidArgumentError(absl::StrCat(
        "discrete staircase needs an integer label, got ", y));
  }
  if (absl::Status s = params.Validate(); !s.ok()) return s;
  if (!IsIntegral(params.sensitivity) || params.sensitivity < 2.0) {
    return absl::InvalidArgumentError(absl::StrCat(
        "discrete staircase needs an integer sensitivity >= 2, got ",
        params.sensitivity));
  }
  const auto delta = static_cast<int64_t>(params.sensitivity);
  int64_t r;
  if (params.staircase_r.has_value()) {
    r = *params.staircase_r;
  } else {
    const double gamma =
        params.staircase_gamma.value_or(DefaultStaircaseGamma(params.eps));
    r = std::clamp<int64_t>(std::llround(gamma * delta), 1, delta);
  }
  if (r < 1 || r > delta) {
    return absl::InvalidArgumentError(
        absl::StrFormat("staircase r must lie in [1, %d], got %d", delta, r));
  }
  const double decay = std::exp(-params.eps);
  const double low_odds = r / (r + (delta - r) * decay);
  for (;;) {
    const bool negative = rng.UniformInt(2) == 1;
    const double rung = Geometric(params.eps, rng);
    const int64_t offset =
        rng.Uniform() < low_odds
            ? static_cast<int64_t>(rng.UniformInt(r))
            : r + static_cast<int64_t>(rng.UniformInt(delta - r));
    const double magnitude = rung * delta + offset;
    // (sign, 0) is drawn twice as often as any other (sign, magnitude) pair.
    if (magnitude == 0.0 && negative) continue;
    const auto m = static_cast<int64_t>(std::min(magnitude, kMaxMagnitude));
    return static_cast<int64_t>(y) + (negative ? -m : m);
  }
}

absl::StatusOr<double> ExponentialMechanismSample(double y, double lo,
                                                  double hi, double eps,
                                                  Rng& rng) {
  if (!(lo <= hi)) {
    return absl::InvalidArgumentError("exponential mechanism range is empty");
  }
  if (!(y >= lo && y <= hi)) {
    return absl::InvalidArgumentError(absl::StrFormat(
        "label %g lies outside the range [%g, %g]", y, lo, hi));
  }
  if (!(eps > 0.0)) {
    return absl::InvalidArgumentError("exponential mechanism needs eps > 0");
  }
  if (lo == hi) return lo;
  const NoiseParams params{.eps = eps, .sensitivity = 2.0 * (hi - lo)};
  for (int attempt = 0; attempt < kMaxRejections; ++attempt) {
    const double candidate = LaplaceSample(y, params, rng);
    if (candidate >= lo && candidate <= hi) return candidate;
  }
  return absl::ResourceExhaustedError(
      absl::StrCat("exponential mechanism rejected ", kMaxRejections,
                   " Laplace draws"));
}

absl::StatusOr<size_t> RandomizedResponseSample(size_t y, size_t q, double eps,
                                                Rng& rng) {
  if (q == 0 || y >= q) {
    return absl::OutOfRangeError(
        absl::StrCat("category ", y, " is out of range for ", q, " values"));
  }
  if (!(eps >= 0.0)) {
    return absl::InvalidArgumentError("randomized response needs eps >= 0");
  }
  return SampleRrOnBinsIndex(y, q, eps, rng);
}

absl::StatusOr<double> Clip(double value, double lo, double hi) {
  if (lo > hi) {
    return absl::InvalidArgumentError(
        absl::StrFormat("clip range [%g, %g] is empty", lo, hi));
  }
  return std::clamp(value, lo, hi);
}

}  // namespace rrbins
