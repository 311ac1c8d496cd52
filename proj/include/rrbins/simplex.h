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

// Small dense two-phase simplex solver with Bland's anti-cycling rule.
// Intended for verification-sized problems (a few hundred variables).

#ifndef RRBINS_SIMPLEX_H_
#define RRBINS_SIMPLEX_H_

#include <cstddef>
#include <vector>

namespace rrbins {

enum class LpStatus { kOptimal, kInfeasible, kUnbounded, kIterationLimit };

const char* LpStatusName(LpStatus status);

// minimize c.x  subject to  E x = e,  U x <= u,  x >= 0.
struct LinearProgram {
  struct Row {
    std::vector<double> coeffs;
    double rhs = 0.0;
  };
  size_t num_vars = 0;
  std::vector<double> objective;
  std::vector<Row> equalities;
  std::vector<Row> upper_bounds;
};

struct LpResult {
  LpStatus status = LpStatus::kIterationLimit;
  std::vector<double> x;
  double objective = 0.0;
  size_t iterations = 0;
};

LpResult SolveDenseSimplex(const LinearProgram& lp,
                           size_t max_iterations = 200000);

}  // namespace rrbins

#endif  // RRBINS_SIMPLEX_H_
