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

// Plain-text label and prior files.

#ifndef RRBINS_TOOLS_LABEL_IO_H_
#define RRBINS_TOOLS_LABEL_IO_H_

#include <optional>
#include <string>
#include <vector>

#include "absl/status/statusor.h"
#include "absl/strings/string_view.h"
#include "absl/types/span.h"
#include "rrbins/core.h"

namespace rrbins::cli {

// Selects one field of a comma-separated row, by header name or by
// zero-based index.
struct ColumnSelector {
  std::optional<std::string> name;
  size_t index = 0;
};

// One numeric label per line, or comma-separated rows with `column` picking
// the field. A single leading header line is detected when its field does
// not parse as a number. Blank lines are skipped. Errors name the 1-based
// line number.
absl::StatusOr<std::vector<double>> ParseLabels(absl::string_view text,
                                                const ColumnSelector& column);

// Rows of "label,probability" with an optional header. Probabilities must
// be non-negative and sum to 1 within 1e-6.
absl::StatusOr<Prior> ParsePrior(absl::string_view text);

// Whole file contents; NotFound when the file cannot be opened.
absl::StatusOr<std::string> ReadFile(const std::string& path);
absl::Status WriteFile(const std::string& path, absl::string_view contents);

// One value per line with 17 significant digits.
std::string FormatLabels(absl::Span<const double> values);

}  // namespace rrbins::cli

#endif  // RRBINS_TOOLS_LABEL_IO_H_
