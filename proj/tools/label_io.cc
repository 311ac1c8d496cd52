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

#include "label_io.h"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>
#include <utility>
#include <vector>

#include "absl/status/status.h"
#include "absl/strings/ascii.h"
#include "absl/strings/numbers.h"
#include "absl/strings/str_cat.h"
#include "absl/strings/str_format.h"
#include "absl/strings/str_split.h"
#include "absl/strings/strip.h"

namespace rrbins::cli {
namespace {

struct Line {
  size_t number;  // 1-based
  std::vector<absl::string_view> fields;
};

std::vector<Line> SplitRows(absl::string_view text) {
  std::vector<Line> rows;
  size_t number = 0;
  for (absl::string_view raw : absl::StrSplit(text, '\n')) {
    ++number;
    absl::string_view line = absl::StripAsciiWhitespace(raw);
    if (line.empty()) continue;
    Line row{number, {}};
    for (absl::string_view f : absl::StrSplit(line, ',')) {
      row.fields.push_back(absl::StripAsciiWhitespace(f));
    }
    rows.push_back(std::move(row));
  }
  return rows;
}

bool ParseNumber(absl::string_view field, double& out) {
  return absl::SimpleAtod(field, &out) && std::isfinite(out);
}

absl::Status LineError(size_t line, absl::string_view what) {
  return absl::InvalidArgumentError(absl::StrCat("line ", line, ": ", what));
}

}  // namespace

absl::StatusOr<std::vector<double>> ParseLabels(absl::string_view text,
                                                const ColumnSelector& column) {
  std::vector<Line> rows = SplitRows(text);
  if (rows.empty()) return absl::InvalidArgumentError("no labels found");

  size_t index = column.index;
  size_t start = 0;
  const Line& first = rows.front();
  if (column.name.has_value()) {
    auto it = std::find(first.fields.begin(), first.fields.end(),
                        absl::string_view(*column.name));
    if (it == first.fields.end()) {
      return LineError(first.number,
                       absl::StrCat("header has no column '", *column.name,
                                    "'"));
    }
    index = static_cast<size_t>(it - first.fields.begin());
    start = 1;
  } else {
    double unused;
    if (index < first.fields.size() &&
        !ParseNumber(first.fields[index], unused)) {
      start = 1;  // header
    }
  }

  std::vector<double> labels;
  labels.reserve(rows.size() - start);
  for (size_t r = start; r < rows.size(); ++r) {
    const Line& row = rows[r];
    if (index >= row.fields.size()) {
      return LineError(row.number, absl::StrCat("missing column ", index));
    }
    double value;
    if (!ParseNumber(row.fields[index], value)) {
      return LineError(row.number, absl::StrCat("'", row.fields[index],
                                                "' is not a finite number"));
    }
    labels.push_back(value);
  }
  if (labels.empty()) return absl::InvalidArgumentError("no labels found");
  return labels;
}

absl::StatusOr<Prior> ParsePrior(absl::string_view text) {
  std::vector<Line> rows = SplitRows(text);
  std::vector<double> labels, probs;
  for (size_t r = 0; r < rows.size(); ++r) {
    const Line& row = rows[r];
    if (row.fields.size() != 2) {
      return LineError(row.number, "expected two fields: label,probability");
    }
    double y, p;
    const bool ok = ParseNumber(row.fields[0], y) &&
                    ParseNumber(row.fields[1], p);
    if (!ok) {
      if (r == 0) continue;  // header
      return LineError(row.number, "label and probability must be numbers");
    }
    if (p < 0.0) return LineError(row.number, "negative probability");
    labels.push_back(y);
    probs.push_back(p);
  }
  if (labels.empty()) return absl::InvalidArgumentError("prior file is empty");
  double total = 0.0;
  for (double p : probs) total += p;
  if (std::abs(total - 1.0) > 1e-6) {
    return absl::InvalidArgumentError(
        absl::StrFormat("probabilities sum to %.17g, not 1", total));
  }

  auto set = LabelSet::Create(labels);
  if (!set.ok()) return set.status();
  if (set->size() != labels.size()) {
    return absl::InvalidArgumentError("prior file repeats a label");
  }
  // Reorder the probabilities to the sorted label order.
  std::vector<double> sorted(labels.size());
  for (size_t i = 0; i < labels.size(); ++i) {
    sorted[*set->IndexOf(labels[i])] = probs[i];
  }
  return Prior::Create(*std::move(set), sorted);
}

absl::StatusOr<std::string> ReadFile(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) return absl::NotFoundError(absl::StrCat("cannot open ", path));
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

absl::Status WriteFile(const std::string& path, absl::string_view contents) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) {
    return absl::PermissionDeniedError(absl::StrCat("cannot write ", path));
  }
  out.write(contents.data(), static_cast<std::streamsize>(contents.size()));
  if (!out) return absl::DataLossError(absl::StrCat("short write to ", path));
  return absl::OkStatus();
}

std::string FormatLabels(absl::Span<const double> values) {
  std::string out;
  out.reserve(values.size() * 8);
  for (double v : values) absl::StrAppendFormat(&out, "%.17g\n", v);
  return out;
}

}  // namespace rrbins::cli
