// Copyright 2026 The Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// Text formats for results. Every formatter is a pure function of its input:
// no timestamps, fixed key order, fixed float formatting.

#ifndef DATASEL_IO_H_
#define DATASEL_IO_H_

#include <optional>
#include <string>
#include <vector>

#include "datasel/approx.h"
#include "datasel/eval.h"
#include "datasel/format.h"
#include "datasel/select.h"

namespace datasel {

std::string FormatSelectionJson(const SelectionResult& result);
SelectionResult ParseSelectionJson(const std::string& text);

// One index per line.
std::string FormatIndices(const std::vector<int>& indices);
std::vector<int> ParseIndices(const std::string& text);

// Reads the selected indices from either a selection JSON document (its
// "order") or a plain index list. Throws InvalidArgument if the file is
// missing or malformed.
std::vector<int> ReadSelectionFile(const std::string& path);

std::string FormatBoundReportJson(const BoundReport& report);

// "index,value" rows.
std::string FormatPowerProfileCsv(const PowerProfile& profile);

// strategy,fraction,m,ted_half_trace,facility_value,error_rate,delta_tv,
// bound_total. Absent optional values are empty cells.
std::string FormatSweepCsv(const std::vector<SweepRecord>& records);

struct StrategySummary {
  std::string strategy_id;
  int points = 0;
  // Spearman(ted_half_trace, error_rate); absent when undefined.
  std::optional<double> spearman;
  std::vector<double> empty_unlabelled_fractions;
};

// Groups records by strategy in order of first appearance.
std::vector<StrategySummary> SummarizeSweep(
    const std::vector<SweepRecord>& records);
std::string FormatSummaryJson(const std::vector<StrategySummary>& summary);

}  // namespace datasel

#endif  // DATASEL_IO_H_
