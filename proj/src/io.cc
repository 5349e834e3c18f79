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

#include "datasel/io.h"

#include <charconv>
#include <filesystem>
#include <sstream>

#include "datasel/error.h"
#include "json.hpp"

namespace datasel {

namespace {

using Json = nlohmann::ordered_json;

std::string Dump(const Json& doc) { return doc.dump(2) + "\n"; }

Json OptionalNumber(const std::optional<double>& v) {
  return v ? Json(*v) : Json(nullptr);
}

std::string OptionalCell(const std::optional<double>& v) {
  return v ? FormatDouble(*v) : std::string();
}

}  // namespace

std::string FormatSelectionJson(const SelectionResult& result) {
  Json doc;
  doc["strategy"] = result.strategy_id;
  doc["seed"] = result.seed;
  doc["order"] = result.order;
  doc["objective_trajectory"] = result.objective_trajectory;
  doc["scores"] = result.scores ? Json(*result.scores) : Json(nullptr);
  doc["converged"] = result.converged;
  doc["iterations"] = result.iterations;
  doc["beta_floor_engaged"] = result.beta_floor_engaged;
  return Dump(doc);
}

SelectionResult ParseSelectionJson(const std::string& text) {
  try {
    const Json doc = Json::parse(text);
    SelectionResult result;
    result.order = doc.at("order").get<std::vector<int>>();
    if (doc.contains("objective_trajectory")) {
      result.objective_trajectory =
          doc.at("objective_trajectory").get<std::vector<double>>();
    }
    if (doc.contains("scores") && !doc.at("scores").is_null()) {
      result.scores = doc.at("scores").get<std::vector<double>>();
    }
    if (doc.contains("strategy")) {
      result.strategy_id = doc.at("strategy").get<std::string>();
    }
    if (doc.contains("seed")) result.seed = doc.at("seed").get<std::uint64_t>();
    if (doc.contains("converged")) result.converged = doc.at("converged").get<bool>();
    if (doc.contains("iterations")) result.iterations = doc.at("iterations").get<int>();
    if (doc.contains("beta_floor_engaged")) {
      result.beta_floor_engaged = doc.at("beta_floor_engaged").get<bool>();
    }
    return result;
  } catch (const nlohmann::json::exception& e) {
    throw InvalidArgument(std::string("selection json: ") + e.what());
  }
}

std::string FormatIndices(const std::vector<int>& indices) {
  std::string out;
  for (int i : indices) out += std::to_string(i) + "\n";
  return out;
}

std::vector<int> ParseIndices(const std::string& text) {
  std::vector<int> indices;
  std::istringstream in(text);
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto first = line.find_first_not_of(" \t\r");
    if (first == std::string::npos) continue;
    const auto last = line.find_last_not_of(" \t\r");
    const std::string_view cell(line.data() + first, last - first + 1);
    int value = 0;
    const auto [ptr, ec] =
        std::from_chars(cell.data(), cell.data() + cell.size(), value);
    if (ec != std::errc() || ptr != cell.data() + cell.size()) {
      throw InvalidArgument("indices: line " + std::to_string(line_no) +
                            " is not an integer");
    }
    indices.push_back(value);
  }
  return indices;
}

std::vector<int> ReadSelectionFile(const std::string& path) {
  if (!std::filesystem::is_regular_file(path)) {
    throw InvalidArgument("selection file '" + path + "' not found");
  }
  const std::string text = ReadFile(path);
  const auto first = text.find_first_not_of(" \t\r\n");
  if (first != std::string::npos && text[first] == '{') {
    return ParseSelectionJson(text).order;
  }
  return ParseIndices(text);
}

std::string FormatBoundReportJson(const BoundReport& report) {
  Json doc;
  doc["ted_half"] = report.ted_half;
  doc["trace_k"] = report.trace_k;
  doc["eps_h_per_class"] = report.eps_h_per_class;
  doc["null_mass_per_class"] = report.null_mass_per_class;
  doc["first_term"] = report.first_term;
  doc["total"] = report.total;
  doc["rkhs_variant"] = OptionalNumber(report.rkhs_variant);
  doc["clamped_count"] = report.clamped_count;
  doc["jitter"] = report.jitter;
  return Dump(doc);
}

std::string FormatPowerProfileCsv(const PowerProfile& profile) {
  std::string out = "index,value\n";
  for (Eigen::Index i = 0; i < profile.values.size(); ++i) {
    out += std::to_string(i) + "," + FormatDouble(profile.values(i)) + "\n";
  }
  return out;
}

std::string FormatSweepCsv(const std::vector<SweepRecord>& records) {
  std::string out =
      "strategy,fraction,m,ted_half_trace,facility_value,error_rate,delta_tv,"
      "bound_total\n";
  for (const SweepRecord& r : records) {
    out += r.strategy_id + "," + FormatDouble(r.fraction) + "," +
           std::to_string(r.m) + "," + FormatDouble(r.ted_half_trace) + "," +
           FormatDouble(r.facility_value) + "," + FormatDouble(r.error_rate) +
           "," + OptionalCell(r.delta_tv) + "," + OptionalCell(r.bound_total) +
           "\n";
  }
  return out;
}

std::vector<StrategySummary> SummarizeSweep(
    const std::vector<SweepRecord>& records) {
  std::vector<StrategySummary> summary;
  std::vector<std::vector<double>> traces, errors;
  for (const SweepRecord& r : records) {
    size_t g = 0;
    while (g < summary.size() && summary[g].strategy_id != r.strategy_id) ++g;
    if (g == summary.size()) {
      summary.push_back(StrategySummary{r.strategy_id, 0, std::nullopt, {}});
      traces.emplace_back();
      errors.emplace_back();
    }
    ++summary[g].points;
    traces[g].push_back(r.ted_half_trace);
    errors[g].push_back(r.error_rate);
    if (r.empty_unlabelled) {
      summary[g].empty_unlabelled_fractions.push_back(r.fraction);
    }
  }
  for (size_t g = 0; g < summary.size(); ++g) {
    try {
      summary[g].spearman = Spearman(traces[g], errors[g]);
    } catch (const InvalidArgument&) {
      // Fewer than three points or a constant column: left undefined.
    }
  }
  return summary;
}

std::string FormatSummaryJson(const std::vector<StrategySummary>& summary) {
  Json strategies = Json::array();
  for (const StrategySummary& s : summary) {
    Json entry;
    entry["strategy"] = s.strategy_id;
    entry["points"] = s.points;
    entry["spearman_trace_error"] = OptionalNumber(s.spearman);
    entry["empty_unlabelled_fractions"] = s.empty_unlabelled_fractions;
    strategies.push_back(entry);
  }
  Json doc;
  doc["strategies"] = strategies;
  return Dump(doc);
}

}  // namespace datasel
