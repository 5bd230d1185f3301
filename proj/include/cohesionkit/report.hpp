/*
 * Copyright 2026 The cohesionkit Authors.
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     https://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */
#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "cohesionkit/corpus.hpp"
#include "cohesionkit/crowdtruth.hpp"
#include "cohesionkit/significance.hpp"
#include "cohesionkit/types.hpp"

namespace cohesionkit {

// Fixed column order of every rendered table.
inline constexpr std::array<Metric, 7> kTableMetrics = {
    Metric::kIrr,           Metric::kXrr,
    Metric::kNegentropy,    Metric::kCrossNegentropy,
    Metric::kPluralitySize, Metric::kVotingAgreement,
    Metric::kGai,
};

// Everything a full run needs, parsed from one JSON config file.
struct AnalysisConfig {
  ResponseDomain domain;
  std::string annotations_path;
  std::string profiles_path;
  LoadSchema schema;

  std::vector<GroupSpec> groups;
  std::vector<std::string> standard_comparisons;  // group names
  struct VicariousPair {
    std::string source;
    std::string target;
  };
  std::vector<VicariousPair> vicarious_comparisons;

  std::vector<Metric> metrics;  // subset of kTableMetrics; default all
  int trials = 1000;
  uint64_t seed = 0;
  double significance_level = 0.05;
  std::vector<std::string> permutation_attributes;  // empty: all, joint

  double wqs_threshold = 0.1;
  double crowdtruth_tol = 1e-6;
  int crowdtruth_max_iter = 50;

  struct Sampling {
    int batch_size = 0;
    int n_batches = 0;
    int raters_per_batch = 0;
    uint64_t seed = 0;
  };
  std::optional<Sampling> sampling;
  std::optional<std::string> drop_multi_affiliation_attribute;

  std::string output_dir = ".";
  std::vector<std::string> output_formats = {"markdown"};

  // Parses and validates; throws ConfigError / IoError.
  static AnalysisConfig from_file(const std::string& path);
  static AnalysisConfig from_json_text(const std::string& text);

  const GroupSpec& find_group(const std::string& name) const;
  void validate() const;
};

// Loads the corpus and applies the configured preparation steps
// (multi-affiliation drop, batch sampling).
Corpus load_and_prepare(const AnalysisConfig& config);

struct TableCell {
  bool ok = false;
  double value = 0.0;
  bool direction_up = false;
  bool significant = false;
  double p_value = 1.0;
  double median_null = 0.0;
  std::string error;  // render as em-dash when set
  // Only set in paired before/after tables.
  std::optional<bool> significant_before;
  std::optional<bool> significant_after;
};

struct TableRow {
  std::string label;
  std::array<TableCell, 7> cells;
};

struct CohesionTable {
  std::string title;
  std::vector<TableRow> rows;
  // Mean absolute before/after difference per metric column.
  std::optional<std::array<std::optional<double>, 7>> delta;

  bool any_cell_errors() const;
};

// In-group metrics per configured group, cross-group metrics against the
// group's complement, GAI and permutation flags per cell. Cell failures are
// recorded in the cell, not thrown.
CohesionTable run_personal_analysis(const Corpus& corpus,
                                    const AnalysisConfig& config);

// Rows "G -> Z (v Z)": in-group metrics on G's vicarious matrix for Z,
// cross-group metrics against Z's Self matrix.
CohesionTable run_vicarious_analysis(const Corpus& corpus,
                                     const AnalysisConfig& config);

struct FilteredAnalysis {
  CrowdTruthScores scores;
  FilterImpactReport impact;
  CohesionTable personal_before;
  CohesionTable personal_after;  // carries the delta footer and sig markers
  std::optional<CohesionTable> vicarious_before;
  std::optional<CohesionTable> vicarious_after;
};

// CrowdTruth scoring, WQS filtering, re-run of the configured analyses and
// the before/after delta rows.
FilteredAnalysis run_filtered_analysis(const Corpus& corpus,
                                       const AnalysisConfig& config);

enum class RenderFormat { kMarkdown, kCsv, kJson };
RenderFormat render_format_from_name(const std::string& name);

std::string render(const CohesionTable& table, RenderFormat format);

// JSON rendering round-trips through this.
CohesionTable table_from_json_text(const std::string& text);

// Writes `basename`.{md,csv,json} per requested format into dir.
void write_table(const CohesionTable& table, const std::string& dir,
                 const std::string& basename,
                 const std::vector<std::string>& formats);

std::string render_impact(const FilterImpactReport& impact,
                          RenderFormat format);

}  // namespace cohesionkit
