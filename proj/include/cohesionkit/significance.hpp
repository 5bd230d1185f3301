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

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "cohesionkit/cohesion.hpp"
#include "cohesionkit/types.hpp"

namespace cohesionkit {

// A rater group versus either the complement of the group (the default used
// by the paper-style tables) or an explicit target group, with the
// perspective applied on each side.
struct GroupComparison {
  GroupSpec group;
  std::optional<GroupSpec> target;  // nullopt: all raters not in group
  Perspective group_perspective = Perspective::Self();
  Perspective other_perspective = Perspective::Self();
  std::string label;

  static GroupComparison versus_complement(GroupSpec group);
  static GroupComparison vicarious(GroupSpec source, GroupSpec target);
};

struct PermutationOptions {
  int trials = 1000;
  uint64_t seed = 0;
  double level = 0.05;
  // Attributes shuffled jointly as one tuple. Empty: every profile attribute.
  std::vector<std::string> attributes;
};

struct PermutationResult {
  double observed = 0.0;
  std::vector<double> null_samples;  // attempt order
  double median_null = 0.0;
  double frac_greater = 0.0;  // #{null >= observed} / effective
  double frac_less = 0.0;     // #{null <= observed} / effective
  double p_value = 1.0;       // min of the two one-sided fractions
  bool direction_up = false;  // observed > median_null (ties count as Down)
  bool median_tie = false;
  bool significant = false;
  uint64_t seed = 0;
  int trials = 0;            // requested
  int effective_trials = 0;  // null samples actually collected
  int failed_attempts = 0;
  bool shortfall_warning = false;
};

// Returns a corpus whose rater profiles carry the listed attributes
// reassigned uniformly at random among raters, shuffled together as one
// tuple (marginal and intersectional tuple counts are preserved).
// Deterministic given the seed. Throws ConfigError on unknown attributes.
Corpus permute_attributes(const Corpus& corpus,
                          const std::vector<std::string>& attributes,
                          uint64_t seed);

// The permutation of {0..n-1} used by permute_attributes for this seed;
// position i receives the tuple of rater perm[i].
std::vector<size_t> permutation_of_indices(size_t n, uint64_t seed);

// Sub-seed for one attempt, derived from the master seed by attempt index so
// results are independent of evaluation order.
uint64_t attempt_seed(uint64_t master_seed, int attempt);

// Why a metric could not be computed; `kind` preserves the error class so
// callers can rethrow or render it.
struct CellError {
  enum class Kind {
    kDegenerate,
    kInsufficientData,
    kUndefined,
    kUnstableNull,
    kOther,
  };
  Kind kind = Kind::kOther;
  std::string message;
};

// Observed metric values for one comparison. Metrics that cannot be computed
// land in `errors` instead (keyed by metric), mirroring the per-cell error
// tolerance of the report tables.
struct ComparisonEvaluation {
  std::map<Metric, MetricValue> values;
  std::map<Metric, CellError> errors;
};
ComparisonEvaluation evaluate_comparison(const Corpus& corpus,
                                         const GroupComparison& comparison,
                                         const std::vector<Metric>& metrics);

// Permutation test for every requested metric of one comparison, sharing the
// permuted corpora across metrics. Degenerate trials are resampled from
// later attempts up to a 10x trials attempt budget; metrics whose effective
// sample drops below trials/2, or whose observed value is uncomputable,
// report an error entry instead of a result.
struct ComparisonTests {
  std::map<Metric, PermutationResult> results;
  std::map<Metric, CellError> errors;
};
ComparisonTests run_comparison_tests(const Corpus& corpus,
                                     const GroupComparison& comparison,
                                     const std::vector<Metric>& metrics,
                                     const PermutationOptions& options);

// Single-metric wrapper; throws on observed-metric errors and unstable nulls.
PermutationResult permutation_test(const Corpus& corpus,
                                   const GroupComparison& comparison,
                                   Metric metric,
                                   const PermutationOptions& options);

// Median null values for a comparisons x metrics grid, one permutation run
// per comparison shared across its metrics.
struct MedianNullTable {
  std::vector<std::string> row_labels;
  std::vector<Metric> metrics;
  // rows x metrics; nullopt where the cell errored.
  std::vector<std::vector<std::optional<double>>> medians;
};
MedianNullTable median_null_table(const Corpus& corpus,
                                  const std::vector<GroupComparison>& comparisons,
                                  const std::vector<Metric>& metrics,
                                  const PermutationOptions& options);

}  // namespace cohesionkit
