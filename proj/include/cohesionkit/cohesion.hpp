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
#include <optional>
#include <string>
#include <vector>

#include "cohesionkit/types.hpp"

namespace cohesionkit {

enum class Metric {
  kIrr,
  kXrr,
  kNegentropy,
  kCrossNegentropy,
  kPluralitySize,
  kVotingAgreement,
  kGai,
};

const char* metric_name(Metric metric);
std::optional<Metric> metric_from_name(const std::string& name);
bool metric_is_cross(Metric metric);

// Counts actually used by a metric, for reporting alongside the value.
struct MetricSupport {
  int64_t items_used = 0;
  int64_t values_paired = 0;
  int64_t items_dropped = 0;
};

struct MetricValue {
  Metric metric;
  double value = 0.0;
  MetricSupport support;
};

// ---------------------------------------------------------------------------
// Count kernels. Each row of `counts` holds the per-label rating counts of
// one item; paired kernels take two tables aligned on the same item index.
// These are the single source of the metric formulas; the matrix-level
// operations below and the permutation engine both call them.
// ---------------------------------------------------------------------------

// Krippendorff's alpha for nominal data, pooled-pairs form: observed
// disagreement is the coincidence-weighted fraction of disagreeing rating
// pairs within items (pairs of a unit weighted 1/(m-1)); expected
// disagreement is the probability that two values drawn independently from
// the pooled pairable values disagree. Items with fewer than two ratings are
// excluded and reported in support.items_dropped.
MetricValue alpha_from_counts(const std::vector<std::vector<int32_t>>& counts);

// Cross-replication agreement between two groups over shared items. Observed
// disagreement counts disagreeing (a, b) rating pairs per item, normalized by
// the pair count less min(r, s) — the correction that makes xrr of a matrix
// against a relabeled copy of itself equal alpha on full matrices. Expected
// disagreement comes from the two sides' pooled marginals. Items with a
// rating on only one side, or exactly one on each, are dropped (counted).
// The value is clamped to [-1, 1].
MetricValue xrr_from_counts(const std::vector<std::vector<int32_t>>& a,
                            const std::vector<std::vector<int32_t>>& b);

// Mean over items of (max entropy - response entropy), base 2.
MetricValue negentropy_from_counts(
    const std::vector<std::vector<int32_t>>& counts);

// Mean over shared items of max(0, H_max - symmetrized cross-entropy of the
// two response distributions), each distribution smoothed with pseudocount
// 0.5 per label.
MetricValue cross_negentropy_from_counts(
    const std::vector<std::vector<int32_t>>& a,
    const std::vector<std::vector<int32_t>>& b);

// Mean over items of the modal response fraction.
MetricValue plurality_from_counts(
    const std::vector<std::vector<int32_t>>& counts);

// Alpha over the two groups' per-item majority votes; items where either
// side's vote is tied are dropped (counted in support.items_dropped).
MetricValue voting_agreement_from_counts(
    const std::vector<std::vector<int32_t>>& a,
    const std::vector<std::vector<int32_t>>& b);

// ---------------------------------------------------------------------------
// Matrix-level operations.
// ---------------------------------------------------------------------------

MetricValue krippendorff_alpha(const ResponseMatrix& m);

// a and b must share a response domain; rating pairs are formed on items
// present in both matrices. Disjoint column sets are expected but not
// required (vicarious comparisons may reuse rater ids); overlap sets
// *overlap_warning when the pointer is given.
MetricValue xrr(const ResponseMatrix& a, const ResponseMatrix& b,
                bool* overlap_warning = nullptr);

MetricValue negentropy(const ResponseMatrix& m);

MetricValue cross_negentropy(const ResponseMatrix& a, const ResponseMatrix& b);

MetricValue plurality_size(const ResponseMatrix& m);

struct ItemPlurality {
  std::vector<std::string> modal_labels;
  double fraction = 0.0;
};

// Modal label set and modal fraction for a single item.
ItemPlurality item_plurality(const ResponseMatrix& m,
                             const std::string& item_id);

MetricValue voting_agreement(const ResponseMatrix& a, const ResponseMatrix& b);

// GAI = IRR / XRR from unrounded inputs. Throws UndefinedError when XRR is
// nonpositive or smaller than 1e-9 in magnitude.
MetricValue gai(const MetricValue& irr, const MetricValue& xrr);

}  // namespace cohesionkit
