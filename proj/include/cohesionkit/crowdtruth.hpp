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
#include <string>
#include <utility>
#include <vector>

#include "cohesionkit/types.hpp"

namespace cohesionkit {

// Converged quality scores for the closed (single-choice nominal) task:
// worker (WQS), unit (UQS) and annotation (AQS) quality, all in [0, 1].
struct CrowdTruthScores {
  std::map<std::string, double> wqs;  // rater_id -> score
  std::map<std::string, double> uqs;  // item_id -> score
  std::map<std::string, double> aqs;  // label -> score
  int iterations = 0;
  double final_delta = 0.0;
  bool converged = false;
  // Raters sharing fewer than 2 items with anyone; their worker-worker
  // agreement is pinned to 0 rather than undefined.
  std::vector<std::string> isolated_raters;
  // Raters with no Self annotations; they receive no WQS.
  std::vector<std::string> unscored_raters;
};

// Iterative mutual weighting over Self annotations: unit vectors are
// WQS-weighted sums of one-hot worker vectors, UQS the quality-weighted mean
// pairwise worker cosine per unit, and WQS the product of worker-unit
// agreement (cosine against the unit vector minus the worker's own
// contribution, UQS-weighted) and worker-worker agreement (quality-weighted
// mean pairwise cosine with co-workers). Stops when the largest score change
// drops below tol, or flags non-convergence after max_iter iterations.
// Throws InsufficientDataError when no item has two raters.
CrowdTruthScores crowdtruth_scores(const Corpus& corpus, double tol = 1e-6,
                                   int max_iter = 50);

// Shape of the paper-style "data impacted by filtering" summary.
struct FilterImpactReport {
  int64_t removed_raters = 0;
  int64_t removed_annotations = 0;  // all perspectives
  int64_t items_affected = 0;       // items whose rating count changed
  // attribute -> value -> removed rater count
  std::map<std::string, std::map<std::string, int64_t>> removed_by_attribute;
  std::vector<std::string> retained_unscored;
};

// Removes raters with WQS < threshold together with all their records
// (vicarious ones included). Raters without a WQS are retained and listed.
// Throws ConfigError unless threshold lies in [0, 1].
std::pair<Corpus, FilterImpactReport> filter_by_wqs(
    const Corpus& corpus, const CrowdTruthScores& scores, double threshold);

struct HistogramBin {
  double lo = 0.0;
  double hi = 0.0;
  int64_t count = 0;
};

// WQS histogram over [0, 1]; the last bin includes 1.0.
// Throws ConfigError when bins < 1, InsufficientDataError on empty scores.
std::vector<HistogramBin> wqs_histogram(const CrowdTruthScores& scores,
                                        int bins);

// Writes (rater_id, wqs) rows and (bin_lo, bin_hi, count) rows as
// comma-separated files.
void save_wqs(const CrowdTruthScores& scores, const std::string& path);
void save_histogram(const std::vector<HistogramBin>& bins,
                    const std::string& path);

}  // namespace cohesionkit
