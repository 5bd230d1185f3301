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
#include "cohesionkit/crowdtruth.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <set>

#include "cohesionkit/errors.hpp"

namespace cohesionkit {

namespace {

// Indexed view of the Self annotations: items and raters renumbered densely,
// one label per (item, rater).
struct SelfTask {
  std::vector<std::string> rater_ids;
  std::vector<std::string> item_ids;
  // per item: (rater index, label) sorted by rater index
  std::vector<std::vector<std::pair<int, int>>> item_ratings;
  // per rater: (item index, label) sorted by item index
  std::vector<std::vector<std::pair<int, int>>> rater_ratings;
  int label_count = 0;
};

SelfTask build_task(const Corpus& corpus) {
  std::map<std::string, int> rater_index, item_index;
  SelfTask task;
  task.label_count = corpus.domain.label_count();
  for (const auto& rec : corpus.records) {
    if (!rec.perspective.self) continue;
    if (!rater_index.count(rec.rater_id)) {
      rater_index[rec.rater_id] = static_cast<int>(task.rater_ids.size());
      task.rater_ids.push_back(rec.rater_id);
    }
    if (!item_index.count(rec.item_id)) {
      item_index[rec.item_id] = static_cast<int>(task.item_ids.size());
      task.item_ids.push_back(rec.item_id);
    }
  }
  task.item_ratings.resize(task.item_ids.size());
  task.rater_ratings.resize(task.rater_ids.size());
  for (const auto& rec : corpus.records) {
    if (!rec.perspective.self) continue;
    int r = rater_index[rec.rater_id];
    int i = item_index[rec.item_id];
    task.item_ratings[i].emplace_back(r, rec.label);
    task.rater_ratings[r].emplace_back(i, rec.label);
  }
  for (auto& v : task.item_ratings) std::sort(v.begin(), v.end());
  for (auto& v : task.rater_ratings) std::sort(v.begin(), v.end());
  return task;
}

}  // namespace

CrowdTruthScores crowdtruth_scores(const Corpus& corpus, double tol,
                                   int max_iter) {
  SelfTask task = build_task(corpus);
  const int R = static_cast<int>(task.rater_ids.size());
  const int I = static_cast<int>(task.item_ids.size());
  const int L = task.label_count;

  bool any_pair = false;
  for (const auto& ratings : task.item_ratings) {
    if (ratings.size() >= 2) {
      any_pair = true;
      break;
    }
  }
  if (!any_pair) {
    throw InsufficientDataError("no item has two or more Self ratings");
  }

  // Static pairwise structure: shared item count and agreement count per
  // co-rater pair. Only the quality weights change across iterations.
  std::map<std::pair<int, int>, std::pair<int, int>> pair_stats;
  for (const auto& ratings : task.item_ratings) {
    for (size_t a = 0; a < ratings.size(); ++a) {
      for (size_t b = a + 1; b < ratings.size(); ++b) {
        auto key = std::make_pair(ratings[a].first, ratings[b].first);
        auto& [shared, agree] = pair_stats[key];
        shared++;
        if (ratings[a].second == ratings[b].second) agree++;
      }
    }
  }
  std::vector<std::vector<std::pair<int, double>>> coworkers(R);
  std::set<int> connected;
  for (const auto& [key, stats] : pair_stats) {
    double frac = static_cast<double>(stats.second) / stats.first;
    coworkers[key.first].emplace_back(key.second, frac);
    coworkers[key.second].emplace_back(key.first, frac);
    connected.insert(key.first);
    connected.insert(key.second);
  }

  std::vector<double> wqs(R, 1.0), uqs(I, 1.0);
  std::vector<double> aqs(L, 1.0);
  std::vector<double> unit(L, 0.0);

  CrowdTruthScores out;
  for (int r = 0; r < R; ++r) {
    if (!connected.count(r)) out.isolated_raters.push_back(task.rater_ids[r]);
  }

  int iter = 0;
  double delta = 0.0;
  std::vector<std::vector<double>> unit_vectors(I, std::vector<double>(L));
  std::vector<double> new_wqs(R), new_uqs(I), new_aqs(L);
  for (iter = 1; iter <= max_iter; ++iter) {
    // Unit vectors: WQS-weighted sums of one-hot worker vectors.
    for (int i = 0; i < I; ++i) {
      std::fill(unit_vectors[i].begin(), unit_vectors[i].end(), 0.0);
      for (const auto& [r, label] : task.item_ratings[i]) {
        unit_vectors[i][label] += wqs[r];
      }
    }

    // UQS: quality-weighted mean pairwise cosine on the unit. One-hot
    // cosines reduce to same-label indicators.
    for (int i = 0; i < I; ++i) {
      const auto& ratings = task.item_ratings[i];
      double num = 0.0, den = 0.0;
      for (size_t a = 0; a < ratings.size(); ++a) {
        for (size_t b = a + 1; b < ratings.size(); ++b) {
          double w = wqs[ratings[a].first] * wqs[ratings[b].first];
          den += w;
          if (ratings[a].second == ratings[b].second) num += w;
        }
      }
      new_uqs[i] = den > 0.0 ? num / den : 0.0;
    }

    // WQS: worker-unit agreement x worker-worker agreement.
    for (int r = 0; r < R; ++r) {
      double wua_num = 0.0, wua_den = 0.0;
      for (const auto& [i, label] : task.rater_ratings[r]) {
        unit = unit_vectors[i];
        unit[label] -= wqs[r];  // exclude the worker's own contribution
        double norm_sq = 0.0;
        for (double x : unit) norm_sq += x * x;
        double cosine =
            norm_sq > 0.0 ? unit[label] / std::sqrt(norm_sq) : 0.0;
        wua_num += new_uqs[i] * cosine;
        wua_den += new_uqs[i];
      }
      double wua = wua_den > 0.0 ? wua_num / wua_den : 0.0;

      double wwa_num = 0.0, wwa_den = 0.0;
      for (const auto& [other, frac] : coworkers[r]) {
        wwa_num += wqs[other] * frac;
        wwa_den += wqs[other];
      }
      double wwa = wwa_den > 0.0 ? wwa_num / wwa_den : 0.0;
      new_wqs[r] = wua * wwa;
    }

    // AQS: quality-weighted probability that a co-worker agrees with a
    // worker who selected the label.
    for (int l = 0; l < L; ++l) new_aqs[l] = 0.0;
    std::vector<double> aqs_den(L, 0.0);
    for (int i = 0; i < I; ++i) {
      const auto& ratings = task.item_ratings[i];
      for (size_t a = 0; a < ratings.size(); ++a) {
        for (size_t b = 0; b < ratings.size(); ++b) {
          if (a == b) continue;
          int label = ratings[a].second;
          double w = new_wqs[ratings[a].first] * new_wqs[ratings[b].first];
          aqs_den[label] += w;
          if (ratings[b].second == label) new_aqs[label] += w;
        }
      }
    }
    for (int l = 0; l < L; ++l) {
      new_aqs[l] = aqs_den[l] > 0.0 ? new_aqs[l] / aqs_den[l] : 0.0;
    }

    delta = 0.0;
    for (int r = 0; r < R; ++r) delta = std::max(delta, std::abs(new_wqs[r] - wqs[r]));
    for (int i = 0; i < I; ++i) delta = std::max(delta, std::abs(new_uqs[i] - uqs[i]));
    for (int l = 0; l < L; ++l) delta = std::max(delta, std::abs(new_aqs[l] - aqs[l]));
    wqs = new_wqs;
    uqs = new_uqs;
    aqs = new_aqs;
    if (delta < tol) break;
  }

  out.iterations = std::min(iter, max_iter);
  out.final_delta = delta;
  out.converged = delta < tol;
  for (int r = 0; r < R; ++r) out.wqs[task.rater_ids[r]] = wqs[r];
  for (int i = 0; i < I; ++i) out.uqs[task.item_ids[i]] = uqs[i];
  for (int l = 0; l < L; ++l) out.aqs[corpus.domain.labels[l]] = aqs[l];
  for (const auto& profile : corpus.raters) {
    if (!out.wqs.count(profile.rater_id)) {
      out.unscored_raters.push_back(profile.rater_id);
    }
  }
  return out;
}

std::pair<Corpus, FilterImpactReport> filter_by_wqs(
    const Corpus& corpus, const CrowdTruthScores& scores, double threshold) {
  if (threshold < 0.0 || threshold > 1.0) {
    throw ConfigError("wqs threshold must lie in [0, 1]");
  }
  FilterImpactReport report;
  std::set<std::string> removed;
  for (const auto& profile : corpus.raters) {
    auto it = scores.wqs.find(profile.rater_id);
    if (it == scores.wqs.end()) {
      report.retained_unscored.push_back(profile.rater_id);
      continue;
    }
    if (it->second < threshold) {
      removed.insert(profile.rater_id);
      for (const auto& attribute : corpus.attribute_names) {
        report.removed_by_attribute[attribute]
                                   [profile.attribute_or_na(attribute)]++;
      }
    }
  }
  report.removed_raters = static_cast<int64_t>(removed.size());

  std::vector<RaterProfile> raters;
  for (const auto& profile : corpus.raters) {
    if (!removed.count(profile.rater_id)) raters.push_back(profile);
  }
  std::vector<AnnotationRecord> records;
  std::set<std::string> touched_items;
  for (const auto& rec : corpus.records) {
    if (removed.count(rec.rater_id)) {
      report.removed_annotations++;
      touched_items.insert(rec.item_id);
    } else {
      records.push_back(rec);
    }
  }
  report.items_affected = static_cast<int64_t>(touched_items.size());
  Corpus filtered = Corpus::build(corpus.domain, std::move(raters),
                                  std::move(records), corpus.attribute_names);
  return {std::move(filtered), std::move(report)};
}

std::vector<HistogramBin> wqs_histogram(const CrowdTruthScores& scores,
                                        int bins) {
  if (bins < 1) throw ConfigError("histogram needs at least one bin");
  if (scores.wqs.empty()) throw InsufficientDataError("no WQS scores");
  std::vector<HistogramBin> out(bins);
  for (int b = 0; b < bins; ++b) {
    out[b].lo = static_cast<double>(b) / bins;
    out[b].hi = static_cast<double>(b + 1) / bins;
  }
  for (const auto& [rater, score] : scores.wqs) {
    int b = std::min(static_cast<int>(score * bins), bins - 1);
    b = std::max(b, 0);
    out[b].count++;
  }
  return out;
}

void save_wqs(const CrowdTruthScores& scores, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write " + path);
  out << "rater_id,wqs\n";
  out.precision(17);
  for (const auto& [rater, score] : scores.wqs) {
    out << rater << ',' << score << '\n';
  }
}

void save_histogram(const std::vector<HistogramBin>& bins,
                    const std::string& path) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write " + path);
  out << "bin_lo,bin_hi,count\n";
  out.precision(17);
  for (const auto& bin : bins) {
    out << bin.lo << ',' << bin.hi << ',' << bin.count << '\n';
  }
}

}  // namespace cohesionkit
