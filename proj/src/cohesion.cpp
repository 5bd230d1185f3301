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
#include "cohesionkit/cohesion.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include "cohesionkit/errors.hpp"

namespace cohesionkit {

namespace {

constexpr double kXrrEpsilon = 1e-9;

int64_t total(const std::vector<int32_t>& counts) {
  int64_t n = 0;
  for (int32_t c : counts) n += c;
  return n;
}

double entropy_bits(const std::vector<double>& p) {
  double h = 0.0;
  for (double x : p) {
    if (x > 0.0) h -= x * std::log2(x);
  }
  return h;
}

// Aligns two matrices on their shared items and returns per-item label
// counts for each side, in shared-item order.
std::pair<std::vector<std::vector<int32_t>>, std::vector<std::vector<int32_t>>>
aligned_counts(const ResponseMatrix& a, const ResponseMatrix& b) {
  if (a.domain.labels != b.domain.labels) {
    throw ConfigError("matrices have different response domains");
  }
  std::vector<std::vector<int32_t>> ca, cb;
  size_t i = 0, j = 0;
  while (i < a.items.size() && j < b.items.size()) {
    if (a.items[i] < b.items[j]) {
      ++i;
    } else if (b.items[j] < a.items[i]) {
      ++j;
    } else {
      ca.push_back(a.row_label_counts(i));
      cb.push_back(b.row_label_counts(j));
      ++i;
      ++j;
    }
  }
  return {std::move(ca), std::move(cb)};
}

std::vector<std::vector<int32_t>> matrix_counts(const ResponseMatrix& m) {
  std::vector<std::vector<int32_t>> counts;
  counts.reserve(m.items.size());
  for (size_t row = 0; row < m.items.size(); ++row) {
    counts.push_back(m.row_label_counts(row));
  }
  return counts;
}

// Smoothed response distribution: pseudocount 0.5 per label.
std::vector<double> jeffreys_smooth(const std::vector<int32_t>& counts) {
  double m = static_cast<double>(total(counts));
  double denom = m + 0.5 * static_cast<double>(counts.size());
  std::vector<double> p(counts.size());
  for (size_t i = 0; i < counts.size(); ++i) {
    p[i] = (static_cast<double>(counts[i]) + 0.5) / denom;
  }
  return p;
}

}  // namespace

const char* metric_name(Metric metric) {
  switch (metric) {
    case Metric::kIrr: return "irr";
    case Metric::kXrr: return "xrr";
    case Metric::kNegentropy: return "negentropy";
    case Metric::kCrossNegentropy: return "cross_negentropy";
    case Metric::kPluralitySize: return "plurality_size";
    case Metric::kVotingAgreement: return "voting_agreement";
    case Metric::kGai: return "gai";
  }
  return "unknown";
}

std::optional<Metric> metric_from_name(const std::string& name) {
  for (Metric m : {Metric::kIrr, Metric::kXrr, Metric::kNegentropy,
                   Metric::kCrossNegentropy, Metric::kPluralitySize,
                   Metric::kVotingAgreement, Metric::kGai}) {
    if (name == metric_name(m)) return m;
  }
  return std::nullopt;
}

bool metric_is_cross(Metric metric) {
  switch (metric) {
    case Metric::kXrr:
    case Metric::kCrossNegentropy:
    case Metric::kVotingAgreement:
    case Metric::kGai:
      return true;
    default:
      return false;
  }
}

MetricValue alpha_from_counts(
    const std::vector<std::vector<int32_t>>& counts) {
  MetricValue out{Metric::kIrr, 0.0, {}};
  size_t label_count = counts.empty() ? 0 : counts[0].size();
  std::vector<int64_t> pooled(label_count, 0);
  int64_t n = 0;
  double observed = 0.0;
  for (const auto& row : counts) {
    int64_t m = total(row);
    if (m < 2) {
      if (m > 0) out.support.items_dropped++;
      continue;
    }
    int64_t same = 0;
    for (size_t c = 0; c < row.size(); ++c) {
      same += static_cast<int64_t>(row[c]) * row[c];
      pooled[c] += row[c];
    }
    // disagreeing ordered pairs within the item, coincidence weight 1/(m-1)
    observed += static_cast<double>(m * m - same) / static_cast<double>(m - 1);
    n += m;
    out.support.items_used++;
  }
  if (n == 0) throw InsufficientDataError("no items with >= 2 ratings");
  out.support.values_paired = n;

  double d_observed = observed / static_cast<double>(n);
  double agree = 0.0;
  for (int64_t c : pooled) {
    double p = static_cast<double>(c) / static_cast<double>(n);
    agree += p * p;
  }
  double d_expected = 1.0 - agree;
  if (d_expected <= 0.0) {
    throw DegenerateError("no variation in pooled ratings");
  }
  out.value = 1.0 - d_observed / d_expected;
  return out;
}

MetricValue xrr_from_counts(const std::vector<std::vector<int32_t>>& a,
                            const std::vector<std::vector<int32_t>>& b) {
  if (a.size() != b.size()) {
    throw ConfigError("xrr count tables must be aligned");
  }
  MetricValue out{Metric::kXrr, 0.0, {}};
  size_t label_count = a.empty() ? 0 : a[0].size();
  std::vector<int64_t> pooled_a(label_count, 0), pooled_b(label_count, 0);
  int64_t na = 0, nb = 0;
  int64_t disagree_pairs = 0;
  int64_t pair_norm = 0;
  for (size_t i = 0; i < a.size(); ++i) {
    int64_t r = total(a[i]);
    int64_t s = total(b[i]);
    if (r == 0 || s == 0) continue;  // not a shared item
    // r*s cross pairs; the min(r,s) subtraction mirrors alpha's exclusion of
    // self-pairs so that xrr against a relabeled copy reduces to alpha.
    int64_t w = r * s - std::min(r, s);
    if (w == 0) {
      out.support.items_dropped++;
      continue;
    }
    int64_t agree = 0;
    for (size_t c = 0; c < label_count; ++c) {
      agree += static_cast<int64_t>(a[i][c]) * b[i][c];
      pooled_a[c] += a[i][c];
      pooled_b[c] += b[i][c];
    }
    disagree_pairs += r * s - agree;
    pair_norm += w;
    na += r;
    nb += s;
    out.support.items_used++;
  }
  if (pair_norm == 0) throw InsufficientDataError("no cross-group rating pairs");
  out.support.values_paired = na + nb;

  double d_observed =
      static_cast<double>(disagree_pairs) / static_cast<double>(pair_norm);
  double agree_expected = 0.0;
  for (size_t c = 0; c < label_count; ++c) {
    agree_expected += (static_cast<double>(pooled_a[c]) / na) *
                       (static_cast<double>(pooled_b[c]) / nb);
  }
  double d_expected = 1.0 - agree_expected;
  if (d_expected <= 0.0) {
    throw DegenerateError("no expected cross-group disagreement");
  }
  out.value = std::clamp(1.0 - d_observed / d_expected, -1.0, 1.0);
  return out;
}

MetricValue negentropy_from_counts(
    const std::vector<std::vector<int32_t>>& counts) {
  MetricValue out{Metric::kNegentropy, 0.0, {}};
  double sum = 0.0;
  for (const auto& row : counts) {
    int64_t m = total(row);
    if (m == 0) continue;
    double h_max = std::log2(static_cast<double>(row.size()));
    std::vector<double> p(row.size());
    for (size_t c = 0; c < row.size(); ++c) {
      p[c] = static_cast<double>(row[c]) / static_cast<double>(m);
    }
    sum += h_max - entropy_bits(p);
    out.support.items_used++;
    out.support.values_paired += m;
  }
  if (out.support.items_used == 0) {
    throw InsufficientDataError("no rated items");
  }
  out.value = sum / static_cast<double>(out.support.items_used);
  return out;
}

MetricValue cross_negentropy_from_counts(
    const std::vector<std::vector<int32_t>>& a,
    const std::vector<std::vector<int32_t>>& b) {
  if (a.size() != b.size()) {
    throw ConfigError("cross_negentropy count tables must be aligned");
  }
  MetricValue out{Metric::kCrossNegentropy, 0.0, {}};
  double sum = 0.0;
  for (size_t i = 0; i < a.size(); ++i) {
    int64_t r = total(a[i]);
    int64_t s = total(b[i]);
    if (r == 0 || s == 0) continue;
    double h_max = std::log2(static_cast<double>(a[i].size()));
    auto pa = jeffreys_smooth(a[i]);
    auto pb = jeffreys_smooth(b[i]);
    double cross = 0.0;
    for (size_t c = 0; c < pa.size(); ++c) {
      cross -= 0.5 * (pa[c] * std::log2(pb[c]) + pb[c] * std::log2(pa[c]));
    }
    sum += std::max(0.0, h_max - cross);
    out.support.items_used++;
    out.support.values_paired += r + s;
  }
  if (out.support.items_used == 0) {
    throw InsufficientDataError("no items rated by both groups");
  }
  out.value = sum / static_cast<double>(out.support.items_used);
  return out;
}

MetricValue plurality_from_counts(
    const std::vector<std::vector<int32_t>>& counts) {
  MetricValue out{Metric::kPluralitySize, 0.0, {}};
  double sum = 0.0;
  for (const auto& row : counts) {
    int64_t m = total(row);
    if (m == 0) continue;
    int32_t top = *std::max_element(row.begin(), row.end());
    sum += static_cast<double>(top) / static_cast<double>(m);
    out.support.items_used++;
    out.support.values_paired += m;
  }
  if (out.support.items_used == 0) {
    throw InsufficientDataError("no rated items");
  }
  out.value = sum / static_cast<double>(out.support.items_used);
  return out;
}

MetricValue voting_agreement_from_counts(
    const std::vector<std::vector<int32_t>>& a,
    const std::vector<std::vector<int32_t>>& b) {
  if (a.size() != b.size()) {
    throw ConfigError("voting_agreement count tables must be aligned");
  }
  // Unique majority vote per side, or -1 on a tie.
  auto vote = [](const std::vector<int32_t>& row) -> int {
    int32_t top = *std::max_element(row.begin(), row.end());
    int winner = -1;
    for (size_t c = 0; c < row.size(); ++c) {
      if (row[c] == top) {
        if (winner >= 0) return -1;
        winner = static_cast<int>(c);
      }
    }
    return winner;
  };

  size_t label_count = a.empty() ? 0 : a[0].size();
  std::vector<std::vector<int32_t>> vote_counts;
  int64_t dropped = 0;
  for (size_t i = 0; i < a.size(); ++i) {
    if (total(a[i]) == 0 || total(b[i]) == 0) continue;
    int va = vote(a[i]);
    int vb = vote(b[i]);
    if (va < 0 || vb < 0) {
      ++dropped;
      continue;
    }
    std::vector<int32_t> pair(label_count, 0);
    pair[va]++;
    pair[vb]++;
    vote_counts.push_back(std::move(pair));
  }
  if (vote_counts.empty()) {
    throw InsufficientDataError("no untied items shared by both groups");
  }
  MetricValue out = alpha_from_counts(vote_counts);
  out.metric = Metric::kVotingAgreement;
  out.support.items_dropped += dropped;
  return out;
}

MetricValue krippendorff_alpha(const ResponseMatrix& m) {
  return alpha_from_counts(matrix_counts(m));
}

MetricValue xrr(const ResponseMatrix& a, const ResponseMatrix& b,
                bool* overlap_warning) {
  if (overlap_warning) {
    std::set<std::string> ids(a.raters.begin(), a.raters.end());
    *overlap_warning = std::any_of(
        b.raters.begin(), b.raters.end(),
        [&ids](const std::string& r) { return ids.count(r) > 0; });
  }
  auto [ca, cb] = aligned_counts(a, b);
  return xrr_from_counts(ca, cb);
}

MetricValue negentropy(const ResponseMatrix& m) {
  return negentropy_from_counts(matrix_counts(m));
}

MetricValue cross_negentropy(const ResponseMatrix& a,
                             const ResponseMatrix& b) {
  auto [ca, cb] = aligned_counts(a, b);
  return cross_negentropy_from_counts(ca, cb);
}

MetricValue plurality_size(const ResponseMatrix& m) {
  return plurality_from_counts(matrix_counts(m));
}

ItemPlurality item_plurality(const ResponseMatrix& m,
                             const std::string& item_id) {
  auto row = m.find_item(item_id);
  if (!row) throw InsufficientDataError("item not present: " + item_id);
  auto counts = m.row_label_counts(*row);
  int64_t n = total(counts);
  if (n == 0) throw InsufficientDataError("item has no ratings: " + item_id);
  int32_t top = *std::max_element(counts.begin(), counts.end());
  ItemPlurality out;
  for (size_t c = 0; c < counts.size(); ++c) {
    if (counts[c] == top) out.modal_labels.push_back(m.domain.labels[c]);
  }
  out.fraction = static_cast<double>(top) / static_cast<double>(n);
  return out;
}

MetricValue voting_agreement(const ResponseMatrix& a,
                             const ResponseMatrix& b) {
  auto [ca, cb] = aligned_counts(a, b);
  return voting_agreement_from_counts(ca, cb);
}

MetricValue gai(const MetricValue& irr, const MetricValue& xrr) {
  if (xrr.value <= 0.0 || std::abs(xrr.value) < kXrrEpsilon) {
    throw UndefinedError("GAI undefined for nonpositive XRR");
  }
  MetricValue out{Metric::kGai, irr.value / xrr.value, irr.support};
  return out;
}

}  // namespace cohesionkit
