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

#include <optional>
#include <vector>

#include "cohesionkit/types.hpp"

namespace cohesionkit::testing {

// Brute-force agreement oracle: enumerates rating pairs one by one instead
// of using marginal-count algebra. Observed disagreement walks every ordered
// pair of distinct rating slots within each item, weighting each pair by
// 1/(m-1); expected disagreement walks all n x n ordered pairs of the pooled
// pairable values (self-pairs included, i.e. draws with replacement).
// Returns nullopt when no item is pairable or expected disagreement is zero.
inline std::optional<double> oracle_alpha(const ResponseMatrix& m) {
  std::vector<int> pooled;
  double observed_sum = 0.0;
  double observed_weight = 0.0;
  for (size_t row = 0; row < m.items.size(); ++row) {
    std::vector<int> values;
    for (const auto& cell : m.cells[row]) values.push_back(cell.label);
    size_t count = values.size();
    if (count < 2) continue;
    double w = 1.0 / static_cast<double>(count - 1);
    for (size_t i = 0; i < count; ++i) {
      for (size_t j = 0; j < count; ++j) {
        if (i == j) continue;
        observed_sum += w * (values[i] != values[j] ? 1.0 : 0.0);
        observed_weight += w;
      }
    }
    for (int v : values) pooled.push_back(v);
  }
  if (pooled.empty()) return std::nullopt;
  double d_observed = observed_sum / observed_weight;

  double expected_sum = 0.0;
  for (int a : pooled) {
    for (int b : pooled) {
      if (a != b) expected_sum += 1.0;
    }
  }
  double d_expected =
      expected_sum / (static_cast<double>(pooled.size()) * pooled.size());
  if (d_expected <= 0.0) return std::nullopt;
  return 1.0 - d_observed / d_expected;
}

}  // namespace cohesionkit::testing
