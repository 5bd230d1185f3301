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
#include <random>
#include <string>
#include <vector>

#include "cohesionkit/types.hpp"

namespace cohesionkit::testing {

inline ResponseDomain binary_domain() {
  return ResponseDomain{{"offensive", "not_offensive"},
                        MeasurementLevel::kNominal};
}

inline ResponseDomain domain_of(int label_count) {
  ResponseDomain d;
  for (int i = 0; i < label_count; ++i) {
    d.labels.push_back("label" + std::to_string(i));
  }
  return d;
}

// Builds a matrix from a dense grid; rows are items, columns raters,
// nullopt marks a missing rating.
inline ResponseMatrix make_matrix(
    const ResponseDomain& domain,
    const std::vector<std::vector<std::optional<int>>>& grid) {
  ResponseMatrix m;
  m.domain = domain;
  size_t cols = grid.empty() ? 0 : grid[0].size();
  for (size_t c = 0; c < cols; ++c) {
    m.raters.push_back("r" + std::string(2 - std::min<size_t>(1, c / 10), '0') +
                       std::to_string(c));
  }
  for (size_t r = 0; r < grid.size(); ++r) {
    m.items.push_back("i" + std::string(2 - std::min<size_t>(1, r / 10), '0') +
                      std::to_string(r));
    std::vector<ResponseMatrix::Cell> row;
    for (size_t c = 0; c < grid[r].size(); ++c) {
      if (grid[r][c]) {
        row.push_back({static_cast<int32_t>(c), *grid[r][c]});
      }
    }
    m.cells.push_back(std::move(row));
  }
  return m;
}

// Random matrix with the given shape and missing-cell probability; every
// row keeps at least one rating.
inline ResponseMatrix random_matrix(std::mt19937_64& rng, int raters,
                                    int items, int labels,
                                    double missing_prob) {
  ResponseDomain domain = domain_of(labels);
  std::vector<std::vector<std::optional<int>>> grid(
      items, std::vector<std::optional<int>>(raters));
  for (int i = 0; i < items; ++i) {
    bool any = false;
    for (int r = 0; r < raters; ++r) {
      double coin = static_cast<double>(rng() >> 11) * 0x1.0p-53;
      if (coin >= missing_prob) {
        grid[i][r] = static_cast<int>(rng() % labels);
        any = true;
      }
    }
    if (!any) grid[i][0] = static_cast<int>(rng() % labels);
  }
  return make_matrix(domain, grid);
}

struct CorpusSpec {
  ResponseDomain domain = binary_domain();
  // (rater, attribute values in attribute order)
  std::vector<std::pair<std::string, std::vector<std::string>>> raters;
  std::vector<std::string> attributes = {"political", "gender"};
  // (rater, item, label index, perspective)
  std::vector<std::tuple<std::string, std::string, int, Perspective>> records;
};

inline Corpus make_corpus(const CorpusSpec& spec) {
  std::vector<RaterProfile> profiles;
  for (const auto& [id, values] : spec.raters) {
    RaterProfile p;
    p.rater_id = id;
    for (size_t a = 0; a < spec.attributes.size() && a < values.size(); ++a) {
      p.attributes[spec.attributes[a]] = values[a];
    }
    profiles.push_back(std::move(p));
  }
  std::vector<AnnotationRecord> records;
  for (const auto& [rater, item, label, perspective] : spec.records) {
    records.push_back({rater, item, label, perspective});
  }
  return Corpus::build(spec.domain, std::move(profiles), std::move(records),
                       spec.attributes);
}

// Exchangeable corpus: binary responses drawn independently of the
// demographic attributes. `group_size` raters carry political=dem, the rest
// political=rep; gender alternates independently.
inline Corpus exchangeable_corpus(uint64_t seed, int raters, int items,
                                  int group_size) {
  std::mt19937_64 rng(seed);
  CorpusSpec spec;
  for (int r = 0; r < raters; ++r) {
    std::string id = "r" + std::to_string(100 + r);
    spec.raters.push_back(
        {id,
         {r < group_size ? "dem" : "rep", r % 2 == 0 ? "man" : "woman"}});
  }
  for (int i = 0; i < items; ++i) {
    std::string item = "i" + std::to_string(100 + i);
    for (int r = 0; r < raters; ++r) {
      spec.records.emplace_back(spec.raters[r].first, item,
                                static_cast<int>(rng() % 2),
                                Perspective::Self());
    }
  }
  return make_corpus(spec);
}

// Planted-cohesion corpus: `copiers` raters (political=dem) copy one fixed
// random answer key; `flippers` raters (political=rep) flip fair coins.
inline Corpus planted_corpus(uint64_t seed, int copiers, int flippers,
                             int items) {
  std::mt19937_64 rng(seed);
  std::vector<int> key(items);
  for (int i = 0; i < items; ++i) key[i] = static_cast<int>(rng() % 2);
  CorpusSpec spec;
  for (int r = 0; r < copiers + flippers; ++r) {
    std::string id = "r" + std::to_string(100 + r);
    spec.raters.push_back(
        {id, {r < copiers ? "dem" : "rep", r % 2 == 0 ? "man" : "woman"}});
  }
  for (int i = 0; i < items; ++i) {
    std::string item = "i" + std::to_string(100 + i);
    for (int r = 0; r < copiers + flippers; ++r) {
      int label = r < copiers ? key[i] : static_cast<int>(rng() % 2);
      spec.records.emplace_back(spec.raters[r].first, item, label,
                                Perspective::Self());
    }
  }
  return make_corpus(spec);
}

}  // namespace cohesionkit::testing
