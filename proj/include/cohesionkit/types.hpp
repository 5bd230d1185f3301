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
#include <utility>
#include <vector>

#include "cohesionkit/errors.hpp"

namespace cohesionkit {

// Measurement level of the response domain. Only nominal data is supported;
// ordinal/interval are rejected at load time.
enum class MeasurementLevel { kNominal };

// The finite set of allowed response categories for the annotation question.
struct ResponseDomain {
  std::vector<std::string> labels;
  MeasurementLevel level = MeasurementLevel::kNominal;

  // Throws ConfigError unless labels are unique, non-empty and >= 2.
  void validate() const;

  int label_count() const { return static_cast<int>(labels.size()); }

  // Index of `label`, or -1 when it is not part of the domain.
  int label_index(const std::string& label) const;
};

// Whose point of view an annotation was produced under: the rater's own
// (Self) or a prediction of how members of some other group would answer
// (VicariousFor that group).
struct Perspective {
  bool self = true;
  std::string target;  // group name, empty for Self

  static Perspective Self() { return Perspective{true, ""}; }
  static Perspective VicariousFor(std::string group) {
    return Perspective{false, std::move(group)};
  }

  bool operator==(const Perspective& o) const {
    return self == o.self && target == o.target;
  }
  bool operator<(const Perspective& o) const {
    if (self != o.self) return self;  // Self sorts first
    return target < o.target;
  }

  std::string to_string() const { return self ? "self" : "vicarious:" + target; }
};

// One rater and their demographic attributes. Attribute values are free-form
// categorical strings; "na" marks a missing/undisclosed value and multi-valued
// cells are kept as a single '|'-delimited string until explicitly dropped.
struct RaterProfile {
  std::string rater_id;
  std::map<std::string, std::string> attributes;

  // The value for `attribute`, treating absent entries as "na".
  const std::string& attribute_or_na(const std::string& attribute) const;
};

// A single response: one rater's label for one item under one perspective.
// The response is stored as an index into the corpus domain's label list.
struct AnnotationRecord {
  std::string rater_id;
  std::string item_id;
  int label = 0;
  Perspective perspective;
};

// Conjunction of (attribute, required value) tests over a rater profile.
// An empty conjunct list matches every rater.
struct GroupSpec {
  std::string name;
  std::vector<std::pair<std::string, std::string>> conjuncts;

  bool matches(const RaterProfile& profile) const;
};

// Immutable annotated dataset: a response domain, the rater pool, the item
// set and the full multiset of annotation records. Construct with
// Corpus::build so the cross-reference invariants hold.
struct Corpus {
  ResponseDomain domain;
  std::vector<RaterProfile> raters;      // sorted by rater_id
  std::vector<std::string> items;        // sorted item ids
  std::vector<AnnotationRecord> records;
  std::vector<std::string> attribute_names;  // attributes known to profiles

  // Validates cross-references, sorts raters/items/records into canonical
  // order and returns the finished corpus. Throws LoadError on dangling ids,
  // duplicate (rater, item, perspective) triples or out-of-domain labels.
  static Corpus build(ResponseDomain domain, std::vector<RaterProfile> raters,
                      std::vector<AnnotationRecord> records,
                      std::vector<std::string> attribute_names);

  const RaterProfile* find_rater(const std::string& rater_id) const;
  bool has_attribute(const std::string& attribute) const;

  int64_t rater_count() const { return static_cast<int64_t>(raters.size()); }
  int64_t item_count() const { return static_cast<int64_t>(items.size()); }
  int64_t record_count() const { return static_cast<int64_t>(records.size()); }

  // Distinct vicarious targets present in the records, sorted.
  std::vector<std::string> vicarious_targets() const;
};

// Sparse item x rater response matrix for one (group, perspective) query.
// Rows are items, columns raters, both in sorted order; absent cells mean
// the rater did not rate the item.
struct ResponseMatrix {
  ResponseDomain domain;
  std::vector<std::string> items;   // row ids, sorted
  std::vector<std::string> raters;  // column ids, sorted

  struct Cell {
    int32_t column;
    int32_t label;
  };
  // cells[row] lists (column, label) pairs in ascending column order.
  std::vector<std::vector<Cell>> cells;

  int64_t rating_count() const;

  // Per-label rating counts for one row.
  std::vector<int32_t> row_label_counts(size_t row) const;

  // Row index of `item_id`, or nullopt.
  std::optional<size_t> find_item(const std::string& item_id) const;
};

}  // namespace cohesionkit
