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
#include "cohesionkit/types.hpp"

#include <algorithm>
#include <set>
#include <tuple>

namespace cohesionkit {

void ResponseDomain::validate() const {
  if (level != MeasurementLevel::kNominal) {
    throw ConfigError("only nominal response domains are supported");
  }
  if (labels.size() < 2) {
    throw ConfigError("response domain needs at least 2 labels");
  }
  std::set<std::string> seen;
  for (const auto& l : labels) {
    if (l.empty()) throw ConfigError("response domain labels must be non-empty");
    if (!seen.insert(l).second) {
      throw ConfigError("duplicate response domain label: " + l);
    }
  }
}

int ResponseDomain::label_index(const std::string& label) const {
  for (size_t i = 0; i < labels.size(); ++i) {
    if (labels[i] == label) return static_cast<int>(i);
  }
  return -1;
}

const std::string& RaterProfile::attribute_or_na(
    const std::string& attribute) const {
  static const std::string kNa = "na";
  auto it = attributes.find(attribute);
  if (it == attributes.end() || it->second.empty()) return kNa;
  return it->second;
}

bool GroupSpec::matches(const RaterProfile& profile) const {
  for (const auto& [attribute, value] : conjuncts) {
    if (profile.attribute_or_na(attribute) != value) return false;
  }
  return true;
}

Corpus Corpus::build(ResponseDomain domain, std::vector<RaterProfile> raters,
                     std::vector<AnnotationRecord> records,
                     std::vector<std::string> attribute_names) {
  domain.validate();

  std::sort(raters.begin(), raters.end(),
            [](const RaterProfile& a, const RaterProfile& b) {
              return a.rater_id < b.rater_id;
            });
  for (size_t i = 1; i < raters.size(); ++i) {
    if (raters[i].rater_id == raters[i - 1].rater_id) {
      throw LoadError("duplicate rater profile: " + raters[i].rater_id);
    }
  }

  std::set<std::string> rater_ids;
  for (const auto& r : raters) rater_ids.insert(r.rater_id);

  std::set<std::string> item_ids;
  std::set<std::tuple<std::string, std::string, std::string>> keys;
  for (const auto& rec : records) {
    if (!rater_ids.count(rec.rater_id)) {
      throw LoadError("annotation references unknown rater: " + rec.rater_id);
    }
    if (rec.label < 0 || rec.label >= domain.label_count()) {
      throw LoadError("annotation label index out of domain range");
    }
    if (!keys.emplace(rec.rater_id, rec.item_id, rec.perspective.to_string())
             .second) {
      throw LoadError("duplicate (rater, item, perspective): " + rec.rater_id +
                      ", " + rec.item_id + ", " + rec.perspective.to_string());
    }
    item_ids.insert(rec.item_id);
  }

  std::sort(records.begin(), records.end(),
            [](const AnnotationRecord& a, const AnnotationRecord& b) {
              return std::tie(a.item_id, a.rater_id, a.perspective) <
                     std::tie(b.item_id, b.rater_id, b.perspective);
            });

  Corpus corpus;
  corpus.domain = std::move(domain);
  corpus.raters = std::move(raters);
  corpus.items.assign(item_ids.begin(), item_ids.end());
  corpus.records = std::move(records);
  std::sort(attribute_names.begin(), attribute_names.end());
  attribute_names.erase(
      std::unique(attribute_names.begin(), attribute_names.end()),
      attribute_names.end());
  corpus.attribute_names = std::move(attribute_names);
  return corpus;
}

const RaterProfile* Corpus::find_rater(const std::string& rater_id) const {
  auto it = std::lower_bound(raters.begin(), raters.end(), rater_id,
                             [](const RaterProfile& p, const std::string& id) {
                               return p.rater_id < id;
                             });
  if (it == raters.end() || it->rater_id != rater_id) return nullptr;
  return &*it;
}

bool Corpus::has_attribute(const std::string& attribute) const {
  return std::binary_search(attribute_names.begin(), attribute_names.end(),
                            attribute);
}

std::vector<std::string> Corpus::vicarious_targets() const {
  std::set<std::string> targets;
  for (const auto& rec : records) {
    if (!rec.perspective.self) targets.insert(rec.perspective.target);
  }
  return {targets.begin(), targets.end()};
}

int64_t ResponseMatrix::rating_count() const {
  int64_t n = 0;
  for (const auto& row : cells) n += static_cast<int64_t>(row.size());
  return n;
}

std::vector<int32_t> ResponseMatrix::row_label_counts(size_t row) const {
  std::vector<int32_t> counts(domain.label_count(), 0);
  for (const auto& cell : cells[row]) counts[cell.label]++;
  return counts;
}

std::optional<size_t> ResponseMatrix::find_item(
    const std::string& item_id) const {
  auto it = std::lower_bound(items.begin(), items.end(), item_id);
  if (it == items.end() || *it != item_id) return std::nullopt;
  return static_cast<size_t>(it - items.begin());
}

}  // namespace cohesionkit
