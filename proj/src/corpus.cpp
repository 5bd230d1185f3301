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
#include "cohesionkit/corpus.hpp"

#include <algorithm>
#include <fstream>
#include <functional>
#include <map>
#include <random>
#include <set>
#include <sstream>

#include "cohesionkit/errors.hpp"

namespace cohesionkit {

namespace {

std::vector<std::string> split_row(const std::string& line, char delimiter) {
  std::vector<std::string> fields;
  std::string field;
  std::istringstream in(line);
  while (std::getline(in, field, delimiter)) fields.push_back(field);
  if (!line.empty() && line.back() == delimiter) fields.emplace_back();
  return fields;
}

std::string strip_cr(std::string s) {
  if (!s.empty() && s.back() == '\r') s.pop_back();
  return s;
}

// Header lookup; throws LoadError naming the missing column.
size_t column_index(const std::vector<std::string>& header,
                    const std::string& column, const std::string& file) {
  for (size_t i = 0; i < header.size(); ++i) {
    if (header[i] == column) return i;
  }
  throw LoadError("column '" + column + "' not found in " + file);
}

std::string normalize_multi_value(std::string value, char source_delimiter) {
  if (source_delimiter != '|') {
    std::replace(value.begin(), value.end(), source_delimiter, '|');
  }
  return value;
}

// Deterministic Fisher-Yates; std::shuffle is not portable across
// standard library implementations.
template <typename T>
void seeded_shuffle(std::vector<T>& values, uint64_t seed) {
  std::mt19937_64 rng(seed);
  for (size_t i = values.size(); i > 1; --i) {
    size_t j = static_cast<size_t>(rng() % i);
    std::swap(values[i - 1], values[j]);
  }
}

ResponseMatrix project_by_predicate(
    const Corpus& corpus, const Perspective& perspective,
    const std::function<bool(const RaterProfile&)>& selects,
    const std::string& query_label) {
  std::set<std::string> selected;
  for (const auto& profile : corpus.raters) {
    if (selects(profile)) selected.insert(profile.rater_id);
  }

  // Keep only raters with >= 1 record under the perspective.
  std::set<std::string> active;
  std::map<std::string, std::vector<std::pair<std::string, int>>> by_item;
  for (const auto& rec : corpus.records) {
    if (!(rec.perspective == perspective)) continue;
    if (!selected.count(rec.rater_id)) continue;
    active.insert(rec.rater_id);
    by_item[rec.item_id].emplace_back(rec.rater_id, rec.label);
  }
  if (active.empty()) {
    throw EmptyGroupError("no raters selected by " + query_label + " under " +
                          perspective.to_string());
  }

  ResponseMatrix m;
  m.domain = corpus.domain;
  m.raters.assign(active.begin(), active.end());
  std::map<std::string, int32_t> column_of;
  for (size_t i = 0; i < m.raters.size(); ++i) {
    column_of[m.raters[i]] = static_cast<int32_t>(i);
  }
  m.items.reserve(by_item.size());
  m.cells.reserve(by_item.size());
  for (auto& [item, ratings] : by_item) {
    m.items.push_back(item);
    std::vector<ResponseMatrix::Cell> row;
    row.reserve(ratings.size());
    for (const auto& [rater, label] : ratings) {
      row.push_back({column_of[rater], label});
    }
    std::sort(row.begin(), row.end(),
              [](const ResponseMatrix::Cell& a, const ResponseMatrix::Cell& b) {
                return a.column < b.column;
              });
    m.cells.push_back(std::move(row));
  }
  return m;
}

}  // namespace

Corpus load_corpus(const std::string& annotations_path,
                   const std::string& profiles_path,
                   const ResponseDomain& domain, const LoadSchema& schema) {
  domain.validate();

  std::ifstream profiles_in(profiles_path);
  if (!profiles_in) throw IoError("cannot open " + profiles_path);
  std::string line;
  if (!std::getline(profiles_in, line)) {
    throw LoadError("empty profile file: " + profiles_path);
  }
  auto header = split_row(strip_cr(line), schema.delimiter);
  size_t rater_col =
      column_index(header, schema.profile_rater_column, profiles_path);
  std::map<std::string, size_t> attr_cols;
  for (const auto& [attribute, column] : schema.attribute_columns) {
    attr_cols[attribute] = column_index(header, column, profiles_path);
  }

  std::vector<RaterProfile> raters;
  int64_t row_no = 1;
  while (std::getline(profiles_in, line)) {
    ++row_no;
    line = strip_cr(line);
    if (line.empty()) continue;
    auto fields = split_row(line, schema.delimiter);
    if (fields.size() < header.size()) {
      throw LoadError("short row in " + profiles_path, row_no);
    }
    RaterProfile profile;
    profile.rater_id = fields[rater_col];
    if (profile.rater_id.empty()) {
      throw LoadError("empty rater id in " + profiles_path, row_no);
    }
    for (const auto& [attribute, col] : attr_cols) {
      std::string value =
          normalize_multi_value(fields[col], schema.multi_value_delimiter);
      profile.attributes[attribute] = value.empty() ? "na" : value;
    }
    raters.push_back(std::move(profile));
  }

  std::ifstream ann_in(annotations_path);
  if (!ann_in) throw IoError("cannot open " + annotations_path);
  if (!std::getline(ann_in, line)) {
    throw LoadError("empty annotation file: " + annotations_path);
  }
  header = split_row(strip_cr(line), schema.delimiter);
  size_t a_rater = column_index(header, schema.rater_column, annotations_path);
  size_t a_item = column_index(header, schema.item_column, annotations_path);
  size_t a_resp =
      column_index(header, schema.response_column, annotations_path);
  bool has_perspective = !schema.perspective_column.empty();
  size_t a_persp = has_perspective ? column_index(header,
                                                  schema.perspective_column,
                                                  annotations_path)
                                   : 0;

  std::vector<AnnotationRecord> records;
  row_no = 1;
  while (std::getline(ann_in, line)) {
    ++row_no;
    line = strip_cr(line);
    if (line.empty()) continue;
    auto fields = split_row(line, schema.delimiter);
    if (fields.size() < header.size()) {
      throw LoadError("short row in " + annotations_path, row_no);
    }
    AnnotationRecord rec;
    rec.rater_id = fields[a_rater];
    rec.item_id = fields[a_item];
    rec.label = domain.label_index(fields[a_resp]);
    if (rec.label < 0) {
      throw LoadError("unknown label '" + fields[a_resp] + "'", row_no);
    }
    if (has_perspective && fields[a_persp] != schema.self_marker) {
      rec.perspective = Perspective::VicariousFor(fields[a_persp]);
    }
    records.push_back(std::move(rec));
  }

  std::vector<std::string> attribute_names;
  for (const auto& [attribute, column] : schema.attribute_columns) {
    attribute_names.push_back(attribute);
  }
  try {
    return Corpus::build(domain, std::move(raters), std::move(records),
                         std::move(attribute_names));
  } catch (const LoadError& e) {
    throw LoadError(std::string(e.what()) + " while loading " +
                    annotations_path);
  }
}

CorpusStats corpus_stats(const Corpus& corpus) {
  return CorpusStats{corpus.rater_count(), corpus.item_count(),
                     corpus.record_count()};
}

void save_corpus(const Corpus& corpus, const std::string& annotations_path,
                 const std::string& profiles_path) {
  std::ofstream profiles_out(profiles_path);
  if (!profiles_out) throw IoError("cannot write " + profiles_path);
  profiles_out << "rater_id";
  for (const auto& attribute : corpus.attribute_names) {
    profiles_out << ',' << attribute;
  }
  profiles_out << '\n';
  for (const auto& profile : corpus.raters) {
    profiles_out << profile.rater_id;
    for (const auto& attribute : corpus.attribute_names) {
      profiles_out << ',' << profile.attribute_or_na(attribute);
    }
    profiles_out << '\n';
  }

  std::ofstream ann_out(annotations_path);
  if (!ann_out) throw IoError("cannot write " + annotations_path);
  ann_out << "rater_id,item_id,response,perspective\n";
  for (const auto& rec : corpus.records) {
    ann_out << rec.rater_id << ',' << rec.item_id << ','
            << corpus.domain.labels[rec.label] << ','
            << (rec.perspective.self ? "self" : rec.perspective.target)
            << '\n';
  }
}

Corpus sample_batches(const Corpus& corpus, int batch_size, int n_batches,
                      int raters_per_batch, uint64_t seed) {
  if (batch_size < 1 || raters_per_batch < 1 || n_batches < 0) {
    throw ConfigError("sample_batches sizes must be positive");
  }

  // Group items by their exact Self rater set.
  std::map<std::string, std::set<std::string>> item_raters;
  for (const auto& rec : corpus.records) {
    if (rec.perspective.self) item_raters[rec.item_id].insert(rec.rater_id);
  }
  std::map<std::vector<std::string>, std::vector<std::string>> by_rater_set;
  for (const auto& [item, raters] : item_raters) {
    if (static_cast<int>(raters.size()) != raters_per_batch) continue;
    std::vector<std::string> key(raters.begin(), raters.end());
    by_rater_set[key].push_back(item);
  }

  // Each group splits into floor(size / batch_size) full batches.
  std::vector<std::vector<std::string>> eligible;
  for (auto& [key, items] : by_rater_set) {
    std::sort(items.begin(), items.end());
    for (size_t start = 0; start + batch_size <= items.size();
         start += batch_size) {
      eligible.emplace_back(items.begin() + start,
                            items.begin() + start + batch_size);
    }
  }

  if (static_cast<int>(eligible.size()) < n_batches) {
    throw SamplingError("not enough eligible batches",
                        static_cast<int64_t>(eligible.size()));
  }

  seeded_shuffle(eligible, seed);
  std::set<std::string> keep;
  for (int i = 0; i < n_batches; ++i) {
    keep.insert(eligible[i].begin(), eligible[i].end());
  }

  std::vector<AnnotationRecord> records;
  std::set<std::string> active_raters;
  for (const auto& rec : corpus.records) {
    if (!keep.count(rec.item_id)) continue;
    records.push_back(rec);
    active_raters.insert(rec.rater_id);
  }
  std::vector<RaterProfile> raters;
  for (const auto& profile : corpus.raters) {
    if (active_raters.count(profile.rater_id)) raters.push_back(profile);
  }
  return Corpus::build(corpus.domain, std::move(raters), std::move(records),
                       corpus.attribute_names);
}

Corpus drop_multi_affiliation_raters(const Corpus& corpus,
                                     const std::string& attribute,
                                     DropReport* report) {
  if (!corpus.has_attribute(attribute)) {
    throw ConfigError("unknown attribute: " + attribute);
  }
  std::set<std::string> dropped;
  std::vector<RaterProfile> raters;
  for (const auto& profile : corpus.raters) {
    if (profile.attribute_or_na(attribute).find('|') != std::string::npos) {
      dropped.insert(profile.rater_id);
    } else {
      raters.push_back(profile);
    }
  }
  std::vector<AnnotationRecord> records;
  int64_t removed_records = 0;
  for (const auto& rec : corpus.records) {
    if (dropped.count(rec.rater_id)) {
      ++removed_records;
    } else {
      records.push_back(rec);
    }
  }
  if (report) {
    report->removed_raters = static_cast<int64_t>(dropped.size());
    report->removed_records = removed_records;
  }
  return Corpus::build(corpus.domain, std::move(raters), std::move(records),
                       corpus.attribute_names);
}

ResponseMatrix project(const Corpus& corpus, const GroupSpec& group,
                       const Perspective& perspective) {
  return project_by_predicate(
      corpus, perspective,
      [&group](const RaterProfile& p) { return group.matches(p); },
      "group '" + group.name + "'");
}

ResponseMatrix project_complement(const Corpus& corpus, const GroupSpec& group,
                                  const Perspective& perspective) {
  return project_by_predicate(
      corpus, perspective,
      [&group](const RaterProfile& p) { return !group.matches(p); },
      "complement of group '" + group.name + "'");
}

}  // namespace cohesionkit
