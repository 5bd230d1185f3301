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
#include <vector>

#include "cohesionkit/types.hpp"

namespace cohesionkit {

// Column mapping for the two delimiter-separated input files. Both files
// must have a header row; fields must not contain the delimiter.
struct LoadSchema {
  char delimiter = ',';

  // Annotation file columns.
  std::string rater_column = "rater_id";
  std::string item_column = "item_id";
  std::string response_column = "response";
  std::string perspective_column;  // empty: every row is Self
  std::string self_marker = "self";

  // Profile file columns. `attribute_columns` maps the attribute name used
  // throughout the toolkit to the column name in the profile file.
  std::string profile_rater_column = "rater_id";
  std::map<std::string, std::string> attribute_columns;

  // Delimiter used by the source data inside multi-valued attribute cells;
  // normalized to '|' on load.
  char multi_value_delimiter = '|';
};

struct CorpusStats {
  int64_t raters = 0;
  int64_t items = 0;
  int64_t annotations = 0;
};

// Reads annotation and profile files into a validated Corpus.
// Throws LoadError (with the offending row) on unknown labels, duplicate
// (rater, item, perspective) triples or dangling rater references, and
// IoError when a file cannot be opened.
Corpus load_corpus(const std::string& annotations_path,
                   const std::string& profiles_path,
                   const ResponseDomain& domain, const LoadSchema& schema);

CorpusStats corpus_stats(const Corpus& corpus);

// Writes the corpus back out in the canonical file format (sorted rows,
// default column names). Reloading the result yields an equal corpus.
void save_corpus(const Corpus& corpus, const std::string& annotations_path,
                 const std::string& profiles_path);

// Selects n_batches batches of batch_size items each, where a batch is a
// maximal run of items annotated by exactly the same `raters_per_batch`
// raters (Self perspective). Selection is a seeded shuffle of the eligible
// batches, so the batch set for n is a prefix of the one for n+1.
// Throws SamplingError when fewer than n_batches batches are eligible.
Corpus sample_batches(const Corpus& corpus, int batch_size, int n_batches,
                      int raters_per_batch, uint64_t seed);

struct DropReport {
  int64_t removed_raters = 0;
  int64_t removed_records = 0;
};

// Removes raters whose value for `attribute` is multi-valued (contains '|'),
// together with all their records. Throws ConfigError for unknown attributes.
Corpus drop_multi_affiliation_raters(const Corpus& corpus,
                                     const std::string& attribute,
                                     DropReport* report = nullptr);

// Materializes the response matrix for one (group, perspective) query:
// columns are the group's raters with at least one record under the
// perspective, rows the items those raters annotated.
// Throws EmptyGroupError when the query selects no raters.
ResponseMatrix project(const Corpus& corpus, const GroupSpec& group,
                       const Perspective& perspective);

// Same, but selects the raters NOT matching `group` (the complement used by
// the paper-style cross-group comparisons).
ResponseMatrix project_complement(const Corpus& corpus, const GroupSpec& group,
                                  const Perspective& perspective);

}  // namespace cohesionkit
