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
#include "cohesionkit/report.hpp"

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

#include "cohesionkit/errors.hpp"

namespace cohesionkit {

namespace {

using nlohmann::json;

constexpr int kPersonalStage = 101;
constexpr int kVicariousStage = 102;

std::string fixed3(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.3f", v);
  return buf;
}

const char* column_heading(Metric m) {
  switch (m) {
    case Metric::kIrr: return "IRR \xE2\x88\xA9";
    case Metric::kXrr: return "XRR \xE2\x8A\x97";
    case Metric::kNegentropy: return "Negentropy \xE2\x88\xA9";
    case Metric::kCrossNegentropy: return "Cross Negentropy \xE2\x8A\x97";
    case Metric::kPluralitySize: return "Plurality Size \xE2\x88\xA9";
    case Metric::kVotingAgreement: return "Voting Agreement \xE2\x8A\x97";
    case Metric::kGai: return "GAI";
  }
  return "?";
}

size_t metric_column(Metric m) {
  for (size_t i = 0; i < kTableMetrics.size(); ++i) {
    if (kTableMetrics[i] == m) return i;
  }
  throw ConfigError("metric has no table column");
}

json require(const json& j, const std::string& key,
             const std::string& where) {
  if (!j.contains(key)) {
    throw ConfigError("config is missing '" + key + "' in " + where);
  }
  return j.at(key);
}

uint64_t seed_from_json(const json& j) {
  if (j.is_number_unsigned()) return j.get<uint64_t>();
  if (j.is_number_integer()) return static_cast<uint64_t>(j.get<int64_t>());
  throw ConfigError("seed must be an integer");
}

std::vector<GroupComparison> standard_comparisons(
    const AnalysisConfig& config) {
  std::vector<GroupComparison> out;
  for (const auto& name : config.standard_comparisons) {
    out.push_back(GroupComparison::versus_complement(config.find_group(name)));
  }
  return out;
}

std::vector<GroupComparison> vicarious_comparisons(
    const AnalysisConfig& config) {
  std::vector<GroupComparison> out;
  for (const auto& pair : config.vicarious_comparisons) {
    out.push_back(GroupComparison::vicarious(config.find_group(pair.source),
                                             config.find_group(pair.target)));
  }
  return out;
}

// One table row: shared-null permutation tests for the requested metrics,
// cell errors recorded in place.
TableRow run_row(const Corpus& corpus, const GroupComparison& comparison,
                 const AnalysisConfig& config, uint64_t row_seed) {
  TableRow row;
  row.label = comparison.label;
  for (auto& cell : row.cells) {
    cell.ok = false;
    cell.error = "not requested";
  }
  PermutationOptions options;
  options.trials = config.trials;
  options.seed = row_seed;
  options.level = config.significance_level;
  options.attributes = config.permutation_attributes;
  ComparisonTests tests;
  try {
    tests = run_comparison_tests(corpus, comparison, config.metrics, options);
  } catch (const Error& e) {
    for (Metric m : config.metrics) {
      row.cells[metric_column(m)].error = e.what();
    }
    return row;
  }
  for (Metric m : config.metrics) {
    TableCell& cell = row.cells[metric_column(m)];
    auto it = tests.results.find(m);
    if (it == tests.results.end()) {
      cell.error = tests.errors.at(m).message;
      continue;
    }
    const PermutationResult& r = it->second;
    cell.ok = true;
    cell.error.clear();
    cell.value = r.observed;
    cell.direction_up = r.direction_up;
    cell.significant = r.significant;
    cell.p_value = r.p_value;
    cell.median_null = r.median_null;
  }
  return row;
}

CohesionTable run_table(const Corpus& corpus,
                        const std::vector<GroupComparison>& comparisons,
                        const AnalysisConfig& config, int stage,
                        const std::string& title) {
  CohesionTable table;
  table.title = title;
  uint64_t stage_seed = attempt_seed(config.seed, stage);
  for (size_t i = 0; i < comparisons.size(); ++i) {
    table.rows.push_back(run_row(corpus, comparisons[i], config,
                                 attempt_seed(stage_seed,
                                              static_cast<int>(i))));
  }
  return table;
}

// Delta footer and before/after significance markers on the after table.
void attach_delta(const CohesionTable& before, CohesionTable& after) {
  std::array<double, 7> sums{};
  std::array<int, 7> counts{};
  for (auto& after_row : after.rows) {
    const TableRow* before_row = nullptr;
    for (const auto& row : before.rows) {
      if (row.label == after_row.label) {
        before_row = &row;
        break;
      }
    }
    if (!before_row) continue;
    for (size_t c = 0; c < after_row.cells.size(); ++c) {
      const TableCell& b = before_row->cells[c];
      TableCell& a = after_row.cells[c];
      if (!b.ok || !a.ok) continue;
      a.significant_before = b.significant;
      a.significant_after = a.significant;
      sums[c] += std::abs(a.value - b.value);
      counts[c] += 1;
    }
  }
  std::array<std::optional<double>, 7> delta;
  for (size_t c = 0; c < delta.size(); ++c) {
    if (counts[c] > 0) delta[c] = sums[c] / counts[c];
  }
  after.delta = delta;
}

std::string cell_markdown(const TableCell& cell) {
  if (!cell.ok) return "\xE2\x80\x94";  // em dash
  std::string arrow = cell.direction_up ? "\xE2\x86\x91" : "\xE2\x86\x93";
  std::string body = arrow + fixed3(cell.value);
  if (cell.significant) body = "**" + body + "**";
  if (cell.significant_before && cell.significant_after) {
    if (*cell.significant_before && *cell.significant_after) {
      body += " [ab]";
    } else if (*cell.significant_before) {
      body += " [b]";
    } else if (*cell.significant_after) {
      body += " [a]";
    }
  }
  return body;
}

std::string render_markdown(const CohesionTable& table) {
  std::ostringstream out;
  if (!table.title.empty()) out << "# " << table.title << "\n\n";
  out << "| Group |";
  for (Metric m : kTableMetrics) out << ' ' << column_heading(m) << " |";
  out << "\n|";
  for (size_t i = 0; i <= kTableMetrics.size(); ++i) out << "---|";
  out << "\n";
  for (const auto& row : table.rows) {
    out << "| " << row.label << " |";
    for (const auto& cell : row.cells) out << ' ' << cell_markdown(cell) << " |";
    out << "\n";
  }
  if (table.delta) {
    out << "| \xCE\x94 |";
    for (const auto& d : *table.delta) {
      out << ' ' << (d ? fixed3(*d) : "\xE2\x80\x94") << " |";
    }
    out << "\n";
  }
  return out.str();
}

std::string render_csv(const CohesionTable& table) {
  std::ostringstream out;
  out << "group,metric,value,direction,significant,p_value,median_null,"
         "significant_before,significant_after,error\n";
  auto flag = [](const std::optional<bool>& b) {
    return !b ? std::string() : (*b ? std::string("true") : std::string("false"));
  };
  for (const auto& row : table.rows) {
    for (size_t c = 0; c < row.cells.size(); ++c) {
      const TableCell& cell = row.cells[c];
      out << row.label << ',' << metric_name(kTableMetrics[c]) << ',';
      if (cell.ok) {
        out << fixed3(cell.value) << ',' << (cell.direction_up ? "up" : "down")
            << ',' << (cell.significant ? "true" : "false") << ','
            << fixed3(cell.p_value) << ',' << fixed3(cell.median_null) << ','
            << flag(cell.significant_before) << ','
            << flag(cell.significant_after) << ',';
      } else {
        out << ",,,,,,," << cell.error;
      }
      out << "\n";
    }
  }
  if (table.delta) {
    for (size_t c = 0; c < table.delta->size(); ++c) {
      const auto& d = (*table.delta)[c];
      out << "delta," << metric_name(kTableMetrics[c]) << ','
          << (d ? fixed3(*d) : "") << ",,,,,,,\n";
    }
  }
  return out.str();
}

json cell_to_json(const TableCell& cell) {
  json j;
  j["ok"] = cell.ok;
  if (cell.ok) {
    j["value"] = cell.value;
    j["direction"] = cell.direction_up ? "up" : "down";
    j["significant"] = cell.significant;
    j["p_value"] = cell.p_value;
    j["median_null"] = cell.median_null;
  } else {
    j["error"] = cell.error;
  }
  if (cell.significant_before) j["significant_before"] = *cell.significant_before;
  if (cell.significant_after) j["significant_after"] = *cell.significant_after;
  return j;
}

TableCell cell_from_json(const json& j) {
  TableCell cell;
  cell.ok = j.at("ok").get<bool>();
  if (cell.ok) {
    cell.value = j.at("value").get<double>();
    cell.direction_up = j.at("direction").get<std::string>() == "up";
    cell.significant = j.at("significant").get<bool>();
    cell.p_value = j.at("p_value").get<double>();
    cell.median_null = j.at("median_null").get<double>();
  } else {
    cell.error = j.at("error").get<std::string>();
  }
  if (j.contains("significant_before")) {
    cell.significant_before = j.at("significant_before").get<bool>();
  }
  if (j.contains("significant_after")) {
    cell.significant_after = j.at("significant_after").get<bool>();
  }
  return cell;
}

std::string render_json(const CohesionTable& table) {
  json j;
  j["title"] = table.title;
  j["rows"] = json::array();
  for (const auto& row : table.rows) {
    json cells;
    for (size_t c = 0; c < row.cells.size(); ++c) {
      cells[metric_name(kTableMetrics[c])] = cell_to_json(row.cells[c]);
    }
    j["rows"].push_back({{"label", row.label}, {"cells", cells}});
  }
  if (table.delta) {
    json delta;
    for (size_t c = 0; c < table.delta->size(); ++c) {
      const auto& d = (*table.delta)[c];
      delta[metric_name(kTableMetrics[c])] = d ? json(*d) : json(nullptr);
    }
    j["delta"] = delta;
  }
  return j.dump(2) + "\n";
}

}  // namespace

bool CohesionTable::any_cell_errors() const {
  for (const auto& row : rows) {
    for (const auto& cell : row.cells) {
      if (!cell.ok && cell.error != "not requested") return true;
    }
  }
  return false;
}

AnalysisConfig AnalysisConfig::from_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open config: " + path);
  std::stringstream buffer;
  buffer << in.rdbuf();
  return from_json_text(buffer.str());
}

AnalysisConfig AnalysisConfig::from_json_text(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("config is not valid JSON: ") + e.what());
  }

  AnalysisConfig config;
  auto domain = require(j, "domain", "config");
  for (const auto& label : require(domain, "labels", "domain")) {
    config.domain.labels.push_back(label.get<std::string>());
  }
  if (domain.contains("level") &&
      domain.at("level").get<std::string>() != "nominal") {
    throw ConfigError("only the nominal measurement level is supported");
  }

  auto annotations = require(j, "annotations", "config");
  config.annotations_path = require(annotations, "path", "annotations");
  if (annotations.contains("rater_column")) {
    config.schema.rater_column = annotations.at("rater_column");
  }
  if (annotations.contains("item_column")) {
    config.schema.item_column = annotations.at("item_column");
  }
  if (annotations.contains("response_column")) {
    config.schema.response_column = annotations.at("response_column");
  }
  if (annotations.contains("perspective_column")) {
    config.schema.perspective_column = annotations.at("perspective_column");
  }
  if (annotations.contains("self_marker")) {
    config.schema.self_marker = annotations.at("self_marker");
  }

  auto profiles = require(j, "profiles", "config");
  config.profiles_path = require(profiles, "path", "profiles");
  if (profiles.contains("rater_column")) {
    config.schema.profile_rater_column = profiles.at("rater_column");
  }
  if (profiles.contains("attributes")) {
    for (const auto& [attribute, column] :
         profiles.at("attributes").items()) {
      config.schema.attribute_columns[attribute] = column.get<std::string>();
    }
  }
  if (profiles.contains("multi_value_delimiter")) {
    std::string d = profiles.at("multi_value_delimiter");
    if (d.size() != 1) {
      throw ConfigError("multi_value_delimiter must be one character");
    }
    config.schema.multi_value_delimiter = d[0];
  }
  if (j.contains("delimiter")) {
    std::string d = j.at("delimiter");
    if (d.size() != 1) throw ConfigError("delimiter must be one character");
    config.schema.delimiter = d[0];
  }

  for (const auto& g : require(j, "groups", "config")) {
    GroupSpec spec;
    spec.name = require(g, "name", "group");
    if (g.contains("match")) {
      for (const auto& [attribute, value] : g.at("match").items()) {
        spec.conjuncts.emplace_back(attribute, value.get<std::string>());
      }
    }
    config.groups.push_back(std::move(spec));
  }

  if (j.contains("comparisons")) {
    const auto& comparisons = j.at("comparisons");
    if (comparisons.contains("standard")) {
      for (const auto& name : comparisons.at("standard")) {
        config.standard_comparisons.push_back(name.get<std::string>());
      }
    }
    if (comparisons.contains("vicarious")) {
      for (const auto& pair : comparisons.at("vicarious")) {
        config.vicarious_comparisons.push_back(
            {require(pair, "source", "vicarious comparison"),
             require(pair, "target", "vicarious comparison")});
      }
    }
  } else {
    for (const auto& g : config.groups) {
      config.standard_comparisons.push_back(g.name);
    }
  }

  if (j.contains("metrics")) {
    for (const auto& name : j.at("metrics")) {
      auto metric = metric_from_name(name.get<std::string>());
      if (!metric) {
        throw ConfigError("unknown metric: " + name.get<std::string>());
      }
      config.metrics.push_back(*metric);
    }
  } else {
    config.metrics.assign(kTableMetrics.begin(), kTableMetrics.end());
  }

  if (j.contains("trials")) config.trials = j.at("trials").get<int>();
  if (j.contains("seed")) config.seed = seed_from_json(j.at("seed"));
  if (j.contains("significance_level")) {
    config.significance_level = j.at("significance_level").get<double>();
  }
  if (j.contains("permutation_attributes")) {
    for (const auto& a : j.at("permutation_attributes")) {
      config.permutation_attributes.push_back(a.get<std::string>());
    }
  }
  if (j.contains("wqs_threshold")) {
    config.wqs_threshold = j.at("wqs_threshold").get<double>();
  }
  if (j.contains("crowdtruth")) {
    const auto& ct = j.at("crowdtruth");
    if (ct.contains("tol")) config.crowdtruth_tol = ct.at("tol").get<double>();
    if (ct.contains("max_iter")) {
      config.crowdtruth_max_iter = ct.at("max_iter").get<int>();
    }
  }
  if (j.contains("preparation")) {
    const auto& prep = j.at("preparation");
    if (prep.contains("drop_multi_affiliation")) {
      config.drop_multi_affiliation_attribute =
          prep.at("drop_multi_affiliation").get<std::string>();
    }
    if (prep.contains("sampling")) {
      const auto& s = prep.at("sampling");
      Sampling sampling;
      sampling.batch_size = require(s, "batch_size", "sampling").get<int>();
      sampling.n_batches = require(s, "n_batches", "sampling").get<int>();
      sampling.raters_per_batch =
          require(s, "raters_per_batch", "sampling").get<int>();
      sampling.seed =
          s.contains("seed") ? seed_from_json(s.at("seed")) : 0;
      config.sampling = sampling;
    }
  }
  if (j.contains("output")) {
    const auto& output = j.at("output");
    if (output.contains("dir")) config.output_dir = output.at("dir");
    if (output.contains("formats")) {
      config.output_formats.clear();
      for (const auto& f : output.at("formats")) {
        config.output_formats.push_back(f.get<std::string>());
      }
    }
  }

  config.validate();
  return config;
}

void AnalysisConfig::validate() const {
  domain.validate();
  if (trials < 1) throw ConfigError("trials must be >= 1");
  if (significance_level <= 0.0 || significance_level >= 1.0) {
    throw ConfigError("significance_level must lie in (0, 1)");
  }
  if (wqs_threshold < 0.0 || wqs_threshold > 1.0) {
    throw ConfigError("wqs_threshold must lie in [0, 1]");
  }
  std::set<std::string> group_names;
  for (const auto& g : groups) {
    if (!group_names.insert(g.name).second) {
      throw ConfigError("duplicate group name: " + g.name);
    }
    for (const auto& [attribute, value] : g.conjuncts) {
      if (!schema.attribute_columns.count(attribute)) {
        throw ConfigError("group '" + g.name +
                          "' references unknown attribute: " + attribute);
      }
    }
  }
  for (const auto& name : standard_comparisons) find_group(name);
  for (const auto& pair : vicarious_comparisons) {
    find_group(pair.source);
    find_group(pair.target);
  }
  for (const auto& attribute : permutation_attributes) {
    if (!schema.attribute_columns.count(attribute)) {
      throw ConfigError("permutation references unknown attribute: " +
                        attribute);
    }
  }
  for (const auto& f : output_formats) render_format_from_name(f);
}

const GroupSpec& AnalysisConfig::find_group(const std::string& name) const {
  for (const auto& g : groups) {
    if (g.name == name) return g;
  }
  throw ConfigError("unknown group: " + name);
}

Corpus load_and_prepare(const AnalysisConfig& config) {
  Corpus corpus = load_corpus(config.annotations_path, config.profiles_path,
                              config.domain, config.schema);
  if (config.sampling) {
    corpus = sample_batches(corpus, config.sampling->batch_size,
                            config.sampling->n_batches,
                            config.sampling->raters_per_batch,
                            config.sampling->seed);
  }
  if (config.drop_multi_affiliation_attribute) {
    corpus = drop_multi_affiliation_raters(
        corpus, *config.drop_multi_affiliation_attribute);
  }
  return corpus;
}

CohesionTable run_personal_analysis(const Corpus& corpus,
                                    const AnalysisConfig& config) {
  return run_table(corpus, standard_comparisons(config), config,
                   kPersonalStage, "Group cohesion (personal)");
}

CohesionTable run_vicarious_analysis(const Corpus& corpus,
                                     const AnalysisConfig& config) {
  return run_table(corpus, vicarious_comparisons(config), config,
                   kVicariousStage, "Group cohesion (vicarious)");
}

FilteredAnalysis run_filtered_analysis(const Corpus& corpus,
                                       const AnalysisConfig& config) {
  FilteredAnalysis out;
  out.scores = crowdtruth_scores(corpus, config.crowdtruth_tol,
                                 config.crowdtruth_max_iter);
  auto [filtered, impact] =
      filter_by_wqs(corpus, out.scores, config.wqs_threshold);
  out.impact = std::move(impact);

  out.personal_before = run_personal_analysis(corpus, config);
  out.personal_after = run_personal_analysis(filtered, config);
  out.personal_after.title = "Group cohesion (personal, after WQS filter)";
  attach_delta(out.personal_before, out.personal_after);

  if (!config.vicarious_comparisons.empty() &&
      !corpus.vicarious_targets().empty()) {
    out.vicarious_before = run_vicarious_analysis(corpus, config);
    out.vicarious_after = run_vicarious_analysis(filtered, config);
    out.vicarious_after->title = "Group cohesion (vicarious, after WQS filter)";
    attach_delta(*out.vicarious_before, *out.vicarious_after);
  }
  return out;
}

RenderFormat render_format_from_name(const std::string& name) {
  if (name == "markdown" || name == "md") return RenderFormat::kMarkdown;
  if (name == "csv") return RenderFormat::kCsv;
  if (name == "json") return RenderFormat::kJson;
  throw ConfigError("unknown output format: " + name);
}

std::string render(const CohesionTable& table, RenderFormat format) {
  switch (format) {
    case RenderFormat::kMarkdown: return render_markdown(table);
    case RenderFormat::kCsv: return render_csv(table);
    case RenderFormat::kJson: return render_json(table);
  }
  throw ConfigError("unknown render format");
}

CohesionTable table_from_json_text(const std::string& text) {
  json j = json::parse(text);
  CohesionTable table;
  table.title = j.at("title").get<std::string>();
  for (const auto& row_json : j.at("rows")) {
    TableRow row;
    row.label = row_json.at("label").get<std::string>();
    const auto& cells = row_json.at("cells");
    for (size_t c = 0; c < kTableMetrics.size(); ++c) {
      row.cells[c] = cell_from_json(cells.at(metric_name(kTableMetrics[c])));
    }
    table.rows.push_back(std::move(row));
  }
  if (j.contains("delta")) {
    std::array<std::optional<double>, 7> delta;
    for (size_t c = 0; c < kTableMetrics.size(); ++c) {
      const auto& d = j.at("delta").at(metric_name(kTableMetrics[c]));
      if (!d.is_null()) delta[c] = d.get<double>();
    }
    table.delta = delta;
  }
  return table;
}

void write_table(const CohesionTable& table, const std::string& dir,
                 const std::string& basename,
                 const std::vector<std::string>& formats) {
  std::filesystem::create_directories(dir);
  for (const auto& name : formats) {
    RenderFormat format = render_format_from_name(name);
    const char* extension = format == RenderFormat::kMarkdown ? ".md"
                            : format == RenderFormat::kCsv    ? ".csv"
                                                              : ".json";
    std::string path = (std::filesystem::path(dir) / (basename + extension))
                           .string();
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot write " + path);
    out << render(table, format);
  }
}

std::string render_impact(const FilterImpactReport& impact,
                          RenderFormat format) {
  if (format == RenderFormat::kJson) {
    json j;
    j["removed_raters"] = impact.removed_raters;
    j["removed_annotations"] = impact.removed_annotations;
    j["items_affected"] = impact.items_affected;
    j["removed_by_attribute"] = json::object();
    for (const auto& [attribute, values] : impact.removed_by_attribute) {
      for (const auto& [value, count] : values) {
        j["removed_by_attribute"][attribute][value] = count;
      }
    }
    j["retained_unscored"] = impact.retained_unscored;
    return j.dump(2) + "\n";
  }
  if (format == RenderFormat::kCsv) {
    std::ostringstream out;
    out << "field,value,count\n";
    out << "annotations,," << impact.removed_annotations << "\n";
    out << "items,," << impact.items_affected << "\n";
    out << "raters,," << impact.removed_raters << "\n";
    for (const auto& [attribute, values] : impact.removed_by_attribute) {
      for (const auto& [value, count] : values) {
        out << attribute << ',' << value << ',' << count << "\n";
      }
    }
    return out.str();
  }
  std::ostringstream out;
  out << "# Data impacted by WQS filtering\n\n";
  out << "| | count |\n|---|---|\n";
  out << "| Annotations | " << impact.removed_annotations << " |\n";
  out << "| Data items | " << impact.items_affected << " |\n";
  out << "| Raters | " << impact.removed_raters << " |\n";
  for (const auto& [attribute, values] : impact.removed_by_attribute) {
    for (const auto& [value, count] : values) {
      out << "| " << attribute << '=' << value << " | " << count << " |\n";
    }
  }
  return out.str();
}

}  // namespace cohesionkit
