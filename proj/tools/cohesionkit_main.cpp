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
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "cohesionkit/errors.hpp"
#include "cohesionkit/report.hpp"

namespace {

using namespace cohesionkit;

constexpr int kExitOk = 0;
constexpr int kExitConfigError = 1;
constexpr int kExitDataError = 2;
constexpr int kExitPartial = 3;

struct CliOverrides {
  std::string config_path;
  std::optional<uint64_t> seed;
  std::optional<int> trials;
  std::optional<double> wqs_threshold;
  std::optional<std::string> out_dir;
  std::optional<std::string> format;
};

AnalysisConfig load_config(const CliOverrides& cli) {
  AnalysisConfig config = AnalysisConfig::from_file(cli.config_path);
  if (cli.seed) config.seed = *cli.seed;
  if (cli.trials) config.trials = *cli.trials;
  if (cli.wqs_threshold) config.wqs_threshold = *cli.wqs_threshold;
  if (cli.out_dir) config.output_dir = *cli.out_dir;
  if (cli.format) config.output_formats = {*cli.format};
  config.validate();
  return config;
}

void write_text(const std::string& dir, const std::string& name,
                const std::string& text) {
  std::filesystem::create_directories(dir);
  std::string path = (std::filesystem::path(dir) / name).string();
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write " + path);
  out << text;
}

void write_impact(const FilterImpactReport& impact,
                  const AnalysisConfig& config) {
  for (const auto& format_name : config.output_formats) {
    RenderFormat format = render_format_from_name(format_name);
    const char* extension = format == RenderFormat::kMarkdown ? ".md"
                            : format == RenderFormat::kCsv    ? ".csv"
                                                              : ".json";
    write_text(config.output_dir, std::string("filter_impact") + extension,
               render_impact(impact, format));
  }
}

int cmd_load_check(const AnalysisConfig& config) {
  Corpus corpus = load_and_prepare(config);
  CorpusStats stats = corpus_stats(corpus);
  std::cout << "raters: " << stats.raters << "\n"
            << "items: " << stats.items << "\n"
            << "annotations: " << stats.annotations << "\n";
  auto targets = corpus.vicarious_targets();
  std::cout << "vicarious targets:";
  for (const auto& t : targets) std::cout << ' ' << t;
  std::cout << "\n";
  return kExitOk;
}

int cmd_cohesion(const AnalysisConfig& config) {
  Corpus corpus = load_and_prepare(config);
  CohesionTable table = run_personal_analysis(corpus, config);
  write_table(table, config.output_dir, "cohesion_personal",
              config.output_formats);
  std::cout << render(table, RenderFormat::kMarkdown);
  return table.any_cell_errors() ? kExitPartial : kExitOk;
}

int cmd_vicarious(const AnalysisConfig& config) {
  Corpus corpus = load_and_prepare(config);
  if (config.vicarious_comparisons.empty()) {
    throw ConfigError("no vicarious comparisons configured");
  }
  if (corpus.vicarious_targets().empty()) {
    throw InsufficientDataError("corpus has no vicarious annotations");
  }
  CohesionTable table = run_vicarious_analysis(corpus, config);
  write_table(table, config.output_dir, "cohesion_vicarious",
              config.output_formats);
  std::cout << render(table, RenderFormat::kMarkdown);
  return table.any_cell_errors() ? kExitPartial : kExitOk;
}

int cmd_crowdtruth(const AnalysisConfig& config) {
  Corpus corpus = load_and_prepare(config);
  CrowdTruthScores scores = crowdtruth_scores(corpus, config.crowdtruth_tol,
                                              config.crowdtruth_max_iter);
  std::filesystem::create_directories(config.output_dir);
  auto dir = std::filesystem::path(config.output_dir);
  save_wqs(scores, (dir / "wqs.csv").string());
  save_histogram(wqs_histogram(scores, 20), (dir / "wqs_histogram.csv").string());
  std::cout << "raters scored: " << scores.wqs.size() << "\n"
            << "iterations: " << scores.iterations
            << (scores.converged ? " (converged)" : " (not converged)") << "\n";
  return kExitOk;
}

int cmd_filter(const AnalysisConfig& config) {
  Corpus corpus = load_and_prepare(config);
  CrowdTruthScores scores = crowdtruth_scores(corpus, config.crowdtruth_tol,
                                              config.crowdtruth_max_iter);
  auto [filtered, impact] = filter_by_wqs(corpus, scores, config.wqs_threshold);
  auto dir = std::filesystem::path(config.output_dir);
  std::filesystem::create_directories(config.output_dir);
  save_corpus(filtered, (dir / "filtered_annotations.csv").string(),
              (dir / "filtered_profiles.csv").string());
  write_impact(impact, config);
  std::cout << render_impact(impact, RenderFormat::kMarkdown);
  return kExitOk;
}

int cmd_report_all(const AnalysisConfig& config) {
  Corpus corpus = load_and_prepare(config);
  FilteredAnalysis analysis = run_filtered_analysis(corpus, config);
  auto dir = std::filesystem::path(config.output_dir);
  std::filesystem::create_directories(config.output_dir);

  write_table(analysis.personal_before, config.output_dir,
              "cohesion_personal", config.output_formats);
  write_table(analysis.personal_after, config.output_dir,
              "cohesion_personal_filtered", config.output_formats);
  if (analysis.vicarious_before) {
    write_table(*analysis.vicarious_before, config.output_dir,
                "cohesion_vicarious", config.output_formats);
    write_table(*analysis.vicarious_after, config.output_dir,
                "cohesion_vicarious_filtered", config.output_formats);
  }
  save_wqs(analysis.scores, (dir / "wqs.csv").string());
  save_histogram(wqs_histogram(analysis.scores, 20),
                 (dir / "wqs_histogram.csv").string());
  write_impact(analysis.impact, config);

  bool partial = analysis.personal_before.any_cell_errors() ||
                 analysis.personal_after.any_cell_errors();
  if (analysis.vicarious_before) {
    partial = partial || analysis.vicarious_before->any_cell_errors() ||
              analysis.vicarious_after->any_cell_errors();
  }
  std::cout << "wrote report to " << config.output_dir << "\n";
  return partial ? kExitPartial : kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"cohesionkit: rater-cohesion analytics for subjective "
               "annotation datasets"};
  app.require_subcommand(1);

  CliOverrides cli;
  std::string subcommand;
  for (const char* name : {"load-check", "cohesion", "vicarious", "crowdtruth",
                           "filter", "report-all"}) {
    auto* sub = app.add_subcommand(name);
    sub->add_option("--config", cli.config_path, "JSON config file")
        ->required();
    sub->add_option("--seed", cli.seed, "override master seed");
    sub->add_option("--trials", cli.trials, "override permutation trials");
    sub->add_option("--wqs-threshold", cli.wqs_threshold,
                    "override WQS filter threshold");
    sub->add_option("--out", cli.out_dir, "override output directory");
    sub->add_option("--format", cli.format,
                    "override output format (markdown|csv|json)");
    sub->callback([&subcommand, name] { subcommand = name; });
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? kExitOk : kExitConfigError;
  }

  try {
    AnalysisConfig config = load_config(cli);
    if (subcommand == "load-check") return cmd_load_check(config);
    if (subcommand == "cohesion") return cmd_cohesion(config);
    if (subcommand == "vicarious") return cmd_vicarious(config);
    if (subcommand == "crowdtruth") return cmd_crowdtruth(config);
    if (subcommand == "filter") return cmd_filter(config);
    if (subcommand == "report-all") return cmd_report_all(config);
    std::cerr << "unknown subcommand\n";
    return kExitConfigError;
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitConfigError;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitDataError;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitDataError;
  }
}
