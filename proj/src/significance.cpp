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
#include "cohesionkit/significance.hpp"

#include <algorithm>
#include <map>
#include <random>
#include <set>

#include "cohesionkit/corpus.hpp"
#include "cohesionkit/errors.hpp"

namespace cohesionkit {

namespace {

uint64_t splitmix64(uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

std::vector<std::string> resolve_attributes(
    const Corpus& corpus, const std::vector<std::string>& attributes) {
  if (attributes.empty()) return corpus.attribute_names;
  for (const auto& a : attributes) {
    if (!corpus.has_attribute(a)) {
      throw ConfigError("unknown attribute: " + a);
    }
  }
  return attributes;
}

// Per-rater annotation lists for one perspective, indexed against
// corpus.raters / corpus.items order.
struct PerspectiveIndex {
  // by_rater[r] -> (item index, label) pairs
  std::vector<std::vector<std::pair<int32_t, int32_t>>> by_rater;
};

PerspectiveIndex build_index(const Corpus& corpus,
                             const Perspective& perspective) {
  std::map<std::string, int32_t> item_idx;
  for (size_t i = 0; i < corpus.items.size(); ++i) {
    item_idx[corpus.items[i]] = static_cast<int32_t>(i);
  }
  std::map<std::string, int32_t> rater_idx;
  for (size_t i = 0; i < corpus.raters.size(); ++i) {
    rater_idx[corpus.raters[i].rater_id] = static_cast<int32_t>(i);
  }
  PerspectiveIndex index;
  index.by_rater.resize(corpus.raters.size());
  for (const auto& rec : corpus.records) {
    if (!(rec.perspective == perspective)) continue;
    index.by_rater[rater_idx[rec.rater_id]].emplace_back(
        item_idx[rec.item_id], rec.label);
  }
  return index;
}

// Evaluates all seven metrics from a permuted group assignment without
// materializing matrices. Reused across trials; count buffers are zeroed
// between calls.
class ComparisonEngine {
 public:
  ComparisonEngine(const Corpus& corpus, const GroupComparison& comparison,
                   const std::vector<std::string>& shuffle_attributes)
      : label_count_(corpus.domain.label_count()),
        item_count_(corpus.items.size()),
        group_index_(build_index(corpus, comparison.group_perspective)),
        other_index_(comparison.other_perspective ==
                             comparison.group_perspective
                         ? group_index_
                         : build_index(corpus, comparison.other_perspective)) {
    // Membership factorizes into a fixed part (attributes outside the
    // shuffle) and a tuple part (attributes being shuffled).
    std::set<std::string> shuffled(shuffle_attributes.begin(),
                                   shuffle_attributes.end());
    auto split = [&](const GroupSpec& spec, std::vector<char>& fixed,
                     std::vector<char>& tuple) {
      GroupSpec fixed_spec, tuple_spec;
      for (const auto& conjunct : spec.conjuncts) {
        (shuffled.count(conjunct.first) ? tuple_spec : fixed_spec)
            .conjuncts.push_back(conjunct);
      }
      fixed.resize(corpus.raters.size());
      tuple.resize(corpus.raters.size());
      for (size_t i = 0; i < corpus.raters.size(); ++i) {
        fixed[i] = fixed_spec.matches(corpus.raters[i]);
        tuple[i] = tuple_spec.matches(corpus.raters[i]);
      }
    };
    split(comparison.group, group_fixed_, group_tuple_);
    if (comparison.target) {
      has_target_ = true;
      split(*comparison.target, target_fixed_, target_tuple_);
    }

    counts_a_.assign(item_count_, std::vector<int32_t>(label_count_, 0));
    counts_b_.assign(item_count_, std::vector<int32_t>(label_count_, 0));
  }

  // `perm` maps rater position -> position whose tuple it receives;
  // empty means the identity (the observed assignment).
  void evaluate(const std::vector<size_t>& perm,
                const std::vector<Metric>& metrics,
                std::map<Metric, MetricValue>& values,
                std::map<Metric, CellError>& errors) {
    values.clear();
    errors.clear();
    bool need_cross = std::any_of(metrics.begin(), metrics.end(),
                                  metric_is_cross);
    fill_counts(perm, need_cross);

    auto run = [&](Metric metric, auto&& fn) {
      if (std::find(metrics.begin(), metrics.end(), metric) == metrics.end())
        return;
      try {
        MetricValue v = fn();
        v.metric = metric;
        values[metric] = v;
      } catch (const DegenerateError& e) {
        errors[metric] = {CellError::Kind::kDegenerate, e.what()};
      } catch (const InsufficientDataError& e) {
        errors[metric] = {CellError::Kind::kInsufficientData, e.what()};
      } catch (const UndefinedError& e) {
        errors[metric] = {CellError::Kind::kUndefined, e.what()};
      } catch (const Error& e) {
        errors[metric] = {CellError::Kind::kOther, e.what()};
      }
    };

    run(Metric::kIrr, [&] { return alpha_from_counts(counts_a_); });
    run(Metric::kXrr, [&] { return xrr_from_counts(counts_a_, counts_b_); });
    run(Metric::kNegentropy, [&] { return negentropy_from_counts(counts_a_); });
    run(Metric::kCrossNegentropy,
        [&] { return cross_negentropy_from_counts(counts_a_, counts_b_); });
    run(Metric::kPluralitySize,
        [&] { return plurality_from_counts(counts_a_); });
    run(Metric::kVotingAgreement,
        [&] { return voting_agreement_from_counts(counts_a_, counts_b_); });
    run(Metric::kGai, [&] {
      return gai(alpha_from_counts(counts_a_),
                 xrr_from_counts(counts_a_, counts_b_));
    });
  }

 private:
  void fill_counts(const std::vector<size_t>& perm, bool need_cross) {
    for (auto& row : counts_a_) std::fill(row.begin(), row.end(), 0);
    if (need_cross) {
      for (auto& row : counts_b_) std::fill(row.begin(), row.end(), 0);
    }
    size_t n = group_fixed_.size();
    for (size_t i = 0; i < n; ++i) {
      size_t tuple_from = perm.empty() ? i : perm[i];
      bool in_group = group_fixed_[i] && group_tuple_[tuple_from];
      if (in_group) {
        for (const auto& [item, label] : group_index_.by_rater[i]) {
          counts_a_[item][label]++;
        }
      }
      if (!need_cross) continue;
      bool in_other = has_target_
                          ? (target_fixed_[i] && target_tuple_[tuple_from])
                          : !in_group;
      if (in_other) {
        for (const auto& [item, label] : other_index_.by_rater[i]) {
          counts_b_[item][label]++;
        }
      }
    }
  }

  int label_count_;
  size_t item_count_;
  PerspectiveIndex group_index_;
  PerspectiveIndex other_index_;
  bool has_target_ = false;
  std::vector<char> group_fixed_, group_tuple_;
  std::vector<char> target_fixed_, target_tuple_;
  std::vector<std::vector<int32_t>> counts_a_, counts_b_;
};

double median_of(std::vector<double> values) {
  std::sort(values.begin(), values.end());
  size_t n = values.size();
  if (n % 2 == 1) return values[n / 2];
  return 0.5 * (values[n / 2 - 1] + values[n / 2]);
}

}  // namespace

GroupComparison GroupComparison::versus_complement(GroupSpec group) {
  GroupComparison c;
  c.label = group.name;
  c.group = std::move(group);
  return c;
}

GroupComparison GroupComparison::vicarious(GroupSpec source,
                                           GroupSpec target) {
  GroupComparison c;
  c.label = source.name + " -> " + target.name + " (v " + target.name + ")";
  c.group_perspective = Perspective::VicariousFor(target.name);
  c.other_perspective = Perspective::Self();
  c.group = std::move(source);
  c.target = std::move(target);
  return c;
}

std::vector<size_t> permutation_of_indices(size_t n, uint64_t seed) {
  std::vector<size_t> perm(n);
  for (size_t i = 0; i < n; ++i) perm[i] = i;
  std::mt19937_64 rng(seed);
  for (size_t i = n; i > 1; --i) {
    size_t j = static_cast<size_t>(rng() % i);
    std::swap(perm[i - 1], perm[j]);
  }
  return perm;
}

uint64_t attempt_seed(uint64_t master_seed, int attempt) {
  return splitmix64(master_seed ^ splitmix64(static_cast<uint64_t>(attempt)));
}

Corpus permute_attributes(const Corpus& corpus,
                          const std::vector<std::string>& attributes,
                          uint64_t seed) {
  auto names = resolve_attributes(corpus, attributes);
  auto perm = permutation_of_indices(corpus.raters.size(), seed);
  std::vector<RaterProfile> raters = corpus.raters;
  for (size_t i = 0; i < raters.size(); ++i) {
    for (const auto& attribute : names) {
      raters[i].attributes[attribute] =
          corpus.raters[perm[i]].attribute_or_na(attribute);
    }
  }
  Corpus out = corpus;
  out.raters = std::move(raters);
  return out;
}

ComparisonEvaluation evaluate_comparison(const Corpus& corpus,
                                         const GroupComparison& comparison,
                                         const std::vector<Metric>& metrics) {
  ComparisonEngine engine(corpus, comparison, corpus.attribute_names);
  ComparisonEvaluation out;
  engine.evaluate({}, metrics, out.values, out.errors);
  return out;
}

ComparisonTests run_comparison_tests(const Corpus& corpus,
                                     const GroupComparison& comparison,
                                     const std::vector<Metric>& metrics,
                                     const PermutationOptions& options) {
  if (options.trials < 1) throw ConfigError("trials must be >= 1");
  if (options.level <= 0.0 || options.level >= 1.0) {
    throw ConfigError("significance level must lie in (0, 1)");
  }
  auto shuffle_attributes = resolve_attributes(corpus, options.attributes);
  ComparisonEngine engine(corpus, comparison, shuffle_attributes);

  ComparisonTests out;
  std::map<Metric, MetricValue> observed;
  engine.evaluate({}, metrics, observed, out.errors);

  std::vector<Metric> active;
  for (Metric m : metrics) {
    if (observed.count(m)) active.push_back(m);
  }

  std::map<Metric, std::vector<double>> nulls;
  std::map<Metric, int> failures;
  for (Metric m : active) {
    nulls[m] = {};
    nulls[m].reserve(options.trials);
    failures[m] = 0;
  }

  const int64_t budget = static_cast<int64_t>(options.trials) * 10;
  std::map<Metric, MetricValue> trial_values;
  std::map<Metric, CellError> trial_errors;
  for (int64_t k = 0; k < budget; ++k) {
    std::vector<Metric> pending;
    for (Metric m : active) {
      if (static_cast<int>(nulls[m].size()) < options.trials) {
        pending.push_back(m);
      }
    }
    if (pending.empty()) break;
    auto perm = permutation_of_indices(
        corpus.raters.size(),
        attempt_seed(options.seed, static_cast<int>(k)));
    engine.evaluate(perm, pending, trial_values, trial_errors);
    for (Metric m : pending) {
      auto it = trial_values.find(m);
      if (it != trial_values.end()) {
        nulls[m].push_back(it->second.value);
      } else {
        failures[m]++;
      }
    }
  }

  for (Metric m : active) {
    const auto& samples = nulls[m];
    int effective = static_cast<int>(samples.size());
    if (effective < (options.trials + 1) / 2) {
      out.errors[m] = {CellError::Kind::kUnstableNull,
                       "unstable null distribution: only " +
                           std::to_string(effective) + " of " +
                           std::to_string(options.trials) +
                           " trials usable"};
      continue;
    }
    PermutationResult r;
    r.observed = observed.at(m).value;
    r.null_samples = samples;
    r.median_null = median_of(samples);
    int64_t greater = 0, less = 0;
    for (double v : samples) {
      if (v >= r.observed) ++greater;
      if (v <= r.observed) ++less;
    }
    r.frac_greater = static_cast<double>(greater) / effective;
    r.frac_less = static_cast<double>(less) / effective;
    r.p_value = std::min(r.frac_greater, r.frac_less);
    r.median_tie = (r.observed == r.median_null);
    r.direction_up = (r.observed > r.median_null);
    r.significant = (r.p_value < options.level);
    r.seed = options.seed;
    r.trials = options.trials;
    r.effective_trials = effective;
    r.failed_attempts = failures[m];
    r.shortfall_warning = (effective < options.trials);
    out.results[m] = std::move(r);
  }
  return out;
}

PermutationResult permutation_test(const Corpus& corpus,
                                   const GroupComparison& comparison,
                                   Metric metric,
                                   const PermutationOptions& options) {
  auto tests = run_comparison_tests(corpus, comparison, {metric}, options);
  auto it = tests.results.find(metric);
  if (it != tests.results.end()) return it->second;
  const CellError& error = tests.errors.at(metric);
  switch (error.kind) {
    case CellError::Kind::kDegenerate:
      throw DegenerateError(error.message);
    case CellError::Kind::kInsufficientData:
      throw InsufficientDataError(error.message);
    case CellError::Kind::kUndefined:
      throw UndefinedError(error.message);
    case CellError::Kind::kUnstableNull:
      throw UnstableNullError(error.message);
    case CellError::Kind::kOther:
      break;
  }
  throw Error(error.message);
}

MedianNullTable median_null_table(
    const Corpus& corpus, const std::vector<GroupComparison>& comparisons,
    const std::vector<Metric>& metrics, const PermutationOptions& options) {
  MedianNullTable table;
  table.metrics = metrics;
  for (const auto& comparison : comparisons) {
    table.row_labels.push_back(comparison.label);
    auto tests = run_comparison_tests(corpus, comparison, metrics, options);
    std::vector<std::optional<double>> row;
    for (Metric m : metrics) {
      auto it = tests.results.find(m);
      if (it != tests.results.end()) {
        row.emplace_back(it->second.median_null);
      } else {
        row.emplace_back(std::nullopt);
      }
    }
    table.medians.push_back(std::move(row));
  }
  return table;
}

}  // namespace cohesionkit
