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
#include <random>

#include <doctest.h>

#include "cohesionkit/errors.hpp"
#include "fixtures.hpp"
#include "oracles.hpp"

using namespace cohesionkit;
using namespace cohesionkit::testing;

namespace {

ResponseMatrix relabel_raters(ResponseMatrix m, const std::string& prefix) {
  for (auto& r : m.raters) r = prefix + r;
  return m;
}

// Applies a label bijection to every cell.
ResponseMatrix permute_labels(ResponseMatrix m,
                              const std::vector<int>& mapping) {
  for (auto& row : m.cells) {
    for (auto& cell : row) cell.label = mapping[cell.label];
  }
  return m;
}

ResponseMatrix shuffle_columns(const ResponseMatrix& m, uint64_t seed) {
  std::vector<int32_t> order(m.raters.size());
  for (size_t i = 0; i < order.size(); ++i) order[i] = static_cast<int32_t>(i);
  std::mt19937_64 rng(seed);
  for (size_t i = order.size(); i > 1; --i) {
    std::swap(order[i - 1], order[rng() % i]);
  }
  std::vector<int32_t> new_of_old(order.size());
  ResponseMatrix out = m;
  for (size_t i = 0; i < order.size(); ++i) {
    out.raters[i] = m.raters[order[i]];
    new_of_old[order[i]] = static_cast<int32_t>(i);
  }
  for (auto& row : out.cells) {
    for (auto& cell : row) cell.column = new_of_old[cell.column];
    std::sort(row.begin(), row.end(),
              [](const ResponseMatrix::Cell& a, const ResponseMatrix::Cell& b) {
                return a.column < b.column;
              });
  }
  return out;
}

}  // namespace

TEST_CASE("alpha: perfect two-rater agreement is 1") {
  auto m = make_matrix(binary_domain(), {{0, 0}, {1, 1}, {0, 0}, {1, 1}});
  CHECK(krippendorff_alpha(m).value == doctest::Approx(1.0).epsilon(1e-15));
}

TEST_CASE("alpha: balanced anti-aligned two-rater matrix is exactly -1") {
  auto m = make_matrix(binary_domain(), {{0, 1}, {1, 0}, {0, 1}, {1, 0}});
  MetricValue v = krippendorff_alpha(m);
  CHECK(v.value == -1.0);
  // hand coincidence matrix: o_ab = o_ba = 4, D_o = 1, D_e = 1/2
  auto oracle = oracle_alpha(m);
  REQUIRE(oracle.has_value());
  CHECK(v.value == doctest::Approx(*oracle).epsilon(1e-14));
}

TEST_CASE("alpha: matches pair-enumeration oracle with missing data") {
  std::mt19937_64 rng(20240811);
  for (int trial = 0; trial < 200; ++trial) {
    auto m = random_matrix(rng, 5, 8, 2 + static_cast<int>(rng() % 2), 0.2);
    std::optional<double> expected = oracle_alpha(m);
    if (!expected) {
      CHECK_THROWS_AS(krippendorff_alpha(m), Error);
      continue;
    }
    CHECK(std::abs(krippendorff_alpha(m).value - *expected) < 1e-12);
  }
}

TEST_CASE("alpha: unanimous matrix has no expected disagreement") {
  auto m = make_matrix(binary_domain(), {{0, 0, 0}, {0, 0, 0}});
  CHECK_THROWS_AS(krippendorff_alpha(m), DegenerateError);
}

TEST_CASE("alpha: no pairable items") {
  auto m = make_matrix(binary_domain(),
                       {{0, std::nullopt}, {std::nullopt, 1}});
  CHECK_THROWS_AS(krippendorff_alpha(m), InsufficientDataError);
  CHECK_THROWS_AS(krippendorff_alpha(make_matrix(binary_domain(), {})),
                  InsufficientDataError);
}

TEST_CASE("alpha: single-rating items are excluded and counted") {
  auto m = make_matrix(binary_domain(),
                       {{0, 0, 1}, {1, 1, std::nullopt},
                        {0, std::nullopt, std::nullopt}});
  MetricValue v = krippendorff_alpha(m);
  CHECK(v.support.items_used == 2);
  CHECK(v.support.items_dropped == 1);
  CHECK(v.support.values_paired == 5);
  // frozen from the exact-rational evaluation of the same fixture
  CHECK(v.value == doctest::Approx(1.0 / 6.0).epsilon(1e-12));
}

TEST_CASE("xrr: relabeled copy reduces to alpha on full matrices") {
  std::mt19937_64 rng(7);
  for (int trial = 0; trial < 50; ++trial) {
    auto m = random_matrix(rng, 2 + static_cast<int>(rng() % 5),
                           2 + static_cast<int>(rng() % 9),
                           2 + static_cast<int>(rng() % 2), 0.0);
    auto copy = relabel_raters(m, "copy_");
    double a;
    try {
      a = krippendorff_alpha(m).value;
    } catch (const Error&) {
      CHECK_THROWS_AS(xrr(m, copy), Error);
      continue;
    }
    double x = xrr(m, copy).value;
    CHECK(std::abs(a - x) < 1e-12);
  }
}

TEST_CASE("xrr: groups that always disagree score at the floor") {
  // per item one side unanimous offensive, the other unanimous not, with
  // balanced pooled marginals on both sides
  auto a = make_matrix(binary_domain(), {{0, 0}, {1, 1}, {0, 0}, {1, 1}});
  auto b = relabel_raters(
      make_matrix(binary_domain(), {{1, 1}, {0, 0}, {1, 1}, {0, 0}}), "b_");
  MetricValue v = xrr(a, b);
  CHECK(v.value <= 0.0);
  CHECK(v.value == -1.0);  // clamped floor
}

TEST_CASE("xrr: no common items") {
  auto a = make_matrix(binary_domain(), {{0, 1}});
  ResponseMatrix b = make_matrix(binary_domain(), {{1, 0}});
  b.items = {"zzz"};
  b.raters = {"b_r0", "b_r1"};
  CHECK_THROWS_AS(xrr(a, b), InsufficientDataError);
}

TEST_CASE("xrr: zero expected disagreement") {
  auto a = make_matrix(binary_domain(), {{0, 0}, {0, 0}});
  auto b = relabel_raters(a, "b_");
  CHECK_THROWS_AS(xrr(a, b), DegenerateError);
}

TEST_CASE("xrr: symmetric and warns on shared rater ids") {
  std::mt19937_64 rng(99);
  for (int trial = 0; trial < 30; ++trial) {
    auto a = random_matrix(rng, 3, 6, 2, 0.2);
    auto b = relabel_raters(random_matrix(rng, 4, 6, 2, 0.2), "b_");
    try {
      double ab = xrr(a, b).value;
      double ba = xrr(b, a).value;
      CHECK(std::abs(ab - ba) < 1e-14);
    } catch (const Error&) {
      // degenerate draw; the error paths have their own tests
    }
  }
  auto a = make_matrix(binary_domain(), {{0, 1}, {1, 0}});
  bool warned = false;
  xrr(a, a, &warned);
  CHECK(warned);
  xrr(a, relabel_raters(a, "b_"), &warned);
  CHECK_FALSE(warned);
}

TEST_CASE("negentropy: unanimous and split fixed points") {
  auto unanimous =
      make_matrix(binary_domain(), {{0, 0, 0, 0}, {1, 1, 1, 1}});
  CHECK(negentropy(unanimous).value == 1.0);
  auto split = make_matrix(binary_domain(), {{0, 0, 1, 1}, {1, 1, 0, 0}});
  CHECK(negentropy(split).value == 0.0);
}

TEST_CASE("negentropy: 3-1 item evaluates the closed form") {
  auto m = make_matrix(binary_domain(), {{0, 0, 0, 1}, {1, 1, 1, 0}});
  CHECK(std::abs(negentropy(m).value - 0.18872187554086717) < 1e-12);
  CHECK_THROWS_AS(negentropy(make_matrix(binary_domain(), {})),
                  InsufficientDataError);
}

TEST_CASE("cross negentropy: identical sides equal smoothed negentropy") {
  auto a = make_matrix(binary_domain(), {{0, 0, 1}, {1, 1, 1}, {0, 1, 1}});
  auto b = relabel_raters(a, "b_");
  double got = cross_negentropy(a, b).value;
  // independent recomputation: H_max - H(smoothed) per item
  double expected = 0.0;
  for (size_t row = 0; row < a.items.size(); ++row) {
    auto counts = a.row_label_counts(row);
    double m = counts[0] + counts[1];
    double h = 0.0;
    for (int32_t c : counts) {
      double p = (c + 0.5) / (m + 1.0);
      h -= p * std::log2(p);
    }
    expected += 1.0 - h;
  }
  expected /= static_cast<double>(a.items.size());
  CHECK(std::abs(got - expected) < 1e-12);
}

TEST_CASE("cross negentropy: opposed unanimous groups clamp to zero") {
  auto a = make_matrix(binary_domain(), {{0, 0, 0}, {0, 0, 0}});
  auto b = relabel_raters(
      make_matrix(binary_domain(), {{1, 1, 1}, {1, 1, 1}}), "b_");
  CHECK(cross_negentropy(a, b).value == 0.0);
}

TEST_CASE("cross negentropy: hand-computed five-item fixture") {
  // group counts per item: a = (3,0),(2,1),(1,2),(0,3),(2,1)
  //                        b = (3,0),(1,2),(1,2),(1,2),(0,3)
  auto a = make_matrix(binary_domain(),
                       {{0, 0, 0}, {0, 0, 1}, {0, 1, 1}, {1, 1, 1}, {0, 0, 1}});
  auto b = relabel_raters(
      make_matrix(binary_domain(),
                  {{0, 0, 0}, {0, 1, 1}, {0, 1, 1}, {0, 1, 1}, {1, 1, 1}}),
      "b_");
  CHECK(std::abs(cross_negentropy(a, b).value - 0.10040031077508771) < 1e-12);
  CHECK(cross_negentropy(a, b).value ==
        doctest::Approx(cross_negentropy(b, a).value).epsilon(1e-15));
}

TEST_CASE("plurality: unanimous, tie and counted fixtures") {
  auto unanimous = make_matrix(binary_domain(), {{0, 0, 0}, {1, 1, 1}});
  CHECK(plurality_size(unanimous).value == 1.0);
  auto tied = make_matrix(binary_domain(), {{0, 0, 1, 1}, {1, 0, 1, 0}});
  CHECK(plurality_size(tied).value == 0.5);

  auto m = make_matrix(binary_domain(), {{0, 0, 0, 0, 0, 0, 1, 1}});
  ItemPlurality p = item_plurality(m, m.items[0]);
  CHECK(p.fraction == doctest::Approx(0.75));
  REQUIRE(p.modal_labels.size() == 1);
  CHECK(p.modal_labels[0] == "offensive");

  auto even = make_matrix(binary_domain(), {{0, 0, 0, 1, 1, 1}});
  ItemPlurality q = item_plurality(even, even.items[0]);
  CHECK(q.fraction == doctest::Approx(0.5));
  CHECK(q.modal_labels ==
        std::vector<std::string>{"offensive", "not_offensive"});

  CHECK_THROWS_AS(item_plurality(m, "missing"), InsufficientDataError);
}

TEST_CASE("plurality: bounded below by 1/labels, 1 only when unanimous") {
  std::mt19937_64 rng(4242);
  for (int trial = 0; trial < 50; ++trial) {
    int labels = 2 + static_cast<int>(rng() % 3);
    auto m = random_matrix(rng, 4, 6, labels, 0.2);
    MetricValue v = plurality_size(m);
    CHECK(v.value >= 1.0 / labels - 1e-12);
    bool unanimous = true;
    for (size_t row = 0; row < m.items.size(); ++row) {
      auto counts = m.row_label_counts(row);
      int nonzero = 0;
      for (int32_t c : counts) nonzero += c > 0 ? 1 : 0;
      unanimous = unanimous && nonzero <= 1;
    }
    CHECK((v.value == 1.0) == unanimous);
  }
}

TEST_CASE("voting agreement: identical and anti-aligned vote vectors") {
  auto a = make_matrix(binary_domain(),
                       {{0, 0, 0}, {1, 1, 1}, {0, 0, 0}, {1, 1, 1}});
  auto b = relabel_raters(a, "b_");
  CHECK(voting_agreement(a, b).value == doctest::Approx(1.0));

  auto flipped = relabel_raters(
      make_matrix(binary_domain(),
                  {{1, 1, 1}, {0, 0, 0}, {1, 1, 1}, {0, 0, 0}}),
      "b_");
  CHECK(voting_agreement(a, flipped).value == -1.0);
}

TEST_CASE("voting agreement: tied items are dropped and counted") {
  auto a = make_matrix(binary_domain(),
                       {{0, 0, 0}, {0, 1, std::nullopt}, {1, 1, 1}, {0, 0, 1}});
  auto b = relabel_raters(
      make_matrix(binary_domain(),
                  {{0, 0, 1}, {1, 1, 1}, {1, 1, 0}, {1, 0, std::nullopt}}),
      "b_");
  MetricValue v = voting_agreement(a, b);
  CHECK(v.support.items_dropped == 2);  // a ties on item 1, b on item 3
  CHECK(v.support.items_used == 2);

  auto all_tied = make_matrix(binary_domain(), {{0, 1}, {1, 0}});
  CHECK_THROWS_AS(voting_agreement(all_tied, relabel_raters(all_tied, "b_")),
                  InsufficientDataError);
}

TEST_CASE("gai: ratio, paper row reconstruction and undefined cases") {
  MetricValue irr{Metric::kIrr, 0.3, {}};
  MetricValue x{Metric::kXrr, 0.3, {}};
  CHECK(gai(irr, x).value == doctest::Approx(1.0));

  MetricValue irr_row{Metric::kIrr, 0.176, {}};
  MetricValue xrr_row{Metric::kXrr, 0.148, {}};
  double ratio = gai(irr_row, xrr_row).value;
  CHECK(std::abs(ratio - 1.189) < 1e-3);  // rounded-input reconstruction
  CHECK(std::abs(ratio - 1.193) < 0.01);  // consistent with unrounded tables

  MetricValue zero{Metric::kXrr, 0.0, {}};
  CHECK_THROWS_AS(gai(irr, zero), UndefinedError);
  MetricValue negative{Metric::kXrr, -0.2, {}};
  CHECK_THROWS_AS(gai(irr, negative), UndefinedError);
  MetricValue tiny{Metric::kXrr, 1e-12, {}};
  CHECK_THROWS_AS(gai(irr, tiny), UndefinedError);
}

TEST_CASE("property: label bijection leaves every metric unchanged") {
  std::mt19937_64 rng(31337);
  for (int trial = 0; trial < 25; ++trial) {
    int labels = 2 + static_cast<int>(rng() % 2);
    auto m = random_matrix(rng, 4, 8, labels, 0.15);
    auto other = relabel_raters(random_matrix(rng, 3, 8, labels, 0.15), "b_");
    std::vector<int> mapping(labels);
    for (int i = 0; i < labels; ++i) mapping[i] = (i + 1) % labels;
    auto pm = permute_labels(m, mapping);
    auto pother = permute_labels(other, mapping);

    auto check_same = [](auto&& f) {
      try {
        double base = f(false);
        double mapped = f(true);
        CHECK(std::abs(base - mapped) < 1e-12);
      } catch (const Error&) {
        // both routes throw for degenerate draws; covered by example tests
      }
    };
    check_same([&](bool p) { return krippendorff_alpha(p ? pm : m).value; });
    check_same(
        [&](bool p) { return xrr(p ? pm : m, p ? pother : other).value; });
    check_same([&](bool p) { return negentropy(p ? pm : m).value; });
    check_same([&](bool p) {
      return cross_negentropy(p ? pm : m, p ? pother : other).value;
    });
    check_same([&](bool p) { return plurality_size(p ? pm : m).value; });
    check_same([&](bool p) {
      return voting_agreement(p ? pm : m, p ? pother : other).value;
    });
    check_same([&](bool p) {
      return gai(krippendorff_alpha(p ? pm : m),
                 xrr(p ? pm : m, p ? pother : other))
          .value;
    });
  }
}

TEST_CASE("property: column order never matters") {
  std::mt19937_64 rng(5150);
  for (int trial = 0; trial < 25; ++trial) {
    auto m = random_matrix(rng, 5, 6, 2, 0.2);
    auto shuffled = shuffle_columns(m, rng());
    try {
      CHECK(krippendorff_alpha(m).value == krippendorff_alpha(shuffled).value);
    } catch (const Error&) {
    }
    CHECK(negentropy(m).value == negentropy(shuffled).value);
    CHECK(plurality_size(m).value == plurality_size(shuffled).value);
  }
}

TEST_CASE("property: duplicating every rating is a no-op for negentropy "
          "and plurality") {
  std::mt19937_64 rng(777);
  for (int trial = 0; trial < 20; ++trial) {
    auto m = random_matrix(rng, 4, 5, 2, 0.0);
    ResponseMatrix doubled = m;
    size_t cols = m.raters.size();
    for (size_t c = 0; c < cols; ++c) {
      doubled.raters.push_back("dup_" + m.raters[c]);
    }
    for (size_t row = 0; row < m.cells.size(); ++row) {
      for (const auto& cell : m.cells[row]) {
        doubled.cells[row].push_back(
            {static_cast<int32_t>(cell.column + cols), cell.label});
      }
    }
    CHECK(negentropy(m).value == negentropy(doubled).value);
    CHECK(plurality_size(m).value == plurality_size(doubled).value);
  }
}

TEST_CASE("property: full-matrix alpha matches the oracle tightly") {
  std::mt19937_64 rng(2025);
  for (int trial = 0; trial < 100; ++trial) {
    auto m = random_matrix(rng, 2 + static_cast<int>(rng() % 5),
                           2 + static_cast<int>(rng() % 9), 2, 0.0);
    auto expected = oracle_alpha(m);
    if (!expected) {
      CHECK_THROWS_AS(krippendorff_alpha(m), Error);
      continue;
    }
    CHECK(std::abs(krippendorff_alpha(m).value - *expected) < 1e-12);
  }
}

TEST_CASE("property: metric ranges on random data") {
  std::mt19937_64 rng(808);
  for (int trial = 0; trial < 50; ++trial) {
    auto m = random_matrix(rng, 4, 8, 2, 0.1);
    auto other = relabel_raters(random_matrix(rng, 4, 8, 2, 0.1), "b_");
    try {
      double a = krippendorff_alpha(m).value;
      CHECK(a >= -1.0);
      CHECK(a <= 1.0);
    } catch (const Error&) {
    }
    try {
      double x = xrr(m, other).value;
      CHECK(x >= -1.0);
      CHECK(x <= 1.0);
    } catch (const Error&) {
    }
    try {
      double v = voting_agreement(m, other).value;
      CHECK(v >= -1.0);
      CHECK(v <= 1.0);
    } catch (const Error&) {
    }
    double n = negentropy(m).value;
    CHECK(n >= 0.0);
    CHECK(n <= 1.0);
    double c = cross_negentropy(m, other).value;
    CHECK(c >= 0.0);
    CHECK(c <= 1.0);
  }
}
