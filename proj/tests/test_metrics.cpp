#include <algorithm>
#include <cmath>
#include <vector>

#include "doctest.h"
#include "ejet/errors.hpp"
#include "ejet/metrics.hpp"
#include "ejet/rng.hpp"

using namespace ejet;

namespace {

// The three reference confusion tables (rows actual, columns predicted).
const ConfusionMatrix kDefaultTree{.tn = 142, .fp = 12, .fn = 20, .tp = 65};
const ConfusionMatrix kPrunedTree{.tn = 149, .fp = 5, .fn = 31, .tp = 54};
const ConfusionMatrix kHighlyPruned{.tn = 125, .fp = 29, .fn = 24, .tp = 61};

// Independent pairwise oracle: P(s_pos > s_neg) + 0.5 P(s_pos = s_neg).
double mann_whitney(const std::vector<double>& scores,
                    const std::vector<int>& labels) {
  double wins = 0.0;
  std::int64_t pairs = 0;
  for (std::size_t i = 0; i < scores.size(); ++i)
    for (std::size_t j = 0; j < scores.size(); ++j) {
      if (labels[i] != 1 || labels[j] != 0) continue;
      ++pairs;
      if (scores[i] > scores[j])
        wins += 1.0;
      else if (scores[i] == scores[j])
        wins += 0.5;
    }
  return wins / static_cast<double>(pairs);
}

}  // namespace

TEST_CASE("confusion counts actual/predicted pairs") {
  const std::vector<int> a{1, 1, 0}, p{1, 1, 0};
  const ConfusionMatrix cm = confusion(a, p);
  CHECK(cm.tn == 1);
  CHECK(cm.tp == 2);
  CHECK(cm.fp == 0);
  CHECK(cm.fn == 0);

  const std::vector<int> a2{0, 1}, p2{1, 0};
  const ConfusionMatrix cm2 = confusion(a2, p2);
  CHECK(cm2.fp == 1);
  CHECK(cm2.fn == 1);

  const std::vector<int> short_p{1};
  CHECK_THROWS_AS(confusion(a, short_p), DataError);
}

TEST_CASE("confusion reconstructs the default-tree table") {
  std::vector<int> actual, predicted;
  auto add = [&](int a, int p, int count) {
    for (int i = 0; i < count; ++i) {
      actual.push_back(a);
      predicted.push_back(p);
    }
  };
  add(0, 0, 142);
  add(0, 1, 12);
  add(1, 0, 20);
  add(1, 1, 65);
  const ConfusionMatrix cm = confusion(actual, predicted);
  CHECK(cm.tn == 142);
  CHECK(cm.fp == 12);
  CHECK(cm.fn == 20);
  CHECK(cm.tp == 65);
  CHECK(cm.total() == 239);
}

TEST_CASE("accuracy and misclassification on the reference tables") {
  CHECK(accuracy(kDefaultTree) == doctest::Approx(207.0 / 239.0).epsilon(1e-12));
  CHECK(accuracy(kPrunedTree) == doctest::Approx(203.0 / 239.0).epsilon(1e-12));
  CHECK(accuracy(kHighlyPruned) ==
        doctest::Approx(186.0 / 239.0).epsilon(1e-12));
  CHECK(accuracy(ConfusionMatrix{.tn = 3, .fp = 0, .fn = 0, .tp = 5}) == 1.0);
  CHECK(misclassification(kDefaultTree) ==
        doctest::Approx(1.0 - 207.0 / 239.0).epsilon(1e-12));
  CHECK(accuracy(kDefaultTree) + misclassification(kDefaultTree) == 1.0);
}

TEST_CASE("precision and recall, conventional and literal modes") {
  CHECK(*precision(kDefaultTree) ==
        doctest::Approx(65.0 / 77.0).epsilon(1e-12));
  CHECK(*recall(kDefaultTree) == doctest::Approx(65.0 / 85.0).epsilon(1e-12));
  // literal mode swaps the denominators
  CHECK(*precision(kDefaultTree, MetricMode::kSwapped) ==
        doctest::Approx(65.0 / 85.0).epsilon(1e-12));
  CHECK(*recall(kDefaultTree, MetricMode::kSwapped) ==
        doctest::Approx(65.0 / 77.0).epsilon(1e-12));

  CHECK(*precision(ConfusionMatrix{.tn = 1, .fp = 3, .fn = 2, .tp = 0}) == 0.0);
  const ConfusionMatrix perfect{.tn = 4, .fp = 0, .fn = 0, .tp = 6};
  CHECK(*precision(perfect) == 1.0);
  CHECK(*recall(perfect) == 1.0);
  // 0/0 reported absent, not 0
  const ConfusionMatrix no_pred_pos{.tn = 5, .fp = 0, .fn = 2, .tp = 0};
  CHECK_FALSE(precision(no_pred_pos).has_value());
}

TEST_CASE("f1 on the default table and mode invariance") {
  CHECK(*f1(kDefaultTree) == doctest::Approx(130.0 / 162.0).epsilon(1e-12));
  const ConfusionMatrix perfect{.tn = 4, .fp = 0, .fn = 0, .tp = 6};
  CHECK(*f1(perfect) == 1.0);
  const ConfusionMatrix zero{.tn = 5, .fp = 0, .fn = 2, .tp = 0};
  CHECK_FALSE(f1(zero).has_value());

  SplitMix64 rng(42);
  for (int i = 0; i < 1000; ++i) {
    const ConfusionMatrix cm{
        .tn = static_cast<std::int64_t>(rng.next_below(50)),
        .fp = static_cast<std::int64_t>(rng.next_below(50)),
        .fn = static_cast<std::int64_t>(rng.next_below(50)),
        .tp = static_cast<std::int64_t>(1 + rng.next_below(50))};
    const auto a = f1(cm, MetricMode::kConventional);
    const auto b = f1(cm, MetricMode::kSwapped);
    REQUIRE(a.has_value() == b.has_value());
    if (a) CHECK(std::abs(*a - *b) <= 1e-12);
  }
}

TEST_CASE("kappa on the reference table, perfect and independent cases") {
  // exact fraction from the table cells: 17980/25628
  CHECK(*kappa(kDefaultTree) ==
        doctest::Approx(17980.0 / 25628.0).epsilon(1e-12));
  CHECK(*kappa(kDefaultTree) == doctest::Approx(0.70158).epsilon(1e-4));
  CHECK(*kappa(ConfusionMatrix{.tn = 9, .fp = 0, .fn = 0, .tp = 4}) == 1.0);
  // outer product of marginals (60,40) x (70,30): independence -> 0
  CHECK(*kappa(ConfusionMatrix{.tn = 42, .fp = 18, .fn = 28, .tp = 12}) ==
        doctest::Approx(0.0));
  // all mass in one cell pattern -> random accuracy 1 -> absent
  CHECK_FALSE(kappa(ConfusionMatrix{.tn = 5, .fp = 0, .fn = 0, .tp = 0})
                  .has_value());
}

TEST_CASE("kappa is at most 1 and 1 only without errors") {
  SplitMix64 rng(3);
  for (int i = 0; i < 300; ++i) {
    const ConfusionMatrix cm{
        .tn = static_cast<std::int64_t>(rng.next_below(30)),
        .fp = static_cast<std::int64_t>(rng.next_below(30)),
        .fn = static_cast<std::int64_t>(rng.next_below(30)),
        .tp = static_cast<std::int64_t>(1 + rng.next_below(30))};
    const auto k = kappa(cm);
    if (!k) continue;
    CHECK(*k <= 1.0 + 1e-12);
    if (cm.fp == 0 && cm.fn == 0)
      CHECK(*k == doctest::Approx(1.0));
    else
      CHECK(*k < 1.0);
  }
}

TEST_CASE("roc_curve hand-swept example") {
  const std::vector<int> labels{0, 0, 1, 1};
  const std::vector<double> scores{0.1, 0.4, 0.35, 0.8};
  const RocCurve c = roc_curve(scores, labels);
  const std::vector<std::pair<double, double>> expected{
      {0.0, 0.0}, {0.0, 0.5}, {0.5, 0.5}, {0.5, 1.0}, {1.0, 1.0}};
  REQUIRE(c.points == expected);
  CHECK(auc(c) == doctest::Approx(0.75).epsilon(1e-12));
}

TEST_CASE("roc_curve edge shapes") {
  // perfect separation passes through (0,1)
  const std::vector<int> y{0, 0, 1, 1};
  const std::vector<double> s{0.1, 0.2, 0.8, 0.9};
  const RocCurve perfect = roc_curve(s, y);
  CHECK(std::find(perfect.points.begin(), perfect.points.end(),
                  std::pair{0.0, 1.0}) != perfect.points.end());
  CHECK(auc(perfect) == doctest::Approx(1.0));

  // constant scores: one tie group, chance diagonal
  const std::vector<double> flat{0.5, 0.5, 0.5, 0.5};
  const RocCurve chance = roc_curve(flat, y);
  REQUIRE(chance.points.size() == 2);
  CHECK(chance.points.front() == std::pair{0.0, 0.0});
  CHECK(chance.points.back() == std::pair{1.0, 1.0});
  CHECK(auc(chance) == doctest::Approx(0.5));

  const std::vector<int> single{1, 1, 1};
  const std::vector<double> ss{0.1, 0.2, 0.3};
  CHECK_THROWS_AS(roc_curve(ss, single), DataError);
}

TEST_CASE("roc_curve points are monotone in both coordinates") {
  SplitMix64 rng(8);
  for (int trial = 0; trial < 50; ++trial) {
    const int n = 2 + static_cast<int>(rng.next_below(40));
    std::vector<int> y;
    std::vector<double> s;
    for (int i = 0; i < n; ++i) {
      y.push_back(static_cast<int>(rng.next_below(2)));
      s.push_back(rng.next_below(5) / 4.0);  // heavy ties
    }
    y[0] = 0;
    y[1] = 1;
    const RocCurve c = roc_curve(s, y);
    for (std::size_t i = 1; i < c.points.size(); ++i) {
      CHECK(c.points[i].first >= c.points[i - 1].first);
      CHECK(c.points[i].second >= c.points[i - 1].second);
    }
    CHECK(c.points.front() == std::pair{0.0, 0.0});
    CHECK(c.points.back() == std::pair{1.0, 1.0});
  }
}

TEST_CASE("auc equals the pairwise statistic and ignores monotone rescaling") {
  SplitMix64 rng(21);
  for (int trial = 0; trial < 100; ++trial) {
    const int n = 2 + static_cast<int>(rng.next_below(49));
    std::vector<int> y;
    std::vector<double> s;
    for (int i = 0; i < n; ++i) {
      y.push_back(static_cast<int>(rng.next_below(2)));
      s.push_back(rng.next_below(8) / 7.0);
    }
    y[0] = 0;
    y[1] = 1;
    const double a = auc(roc_curve(s, y));
    CHECK(std::abs(a - mann_whitney(s, y)) <= 1e-12);

    std::vector<double> warped = s;
    for (double& v : warped) v = std::exp(3.0 * v) + 1.0;  // strictly increasing
    CHECK(auc(roc_curve(warped, y)) == a);
  }
}

TEST_CASE("evaluate bundles a report with AUC from scores") {
  const std::vector<int> actual{0, 0, 1, 1};
  const std::vector<int> predicted{0, 1, 1, 1};
  const std::vector<double> scores{0.1, 0.6, 0.7, 0.9};
  const EvalReport r = evaluate("toy", actual, predicted, scores);
  CHECK(r.model_name == "toy");
  CHECK(r.accuracy == doctest::Approx(0.75));
  CHECK(r.misclassification == doctest::Approx(0.25));
  REQUIRE(r.auc.has_value());
  CHECK(*r.auc == doctest::Approx(1.0));
  CHECK(eval_report_csv_header() ==
        "model,accuracy,misclassification,f1,auc,kappa,recall");
  CHECK(eval_report_csv_row(r) ==
        "toy,0.75,0.25,0.8,1,0.5,1");
}
