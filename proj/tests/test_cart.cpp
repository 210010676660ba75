#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>
#include <vector>

#include "doctest.h"
#include "ejet/cart.hpp"
#include "ejet/errors.hpp"
#include "ejet/rng.hpp"
#include "ejet/synthgen.hpp"

using namespace ejet;

namespace {

Dataset one_dim(const std::vector<std::pair<double, int>>& rows) {
  Dataset ds;
  for (const auto& [x, y] : rows)
    ds.samples.push_back({{x, 0.0, 0.0}, std::nullopt, y});
  return ds;
}

std::vector<int> all_idx(const Dataset& ds) {
  std::vector<int> idx(ds.size());
  std::iota(idx.begin(), idx.end(), 0);
  return idx;
}

// Exhaustive reference for best_split: every feature, every midpoint
// between consecutive distinct sorted values, same tie rules. Counts are
// re-derived per candidate instead of swept incrementally.
std::optional<SplitChoice> brute_force_split(const Dataset& ds,
                                             const std::vector<int>& idx,
                                             int min_leaf) {
  double w0 = 0, w1 = 0;
  for (int i : idx) (*ds.samples[i].label == 0 ? w0 : w1) += 1.0;
  const double parent = gini_weighted(w0, w1);
  const double total = w0 + w1;

  std::optional<SplitChoice> best;
  for (int f = 0; f < kNumFeatures; ++f) {
    std::vector<double> values;
    for (int i : idx) values.push_back(ds.samples[i].x[f]);
    std::sort(values.begin(), values.end());
    values.erase(std::unique(values.begin(), values.end()), values.end());
    for (std::size_t v = 0; v + 1 < values.size(); ++v) {
      const double threshold = (values[v] + values[v + 1]) / 2.0;
      double l0 = 0, l1 = 0, r0 = 0, r1 = 0;
      for (int i : idx) {
        const bool left = ds.samples[i].x[f] < threshold;
        if (*ds.samples[i].label == 0)
          (left ? l0 : r0) += 1.0;
        else
          (left ? l1 : r1) += 1.0;
      }
      if (l0 + l1 < min_leaf || r0 + r1 < min_leaf) continue;
      const double gain =
          parent - ((l0 + l1) * gini_weighted(l0, l1) +
                    (r0 + r1) * gini_weighted(r0, r1)) /
                       total;
      if (gain <= 0.0) continue;
      if (!best || gain > best->gain) best = SplitChoice{f, threshold, gain};
    }
  }
  return best;
}

Dataset random_dataset(SplitMix64& rng, int n) {
  Dataset ds;
  for (int i = 0; i < n; ++i)
    ds.samples.push_back({{rng.next_below(8) / 2.0, rng.next_below(8) / 2.0,
                           rng.next_below(8) / 2.0},
                          std::nullopt,
                          static_cast<int>(rng.next_below(2))});
  return ds;
}

}  // namespace

TEST_CASE("gini values") {
  CHECK(gini(8, 0) == 0.0);
  CHECK(gini(5, 5) == doctest::Approx(0.5).epsilon(1e-15));
  CHECK(gini(154, 85) == doctest::Approx(0.45832).epsilon(1e-5));
  CHECK_THROWS_AS(gini(0, 0), DataError);
}

TEST_CASE("gini range and purity") {
  SplitMix64 rng(1);
  for (int i = 0; i < 200; ++i) {
    const auto n0 = static_cast<std::int64_t>(rng.next_below(40));
    const auto n1 = static_cast<std::int64_t>(rng.next_below(40));
    if (n0 + n1 == 0) continue;
    const double g = gini(n0, n1);
    CHECK(g >= 0.0);
    CHECK(g <= 0.5);
    CHECK((g == 0.0) == (n0 == 0 || n1 == 0));
  }
}

TEST_CASE("best_split on the four-point line") {
  const Dataset ds = one_dim({{1, 0}, {2, 0}, {3, 1}, {4, 1}});
  const auto split = best_split(ds, all_idx(ds));
  REQUIRE(split.has_value());
  CHECK(split->feature == 0);
  CHECK(split->threshold == 2.5);
  CHECK(split->gain == doctest::Approx(0.5).epsilon(1e-15));
}

TEST_CASE("best_split absent cases") {
  const Dataset pure = one_dim({{1, 1}, {2, 1}, {3, 1}});
  CHECK_FALSE(best_split(pure, all_idx(pure)).has_value());

  // identical rows with conflicting labels: no midpoint exists
  const Dataset dup = one_dim({{2, 0}, {2, 1}, {2, 0}, {2, 1}});
  CHECK_FALSE(best_split(dup, all_idx(dup)).has_value());
}

TEST_CASE("best_split respects min_leaf") {
  const Dataset ds = one_dim({{1, 0}, {2, 0}, {3, 0}, {4, 1}});
  // only the 3|1 cut separates, but min_leaf=2 forbids it; the 2|2 cut
  // still has positive gain, so it wins
  const auto split = best_split(ds, all_idx(ds), {}, 2);
  REQUIRE(split.has_value());
  CHECK(split->threshold == 2.5);
  CHECK(split->gain == doctest::Approx(brute_force_split(ds, all_idx(ds), 2)->gain));
}

TEST_CASE("best_split honors sample weights") {
  // upweighting the single class-1 point moves the best cut toward it
  Dataset ds = one_dim({{1, 0}, {2, 0}, {3, 1}, {4, 0}});
  const std::vector<double> weights{1.0, 1.0, 10.0, 1.0};
  const auto split = best_split(ds, all_idx(ds), weights, 1);
  REQUIRE(split.has_value());
  CHECK(split->threshold == 2.5);
  const auto unweighted = best_split(ds, all_idx(ds));
  REQUIRE(unweighted.has_value());
  CHECK(split->gain > unweighted->gain);
}

TEST_CASE("best_split agrees with brute force on random datasets") {
  SplitMix64 rng(2024);
  for (int trial = 0; trial < 100; ++trial) {
    const int n = 2 + static_cast<int>(rng.next_below(11));
    const Dataset ds = random_dataset(rng, n);
    const int min_leaf = 1 + static_cast<int>(rng.next_below(3));
    const auto idx = all_idx(ds);
    const auto fast = best_split(ds, idx, {}, min_leaf);
    const auto slow = brute_force_split(ds, idx, min_leaf);
    REQUIRE(fast.has_value() == slow.has_value());
    if (fast) {
      CHECK(fast->feature == slow->feature);
      CHECK(fast->threshold == slow->threshold);
      CHECK(fast->gain == slow->gain);
    }
  }
}

TEST_CASE("grow stopping rules") {
  const Dataset pure = one_dim({{1, 1}, {2, 1}, {3, 1}});
  const TreeNode leaf = grow(pure, TreeParams{});
  CHECK(leaf.is_leaf());
  CHECK(leaf.predicted == 1);

  // 10 samples under min_split=20: single leaf regardless of separability
  Dataset small;
  for (int i = 0; i < 10; ++i)
    small.samples.push_back({{double(i), 0, 0}, std::nullopt, i < 5 ? 0 : 1});
  const TreeNode stump = grow(small, TreeParams{});
  CHECK(stump.is_leaf());
  CHECK(stump.counts == std::array<std::int64_t, 2>{5, 5});
  CHECK(stump.predicted == 0);  // tie -> class 0

  const TreeNode split_tree =
      grow(small, TreeParams{.min_split = 2, .min_leaf = 1, .cp = 0.0});
  CHECK_FALSE(split_tree.is_leaf());

  // depth gate
  const TreeNode depth1 = grow(
      small, TreeParams{.min_split = 2, .min_leaf = 1, .max_depth = 1, .cp = 0});
  CHECK_FALSE(depth1.is_leaf());
  CHECK(depth1.left->is_leaf());
  CHECK(depth1.right->is_leaf());

  CHECK_THROWS_AS(grow(Dataset{}, TreeParams{}), DataError);
}

TEST_CASE("grow root split on the synthetic dataset is nozzle speed") {
  GeneratorConfig cfg;
  cfg.seed = 5;
  const Dataset ds = generate(cfg);
  const TreeNode tree = grow(ds, TreeParams{});
  REQUIRE_FALSE(tree.is_leaf());
  CHECK(tree.feature == kFeatSpeed);
  // brute-force root-split oracle
  const auto oracle = brute_force_split(ds, all_idx(ds), 7);
  REQUIRE(oracle.has_value());
  CHECK(tree.feature == oracle->feature);
  CHECK(tree.threshold == oracle->threshold);
}

TEST_CASE("grow is invariant under sample reordering") {
  SplitMix64 rng(31);
  for (int trial = 0; trial < 20; ++trial) {
    Dataset ds = random_dataset(rng, 24);
    if (ds.class_counts()[0] == 0 || ds.class_counts()[1] == 0) continue;
    const TreeParams params{.min_split = 4, .min_leaf = 2, .cp = 0.0};
    const TreeNode a = grow(ds, params);
    rng.shuffle(ds.samples);
    const TreeNode b = grow(ds, params);
    CHECK(tree_equal(a, b));
  }
}

TEST_CASE("unpruned tree memorizes distinct-feature data") {
  SplitMix64 rng(7);
  for (int trial = 0; trial < 20; ++trial) {
    const int n = 2 + static_cast<int>(rng.next_below(11));
    Dataset ds;
    for (int i = 0; i < n; ++i)
      ds.samples.push_back({{rng.next_unit(), rng.next_unit(), rng.next_unit()},
                            std::nullopt,
                            static_cast<int>(rng.next_below(2))});
    const TreeNode tree =
        grow(ds, TreeParams{.min_split = 2, .min_leaf = 1, .cp = 0.0});
    for (const auto& s : ds.samples)
      CHECK(tree_predict(tree, s.x).first == *s.label);
  }
}

TEST_CASE("predict on leaves and routing") {
  TreeNode leaf;
  leaf.counts = {3, 1};
  leaf.predicted = 0;
  const auto [cls, score] = tree_predict(leaf, {1, 2, 3});
  CHECK(cls == 0);
  CHECK(score == doctest::Approx(0.25));

  TreeNode root;
  root.counts = {4, 4};
  root.feature = kFeatSpeed;
  root.threshold = 500.0;
  root.left = std::make_unique<TreeNode>();
  root.left->counts = {0, 4};
  root.left->predicted = 1;
  root.right = std::make_unique<TreeNode>();
  root.right->counts = {4, 0};
  root.right->predicted = 0;
  CHECK(tree_predict(root, {300, 0, 0}).first == 1);
  CHECK(tree_predict(root, {700, 0, 0}).first == 0);
  CHECK(tree_predict(root, {500, 0, 0}).first == 0);  // >= goes right
}

TEST_CASE("prune laws on random grown trees") {
  SplitMix64 rng(99);
  const std::vector<double> cps{0.0, 0.01, 0.05, 0.2, 1.0};
  for (int trial = 0; trial < 50; ++trial) {
    const int n = 12 + static_cast<int>(rng.next_below(60));
    const Dataset ds = random_dataset(rng, n);
    if (ds.class_counts()[0] == 0 || ds.class_counts()[1] == 0) continue;
    const TreeNode tree =
        grow(ds, TreeParams{.min_split = 4, .min_leaf = 1, .cp = 0.01});
    const double root_risk = static_cast<double>(leaf_risk(tree));

    // identity at cp = 0
    CHECK(tree_equal(prune(tree, 0.0, root_risk), tree));
    // single leaf at cp = 1
    const TreeNode collapsed = prune(tree, 1.0, root_risk);
    CHECK(collapsed.is_leaf());
    CHECK(collapsed.counts == tree.counts);

    // node count non-increasing in cp
    int prev = node_count(prune(tree, cps[0], root_risk));
    for (std::size_t i = 1; i < cps.size(); ++i) {
      const int cur = node_count(prune(tree, cps[i], root_risk));
      CHECK(cur <= prev);
      prev = cur;
    }

    // prune(prune(t,a),b) == prune(t, max(a,b))
    const double a = cps[rng.next_below(cps.size())];
    const double b = cps[rng.next_below(cps.size())];
    const TreeNode two_step = prune(prune(tree, a, root_risk), b, root_risk);
    const TreeNode one_step = prune(tree, std::max(a, b), root_risk);
    CHECK(tree_equal(two_step, one_step));
  }
}

TEST_CASE("pruned tree at higher cp is never larger") {
  GeneratorConfig cfg;
  cfg.seed = 3;
  const Dataset ds = generate(cfg);
  const TreeNode tree = grow(ds, TreeParams{});
  const double root_risk = static_cast<double>(leaf_risk(tree));
  const int n_005 = node_count(prune(tree, 0.05, root_risk));
  const int n_02 = node_count(prune(tree, 0.2, root_risk));
  CHECK(n_005 >= n_02);
  CHECK(n_005 <= node_count(tree));
}

TEST_CASE("leaves satisfy their ancestor conditions") {
  GeneratorConfig cfg;
  cfg.seed = 11;
  cfg.n = 150;
  const Dataset ds = generate(cfg);
  const TreeNode tree =
      grow(ds, TreeParams{.min_split = 4, .min_leaf = 2, .cp = 0.0});
  // route every sample and re-check each comparison on the path
  for (const auto& s : ds.samples) {
    const TreeNode* node = &tree;
    while (!node->is_leaf()) {
      if (s.x[node->feature] < node->threshold) {
        CHECK(s.x[node->feature] < node->threshold);
        node = node->left.get();
      } else {
        CHECK(s.x[node->feature] >= node->threshold);
        node = node->right.get();
      }
    }
    CHECK(node->n() >= 1);
  }
}

TEST_CASE("render formats") {
  TreeNode leaf;
  leaf.counts = {10, 2};
  leaf.predicted = 0;
  CHECK(render(leaf) == "class=0 (10, 2)\n");

  TreeNode stump;
  stump.counts = {3, 3};
  stump.feature = kFeatSpeed;
  stump.threshold = 500.0;
  stump.left = std::make_unique<TreeNode>();
  stump.left->counts = {0, 3};
  stump.left->predicted = 1;
  stump.right = std::make_unique<TreeNode>();
  stump.right->counts = {3, 0};
  stump.right->predicted = 0;
  CHECK(render(stump) ==
        "nozzle_speed < 500\n  class=1 (0, 3)\n  class=0 (3, 0)\n");
}

namespace {

TreeNode random_tree(SplitMix64& rng, int depth) {
  TreeNode t;
  if (depth == 0 || rng.next_below(2) == 0) {
    t.counts = {static_cast<std::int64_t>(rng.next_below(5)),
                static_cast<std::int64_t>(1 + rng.next_below(5))};
    t.predicted = t.counts[1] > t.counts[0] ? 1 : 0;
    return t;
  }
  t.feature = static_cast<int>(rng.next_below(3));
  t.threshold = 0.5 * static_cast<double>(rng.next_below(10));
  t.left = std::make_unique<TreeNode>(random_tree(rng, depth - 1));
  t.right = std::make_unique<TreeNode>(random_tree(rng, depth - 1));
  t.counts = {t.left->counts[0] + t.right->counts[0],
              t.left->counts[1] + t.right->counts[1]};
  t.predicted = t.counts[1] > t.counts[0] ? 1 : 0;
  return t;
}

}  // namespace

TEST_CASE("render distinguishes distinct small trees") {
  SplitMix64 rng(55);
  std::vector<TreeNode> trees;
  for (int i = 0; i < 200; ++i) {
    TreeNode t = random_tree(rng, 2);
    if (node_count(t) <= 7) trees.push_back(std::move(t));
  }
  std::set<std::string> texts;
  int distinct = 0;
  for (std::size_t i = 0; i < trees.size(); ++i) {
    bool duplicate = false;
    for (std::size_t j = 0; j < i; ++j)
      duplicate = duplicate || tree_equal(trees[i], trees[j]);
    if (duplicate) continue;
    ++distinct;
    texts.insert(render(trees[i]));
  }
  CHECK(static_cast<int>(texts.size()) == distinct);
}
