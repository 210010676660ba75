#include "ejet/cart.hpp"

#include <algorithm>
#include <numeric>

#include "ejet/errors.hpp"
#include "ejet/textio.hpp"

namespace ejet {

TreeNode clone_tree(const TreeNode& t) {
  TreeNode out;
  out.counts = t.counts;
  out.predicted = t.predicted;
  out.feature = t.feature;
  out.threshold = t.threshold;
  out.gain = t.gain;
  if (!t.is_leaf()) {
    out.left = std::make_unique<TreeNode>(clone_tree(*t.left));
    out.right = std::make_unique<TreeNode>(clone_tree(*t.right));
  }
  return out;
}

bool tree_equal(const TreeNode& a, const TreeNode& b) {
  if (a.is_leaf() != b.is_leaf()) return false;
  if (a.counts != b.counts || a.predicted != b.predicted) return false;
  if (a.is_leaf()) return true;
  if (a.feature != b.feature || a.threshold != b.threshold ||
      a.gain != b.gain)
    return false;
  return tree_equal(*a.left, *b.left) && tree_equal(*a.right, *b.right);
}

int node_count(const TreeNode& t) {
  if (t.is_leaf()) return 1;
  return 1 + node_count(*t.left) + node_count(*t.right);
}

double gini(std::int64_t n0, std::int64_t n1) {
  if (n0 + n1 < 1) throw DataError("gini: empty node");
  const double total = static_cast<double>(n0 + n1);
  const double p0 = static_cast<double>(n0) / total;
  const double p1 = static_cast<double>(n1) / total;
  return 1.0 - p0 * p0 - p1 * p1;
}

double gini_weighted(double w0, double w1) {
  const double total = w0 + w1;
  if (!(total > 0.0)) throw DataError("gini: empty node");
  const double p0 = w0 / total;
  const double p1 = w1 / total;
  return 1.0 - p0 * p0 - p1 * p1;
}

namespace {

constexpr int kAllFeatures[kNumFeatures] = {0, 1, 2};

struct ValueLabelWeight {
  double value;
  int label;
  double weight;
};

// Candidate evaluation for one feature over pre-gathered rows; rows get
// sorted by value in place.
void scan_feature(std::vector<ValueLabelWeight>& rows, int feature,
                  double parent_gini, double total_w0, double total_w1,
                  int min_leaf, std::optional<SplitChoice>& best) {
  std::sort(rows.begin(), rows.end(),
            [](const ValueLabelWeight& a, const ValueLabelWeight& b) {
              return a.value < b.value;
            });
  const double total_w = total_w0 + total_w1;
  const auto n = static_cast<std::int64_t>(rows.size());
  double left_w0 = 0.0, left_w1 = 0.0;
  std::int64_t left_n = 0;
  for (std::int64_t i = 0; i < n - 1; ++i) {
    (rows[i].label == 0 ? left_w0 : left_w1) += rows[i].weight;
    ++left_n;
    if (rows[i].value == rows[i + 1].value) continue;  // not a boundary
    if (left_n < min_leaf || n - left_n < min_leaf) continue;
    const double right_w0 = total_w0 - left_w0;
    const double right_w1 = total_w1 - left_w1;
    const double wl = left_w0 + left_w1;
    const double wr = right_w0 + right_w1;
    const double child =
        (wl * gini_weighted(left_w0, left_w1) +
         wr * gini_weighted(right_w0, right_w1)) /
        total_w;
    const double gain = parent_gini - child;
    if (gain <= 0.0) continue;
    if (!best || gain > best->gain) {
      best = SplitChoice{feature, (rows[i].value + rows[i + 1].value) * 0.5,
                         gain};
    }
  }
}

}  // namespace

std::optional<SplitChoice> best_split(const Dataset& ds,
                                      std::span<const int> idx,
                                      std::span<const double> weights,
                                      int min_leaf,
                                      std::span<const int> candidate_features) {
  if (idx.size() < 2) return std::nullopt;
  if (candidate_features.empty()) candidate_features = kAllFeatures;

  double total_w0 = 0.0, total_w1 = 0.0;
  for (int i : idx) {
    const double w = weights.empty() ? 1.0 : weights[i];
    (*ds.samples[i].label == 0 ? total_w0 : total_w1) += w;
  }
  const double parent_gini = gini_weighted(total_w0, total_w1);

  // Ascending feature order keeps ties deterministic: lowest feature index,
  // then lowest threshold, wins via the strict > comparison in scan_feature.
  std::vector<int> feats(candidate_features.begin(), candidate_features.end());
  std::sort(feats.begin(), feats.end());

  std::optional<SplitChoice> best;
  std::vector<ValueLabelWeight> rows;
  rows.reserve(idx.size());
  for (int f : feats) {
    rows.clear();
    for (int i : idx)
      rows.push_back({ds.samples[i].x[f], *ds.samples[i].label,
                      weights.empty() ? 1.0 : weights[i]});
    scan_feature(rows, f, parent_gini, total_w0, total_w1, min_leaf, best);
  }
  return best;
}

namespace {

std::array<std::int64_t, 2> count_classes(const Dataset& ds,
                                          std::span<const int> idx) {
  std::array<std::int64_t, 2> c{0, 0};
  for (int i : idx) ++c[*ds.samples[i].label];
  return c;
}

TreeNode make_leaf(const std::array<std::int64_t, 2>& counts) {
  TreeNode leaf;
  leaf.counts = counts;
  leaf.predicted = counts[1] > counts[0] ? 1 : 0;  // tie -> class 0
  return leaf;
}

TreeNode grow_node(const Dataset& ds, std::vector<int>& idx,
                   const TreeParams& params, const GrowHooks& hooks, int depth,
                   std::int64_t root_risk, double total_weight) {
  const auto counts = count_classes(ds, idx);
  const auto n = static_cast<std::int64_t>(idx.size());

  if (depth >= params.max_depth || n < params.min_split || counts[0] == 0 ||
      counts[1] == 0)
    return make_leaf(counts);

  std::array<int, kNumFeatures> pool{0, 1, 2};
  std::span<const int> candidates{};
  if (hooks.rng && hooks.mtry < kNumFeatures) {
    for (int j = 0; j < hooks.mtry; ++j) {
      const auto pick = j + static_cast<int>(hooks.rng->next_below(
                                static_cast<std::uint64_t>(kNumFeatures - j)));
      std::swap(pool[j], pool[pick]);
    }
    candidates = {pool.data(), static_cast<std::size_t>(hooks.mtry)};
  }

  const auto split = best_split(ds, idx, {}, params.min_leaf, candidates);
  if (!split) return make_leaf(counts);

  // rpart-style gate: the split must cut misclassification risk by at least
  // cp * root risk.
  std::array<std::int64_t, 2> lc{0, 0};
  for (int i : idx)
    if (ds.samples[i].x[split->feature] < split->threshold)
      ++lc[*ds.samples[i].label];
  const std::array<std::int64_t, 2> rc{counts[0] - lc[0], counts[1] - lc[1]};
  const std::int64_t risk_here = std::min(counts[0], counts[1]);
  const std::int64_t risk_kids =
      std::min(lc[0], lc[1]) + std::min(rc[0], rc[1]);
  if (root_risk > 0 &&
      static_cast<double>(risk_here - risk_kids) <
          params.cp * static_cast<double>(root_risk))
    return make_leaf(counts);

  if (hooks.importance)
    (*hooks.importance)[split->feature] +=
        split->gain * static_cast<double>(n) / total_weight;

  std::vector<int> left_idx, right_idx;
  left_idx.reserve(idx.size());
  right_idx.reserve(idx.size());
  for (int i : idx)
    (ds.samples[i].x[split->feature] < split->threshold ? left_idx : right_idx)
        .push_back(i);
  idx.clear();
  idx.shrink_to_fit();

  TreeNode node;
  node.counts = counts;
  node.predicted = counts[1] > counts[0] ? 1 : 0;
  node.feature = split->feature;
  node.threshold = split->threshold;
  node.gain = split->gain;
  node.left = std::make_unique<TreeNode>(grow_node(
      ds, left_idx, params, hooks, depth + 1, root_risk, total_weight));
  node.right = std::make_unique<TreeNode>(grow_node(
      ds, right_idx, params, hooks, depth + 1, root_risk, total_weight));
  return node;
}

}  // namespace

TreeNode grow(const Dataset& train, std::span<const int> idx,
              const TreeParams& params, GrowHooks hooks) {
  if (idx.empty()) throw DataError("grow: empty training set");
  if (params.min_leaf < 1 || params.min_split < 2 * params.min_leaf ||
      params.max_depth < 1 || params.cp < 0.0 || params.cp > 1.0)
    throw DataError("grow: invalid tree parameters");
  for (int i : idx)
    if (!train.samples[i].label)
      throw DataError("grow: sample " + std::to_string(i) + " has no label");

  std::vector<int> root_idx(idx.begin(), idx.end());
  const auto counts = count_classes(train, root_idx);
  const std::int64_t root_risk = std::min(counts[0], counts[1]);
  return grow_node(train, root_idx, params, hooks, 0, root_risk,
                   static_cast<double>(idx.size()));
}

TreeNode grow(const Dataset& train, const TreeParams& params) {
  std::vector<int> idx(train.size());
  std::iota(idx.begin(), idx.end(), 0);
  return grow(train, idx, params, {});
}

std::int64_t leaf_risk(const TreeNode& t) {
  return std::min(t.counts[0], t.counts[1]);
}

std::int64_t subtree_risk(const TreeNode& t) {
  if (t.is_leaf()) return leaf_risk(t);
  return subtree_risk(*t.left) + subtree_risk(*t.right);
}

namespace {

TreeNode prune_node(const TreeNode& t, double cp, double root_risk) {
  if (t.is_leaf()) return clone_tree(t);
  TreeNode out;
  out.counts = t.counts;
  out.predicted = t.predicted;
  out.feature = t.feature;
  out.threshold = t.threshold;
  out.gain = t.gain;
  out.left = std::make_unique<TreeNode>(prune_node(*t.left, cp, root_risk));
  out.right = std::make_unique<TreeNode>(prune_node(*t.right, cp, root_risk));
  const auto reduction =
      static_cast<double>(leaf_risk(out) - subtree_risk(out));
  if (root_risk > 0.0 && reduction <= cp * root_risk) return make_leaf(out.counts);
  if (root_risk <= 0.0) return make_leaf(out.counts);  // pure root: no split helps
  return out;
}

}  // namespace

TreeNode prune(const TreeNode& tree, double cp, double root_risk) {
  if (cp < 0.0 || cp > 1.0) throw DataError("prune: cp must be in [0, 1]");
  if (tree.is_leaf()) return clone_tree(tree);
  return prune_node(tree, cp, root_risk);
}

std::pair<int, double> tree_predict(const TreeNode& tree, const Features& x) {
  const TreeNode* node = &tree;
  while (!node->is_leaf())
    node = x[node->feature] < node->threshold ? node->left.get()
                                              : node->right.get();
  return {node->predicted, node->score()};
}

namespace {

void render_node(const TreeNode& t,
                 const std::array<std::string, kNumFeatures>& names, int depth,
                 std::string& out) {
  out.append(static_cast<std::size_t>(2 * depth), ' ');
  if (t.is_leaf()) {
    out += "class=" + std::to_string(t.predicted) + " (" +
           std::to_string(t.counts[0]) + ", " + std::to_string(t.counts[1]) +
           ")\n";
    return;
  }
  out += names[t.feature] + " < " + format_real(t.threshold) + "\n";
  render_node(*t.left, names, depth + 1, out);
  render_node(*t.right, names, depth + 1, out);
}

}  // namespace

std::string render(const TreeNode& tree,
                   const std::array<std::string, kNumFeatures>& names) {
  std::string out;
  render_node(tree, names, 0, out);
  return out;
}

}  // namespace ejet
