#include "ejet/ensembles.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "ejet/errors.hpp"
#include "ejet/rng.hpp"

#if defined(_OPENMP)
#include <omp.h>
#endif

namespace ejet {

namespace {

struct TreeFit {
  TreeNode tree;
  std::vector<int> oob;
  std::array<double, kNumFeatures> importance{};
};

// All randomness for tree t comes from derive_seed(seed, t): bootstrap
// indices first, then the per-split feature draws inside grow.
TreeFit fit_one_tree(const Dataset& train, const ForestParams& p, int t) {
  const auto n = static_cast<int>(train.size());
  SplitMix64 rng(derive_seed(p.seed, static_cast<std::uint64_t>(t)));

  TreeFit fit;
  std::vector<int> idx;
  idx.reserve(static_cast<std::size_t>(n));
  if (p.bootstrap) {
    std::vector<char> seen(static_cast<std::size_t>(n), 0);
    for (int i = 0; i < n; ++i) {
      const auto j = static_cast<int>(rng.next_below(static_cast<std::uint64_t>(n)));
      idx.push_back(j);
      seen[static_cast<std::size_t>(j)] = 1;
    }
    for (int i = 0; i < n; ++i)
      if (!seen[static_cast<std::size_t>(i)]) fit.oob.push_back(i);
  } else {
    idx.resize(static_cast<std::size_t>(n));
    std::iota(idx.begin(), idx.end(), 0);
  }

  GrowHooks hooks;
  hooks.rng = &rng;
  hooks.mtry = p.mtry;
  hooks.importance = &fit.importance;
  fit.tree = grow(train, idx, p.tree, hooks);
  return fit;
}

Forest assemble(const Dataset& train, const ForestParams& p, bool parallel) {
  if (train.empty()) throw DataError("fit_forest: empty training set");
  if (!train.fully_labeled())
    throw DataError("fit_forest: dataset not fully labeled");
  if (p.n_trees < 1) throw DataError("fit_forest: n_trees must be >= 1");
  if (p.mtry < 1 || p.mtry > kNumFeatures)
    throw DataError("fit_forest: mtry must be in [1, 3]");

  std::vector<TreeFit> fits(static_cast<std::size_t>(p.n_trees));
  std::exception_ptr failure;

#if defined(_OPENMP)
#pragma omp parallel for schedule(dynamic) if (parallel)
#endif
  for (int t = 0; t < p.n_trees; ++t) {
    try {
      fits[static_cast<std::size_t>(t)] = fit_one_tree(train, p, t);
    } catch (...) {
#if defined(_OPENMP)
#pragma omp critical
#endif
      if (!failure) failure = std::current_exception();
    }
  }
  if (failure) std::rethrow_exception(failure);
  (void)parallel;

  // Reduce in tree order so the serial and OpenMP paths are bit-identical.
  Forest f;
  f.params = p;
  f.trees.reserve(fits.size());
  f.oob_indices.reserve(fits.size());
  for (auto& fit : fits) {
    f.trees.push_back(std::move(fit.tree));
    f.oob_indices.push_back(std::move(fit.oob));
    for (int j = 0; j < kNumFeatures; ++j)
      f.importance_raw[j] += fit.importance[j];
  }
  return f;
}

}  // namespace

Forest fit_forest(const Dataset& train, const ForestParams& params) {
  return assemble(train, params, true);
}

Forest fit_forest_serial(const Dataset& train, const ForestParams& params) {
  return assemble(train, params, false);
}

std::pair<int, double> forest_predict(const Forest& f, const Features& x) {
  std::int64_t ones = 0;
  for (const auto& t : f.trees)
    if (tree_predict(t, x).first == 1) ++ones;
  const double score =
      static_cast<double>(ones) / static_cast<double>(f.trees.size());
  return {score > 0.5 ? 1 : 0, score};
}

std::array<double, kNumFeatures> feature_importance(const Forest& f) {
  const double total = f.importance_raw[0] + f.importance_raw[1] +
                       f.importance_raw[2];
  if (!(total > 0.0))
    throw NumericError("feature_importance: no splits in any tree");
  std::array<double, kNumFeatures> out{};
  for (int j = 0; j < kNumFeatures; ++j) out[j] = f.importance_raw[j] / total;
  return out;
}

OobResult oob_error(const Forest& f, const Dataset& train) {
  const auto n = static_cast<int>(train.size());
  std::vector<std::array<int, 2>> votes(static_cast<std::size_t>(n), {0, 0});
  for (std::size_t t = 0; t < f.trees.size(); ++t)
    for (int i : f.oob_indices[t]) {
      const int cls = tree_predict(f.trees[t], train.samples[static_cast<std::size_t>(i)].x).first;
      ++votes[static_cast<std::size_t>(i)][cls];
    }

  OobResult r;
  int wrong = 0;
  for (int i = 0; i < n; ++i) {
    const auto& v = votes[static_cast<std::size_t>(i)];
    if (v[0] + v[1] == 0) {
      ++r.skipped;
      continue;
    }
    const int pred = v[1] > v[0] ? 1 : 0;  // tie -> class 0
    ++r.voted;
    if (pred != *train.samples[static_cast<std::size_t>(i)].label) ++wrong;
  }
  r.error = r.voted > 0 ? static_cast<double>(wrong) / r.voted : 0.0;
  return r;
}

double stump_weight(double epsilon) {
  const double e = std::clamp(epsilon, 1e-10, 1.0 - 1e-10);
  return 0.5 * std::log((1.0 - e) / e);
}

namespace {

struct StumpChoice {
  int feature = 0;
  double threshold = 0.0;
  int left_class = 0;  // right predicts the other class
  double error = 1.0;  // weighted misclassification
};

// Exhaustive minimum-weighted-error stump over (feature, midpoint,
// polarity). sorted_by_feature[f] holds sample indices ordered by feature f
// (ties by index), computed once per fit.
std::optional<StumpChoice> best_stump(
    const Dataset& ds, const std::array<std::vector<int>, kNumFeatures>& order,
    const std::vector<double>& w) {
  double total_w1 = 0.0;
  for (std::size_t i = 0; i < w.size(); ++i)
    if (*ds.samples[i].label == 1) total_w1 += w[i];
  const double total_w = std::accumulate(w.begin(), w.end(), 0.0);

  std::optional<StumpChoice> best;
  for (int f = 0; f < kNumFeatures; ++f) {
    const auto& ord = order[f];
    double left_w1 = 0.0, left_w = 0.0;
    for (std::size_t i = 0; i + 1 < ord.size(); ++i) {
      const int a = ord[i];
      left_w += w[static_cast<std::size_t>(a)];
      if (*ds.samples[static_cast<std::size_t>(a)].label == 1)
        left_w1 += w[static_cast<std::size_t>(a)];
      const double va = ds.samples[static_cast<std::size_t>(a)].x[f];
      const double vb = ds.samples[static_cast<std::size_t>(ord[i + 1])].x[f];
      if (va == vb) continue;
      // polarity left->0 / right->1: wrong = class-1 weight left of the cut
      // plus class-0 weight right of it.
      const double err01 = left_w1 + (total_w - left_w) - (total_w1 - left_w1);
      const double err10 = total_w - err01;
      const double threshold = (va + vb) * 0.5;
      if (!best || err01 < best->error)
        best = StumpChoice{f, threshold, 0, err01};
      if (err10 < best->error) best = StumpChoice{f, threshold, 1, err10};
    }
  }
  return best;
}

TreeNode stump_to_tree(const Dataset& ds, const StumpChoice& s) {
  TreeNode node;
  node.feature = s.feature;
  node.threshold = s.threshold;
  node.left = std::make_unique<TreeNode>();
  node.right = std::make_unique<TreeNode>();
  for (const auto& sample : ds.samples) {
    const bool left = sample.x[s.feature] < s.threshold;
    auto& leaf = left ? *node.left : *node.right;
    ++leaf.counts[*sample.label];
  }
  node.counts = {node.left->counts[0] + node.right->counts[0],
                 node.left->counts[1] + node.right->counts[1]};
  node.predicted = node.counts[1] > node.counts[0] ? 1 : 0;
  // Polarity is the fitted one, not argmax of the routed counts.
  node.left->predicted = s.left_class;
  node.right->predicted = 1 - s.left_class;
  return node;
}

}  // namespace

BoostModel fit_adaboost(const Dataset& train, const BoostParams& params) {
  if (train.empty()) throw NumericError("fit_adaboost: empty training set");
  if (!train.fully_labeled())
    throw DataError("fit_adaboost: dataset not fully labeled");
  const auto counts = train.class_counts();
  if (counts[0] == 0 || counts[1] == 0)
    throw NumericError("fit_adaboost: training set has a single class");
  if (params.n_stumps < 1)
    throw DataError("fit_adaboost: n_stumps must be >= 1");

  const auto n = train.size();
  std::array<std::vector<int>, kNumFeatures> order;
  for (int f = 0; f < kNumFeatures; ++f) {
    order[f].resize(n);
    std::iota(order[f].begin(), order[f].end(), 0);
    std::stable_sort(order[f].begin(), order[f].end(), [&](int a, int b) {
      return train.samples[static_cast<std::size_t>(a)].x[f] <
             train.samples[static_cast<std::size_t>(b)].x[f];
    });
  }

  BoostModel model;
  model.params = params;
  std::vector<double> w(n, 1.0 / static_cast<double>(n));

  for (int round = 0; round < params.n_stumps; ++round) {
    const auto choice = best_stump(train, order, w);
    if (!choice) break;  // no feature has two distinct values

    // The scan's prefix sums can cancel; recompute the winner's error by a
    // direct sum over misclassified samples so a perfect stump reads 0.
    TreeNode stump = stump_to_tree(train, *choice);
    double eps = 0.0;
    for (std::size_t i = 0; i < n; ++i)
      if (tree_predict(stump, train.samples[i].x).first !=
          *train.samples[i].label)
        eps += w[i];
    if (eps >= 0.5) break;  // discard: no better than chance

    const double alpha = stump_weight(eps);
    model.stumps.push_back(std::move(stump));
    model.alphas.push_back(alpha);
    model.training_errors.push_back(eps);

    if (eps == 0.0) {
      model.round_weight_sums.push_back(
          std::accumulate(w.begin(), w.end(), 0.0));
      break;  // perfect stump, capped alpha already applied
    }

    double sum = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      const int y = *train.samples[i].label == 1 ? 1 : -1;
      const int h =
          tree_predict(model.stumps.back(), train.samples[i].x).first == 1
              ? 1
              : -1;
      w[i] *= std::exp(-alpha * y * h);
      sum += w[i];
    }
    for (auto& wi : w) wi /= sum;
    model.round_weight_sums.push_back(
        std::accumulate(w.begin(), w.end(), 0.0));
  }

  if (model.stumps.empty())
    throw NumericError(
        "fit_adaboost: no stump beat chance on the first round");
  return model;
}

std::pair<int, double> adaboost_predict(const BoostModel& m,
                                        const Features& x) {
  double margin = 0.0, alpha_sum = 0.0;
  for (std::size_t t = 0; t < m.stumps.size(); ++t) {
    const int h = tree_predict(m.stumps[t], x).first == 1 ? 1 : -1;
    margin += m.alphas[t] * h;
    alpha_sum += std::abs(m.alphas[t]);
  }
  const double score =
      alpha_sum > 0.0 ? 0.5 * (1.0 + margin / alpha_sum) : 0.5;
  return {margin > 0.0 ? 1 : 0, score};
}

}  // namespace ejet
