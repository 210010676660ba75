#pragma once

#include <array>
#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "ejet/dataset.hpp"
#include "ejet/rng.hpp"

namespace ejet {

struct TreeParams {
  int min_split = 20;
  int min_leaf = 7;
  int max_depth = 30;
  // Growth gate: a split is kept only if its misclassification-risk
  // reduction is >= cp * root risk.
  double cp = 0.01;
};

// Binary CART node. Leaf iff left is null. counts are the training-class
// counts reaching the node; leaves predict argmax(counts) with ties going
// to class 0 (boosted stumps override predicted by fitted polarity).
// gain is the split's weighted Gini decrease, > 0 on every grown split.
struct TreeNode {
  std::array<std::int64_t, 2> counts{0, 0};
  int predicted = 0;
  int feature = -1;
  double threshold = 0.0;
  double gain = 0.0;
  std::unique_ptr<TreeNode> left;
  std::unique_ptr<TreeNode> right;

  bool is_leaf() const { return left == nullptr; }
  std::int64_t n() const { return counts[0] + counts[1]; }
  // Class-1 fraction of the node's training counts.
  double score() const {
    return n() > 0 ? static_cast<double>(counts[1]) / static_cast<double>(n())
                   : 0.0;
  }
};

TreeNode clone_tree(const TreeNode& t);
bool tree_equal(const TreeNode& a, const TreeNode& b);
int node_count(const TreeNode& t);

// 1 - p0^2 - p1^2 for class counts; empty node is an error.
double gini(std::int64_t n0, std::int64_t n1);
double gini_weighted(double w0, double w1);

struct SplitChoice {
  int feature = 0;
  double threshold = 0.0;
  double gain = 0.0;  // weighted Gini decrease, normalized within the node
};

// Exhaustive search over midpoints between consecutive distinct values of
// each candidate feature. Candidates leaving fewer than min_leaf samples on
// a side are skipped; absent when nothing yields a positive decrease.
// Ties: lowest feature index, then lowest threshold. weights (if non-empty)
// are per-dataset-sample positive reals; min_leaf counts samples, not
// weight.
std::optional<SplitChoice> best_split(
    const Dataset& ds, std::span<const int> idx,
    std::span<const double> weights = {}, int min_leaf = 1,
    std::span<const int> candidate_features = {});

// Hooks used by the forest fitter: per-split feature subsampling and
// impurity-importance accumulation.
struct GrowHooks {
  SplitMix64* rng = nullptr;
  int mtry = kNumFeatures;
  std::array<double, kNumFeatures>* importance = nullptr;
};

TreeNode grow(const Dataset& train, const TreeParams& params);
TreeNode grow(const Dataset& train, std::span<const int> idx,
              const TreeParams& params, GrowHooks hooks = {});

// Misclassification count of the node taken as a leaf.
std::int64_t leaf_risk(const TreeNode& t);
// Sum of leaf risks over the subtree.
std::int64_t subtree_risk(const TreeNode& t);

// Cost-complexity pruning: bottom-up, collapse an internal node when its
// subtree's total risk reduction is <= cp * root_risk. cp=0 is the identity
// on grown trees (growth keeps only risk-reducing splits); cp=1 collapses
// to a single leaf; node count is non-increasing in cp.
TreeNode prune(const TreeNode& tree, double cp, double root_risk);

std::pair<int, double> tree_predict(const TreeNode& tree, const Features& x);

// One line per node in preorder, two-space indent per depth; internal nodes
// as "name < threshold", leaves as "class=c (n0, n1)".
std::string render(const TreeNode& tree,
                   const std::array<std::string, kNumFeatures>& names =
                       kFeatureNames);

}  // namespace ejet
