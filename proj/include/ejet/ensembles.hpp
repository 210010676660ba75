#pragma once

#include <array>
#include <cstdint>
#include <utility>
#include <vector>

#include "ejet/cart.hpp"
#include "ejet/dataset.hpp"

namespace ejet {

struct ForestParams {
  int n_trees = 100;
  int mtry = 1;  // floor(sqrt(3))
  std::uint64_t seed = 0;
  bool bootstrap = true;  // test hook: false fits every tree on the full set
  TreeParams tree{.min_split = 2, .min_leaf = 1, .max_depth = 30, .cp = 0.0};
};

struct Forest {
  ForestParams params;
  std::vector<TreeNode> trees;
  std::vector<std::vector<int>> oob_indices;  // sorted, per tree
  std::array<double, kNumFeatures> importance_raw{};
};

// Bagged unpruned trees with per-split feature subsampling. Tree t's
// randomness comes only from derive_seed(seed, t), so the OpenMP and serial
// fitters produce identical forests.
Forest fit_forest(const Dataset& train, const ForestParams& params);
Forest fit_forest_serial(const Dataset& train, const ForestParams& params);

// Majority vote; score = fraction of trees voting class 1, exact tie -> 0.
std::pair<int, double> forest_predict(const Forest& f, const Features& x);

// importance_raw normalized to sum 1; error when no tree ever split.
std::array<double, kNumFeatures> feature_importance(const Forest& f);

struct OobResult {
  double error = 0.0;  // misclassified fraction over voted samples
  int voted = 0;
  int skipped = 0;  // samples in every bootstrap (no OOB vote available)
};

OobResult oob_error(const Forest& f, const Dataset& train);

// alpha = 0.5 * ln((1-eps)/eps), eps clamped to [1e-10, 1-1e-10].
double stump_weight(double epsilon);

struct BoostParams {
  int n_stumps = 50;
  std::uint64_t seed = 0;  // reserved for future subsampling; fit is exact
};

struct BoostModel {
  BoostParams params;
  std::vector<TreeNode> stumps;  // depth-1 trees
  std::vector<double> alphas;
  std::vector<double> training_errors;     // eps_t per accepted round
  std::vector<double> round_weight_sums;   // diagnostic: sum after renorm
};

// Discrete AdaBoost on {-1,+1} labels over exhaustive decision stumps.
// Stops early on a perfect stump (kept with capped alpha) or when the best
// weighted error reaches 0.5 (stump discarded).
BoostModel fit_adaboost(const Dataset& train, const BoostParams& params);

// class from the sign of the alpha-weighted vote; score maps the margin
// into [0,1].
std::pair<int, double> adaboost_predict(const BoostModel& m, const Features& x);

}  // namespace ejet
