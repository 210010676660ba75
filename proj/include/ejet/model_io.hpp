#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <variant>

#include "ejet/baselines.hpp"
#include "ejet/cart.hpp"
#include "ejet/dataset.hpp"
#include "ejet/ensembles.hpp"
#include "ejet/validation.hpp"

namespace ejet {

inline constexpr int kModelFormatVersion = 1;

// A single CART artifact: grown with grow_params, then pruned at prune_cp.
struct TreeModel {
  TreeParams grow_params;
  double prune_cp = 0.01;
  TreeNode root;
};

using AnyModel = std::variant<TreeModel, Forest, KnnModel, LogregModel,
                              BoostModel>;

// Model selection for train/eval/CV: a name from
// {tree, forest, knn, logreg, adaboost} plus its hyperparameters.
struct ModelSpec {
  std::string name = "tree";
  TreeParams tree;
  double tree_prune_cp = 0.01;
  ForestParams forest;
  KnnParams knn;
  LogregParams logreg;
  BoostParams boost;
};

// "Random Forest", "K-NN model (k=3)", ... used in report rows.
std::string model_display_name(const ModelSpec& spec);

AnyModel fit_model(const ModelSpec& spec, const Dataset& train,
                   std::uint64_t seed);
std::pair<int, double> model_predict(const AnyModel& m, const Features& x);

// Cross-validation adapter: fits a fresh model per fold.
Fitter make_fitter(const ModelSpec& spec);

std::string model_to_json(const AnyModel& m);
AnyModel model_from_json(const std::string& text);
void save_model(const std::string& path, const AnyModel& m);
AnyModel load_model(const std::string& path);

}  // namespace ejet
