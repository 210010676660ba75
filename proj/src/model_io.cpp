#include "ejet/model_io.hpp"

#include <memory>

#include "ejet/errors.hpp"
#include "ejet/textio.hpp"

#include "json.hpp"

namespace ejet {

using nlohmann::json;

namespace {

json node_to_json(const TreeNode& t) {
  json j;
  j["counts"] = {t.counts[0], t.counts[1]};
  j["predicted"] = t.predicted;
  if (!t.is_leaf()) {
    j["feature"] = t.feature;
    j["threshold"] = t.threshold;
    j["gain"] = t.gain;
    j["left"] = node_to_json(*t.left);
    j["right"] = node_to_json(*t.right);
  }
  return j;
}

TreeNode node_from_json(const json& j) {
  TreeNode t;
  const auto& counts = j.at("counts");
  t.counts = {counts.at(0).get<std::int64_t>(),
              counts.at(1).get<std::int64_t>()};
  t.predicted = j.value("predicted", t.counts[1] > t.counts[0] ? 1 : 0);
  if (j.contains("feature")) {
    t.feature = j.at("feature");
    t.threshold = j.at("threshold");
    t.gain = j.value("gain", 0.0);
    t.left = std::make_unique<TreeNode>(node_from_json(j.at("left")));
    t.right = std::make_unique<TreeNode>(node_from_json(j.at("right")));
  }
  return t;
}

json scaler_to_json(const ScalerParams& sp) {
  return json{{"mean", sp.mean},
              {"stddev", sp.stddev},
              {"constant", sp.constant}};
}

ScalerParams scaler_from_json(const json& j) {
  ScalerParams sp;
  sp.mean = j.at("mean").get<Features>();
  sp.stddev = j.at("stddev").get<Features>();
  sp.constant = j.at("constant").get<std::array<bool, kNumFeatures>>();
  return sp;
}

json tree_params_to_json(const TreeParams& p) {
  return json{{"min_split", p.min_split},
              {"min_leaf", p.min_leaf},
              {"max_depth", p.max_depth},
              {"cp", p.cp}};
}

TreeParams tree_params_from_json(const json& j) {
  TreeParams p;
  p.min_split = j.at("min_split");
  p.min_leaf = j.at("min_leaf");
  p.max_depth = j.at("max_depth");
  p.cp = j.at("cp");
  return p;
}

struct ModelWriter {
  json operator()(const TreeModel& m) const {
    json j;
    j["model"] = "tree";
    j["params"] = tree_params_to_json(m.grow_params);
    j["params"]["prune_cp"] = m.prune_cp;
    j["root"] = node_to_json(m.root);
    return j;
  }
  json operator()(const Forest& m) const {
    json j;
    j["model"] = "forest";
    j["params"] = {{"n_trees", m.params.n_trees},
                   {"mtry", m.params.mtry},
                   {"seed", m.params.seed},
                   {"bootstrap", m.params.bootstrap},
                   {"tree", tree_params_to_json(m.params.tree)}};
    j["trees"] = json::array();
    for (const auto& t : m.trees) j["trees"].push_back(node_to_json(t));
    j["oob_indices"] = m.oob_indices;
    j["importance_raw"] = m.importance_raw;
    return j;
  }
  json operator()(const KnnModel& m) const {
    json j;
    j["model"] = "knn";
    j["params"] = {{"k", m.params.k}};
    j["scaler"] = scaler_to_json(m.scaler);
    j["train_std"] = m.train_std;
    j["labels"] = m.labels;
    return j;
  }
  json operator()(const LogregModel& m) const {
    json j;
    j["model"] = "logreg";
    j["weights"] = m.weights;
    j["bias"] = m.bias;
    j["scaler"] = scaler_to_json(m.scaler);
    j["final_loss"] = m.final_loss;
    j["epochs_run"] = m.epochs_run;
    return j;
  }
  json operator()(const BoostModel& m) const {
    json j;
    j["model"] = "adaboost";
    j["params"] = {{"n_stumps", m.params.n_stumps}, {"seed", m.params.seed}};
    j["stumps"] = json::array();
    for (const auto& s : m.stumps) j["stumps"].push_back(node_to_json(s));
    j["alphas"] = m.alphas;
    j["training_errors"] = m.training_errors;
    return j;
  }
};

}  // namespace

std::string model_display_name(const ModelSpec& spec) {
  if (spec.name == "tree") return "Decision Tree";
  if (spec.name == "forest") return "Random Forest";
  if (spec.name == "knn")
    return "K-NN model (k=" + std::to_string(spec.knn.k) + ")";
  if (spec.name == "logreg") return "Logistic Regression";
  if (spec.name == "adaboost") return "AdaBoost";
  throw DataError("unknown model name: " + spec.name);
}

AnyModel fit_model(const ModelSpec& spec, const Dataset& train,
                   std::uint64_t seed) {
  if (spec.name == "tree") {
    TreeModel m;
    m.grow_params = spec.tree;
    m.prune_cp = spec.tree_prune_cp;
    TreeNode grown = grow(train, m.grow_params);
    m.root = prune(grown, m.prune_cp, static_cast<double>(leaf_risk(grown)));
    return m;
  }
  if (spec.name == "forest") {
    ForestParams p = spec.forest;
    p.seed = seed;
    return fit_forest(train, p);
  }
  if (spec.name == "knn") return fit_knn(train, spec.knn);
  if (spec.name == "logreg") return fit_logreg(train, spec.logreg);
  if (spec.name == "adaboost") {
    BoostParams p = spec.boost;
    p.seed = seed;
    return fit_adaboost(train, p);
  }
  throw DataError("unknown model name: " + spec.name);
}

std::pair<int, double> model_predict(const AnyModel& m, const Features& x) {
  return std::visit(
      [&](const auto& model) -> std::pair<int, double> {
        using T = std::decay_t<decltype(model)>;
        if constexpr (std::is_same_v<T, TreeModel>)
          return tree_predict(model.root, x);
        else if constexpr (std::is_same_v<T, Forest>)
          return forest_predict(model, x);
        else if constexpr (std::is_same_v<T, KnnModel>)
          return knn_predict(model, x);
        else if constexpr (std::is_same_v<T, LogregModel>)
          return logreg_predict(model, x);
        else
          return adaboost_predict(model, x);
      },
      m);
}

Fitter make_fitter(const ModelSpec& spec) {
  return [spec](const Dataset& train, std::uint64_t seed) -> Predictor {
    auto model = std::make_shared<AnyModel>(fit_model(spec, train, seed));
    return [model](const Features& x) { return model_predict(*model, x); };
  };
}

std::string model_to_json(const AnyModel& m) {
  json j = std::visit(ModelWriter{}, m);
  j["version"] = kModelFormatVersion;
  return j.dump(2) + "\n";
}

AnyModel model_from_json(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    throw DataError(std::string("model file: bad JSON: ") + e.what());
  }
  try {
    const int version = j.at("version");
    if (version != kModelFormatVersion)
      throw DataError("model file: version " + std::to_string(version) +
                      " unsupported (expected " +
                      std::to_string(kModelFormatVersion) + ")");
    const std::string name = j.at("model");
    if (name == "tree") {
      TreeModel m;
      m.grow_params = tree_params_from_json(j.at("params"));
      m.prune_cp = j.at("params").value("prune_cp", 0.01);
      m.root = node_from_json(j.at("root"));
      return m;
    }
    if (name == "forest") {
      Forest m;
      const auto& p = j.at("params");
      m.params.n_trees = p.at("n_trees");
      m.params.mtry = p.at("mtry");
      m.params.seed = p.at("seed");
      m.params.bootstrap = p.at("bootstrap");
      m.params.tree = tree_params_from_json(p.at("tree"));
      for (const auto& t : j.at("trees")) m.trees.push_back(node_from_json(t));
      m.oob_indices = j.at("oob_indices").get<std::vector<std::vector<int>>>();
      m.importance_raw =
          j.at("importance_raw").get<std::array<double, kNumFeatures>>();
      return m;
    }
    if (name == "knn") {
      KnnModel m;
      m.params.k = j.at("params").at("k");
      m.scaler = scaler_from_json(j.at("scaler"));
      m.train_std = j.at("train_std").get<std::vector<Features>>();
      m.labels = j.at("labels").get<std::vector<int>>();
      return m;
    }
    if (name == "logreg") {
      LogregModel m;
      m.weights = j.at("weights").get<Features>();
      m.bias = j.at("bias");
      m.scaler = scaler_from_json(j.at("scaler"));
      m.final_loss = j.at("final_loss");
      m.epochs_run = j.at("epochs_run");
      return m;
    }
    if (name == "adaboost") {
      BoostModel m;
      m.params.n_stumps = j.at("params").at("n_stumps");
      m.params.seed = j.at("params").at("seed");
      for (const auto& s : j.at("stumps"))
        m.stumps.push_back(node_from_json(s));
      m.alphas = j.at("alphas").get<std::vector<double>>();
      m.training_errors =
          j.at("training_errors").get<std::vector<double>>();
      return m;
    }
    throw DataError("model file: unknown model kind '" + name + "'");
  } catch (const json::exception& e) {
    throw DataError(std::string("model file: bad field: ") + e.what());
  }
}

void save_model(const std::string& path, const AnyModel& m) {
  write_file_atomic(path, model_to_json(m));
}

AnyModel load_model(const std::string& path) {
  return model_from_json(read_file(path));
}

}  // namespace ejet
