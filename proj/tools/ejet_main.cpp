// ejet: e-jet electrode conductance classification pipeline.
// Subcommands: gen, train, eval, sweep, predict, report.
// Exit codes: 0 success, 1 usage, 2 data/schema, 3 numeric failure.

#include <algorithm>
#include <cstdint>
#include <filesystem>
#include <iostream>
#include <map>
#include <memory>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "ejet/baselines.hpp"
#include "ejet/cart.hpp"
#include "ejet/dataset.hpp"
#include "ejet/ensembles.hpp"
#include "ejet/errors.hpp"
#include "ejet/metrics.hpp"
#include "ejet/model_io.hpp"
#include "ejet/rng.hpp"
#include "ejet/svg.hpp"
#include "ejet/synthgen.hpp"
#include "ejet/textio.hpp"
#include "ejet/validation.hpp"

namespace fs = std::filesystem;
using namespace ejet;

namespace {

constexpr const char* kToolkitVersion = "1.0.0";
constexpr std::uint64_t kDefaultSeed = 42;

struct GenOpts {
  GeneratorConfig cfg;
  std::string out;
  bool full_grid = false;
};

struct TrainOpts {
  ModelSpec spec;
  std::string in, out;
  std::uint64_t seed = kDefaultSeed;
  double threshold = 100.0;
  double test_fraction = 0.0;  // 0 = fit on the full input
};

struct EvalOpts {
  std::vector<std::string> models;
  std::string in, out, roc;
  std::string format = "csv";
  double threshold = 100.0;
  bool swap_pr = false;
};

struct SweepOpts {
  std::string kind;  // cp | trees
  std::vector<double> values;
  std::string in, out, svg;
  int folds = 10;
  std::uint64_t seed = kDefaultSeed;
  double threshold = 100.0;
};

struct PredictOpts {
  std::string model, in, out;
  double speed = 0.0, voltage = 0.0, flow = 0.0;
  bool has_scalars = false;
};

struct ReportOpts {
  std::string in, outdir;
  bool gen = false;
  int n = 240;
  int folds = 10;
  std::uint64_t seed = kDefaultSeed;
  double threshold = 100.0;
  double test_fraction = 0.2;
};

Dataset load_labeled(const std::string& path, double threshold) {
  return label_by_threshold(load_csv(path), threshold);
}

std::string display_name(const AnyModel& m) {
  if (std::holds_alternative<TreeModel>(m)) return "Decision Tree";
  if (std::holds_alternative<Forest>(m)) return "Random Forest";
  if (const auto* knn = std::get_if<KnnModel>(&m))
    return "K-NN model (k=" + std::to_string(knn->params.k) + ")";
  if (std::holds_alternative<LogregModel>(m)) return "Logistic Regression";
  return "AdaBoost";
}

EvalReport eval_model(const AnyModel& m, const Dataset& ds, MetricMode mode) {
  std::vector<int> actual, predicted;
  std::vector<double> scores;
  for (const auto& s : ds.samples) {
    const auto [cls, score] = model_predict(m, s.x);
    actual.push_back(*s.label);
    predicted.push_back(cls);
    scores.push_back(score);
  }
  return evaluate(display_name(m), actual, predicted, scores, mode);
}

RocCurve model_roc(const AnyModel& m, const Dataset& ds) {
  std::vector<double> scores;
  for (const auto& s : ds.samples) scores.push_back(model_predict(m, s.x).second);
  return roc_curve(scores, ds.labels());
}

std::string reports_to_json(const std::vector<EvalReport>& reports) {
  nlohmann::json arr = nlohmann::json::array();
  for (const auto& r : reports) {
    nlohmann::json j{{"model", r.model_name},
                     {"accuracy", r.accuracy},
                     {"misclassification", r.misclassification},
                     {"confusion", {{"tn", r.cm.tn},
                                    {"fp", r.cm.fp},
                                    {"fn", r.cm.fn},
                                    {"tp", r.cm.tp}}}};
    auto put = [&](const char* key, const std::optional<double>& v) {
      if (v) j[key] = *v; else j[key] = nullptr;
    };
    put("precision", r.precision);
    put("recall", r.recall);
    put("f1", r.f1);
    put("kappa", r.kappa);
    put("auc", r.auc);
    arr.push_back(j);
  }
  return arr.dump(2) + "\n";
}

int run_gen(const GenOpts& o) {
  const Dataset ds = o.full_grid ? generate_full_grid(o.cfg) : generate(o.cfg);
  save_csv(ds, o.out);
  write_file_atomic(o.out + ".json", generator_config_to_json(o.cfg));
  std::cout << "wrote " << ds.size() << " samples to " << o.out << "\n";
  return 0;
}

int run_train(const TrainOpts& o) {
  Dataset ds = load_labeled(o.in, o.threshold);
  Dataset train = ds, test;
  if (o.test_fraction > 0.0)
    std::tie(train, test) = stratified_split(ds, o.test_fraction, o.seed);
  const AnyModel model = fit_model(o.spec, train, o.seed);
  save_model(o.out, model);
  std::cout << eval_report_csv_header() << "\n";
  EvalReport train_report = eval_model(model, train, MetricMode::kConventional);
  train_report.model_name += " [train]";
  std::cout << eval_report_csv_row(train_report) << "\n";
  if (!test.empty()) {
    EvalReport test_report = eval_model(model, test, MetricMode::kConventional);
    test_report.model_name += " [test]";
    std::cout << eval_report_csv_row(test_report) << "\n";
  }
  if (const auto* tree = std::get_if<TreeModel>(&model))
    std::cout << "\n" << render(tree->root);
  return 0;
}

int run_eval(const EvalOpts& o) {
  const Dataset ds = load_labeled(o.in, o.threshold);
  const MetricMode mode =
      o.swap_pr ? MetricMode::kSwapped : MetricMode::kConventional;
  std::vector<EvalReport> reports;
  std::vector<AnyModel> models;
  for (const auto& path : o.models) models.push_back(load_model(path));
  for (std::size_t i = 0; i < models.size(); ++i) {
    reports.push_back(eval_model(models[i], ds, mode));
    if (!o.roc.empty()) {
      std::string path = o.roc;
      if (models.size() > 1) {
        const fs::path p(o.roc);
        path = (p.parent_path() /
                (p.stem().string() + "_" + std::to_string(i) +
                 p.extension().string()))
                   .string();
      }
      write_file_atomic(path, roc_curve_csv(model_roc(models[i], ds)));
    }
  }
  std::string body;
  if (o.format == "json") {
    body = reports_to_json(reports);
  } else {
    body = eval_report_csv_header() + "\n";
    for (const auto& r : reports) body += eval_report_csv_row(r) + "\n";
  }
  if (o.out.empty())
    std::cout << body;
  else
    write_file_atomic(o.out, body);
  return 0;
}

int run_sweep(const SweepOpts& o) {
  const Dataset ds = load_labeled(o.in, o.threshold);
  SweepResult result;
  std::string param_name;
  if (o.kind == "cp") {
    result = sweep_cp(ds, o.values, o.folds, o.seed);
    param_name = "cp";
  } else {
    std::vector<int> counts;
    for (double v : o.values) counts.push_back(static_cast<int>(v));
    result = sweep_ntrees(ds, counts, o.folds, o.seed);
    param_name = "n_trees";
  }
  write_file_atomic(o.out, sweep_csv(result, param_name));
  if (!o.svg.empty())
    write_file_atomic(o.svg, line_chart_svg("CV accuracy vs " + param_name,
                                            param_name, "mean accuracy",
                                            result.values,
                                            result.mean_accuracy));
  return 0;
}

Dataset load_feature_rows(const std::string& path) {
  std::istringstream in(read_file(path));
  std::string line;
  if (!std::getline(in, line)) throw DataError(path + ": empty file");
  const auto header = split_csv_line(line);
  for (int f = 0; f < kNumFeatures; ++f) {
    if (f >= static_cast<int>(header.size()) || header[f] != kCsvColumns[f])
      throw DataError(path + ": expected feature column '" +
                      kCsvColumns[f] + "'");
  }
  Dataset ds;
  int line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty() || line == "\r") continue;
    const auto cells = split_csv_line(line);
    if (cells.size() < kNumFeatures)
      throw DataError("line " + std::to_string(line_no) +
                      ": expected at least 3 feature cells");
    PrintSample s;
    for (int f = 0; f < kNumFeatures; ++f) {
      try {
        std::size_t pos = 0;
        s.x[f] = std::stod(cells[f], &pos);
        if (pos != cells[f].size()) throw std::invalid_argument(cells[f]);
      } catch (const std::exception&) {
        throw DataError("line " + std::to_string(line_no) + ": column '" +
                        kCsvColumns[f] + "': cannot parse '" + cells[f] + "'");
      }
    }
    ds.samples.push_back(s);
  }
  return ds;
}

int run_predict(const PredictOpts& o) {
  const AnyModel model = load_model(o.model);
  auto line_for = [&](const Features& x) {
    const auto [cls, score] = model_predict(model, x);
    return "class=" + std::to_string(cls) + " score=" + format_real(score) +
           " gate=" + (cls == 1 ? "GO" : "NO-GO");
  };
  if (o.has_scalars) {
    std::cout << line_for({o.speed, o.voltage, o.flow}) << "\n";
    return 0;
  }
  const Dataset batch = load_feature_rows(o.in);
  std::string body =
      "nozzle_speed_mm_min,voltage_kv,flow_rate_ul_min,class,score,gate\n";
  for (const auto& s : batch.samples) {
    const auto [cls, score] = model_predict(model, s.x);
    body += format_real(s.x[0]) + "," + format_real(s.x[1]) + "," +
            format_real(s.x[2]) + "," + std::to_string(cls) + "," +
            format_real(score) + "," + (cls == 1 ? "GO" : "NO-GO") + "\n";
  }
  if (o.out.empty())
    std::cout << body;
  else
    write_file_atomic(o.out, body);
  return 0;
}

int run_report(const ReportOpts& o) {
  fs::create_directories(o.outdir);
  const fs::path dir(o.outdir);
  std::vector<std::string> files;
  auto emit = [&](const std::string& name, const std::string& content) {
    write_file_atomic((dir / name).string(), content);
    files.push_back(name);
  };

  GeneratorConfig cfg;
  Dataset ds;
  if (o.gen) {
    cfg.n = o.n;
    cfg.seed = o.seed;
    cfg.threshold = o.threshold;
    ds = generate(cfg);
    save_csv(ds, (dir / "dataset.csv").string());
    files.push_back("dataset.csv");
    emit("dataset.csv.json", generator_config_to_json(cfg));
  } else {
    ds = load_labeled(o.in, o.threshold);
  }

  const auto [train, test] =
      stratified_split(ds, o.test_fraction, derive_seed(o.seed, 1));

  // Table-style model roster; KNN appears at both neighbor counts.
  std::vector<ModelSpec> specs;
  {
    ModelSpec forest; forest.name = "forest"; specs.push_back(forest);
    ModelSpec logreg; logreg.name = "logreg"; specs.push_back(logreg);
    ModelSpec knn3; knn3.name = "knn"; knn3.knn.k = 3; specs.push_back(knn3);
    ModelSpec knn10; knn10.name = "knn"; knn10.knn.k = 10; specs.push_back(knn10);
    ModelSpec tree; tree.name = "tree"; specs.push_back(tree);
    ModelSpec boost; boost.name = "adaboost"; specs.push_back(boost);
  }
  const std::map<std::string, std::string> roc_names{
      {"Random Forest", "roc_random_forest"},
      {"Logistic Regression", "roc_logistic_regression"},
      {"K-NN model (k=3)", "roc_knn3"},
      {"K-NN model (k=10)", "roc_knn10"}};

  std::string train_csv = eval_report_csv_header() + "\n";
  std::string test_csv = eval_report_csv_header() + "\n";
  fs::create_directories(dir / "models");
  const Forest* forest_model = nullptr;
  std::vector<std::unique_ptr<AnyModel>> fitted;
  for (std::size_t i = 0; i < specs.size(); ++i) {
    const auto& spec = specs[i];
    fitted.push_back(std::make_unique<AnyModel>(
        fit_model(spec, train, derive_seed(o.seed, 100 + i))));
    const AnyModel& model = *fitted.back();
    std::string stem = spec.name;
    if (spec.name == "knn") stem += std::to_string(spec.knn.k);
    const std::string model_file = "models/" + stem + ".json";
    save_model((dir / model_file).string(), model);
    files.push_back(model_file);
    train_csv += eval_report_csv_row(
                     eval_model(model, train, MetricMode::kConventional)) +
                 "\n";
    test_csv += eval_report_csv_row(
                    eval_model(model, test, MetricMode::kConventional)) +
                "\n";
    const auto it = roc_names.find(display_name(model));
    if (it != roc_names.end()) {
      const RocCurve curve = model_roc(model, test);
      emit(it->second + ".csv", roc_curve_csv(curve));
      std::vector<double> fpr, tpr;
      for (const auto& [x, y] : curve.points) {
        fpr.push_back(x);
        tpr.push_back(y);
      }
      emit(it->second + ".svg",
           line_chart_svg("ROC " + display_name(model), "false positive rate",
                          "true positive rate", fpr, tpr));
    }
    if (const auto* f = std::get_if<Forest>(&model)) forest_model = f;
  }
  emit("comparison.csv", test_csv);
  emit("comparison_train.csv", train_csv);

  // tree chart texts: the default tree and the two pruned variants
  {
    const TreeNode full = grow(train, TreeParams{});
    const double root_risk = static_cast<double>(leaf_risk(full));
    emit("tree.txt", render(full));
    emit("tree_pruned_cp005.txt", render(prune(full, 0.05, root_risk)));
    emit("tree_pruned_cp02.txt", render(prune(full, 0.2, root_risk)));
  }

  const auto importance = feature_importance(*forest_model);
  std::string imp_csv = "feature,importance\n";
  for (int f = 0; f < kNumFeatures; ++f)
    imp_csv += kFeatureNames[f] + "," + format_real(importance[f]) + "\n";
  emit("importance.csv", imp_csv);

  const std::vector<double> cps{0.0, 0.01, 0.05, 0.1, 0.2};
  const SweepResult cp_sweep = sweep_cp(ds, cps, o.folds, derive_seed(o.seed, 2));
  emit("sweep_cp.csv", sweep_csv(cp_sweep, "cp"));
  emit("sweep_cp.svg",
       line_chart_svg("CV accuracy vs complexity parameter", "cp",
                      "mean accuracy", cp_sweep.values, cp_sweep.mean_accuracy));

  const std::vector<int> counts{1, 5, 10, 15, 20};
  const SweepResult tree_sweep =
      sweep_ntrees(ds, counts, o.folds, derive_seed(o.seed, 3));
  emit("sweep_trees.csv", sweep_csv(tree_sweep, "n_trees"));
  emit("sweep_trees.svg",
       line_chart_svg("CV accuracy vs number of trees", "n_trees",
                      "mean accuracy", tree_sweep.values,
                      tree_sweep.mean_accuracy));

  std::sort(files.begin(), files.end());
  nlohmann::json manifest{{"seed", o.seed},
                          {"toolkit_version", kToolkitVersion},
                          {"model_format_version", kModelFormatVersion},
                          {"threshold", o.threshold},
                          {"folds", o.folds},
                          {"test_fraction", o.test_fraction},
                          {"generated", o.gen},
                          {"files", files}};
  if (o.gen) manifest["generator"] =
      nlohmann::json::parse(generator_config_to_json(cfg));
  write_file_atomic((dir / "manifest.json").string(), manifest.dump(2) + "\n");
  std::cout << "report written to " << o.outdir << " (" << files.size() + 1
            << " files)\n";
  return 0;
}

void add_tree_flags(CLI::App* cmd, ModelSpec& spec) {
  cmd->add_option("--cp", spec.tree_prune_cp,
                  "prune the grown tree at this complexity parameter");
  cmd->add_option("--growth-cp", spec.tree.cp, "growth-time split gate");
  cmd->add_option("--min-split", spec.tree.min_split);
  cmd->add_option("--min-leaf", spec.tree.min_leaf);
  cmd->add_option("--max-depth", spec.tree.max_depth);
  cmd->add_option("--trees", spec.forest.n_trees, "forest size");
  cmd->add_option("--mtry", spec.forest.mtry, "features tried per split");
  cmd->add_option("--k", spec.knn.k, "neighbor count");
  cmd->add_option("--lr", spec.logreg.learning_rate);
  cmd->add_option("--epochs", spec.logreg.max_epochs);
  cmd->add_option("--tol", spec.logreg.tol);
  cmd->add_option("--stumps", spec.boost.n_stumps, "boosting rounds");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"e-jet printed electrode conductance classification toolkit"};
  app.require_subcommand(1);

  GenOpts gen;
  auto* cmd_gen = app.add_subcommand("gen", "generate a synthetic dataset CSV");
  cmd_gen->add_option("--n", gen.cfg.n, "sample count");
  cmd_gen->add_option("--seed", gen.cfg.seed)->default_val(kDefaultSeed);
  cmd_gen->add_option("--out", gen.out, "output CSV path")->required();
  cmd_gen->add_option("--speeds", gen.cfg.speeds)->delimiter(',');
  cmd_gen->add_option("--voltages", gen.cfg.voltages)->delimiter(',');
  cmd_gen->add_option("--flows", gen.cfg.flows)->delimiter(',');
  cmd_gen->add_option("--base-resistance", gen.cfg.base_resistance);
  cmd_gen->add_option("--speed-coeff", gen.cfg.speed_coeff);
  cmd_gen->add_option("--flow-coeff", gen.cfg.flow_coeff);
  cmd_gen->add_option("--voltage-coeff", gen.cfg.voltage_coeff);
  cmd_gen->add_option("--noise-sigma", gen.cfg.noise_sigma);
  cmd_gen->add_option("--threshold", gen.cfg.threshold, "class cut (ohm/sqr)");
  cmd_gen->add_flag("--full-grid", gen.full_grid,
                    "one sample per grid cell (ignores --n)");

  TrainOpts train;
  auto* cmd_train = app.add_subcommand("train", "fit a model and save JSON");
  cmd_train
      ->add_option("--model", train.spec.name,
                   "tree | forest | knn | logreg | adaboost")
      ->required()
      ->check(CLI::IsMember({"tree", "forest", "knn", "logreg", "adaboost"}));
  cmd_train->add_option("--in", train.in, "dataset CSV")->required();
  cmd_train->add_option("--out", train.out, "model JSON path")->required();
  cmd_train->add_option("--seed", train.seed)->default_val(kDefaultSeed);
  cmd_train->add_option("--threshold", train.threshold,
                        "label cut for rows with only resistance");
  cmd_train->add_option("--test-fraction", train.test_fraction)
      ->check(CLI::Range(0.0, 0.999));
  add_tree_flags(cmd_train, train.spec);

  EvalOpts eval;
  auto* cmd_eval = app.add_subcommand("eval", "evaluate saved models");
  cmd_eval->add_option("--model", eval.models, "model JSON (repeatable)")
      ->required();
  cmd_eval->add_option("--in", eval.in, "labeled dataset CSV")->required();
  cmd_eval->add_option("--out", eval.out, "report path (stdout if omitted)");
  cmd_eval->add_option("--roc", eval.roc, "write ROC points CSV");
  cmd_eval->add_option("--format", eval.format)
      ->check(CLI::IsMember({"csv", "json"}));
  cmd_eval->add_option("--threshold", eval.threshold);
  cmd_eval->add_flag("--swap-pr", eval.swap_pr,
                     "swap precision/recall denominators");

  SweepOpts sweep;
  auto* cmd_sweep = app.add_subcommand("sweep", "CV accuracy hyperparameter sweep");
  cmd_sweep->add_option("--kind", sweep.kind)
      ->required()
      ->check(CLI::IsMember({"cp", "trees"}));
  cmd_sweep->add_option("--values", sweep.values)->required()->delimiter(',');
  cmd_sweep->add_option("--in", sweep.in, "dataset CSV")->required();
  cmd_sweep->add_option("--out", sweep.out, "sweep CSV path")->required();
  cmd_sweep->add_option("--svg", sweep.svg, "also write a line chart");
  cmd_sweep->add_option("--folds", sweep.folds)->check(CLI::Range(2, 1000));
  cmd_sweep->add_option("--seed", sweep.seed)->default_val(kDefaultSeed);
  cmd_sweep->add_option("--threshold", sweep.threshold);

  PredictOpts predict;
  auto* cmd_predict = app.add_subcommand("predict", "classify parameter triples");
  cmd_predict->add_option("--model", predict.model, "model JSON")->required();
  auto* sp = cmd_predict->add_option("--speed", predict.speed, "mm/min");
  auto* vo = cmd_predict->add_option("--voltage", predict.voltage, "kV");
  auto* fl = cmd_predict->add_option("--flow", predict.flow, "ul/min");
  auto* in = cmd_predict->add_option("--in", predict.in, "batch CSV");
  cmd_predict->add_option("--out", predict.out, "batch output CSV");
  sp->excludes(in);
  vo->excludes(in);
  fl->excludes(in);

  ReportOpts report;
  auto* cmd_report = app.add_subcommand(
      "report", "full pipeline: models, comparison table, ROC, sweeps");
  auto* rin = cmd_report->add_option("--in", report.in, "dataset CSV");
  auto* rgen = cmd_report->add_flag("--gen", report.gen,
                                    "generate the dataset instead");
  cmd_report->add_option("--outdir", report.outdir)->required();
  cmd_report->add_option("--n", report.n, "generated sample count");
  cmd_report->add_option("--folds", report.folds)->check(CLI::Range(2, 1000));
  cmd_report->add_option("--seed", report.seed)->default_val(kDefaultSeed);
  cmd_report->add_option("--threshold", report.threshold);
  cmd_report->add_option("--test-fraction", report.test_fraction)
      ->check(CLI::Range(0.001, 0.999));
  rin->excludes(rgen);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  try {
    if (*cmd_gen) return run_gen(gen);
    if (*cmd_train) return run_train(train);
    if (*cmd_eval) return run_eval(eval);
    if (*cmd_sweep) return run_sweep(sweep);
    if (*cmd_predict) {
      predict.has_scalars = sp->count() || vo->count() || fl->count();
      if (predict.has_scalars && (!sp->count() || !vo->count() || !fl->count())) {
        std::cerr << "predict: --speed, --voltage and --flow must be given "
                     "together\n";
        return 1;
      }
      if (!predict.has_scalars && predict.in.empty()) {
        std::cerr << "predict: provide --speed/--voltage/--flow or --in\n";
        return 1;
      }
      return run_predict(predict);
    }
    if (*cmd_report) {
      if (!report.gen && report.in.empty()) {
        std::cerr << "report: provide --in or --gen\n";
        return 1;
      }
      return run_report(report);
    }
  } catch (const DataError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const NumericError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  }
  return 1;
}
