#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "ejet/dataset.hpp"
#include "ejet/metrics.hpp"

namespace ejet {

struct FoldPlan {
  int k = 0;
  std::vector<int> assignments;  // fold index per sample
  std::uint64_t seed = 0;
  bool stratified = true;
};

// Seeded shuffle within each class (or globally when unstratified), then a
// single round-robin counter across classes so fold sizes differ by at most
// one overall and per class.
FoldPlan make_folds(const Dataset& ds, int k, std::uint64_t seed,
                    bool stratified);

// A fitted classifier: x -> (class, score).
using Predictor = std::function<std::pair<int, double>(const Features&)>;
// Fits a model on a training set with a derived seed.
using Fitter = std::function<Predictor(const Dataset&, std::uint64_t)>;

struct MetricStats {
  double mean = 0.0;
  double sd = 0.0;  // population sd
  int count = 0;    // folds where the metric was defined
};

struct CvResult {
  std::vector<EvalReport> fold_reports;
  MetricStats accuracy, misclassification, precision, recall, f1, kappa, auc;
};

MetricStats aggregate(const std::vector<double>& values);
CvResult summarize(std::vector<EvalReport> reports);

// Stratified k-fold cross-validation; fold f's model seed is
// derive_seed(seed, f), so folds may run in any order or in parallel.
CvResult cross_validate(const Fitter& fit, const std::string& model_name,
                        const Dataset& ds, int k, std::uint64_t seed);
CvResult cross_validate_serial(const Fitter& fit, const std::string& model_name,
                               const Dataset& ds, int k, std::uint64_t seed);

// B rounds of fit-on-resample / evaluate-on-out-of-resample. Rounds drawing
// an empty out-of-resample set or a single-class resample are redrawn from
// the same per-round stream (at most 100 retries, then an error).
CvResult bootstrap_validate(const Fitter& fit, const std::string& model_name,
                            const Dataset& ds, int B, std::uint64_t seed);
CvResult bootstrap_validate_serial(const Fitter& fit,
                                   const std::string& model_name,
                                   const Dataset& ds, int B,
                                   std::uint64_t seed);

struct SweepResult {
  std::vector<double> values;
  std::vector<double> mean_accuracy;
  std::vector<double> sd;
};

// CV accuracy of a default-grown tree pruned at each cp.
SweepResult sweep_cp(const Dataset& ds, const std::vector<double>& cp_values,
                     int k, std::uint64_t seed);
// CV accuracy of AdaBoost at each stump count.
SweepResult sweep_ntrees(const Dataset& ds, const std::vector<int>& counts,
                         int k, std::uint64_t seed);

std::string sweep_csv(const SweepResult& s, const std::string& param_name);

}  // namespace ejet
