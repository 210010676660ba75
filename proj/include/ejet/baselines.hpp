#pragma once

#include <span>
#include <utility>
#include <vector>

#include "ejet/dataset.hpp"

namespace ejet {

struct KnnParams {
  int k = 3;
};

// KNN keeps the standardized training set; distances are Euclidean in
// standardized units (raw units would reduce the vote to nozzle speed).
struct KnnModel {
  KnnParams params;
  ScalerParams scaler;
  std::vector<Features> train_std;
  std::vector<int> labels;
};

KnnModel fit_knn(const Dataset& train, const KnnParams& params);

// Vote among the k nearest standardized neighbors; distance ties break by
// lower sample index, vote ties by the single nearest neighbor's class.
std::pair<int, double> knn_vote(std::span<const Features> train_std,
                                std::span<const int> labels,
                                const Features& x_std, int k);
std::pair<int, double> knn_predict(const KnnModel& m, const Features& x_raw);

struct LogregParams {
  double learning_rate = 0.1;
  int max_epochs = 5000;
  double tol = 1e-8;  // stop when |delta loss| < tol
};

struct LogregModel {
  Features weights{};
  double bias = 0.0;
  ScalerParams scaler;
  double final_loss = 0.0;
  int epochs_run = 0;
};

double sigmoid(double z);

// Mean cross-entropy and its analytic gradient at (weights, bias) over
// standardized features; exposed so tests can probe arbitrary points.
double logreg_loss(std::span<const Features> x, std::span<const int> y,
                   const Features& weights, double bias);
void logreg_gradient(std::span<const Features> x, std::span<const int> y,
                     const Features& weights, double bias, Features& grad_w,
                     double& grad_b);

// Full-batch gradient descent from zero weights on internally standardized
// features. Deterministic; errors on single-class data or non-finite loss.
LogregModel fit_logreg(const Dataset& train, const LogregParams& params = {});

// probability = sigmoid(w . standardize(x) + b); class 1 iff p > 0.5.
std::pair<int, double> logreg_predict(const LogregModel& m,
                                      const Features& x_raw);

}  // namespace ejet
