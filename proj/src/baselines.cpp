#include "ejet/baselines.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "ejet/errors.hpp"

namespace ejet {

KnnModel fit_knn(const Dataset& train, const KnnParams& params) {
  if (train.empty()) throw DataError("fit_knn: empty training set");
  if (!train.fully_labeled())
    throw DataError("fit_knn: dataset not fully labeled");
  if (params.k < 1) throw DataError("fit_knn: k must be >= 1");
  if (params.k > static_cast<int>(train.size()))
    throw DataError("fit_knn: k exceeds training-set size");
  KnnModel m;
  m.params = params;
  m.scaler = standardize_fit(train);
  m.train_std.reserve(train.size());
  m.labels.reserve(train.size());
  for (const auto& s : train.samples) {
    m.train_std.push_back(standardize_apply(s.x, m.scaler));
    m.labels.push_back(*s.label);
  }
  return m;
}

std::pair<int, double> knn_vote(std::span<const Features> train_std,
                                std::span<const int> labels,
                                const Features& x_std, int k) {
  const auto n = train_std.size();
  if (n == 0) throw DataError("knn: empty training set");
  if (k < 1 || static_cast<std::size_t>(k) > n)
    throw DataError("knn: k must be in [1, n]");

  // Squared distance is order-equivalent to Euclidean; ties break by lower
  // sample index.
  std::vector<std::pair<double, int>> d;
  d.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    double s = 0.0;
    for (int f = 0; f < kNumFeatures; ++f) {
      const double diff = train_std[i][f] - x_std[f];
      s += diff * diff;
    }
    d.emplace_back(s, static_cast<int>(i));
  }
  std::partial_sort(d.begin(), d.begin() + k, d.end());

  int ones = 0;
  for (int j = 0; j < k; ++j) ones += labels[static_cast<std::size_t>(d[static_cast<std::size_t>(j)].second)];
  const double score = static_cast<double>(ones) / static_cast<double>(k);
  int cls;
  if (2 * ones > k)
    cls = 1;
  else if (2 * ones < k)
    cls = 0;
  else
    cls = labels[static_cast<std::size_t>(d[0].second)];  // vote tie -> nearest neighbor
  return {cls, score};
}

std::pair<int, double> knn_predict(const KnnModel& m, const Features& x_raw) {
  return knn_vote(m.train_std, m.labels, standardize_apply(x_raw, m.scaler),
                  m.params.k);
}

double sigmoid(double z) {
  if (z >= 0.0) return 1.0 / (1.0 + std::exp(-z));
  const double e = std::exp(z);
  return e / (1.0 + e);
}

namespace {

// log(1 + e^z), overflow-safe.
double softplus(double z) {
  if (z > 30.0) return z;
  if (z < -30.0) return std::exp(z);
  return std::log1p(std::exp(z));
}

}  // namespace

double logreg_loss(std::span<const Features> x, std::span<const int> y,
                   const Features& weights, double bias) {
  // -mean(y ln s + (1-y) ln(1-s)) = mean(softplus(z) - y z)
  double loss = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    double z = bias;
    for (int f = 0; f < kNumFeatures; ++f) z += weights[f] * x[i][f];
    loss += softplus(z) - static_cast<double>(y[i]) * z;
  }
  return loss / static_cast<double>(x.size());
}

void logreg_gradient(std::span<const Features> x, std::span<const int> y,
                     const Features& weights, double bias, Features& grad_w,
                     double& grad_b) {
  grad_w = {0.0, 0.0, 0.0};
  grad_b = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    double z = bias;
    for (int f = 0; f < kNumFeatures; ++f) z += weights[f] * x[i][f];
    const double err = sigmoid(z) - static_cast<double>(y[i]);
    for (int f = 0; f < kNumFeatures; ++f) grad_w[f] += err * x[i][f];
    grad_b += err;
  }
  const double n = static_cast<double>(x.size());
  for (int f = 0; f < kNumFeatures; ++f) grad_w[f] /= n;
  grad_b /= n;
}

LogregModel fit_logreg(const Dataset& train, const LogregParams& params) {
  if (train.empty()) throw DataError("fit_logreg: empty training set");
  if (!train.fully_labeled())
    throw DataError("fit_logreg: dataset not fully labeled");
  const auto counts = train.class_counts();
  if (counts[0] == 0 || counts[1] == 0)
    throw NumericError("fit_logreg: training set has a single class");

  LogregModel m;
  m.scaler = standardize_fit(train);
  std::vector<Features> x;
  x.reserve(train.size());
  for (const auto& s : train.samples)
    x.push_back(standardize_apply(s.x, m.scaler));
  const auto y = train.labels();

  double prev_loss = logreg_loss(x, y, m.weights, m.bias);
  if (!std::isfinite(prev_loss))
    throw NumericError("fit_logreg: non-finite loss at epoch 0");
  Features grad_w{};
  double grad_b = 0.0;
  int epoch = 0;
  for (; epoch < params.max_epochs; ++epoch) {
    logreg_gradient(x, y, m.weights, m.bias, grad_w, grad_b);
    for (int f = 0; f < kNumFeatures; ++f)
      m.weights[f] -= params.learning_rate * grad_w[f];
    m.bias -= params.learning_rate * grad_b;
    const double loss = logreg_loss(x, y, m.weights, m.bias);
    if (!std::isfinite(loss))
      throw NumericError("fit_logreg: non-finite loss at epoch " +
                         std::to_string(epoch + 1));
    const bool converged = std::abs(prev_loss - loss) < params.tol;
    prev_loss = loss;
    if (converged) {
      ++epoch;
      break;
    }
  }
  m.final_loss = prev_loss;
  m.epochs_run = epoch;
  return m;
}

std::pair<int, double> logreg_predict(const LogregModel& m,
                                      const Features& x_raw) {
  const Features x = standardize_apply(x_raw, m.scaler);
  double z = m.bias;
  for (int f = 0; f < kNumFeatures; ++f) z += m.weights[f] * x[f];
  const double p = sigmoid(z);
  return {p > 0.5 ? 1 : 0, p};
}

}  // namespace ejet
