#include "ejet/metrics.hpp"

#include <algorithm>
#include <limits>
#include <numeric>

#include "ejet/errors.hpp"
#include "ejet/textio.hpp"

namespace ejet {

ConfusionMatrix confusion(std::span<const int> actual,
                          std::span<const int> predicted) {
  if (actual.size() != predicted.size())
    throw DataError("confusion: actual and predicted lengths differ");
  if (actual.empty()) throw DataError("confusion: empty inputs");
  ConfusionMatrix cm;
  for (std::size_t i = 0; i < actual.size(); ++i) {
    if (actual[i] == 0)
      predicted[i] == 0 ? ++cm.tn : ++cm.fp;
    else
      predicted[i] == 0 ? ++cm.fn : ++cm.tp;
  }
  return cm;
}

double accuracy(const ConfusionMatrix& cm) {
  return static_cast<double>(cm.tp + cm.tn) / static_cast<double>(cm.total());
}

double misclassification(const ConfusionMatrix& cm) {
  return 1.0 - accuracy(cm);
}

std::optional<double> precision(const ConfusionMatrix& cm, MetricMode mode) {
  const std::int64_t den =
      mode == MetricMode::kConventional ? cm.tp + cm.fp : cm.tp + cm.fn;
  if (den == 0) return std::nullopt;
  return static_cast<double>(cm.tp) / static_cast<double>(den);
}

std::optional<double> recall(const ConfusionMatrix& cm, MetricMode mode) {
  const std::int64_t den =
      mode == MetricMode::kConventional ? cm.tp + cm.fn : cm.tp + cm.fp;
  if (den == 0) return std::nullopt;
  return static_cast<double>(cm.tp) / static_cast<double>(den);
}

std::optional<double> f1(const ConfusionMatrix& cm, MetricMode mode) {
  const auto p = precision(cm, mode);
  const auto r = recall(cm, mode);
  if (!p || !r || *p + *r == 0.0) return std::nullopt;
  return 2.0 * *p * *r / (*p + *r);
}

std::optional<double> kappa(const ConfusionMatrix& cm) {
  const double total = static_cast<double>(cm.total());
  const double row0 = static_cast<double>(cm.tn + cm.fp);
  const double row1 = static_cast<double>(cm.fn + cm.tp);
  const double col0 = static_cast<double>(cm.tn + cm.fn);
  const double col1 = static_cast<double>(cm.fp + cm.tp);
  const double random = (row0 * col0 + row1 * col1) / (total * total);
  if (random == 1.0) return std::nullopt;
  return (accuracy(cm) - random) / (1.0 - random);
}

RocCurve roc_curve(std::span<const double> scores,
                   std::span<const int> actual) {
  if (scores.size() != actual.size())
    throw DataError("roc_curve: scores and actual lengths differ");
  std::int64_t pos = 0, neg = 0;
  for (int y : actual) (y == 1 ? pos : neg)++;
  if (pos == 0 || neg == 0)
    throw DataError("roc_curve: both classes must be present");

  std::vector<std::size_t> order(scores.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return scores[a] > scores[b];
  });

  RocCurve curve;
  curve.points.emplace_back(0.0, 0.0);
  curve.thresholds.push_back(std::numeric_limits<double>::infinity());
  std::int64_t tp = 0, fp = 0;
  std::size_t i = 0;
  while (i < order.size()) {
    const double s = scores[order[i]];
    // One step per tie group: equal scores move diagonally together.
    while (i < order.size() && scores[order[i]] == s) {
      (actual[order[i]] == 1 ? tp : fp)++;
      ++i;
    }
    curve.points.emplace_back(static_cast<double>(fp) / static_cast<double>(neg),
                              static_cast<double>(tp) / static_cast<double>(pos));
    curve.thresholds.push_back(s);
  }
  return curve;
}

double auc(const RocCurve& curve) {
  double area = 0.0;
  for (std::size_t i = 1; i < curve.points.size(); ++i) {
    const auto& [x0, y0] = curve.points[i - 1];
    const auto& [x1, y1] = curve.points[i];
    area += (x1 - x0) * (y0 + y1) * 0.5;
  }
  return area;
}

EvalReport evaluate(const std::string& model_name, std::span<const int> actual,
                    std::span<const int> predicted,
                    std::span<const double> scores, MetricMode mode) {
  EvalReport r;
  r.model_name = model_name;
  r.cm = confusion(actual, predicted);
  r.accuracy = accuracy(r.cm);
  r.misclassification = misclassification(r.cm);
  r.precision = precision(r.cm, mode);
  r.recall = recall(r.cm, mode);
  r.f1 = f1(r.cm, mode);
  r.kappa = kappa(r.cm);
  const bool both = (r.cm.tn + r.cm.fp) > 0 && (r.cm.fn + r.cm.tp) > 0;
  if (both && scores.size() == actual.size())
    r.auc = auc(roc_curve(scores, actual));
  return r;
}

namespace {
std::string cell(const std::optional<double>& v) {
  return v ? format_real(*v) : std::string();
}
}  // namespace

std::string eval_report_csv_header() {
  return "model,accuracy,misclassification,f1,auc,kappa,recall";
}

std::string eval_report_csv_row(const EvalReport& r) {
  return r.model_name + "," + format_real(r.accuracy) + "," +
         format_real(r.misclassification) + "," + cell(r.f1) + "," +
         cell(r.auc) + "," + cell(r.kappa) + "," + cell(r.recall);
}

std::string roc_curve_csv(const RocCurve& curve) {
  std::string out = "fpr,tpr\n";
  for (const auto& [x, y] : curve.points)
    out += format_real(x) + "," + format_real(y) + "\n";
  return out;
}

}  // namespace ejet
