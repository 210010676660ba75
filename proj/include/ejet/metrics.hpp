#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace ejet {

// Rows = actual class, columns = predicted class, positive class = 1.
struct ConfusionMatrix {
  std::int64_t tn = 0;
  std::int64_t fp = 0;
  std::int64_t fn = 0;
  std::int64_t tp = 0;

  std::int64_t total() const { return tn + fp + fn + tp; }
};

// Conventional: precision = tp/(tp+fp), recall = tp/(tp+fn).
// kSwapped exchanges the two denominators, for auditing against sources
// that define them the other way around; f1 is identical either way.
enum class MetricMode { kConventional, kSwapped };

ConfusionMatrix confusion(std::span<const int> actual,
                          std::span<const int> predicted);

double accuracy(const ConfusionMatrix& cm);
double misclassification(const ConfusionMatrix& cm);

// 0/0 metrics are reported absent, never silently 0.
std::optional<double> precision(const ConfusionMatrix& cm,
                                MetricMode mode = MetricMode::kConventional);
std::optional<double> recall(const ConfusionMatrix& cm,
                             MetricMode mode = MetricMode::kConventional);
std::optional<double> f1(const ConfusionMatrix& cm,
                         MetricMode mode = MetricMode::kConventional);

// Chance-corrected agreement; absent when random accuracy = 1.
std::optional<double> kappa(const ConfusionMatrix& cm);

struct RocCurve {
  std::vector<std::pair<double, double>> points;  // (fpr, tpr)
  std::vector<double> thresholds;                 // cutoff per point
};

// Threshold sweep over distinct scores, descending; ties grouped so the
// curve moves diagonally in one step. Requires both classes present.
RocCurve roc_curve(std::span<const double> scores, std::span<const int> actual);

// Trapezoidal area; equals the pairwise Mann-Whitney statistic.
double auc(const RocCurve& curve);

struct EvalReport {
  std::string model_name;
  ConfusionMatrix cm;
  double accuracy = 0.0;
  double misclassification = 0.0;
  std::optional<double> precision;
  std::optional<double> recall;
  std::optional<double> f1;
  std::optional<double> kappa;
  std::optional<double> auc;  // absent when the actuals are single-class
};

EvalReport evaluate(const std::string& model_name, std::span<const int> actual,
                    std::span<const int> predicted,
                    std::span<const double> scores,
                    MetricMode mode = MetricMode::kConventional);

// One row per model, Table-style column order.
std::string eval_report_csv_header();
std::string eval_report_csv_row(const EvalReport& r);
std::string roc_curve_csv(const RocCurve& curve);

}  // namespace ejet
