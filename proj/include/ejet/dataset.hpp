#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace ejet {

inline constexpr int kNumFeatures = 3;
using Features = std::array<double, kNumFeatures>;

// Column order everywhere: nozzle speed, voltage, flow rate.
inline constexpr int kFeatSpeed = 0;
inline constexpr int kFeatVoltage = 1;
inline constexpr int kFeatFlow = 2;

extern const std::array<std::string, kNumFeatures> kFeatureNames;

// CSV schema (header required, resistance/class each optional per row but
// at least one present).
extern const std::array<std::string, 5> kCsvColumns;

// One e-jet print run: process parameters, optionally the measured sheet
// resistance (ohm/sqr) and/or the binary conductance class
// (0 = low conductance / defective, 1 = high conductance / good).
struct PrintSample {
  Features x{};
  std::optional<double> resistance;
  std::optional<int> label;
};

struct Dataset {
  std::vector<PrintSample> samples;

  std::size_t size() const { return samples.size(); }
  bool empty() const { return samples.empty(); }
  bool fully_labeled() const;
  // Throws DataError when any sample is unlabeled.
  std::vector<int> labels() const;
  std::array<std::int64_t, 2> class_counts() const;
};

// Standardization parameters: per-feature mean and population stddev.
// Features with stddev 0 are flagged constant and map to 0.
struct ScalerParams {
  Features mean{};
  Features stddev{};
  std::array<bool, kNumFeatures> constant{};
};

Dataset load_csv(const std::string& path);
void save_csv(const Dataset& ds, const std::string& path);

// label = 0 where resistance >= threshold, 1 where resistance < threshold.
// Already-labeled samples pass through unchanged; an unlabeled sample with
// no resistance is an error.
Dataset label_by_threshold(Dataset ds, double threshold);

ScalerParams standardize_fit(const Dataset& ds);
Features standardize_apply(const Features& x, const ScalerParams& sp);
Dataset standardize_apply(Dataset ds, const ScalerParams& sp);

// Deterministic stratified holdout. Per-class test counts are the
// largest-remainder apportionment of round(n * test_fraction); both parts
// keep the original sample order.
std::pair<Dataset, Dataset> stratified_split(const Dataset& ds,
                                             double test_fraction,
                                             std::uint64_t seed);

}  // namespace ejet
