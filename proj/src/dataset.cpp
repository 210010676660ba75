#include "ejet/dataset.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <numeric>
#include <sstream>

#include "ejet/errors.hpp"
#include "ejet/rng.hpp"
#include "ejet/textio.hpp"

namespace ejet {

const std::array<std::string, kNumFeatures> kFeatureNames = {
    "nozzle_speed", "voltage", "flow_rate"};

const std::array<std::string, 5> kCsvColumns = {
    "nozzle_speed_mm_min", "voltage_kv", "flow_rate_ul_min",
    "resistance_ohm_sqr", "class"};

bool Dataset::fully_labeled() const {
  return std::all_of(samples.begin(), samples.end(),
                     [](const PrintSample& s) { return s.label.has_value(); });
}

std::vector<int> Dataset::labels() const {
  std::vector<int> out;
  out.reserve(samples.size());
  for (std::size_t i = 0; i < samples.size(); ++i) {
    if (!samples[i].label)
      throw DataError("sample " + std::to_string(i) + " has no label");
    out.push_back(*samples[i].label);
  }
  return out;
}

std::array<std::int64_t, 2> Dataset::class_counts() const {
  std::array<std::int64_t, 2> c{0, 0};
  for (const auto& s : samples)
    if (s.label) ++c[*s.label];
  return c;
}

namespace {

double parse_number(const std::string& cell, int line_no,
                    const std::string& column) {
  double v = 0.0;
  const char* first = cell.data();
  const char* last = cell.data() + cell.size();
  auto [ptr, ec] = std::from_chars(first, last, v);
  if (ec != std::errc() || ptr != last)
    throw DataError("line " + std::to_string(line_no) + ": column '" + column +
                    "': cannot parse '" + cell + "' as a number");
  return v;
}

void validate_sample(const PrintSample& s, int line_no) {
  if (!(s.x[kFeatSpeed] > 0.0))
    throw DataError("line " + std::to_string(line_no) +
                    ": nozzle speed must be positive");
  if (!(s.x[kFeatVoltage] >= 0.0))
    throw DataError("line " + std::to_string(line_no) +
                    ": voltage must be non-negative");
  if (!(s.x[kFeatFlow] > 0.0))
    throw DataError("line " + std::to_string(line_no) +
                    ": flow rate must be positive");
  if (s.resistance && !(*s.resistance > 0.0))
    throw DataError("line " + std::to_string(line_no) +
                    ": resistance must be positive");
  if (s.label && *s.label != 0 && *s.label != 1)
    throw DataError("line " + std::to_string(line_no) +
                    ": class must be 0 or 1");
  if (!s.resistance && !s.label)
    throw DataError("line " + std::to_string(line_no) +
                    ": row has neither resistance nor class");
}

}  // namespace

Dataset load_csv(const std::string& path) {
  std::istringstream in(read_file(path));
  std::string line;
  if (!std::getline(in, line))
    throw DataError(path + ": empty file, header row required");

  const auto header = split_csv_line(line);
  for (std::size_t i = 0; i < kCsvColumns.size(); ++i) {
    if (i >= header.size())
      throw DataError(path + ": missing column '" + kCsvColumns[i] + "'");
    if (header[i] != kCsvColumns[i])
      throw DataError(path + ": unknown column '" + header[i] +
                      "' (expected '" + kCsvColumns[i] + "')");
  }
  if (header.size() > kCsvColumns.size())
    throw DataError(path + ": unknown column '" + header[kCsvColumns.size()] +
                    "'");

  Dataset ds;
  int line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty() || line == "\r") continue;
    const auto cells = split_csv_line(line);
    if (cells.size() != kCsvColumns.size())
      throw DataError("line " + std::to_string(line_no) + ": expected " +
                      std::to_string(kCsvColumns.size()) + " cells, got " +
                      std::to_string(cells.size()));
    PrintSample s;
    for (int f = 0; f < kNumFeatures; ++f)
      s.x[f] = parse_number(cells[f], line_no, kCsvColumns[f]);
    if (!cells[3].empty())
      s.resistance = parse_number(cells[3], line_no, kCsvColumns[3]);
    if (!cells[4].empty())
      s.label = static_cast<int>(parse_number(cells[4], line_no, kCsvColumns[4]));
    validate_sample(s, line_no);
    ds.samples.push_back(s);
  }
  return ds;
}

void save_csv(const Dataset& ds, const std::string& path) {
  std::string out;
  for (std::size_t i = 0; i < kCsvColumns.size(); ++i) {
    if (i) out += ',';
    out += kCsvColumns[i];
  }
  out += '\n';
  for (const auto& s : ds.samples) {
    out += format_real(s.x[0]) + "," + format_real(s.x[1]) + "," +
           format_real(s.x[2]) + ",";
    if (s.resistance) out += format_real(*s.resistance);
    out += ',';
    if (s.label) out += std::to_string(*s.label);
    out += '\n';
  }
  write_file_atomic(path, out);
}

Dataset label_by_threshold(Dataset ds, double threshold) {
  for (std::size_t i = 0; i < ds.samples.size(); ++i) {
    auto& s = ds.samples[i];
    if (s.label) continue;
    if (!s.resistance)
      throw DataError("sample " + std::to_string(i) +
                      ": unlabeled and no resistance to label from");
    s.label = (*s.resistance >= threshold) ? 0 : 1;
  }
  return ds;
}

ScalerParams standardize_fit(const Dataset& ds) {
  if (ds.empty()) throw DataError("standardize_fit: empty dataset");
  ScalerParams sp;
  const double n = static_cast<double>(ds.size());
  for (int f = 0; f < kNumFeatures; ++f) {
    double sum = 0.0;
    for (const auto& s : ds.samples) sum += s.x[f];
    const double mean = sum / n;
    double ss = 0.0;
    for (const auto& s : ds.samples) {
      const double d = s.x[f] - mean;
      ss += d * d;
    }
    sp.mean[f] = mean;
    sp.stddev[f] = std::sqrt(ss / n);  // population stddev: defined for n=1
    sp.constant[f] = (sp.stddev[f] == 0.0);
  }
  return sp;
}

Features standardize_apply(const Features& x, const ScalerParams& sp) {
  Features out{};
  for (int f = 0; f < kNumFeatures; ++f)
    out[f] = sp.constant[f] ? 0.0 : (x[f] - sp.mean[f]) / sp.stddev[f];
  return out;
}

Dataset standardize_apply(Dataset ds, const ScalerParams& sp) {
  for (auto& s : ds.samples) s.x = standardize_apply(s.x, sp);
  return ds;
}

std::pair<Dataset, Dataset> stratified_split(const Dataset& ds,
                                             double test_fraction,
                                             std::uint64_t seed) {
  if (!(test_fraction > 0.0 && test_fraction < 1.0))
    throw DataError("test fraction must be in (0, 1)");
  if (!ds.fully_labeled())
    throw DataError("stratified_split: dataset not fully labeled");

  std::array<std::vector<int>, 2> by_class;
  for (std::size_t i = 0; i < ds.size(); ++i)
    by_class[*ds.samples[i].label].push_back(static_cast<int>(i));
  if (by_class[0].empty() || by_class[1].empty())
    throw DataError("stratified_split: both classes must be present");

  // Largest-remainder apportionment of round(n * fraction) test slots, so
  // every per-class count is within 1 of class_count * fraction.
  const auto target_total = static_cast<std::int64_t>(
      std::llround(static_cast<double>(ds.size()) * test_fraction));
  std::array<std::int64_t, 2> take{};
  std::array<double, 2> rem{};
  for (int c = 0; c < 2; ++c) {
    const double want = static_cast<double>(by_class[c].size()) * test_fraction;
    take[c] = static_cast<std::int64_t>(std::floor(want));
    rem[c] = want - static_cast<double>(take[c]);
  }
  std::int64_t extra = target_total - take[0] - take[1];
  std::array<int, 2> order = (rem[1] > rem[0]) ? std::array<int, 2>{1, 0}
                                               : std::array<int, 2>{0, 1};
  for (int c : order) {
    while (extra > 0 && rem[c] > 0.0 &&
           take[c] < static_cast<std::int64_t>(by_class[c].size())) {
      ++take[c];
      rem[c] = 0.0;
      --extra;
    }
  }

  SplitMix64 rng(seed);
  std::vector<char> in_test(ds.size(), 0);
  for (int c = 0; c < 2; ++c) {
    auto idx = by_class[c];
    rng.shuffle(idx);
    for (std::int64_t i = 0; i < take[c]; ++i) in_test[idx[i]] = 1;
  }

  Dataset train, test;
  for (std::size_t i = 0; i < ds.size(); ++i)
    (in_test[i] ? test : train).samples.push_back(ds.samples[i]);
  return {std::move(train), std::move(test)};
}

}  // namespace ejet
