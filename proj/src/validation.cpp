#include "ejet/validation.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <type_traits>

#include "ejet/cart.hpp"
#include "ejet/ensembles.hpp"
#include "ejet/errors.hpp"
#include "ejet/rng.hpp"
#include "ejet/textio.hpp"

namespace ejet {

FoldPlan make_folds(const Dataset& ds, int k, std::uint64_t seed,
                    bool stratified) {
  if (k < 2) throw DataError("make_folds: k must be >= 2");
  if (ds.size() < static_cast<std::size_t>(k))
    throw DataError("make_folds: fewer samples than folds");
  if (!ds.fully_labeled())
    throw DataError("make_folds: dataset not fully labeled");

  FoldPlan plan;
  plan.k = k;
  plan.seed = seed;
  plan.stratified = stratified;
  plan.assignments.assign(ds.size(), -1);

  SplitMix64 rng(seed);
  // One round-robin counter across (shuffled) classes keeps fold sizes
  // within 1 of each other both per class and overall.
  int counter = 0;
  if (stratified) {
    std::array<std::vector<int>, 2> by_class;
    for (std::size_t i = 0; i < ds.size(); ++i)
      by_class[*ds.samples[i].label].push_back(static_cast<int>(i));
    for (int c = 0; c < 2; ++c) {
      if (static_cast<int>(by_class[c].size()) < k)
        throw DataError("make_folds: class " + std::to_string(c) +
                        " has fewer than k samples");
      rng.shuffle(by_class[c]);
      for (int i : by_class[c]) plan.assignments[static_cast<std::size_t>(i)] = counter++ % k;
    }
  } else {
    std::vector<int> idx(ds.size());
    std::iota(idx.begin(), idx.end(), 0);
    rng.shuffle(idx);
    for (int i : idx) plan.assignments[static_cast<std::size_t>(i)] = counter++ % k;
  }
  return plan;
}

MetricStats aggregate(const std::vector<double>& values) {
  MetricStats s;
  s.count = static_cast<int>(values.size());
  if (values.empty()) return s;
  s.mean = std::accumulate(values.begin(), values.end(), 0.0) /
           static_cast<double>(values.size());
  double ss = 0.0;
  for (double v : values) ss += (v - s.mean) * (v - s.mean);
  s.sd = std::sqrt(ss / static_cast<double>(values.size()));  // population sd
  return s;
}

CvResult summarize(std::vector<EvalReport> reports) {
  CvResult r;
  auto collect = [&](auto member) {
    std::vector<double> vals;
    for (const auto& rep : reports) {
      const auto& v = rep.*member;
      if constexpr (std::is_same_v<std::decay_t<decltype(v)>, double>)
        vals.push_back(v);
      else if (v)
        vals.push_back(*v);
    }
    return aggregate(vals);
  };
  r.accuracy = collect(&EvalReport::accuracy);
  r.misclassification = collect(&EvalReport::misclassification);
  r.precision = collect(&EvalReport::precision);
  r.recall = collect(&EvalReport::recall);
  r.f1 = collect(&EvalReport::f1);
  r.kappa = collect(&EvalReport::kappa);
  r.auc = collect(&EvalReport::auc);
  r.fold_reports = std::move(reports);
  return r;
}

namespace {

EvalReport eval_on(const Predictor& predict, const Dataset& test,
                   const std::string& name) {
  std::vector<int> actual, predicted;
  std::vector<double> scores;
  actual.reserve(test.size());
  for (const auto& s : test.samples) {
    const auto [cls, score] = predict(s.x);
    actual.push_back(*s.label);
    predicted.push_back(cls);
    scores.push_back(score);
  }
  return evaluate(name, actual, predicted, scores);
}

template <typename Body>
void indexed_loop(int count, bool parallel, const Body& body) {
  std::exception_ptr failure;
#if defined(_OPENMP)
#pragma omp parallel for schedule(dynamic) if (parallel)
#endif
  for (int i = 0; i < count; ++i) {
    try {
      body(i);
    } catch (...) {
#if defined(_OPENMP)
#pragma omp critical
#endif
      if (!failure) failure = std::current_exception();
    }
  }
  (void)parallel;
  if (failure) std::rethrow_exception(failure);
}

CvResult run_cv(const Fitter& fit, const std::string& model_name,
                const Dataset& ds, int k, std::uint64_t seed, bool parallel) {
  const FoldPlan plan = make_folds(ds, k, seed, /*stratified=*/true);
  std::vector<EvalReport> reports(static_cast<std::size_t>(k));

  indexed_loop(k, parallel, [&](int f) {
    Dataset train, test;
    for (std::size_t i = 0; i < ds.size(); ++i)
      (plan.assignments[i] == f ? test : train).samples.push_back(ds.samples[i]);
    try {
      const Predictor predict = fit(train, derive_seed(seed, static_cast<std::uint64_t>(f)));
      reports[static_cast<std::size_t>(f)] = eval_on(predict, test, model_name);
    } catch (const DataError& e) {
      throw DataError("fold " + std::to_string(f) + ": " + e.what());
    } catch (const NumericError& e) {
      throw NumericError("fold " + std::to_string(f) + ": " + e.what());
    }
  });
  return summarize(std::move(reports));
}

CvResult run_bootstrap(const Fitter& fit, const std::string& model_name,
                       const Dataset& ds, int B, std::uint64_t seed,
                       bool parallel) {
  if (B < 1) throw DataError("bootstrap_validate: B must be >= 1");
  if (ds.empty()) throw DataError("bootstrap_validate: empty dataset");
  if (!ds.fully_labeled())
    throw DataError("bootstrap_validate: dataset not fully labeled");

  const auto n = static_cast<int>(ds.size());
  std::vector<EvalReport> reports(static_cast<std::size_t>(B));

  indexed_loop(B, parallel, [&](int r) {
    SplitMix64 rng(derive_seed(seed, static_cast<std::uint64_t>(r)));
    Dataset resample, oob;
    bool ok = false;
    for (int attempt = 0; attempt < 100 && !ok; ++attempt) {
      resample.samples.clear();
      oob.samples.clear();
      std::vector<char> seen(static_cast<std::size_t>(n), 0);
      std::array<std::int64_t, 2> counts{0, 0};
      for (int i = 0; i < n; ++i) {
        const auto j = static_cast<std::size_t>(rng.next_below(static_cast<std::uint64_t>(n)));
        resample.samples.push_back(ds.samples[j]);
        ++counts[*ds.samples[j].label];
        seen[j] = 1;
      }
      for (int i = 0; i < n; ++i)
        if (!seen[static_cast<std::size_t>(i)])
          oob.samples.push_back(ds.samples[static_cast<std::size_t>(i)]);
      ok = !oob.empty() && counts[0] > 0 && counts[1] > 0;
    }
    if (!ok)
      throw NumericError("bootstrap_validate: round " + std::to_string(r) +
                         ": no usable resample after 100 retries");
    try {
      const Predictor predict = fit(resample, rng.next());
      reports[static_cast<std::size_t>(r)] = eval_on(predict, oob, model_name);
    } catch (const DataError& e) {
      throw DataError("round " + std::to_string(r) + ": " + e.what());
    } catch (const NumericError& e) {
      throw NumericError("round " + std::to_string(r) + ": " + e.what());
    }
  });
  return summarize(std::move(reports));
}

}  // namespace

CvResult cross_validate(const Fitter& fit, const std::string& model_name,
                        const Dataset& ds, int k, std::uint64_t seed) {
  return run_cv(fit, model_name, ds, k, seed, true);
}

CvResult cross_validate_serial(const Fitter& fit, const std::string& model_name,
                               const Dataset& ds, int k, std::uint64_t seed) {
  return run_cv(fit, model_name, ds, k, seed, false);
}

CvResult bootstrap_validate(const Fitter& fit, const std::string& model_name,
                            const Dataset& ds, int B, std::uint64_t seed) {
  return run_bootstrap(fit, model_name, ds, B, seed, true);
}

CvResult bootstrap_validate_serial(const Fitter& fit,
                                   const std::string& model_name,
                                   const Dataset& ds, int B,
                                   std::uint64_t seed) {
  return run_bootstrap(fit, model_name, ds, B, seed, false);
}

SweepResult sweep_cp(const Dataset& ds, const std::vector<double>& cp_values,
                     int k, std::uint64_t seed) {
  if (cp_values.empty()) throw DataError("sweep_cp: empty cp list");
  for (double cp : cp_values)
    if (cp < 0.0 || cp > 1.0)
      throw DataError("sweep_cp: cp values must be in [0, 1]");

  SweepResult out;
  for (std::size_t p = 0; p < cp_values.size(); ++p) {
    const double cp = cp_values[p];
    // Grown with default parameters, then pruned at the sweep cp.
    const Fitter fit = [cp](const Dataset& train, std::uint64_t) -> Predictor {
      TreeNode grown = grow(train, TreeParams{});
      auto tree = std::make_shared<TreeNode>(
          prune(grown, cp, static_cast<double>(leaf_risk(grown))));
      return [tree](const Features& x) { return tree_predict(*tree, x); };
    };
    const CvResult cv =
        cross_validate(fit, "tree cp=" + format_real(cp), ds, k,
                       derive_seed(seed, p));
    out.values.push_back(cp);
    out.mean_accuracy.push_back(cv.accuracy.mean);
    out.sd.push_back(cv.accuracy.sd);
  }
  return out;
}

SweepResult sweep_ntrees(const Dataset& ds, const std::vector<int>& counts,
                         int k, std::uint64_t seed) {
  if (counts.empty()) throw DataError("sweep_ntrees: empty count list");
  for (int c : counts)
    if (c < 1) throw DataError("sweep_ntrees: counts must be >= 1");

  SweepResult out;
  for (std::size_t p = 0; p < counts.size(); ++p) {
    const int n_stumps = counts[p];
    const Fitter fit = [n_stumps](const Dataset& train,
                                  std::uint64_t s) -> Predictor {
      auto model = std::make_shared<BoostModel>(
          fit_adaboost(train, BoostParams{.n_stumps = n_stumps, .seed = s}));
      return [model](const Features& x) { return adaboost_predict(*model, x); };
    };
    const CvResult cv =
        cross_validate(fit, "adaboost t=" + std::to_string(n_stumps), ds, k,
                       derive_seed(seed, p));
    out.values.push_back(static_cast<double>(n_stumps));
    out.mean_accuracy.push_back(cv.accuracy.mean);
    out.sd.push_back(cv.accuracy.sd);
  }
  return out;
}

std::string sweep_csv(const SweepResult& s, const std::string& param_name) {
  std::string out = param_name + ",mean_accuracy,sd\n";
  for (std::size_t i = 0; i < s.values.size(); ++i)
    out += format_real(s.values[i]) + "," + format_real(s.mean_accuracy[i]) +
           "," + format_real(s.sd[i]) + "\n";
  return out;
}

}  // namespace ejet
