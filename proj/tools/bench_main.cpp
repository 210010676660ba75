// Serial vs OpenMP benchmark for the parallel kernels: forest fitting,
// cross-validation, bootstrap evaluation. Results must be identical; only
// the wall time differs.

#include <chrono>
#include <cstdio>
#include <functional>

#if defined(_OPENMP)
#include <omp.h>
#endif

#include "ejet/ensembles.hpp"
#include "ejet/model_io.hpp"
#include "ejet/synthgen.hpp"
#include "ejet/validation.hpp"

using namespace ejet;

namespace {

double time_ms(const std::function<void()>& fn, int repeats) {
  using clock = std::chrono::steady_clock;
  double best = 1e300;
  for (int r = 0; r < repeats; ++r) {
    const auto t0 = clock::now();
    fn();
    const auto t1 = clock::now();
    best = std::min(best,
                    std::chrono::duration<double, std::milli>(t1 - t0).count());
  }
  return best;
}

void row(const char* name, double serial_ms, double parallel_ms) {
  std::printf("%-28s %10.1f ms %10.1f ms %8.2fx\n", name, serial_ms,
              parallel_ms, serial_ms / parallel_ms);
}

}  // namespace

int main() {
  GeneratorConfig cfg;
  cfg.n = 960;
  cfg.seed = 7;
  const Dataset ds = generate(cfg);

#if defined(_OPENMP)
  std::printf("OpenMP threads: %d\n", omp_get_max_threads());
#else
  std::printf("built without OpenMP; both columns run serially\n");
#endif
  std::printf("dataset: %zu samples\n\n", ds.size());
  std::printf("%-28s %13s %13s %9s\n", "kernel", "serial", "parallel",
              "speedup");

  ForestParams fp;
  fp.n_trees = 300;
  fp.seed = 11;
  fit_forest(ds, fp);  // warm up allocators and page cache
  const double f_serial = time_ms([&] { fit_forest_serial(ds, fp); }, 3);
  const double f_parallel = time_ms([&] { fit_forest(ds, fp); }, 3);
  row("fit_forest (300 trees)", f_serial, f_parallel);

  // tree model: no inner parallelism, so this isolates fold-level speedup
  ModelSpec tree_spec;
  tree_spec.name = "tree";
  const Fitter tree_fit = make_fitter(tree_spec);
  cross_validate(tree_fit, "tree", ds, 10, 3);
  const double cv_serial =
      time_ms([&] { cross_validate_serial(tree_fit, "tree", ds, 10, 3); }, 3);
  const double cv_parallel =
      time_ms([&] { cross_validate(tree_fit, "tree", ds, 10, 3); }, 3);
  row("cross_validate (tree, k=10)", cv_serial, cv_parallel);

  const double bs_serial = time_ms(
      [&] { bootstrap_validate_serial(tree_fit, "tree", ds, 100, 5); }, 3);
  const double bs_parallel =
      time_ms([&] { bootstrap_validate(tree_fit, "tree", ds, 100, 5); }, 3);
  row("bootstrap_validate (B=100)", bs_serial, bs_parallel);

  return 0;
}
