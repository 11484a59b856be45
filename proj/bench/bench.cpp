// Times each OpenMP kernel against its serial reference and checks that the
// two produce identical output.

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <functional>
#include <string>
#include <vector>

#include <omp.h>

#include "CLI11.hpp"
#include "mcmix/clustering.hpp"
#include "mcmix/kernels.hpp"
#include "mcmix/multistart.hpp"
#include "mcmix/rng.hpp"

using namespace mcmix;

namespace {

double median_seconds(int reps, const std::function<void()>& f) {
  std::vector<double> t;
  for (int r = 0; r < reps; ++r) {
    const auto start = std::chrono::steady_clock::now();
    f();
    t.push_back(std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count());
  }
  std::sort(t.begin(), t.end());
  return t[t.size() / 2];
}

void report(const char* name, double serial, double parallel, bool identical) {
  std::printf("%-18s %12.3f %12.3f %8.2fx  %s\n", name, serial * 1e3, parallel * 1e3, serial / parallel,
              identical ? "identical" : "MISMATCH");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Serial vs OpenMP kernel timings"};
  int threads = 0, reps = 5;
  std::size_t N = 2000, T = 100;
  int k = 10, s = 8, restarts = 16, points = 1500;
  app.add_option("--threads", threads, "OpenMP threads (0 = runtime default)");
  app.add_option("--reps", reps, "Repetitions per timing (median reported)");
  app.add_option("-N", N, "Trajectories");
  app.add_option("-T", T, "Transitions per trajectory");
  app.add_option("--k", k, "Components");
  app.add_option("--s", s, "States");
  app.add_option("--restarts", restarts, "Restarts for the multistart benchmark");
  app.add_option("--points", points, "Points for the kernel matrix benchmark");
  CLI11_PARSE(app, argc, argv);
  if (threads > 0) omp_set_num_threads(threads);

  std::printf("threads=%d N=%zu T=%zu k=%d s=%d\n", omp_get_max_threads(), N, T, k, s);
  std::printf("%-18s %12s %12s %9s\n", "kernel", "serial ms", "openmp ms", "speedup");

  const MixtureParams p = random_params(k, s, 1);
  SampledMixture a, b;
  const double ts = median_seconds(reps, [&] { b = sample_mixture_serial(p, N, T, 2); });
  const double tp = median_seconds(reps, [&] { a = sample_mixture(p, N, T, 2); });
  report("sample_mixture", ts, tp, a.data.trajectories() == b.data.trajectories() && a.labels == b.labels);

  const SufficientStats st(a.data);
  const LogParams lp = LogParams::from(p);
  EStepResult es, ep;
  const double e_s = median_seconds(reps, [&] { es = e_step_serial(st, lp); });
  const double e_p = median_seconds(reps, [&] { ep = e_step(st, lp); });
  report("e_step", e_s, e_p, es.gamma == ep.gamma && es.log_C == ep.log_C && es.total == ep.total);

  WeightedCounts cs, cp;
  const double c_s = median_seconds(reps, [&] { cs = accumulate_counts_serial(st, es.gamma); });
  const double c_p = median_seconds(reps, [&] { cp = accumulate_counts(st, es.gamma); });
  bool same = cs.component == cp.component && cs.initial == cp.initial;
  for (int i = 0; i < k; ++i) same = same && cs.transitions[i] == cp.transitions[i];
  report("accumulate_counts", c_s, c_p, same);

  const SufficientStats small = st.select([&] {
    std::vector<std::size_t> idx(std::min<std::size_t>(N, 200));
    for (std::size_t n = 0; n < idx.size(); ++n) idx[n] = n;
    return idx;
  }());
  MultistartConfig cfg;
  cfg.restarts = restarts;
  cfg.k = k;
  MultistartReport ms, mp;
  const double m_s = median_seconds(std::max(1, reps / 2), [&] { ms = multistart_fit_serial(small, cfg, 3); });
  const double m_p = median_seconds(std::max(1, reps / 2), [&] { mp = multistart_fit(small, cfg, 3); });
  report("multistart_fit", m_s, m_p, ms.all_objectives == mp.all_objectives && ms.best.labels == mp.best.labels);

  Rng rng(4);
  PointSet x(points, 2);
  for (int i = 0; i < points; ++i) x.row(i) << 50 * rng.normal(), 50 * rng.normal();
  KernelSpec kernel;
  kernel.sigma = 50.0;
  Eigen::MatrixXd ks, kp;
  const double k_s = median_seconds(reps, [&] { ks = kernel_matrix_serial(kernel, x, x); });
  const double k_p = median_seconds(reps, [&] { kp = kernel_matrix(kernel, x, x); });
  report("kernel_matrix", k_s, k_p, ks == kp);
  return 0;
}
