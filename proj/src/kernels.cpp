#include "mcmix/kernels.hpp"

#include <cmath>
#include <limits>

namespace mcmix {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

double safe_log(double p) { return p > 0.0 ? std::log(p) : kNegInf; }

// Writes row n of gamma and returns log C_n; returns NaN if the row is
// impossible under every component.
double update_row(const SufficientStats& stats, const LogParams& lp, std::size_t n, Eigen::MatrixXd& gamma,
                  double* scratch) {
  const int k = lp.k();
  const int y0 = stats.initial_state(n);
  const auto tr = stats.transitions(n);
  double best = kNegInf;
  for (int i = 0; i < k; ++i) {
    double w = lp.log_mu(i) + lp.log_nu(i, y0);
    if (w != kNegInf) {
      for (const auto& e : tr) w += e.count * lp.log_p(i, e.from, e.to);
    }
    scratch[i] = w;
    if (w > best) best = w;
  }
  if (best == kNegInf || std::isnan(best)) return std::numeric_limits<double>::quiet_NaN();
  double sum = 0.0;
  for (int i = 0; i < k; ++i) {
    scratch[i] = std::exp(scratch[i] - best);
    sum += scratch[i];
  }
  for (int i = 0; i < k; ++i) gamma(static_cast<Eigen::Index>(n), i) = scratch[i] / sum;
  return best + std::log(sum);
}

void accumulate_component(const SufficientStats& stats, const Eigen::MatrixXd& gamma, int i, WeightedCounts& out) {
  double total = 0.0;
  auto initial = out.initial.row(i);
  Eigen::MatrixXd& trans = out.transitions[i];
  for (std::size_t n = 0; n < stats.size(); ++n) {
    const double g = gamma(static_cast<Eigen::Index>(n), i);
    total += g;
    if (g == 0.0) continue;
    initial(stats.initial_state(n)) += g;
    for (const auto& e : stats.transitions(n)) trans(e.from, e.to) += g * e.count;
  }
  out.component(i) = total;
}

WeightedCounts empty_counts(int k, int s) {
  WeightedCounts out;
  out.component = Eigen::VectorXd::Zero(k);
  out.initial = Eigen::MatrixXd::Zero(k, s);
  out.transitions.assign(k, Eigen::MatrixXd::Zero(s, s));
  return out;
}

EStepResult finish(EStepResult r, const SufficientStats& stats, int iteration, std::ptrdiff_t failed) {
  if (failed >= 0)
    throw NumericalFailure("trajectory " + std::to_string(failed) + " has zero probability under every component",
                           iteration);
  double total = 0.0;
  for (std::size_t n = 0; n < stats.size(); ++n) total += r.log_C(static_cast<Eigen::Index>(n));
  r.total = total;
  return r;
}

}  // namespace

LogParams LogParams::from(const MixtureParams& params) {
  const int k = params.k();
  const int s = params.s();
  LogParams lp;
  lp.log_mu = params.mu.unaryExpr(&safe_log);
  lp.log_nu = params.nu.unaryExpr(&safe_log);
  lp.log_P.resize(static_cast<std::size_t>(k) * s * s);
  for (int i = 0; i < k; ++i)
    for (int a = 0; a < s; ++a)
      for (int b = 0; b < s; ++b) lp.log_P[(static_cast<std::size_t>(i) * s + a) * s + b] = safe_log(params.P[i](a, b));
  return lp;
}

EStepResult e_step(const SufficientStats& stats, const LogParams& lp, int iteration) {
  const int k = lp.k();
  const auto N = static_cast<std::ptrdiff_t>(stats.size());
  EStepResult r;
  r.gamma.resize(N, k);
  r.log_C.resize(N);
  std::ptrdiff_t failed = -1;

#pragma omp parallel
  {
    std::vector<double> scratch(static_cast<std::size_t>(k));
#pragma omp for schedule(static)
    for (std::ptrdiff_t n = 0; n < N; ++n) {
      const double lc = update_row(stats, lp, static_cast<std::size_t>(n), r.gamma, scratch.data());
      r.log_C(n) = lc;
      if (std::isnan(lc)) {
#pragma omp critical(mcmix_estep_failure)
        if (failed < 0 || n < failed) failed = n;
      }
    }
  }
  return finish(std::move(r), stats, iteration, failed);
}

EStepResult e_step_serial(const SufficientStats& stats, const LogParams& lp, int iteration) {
  const int k = lp.k();
  const auto N = static_cast<std::ptrdiff_t>(stats.size());
  EStepResult r;
  r.gamma.resize(N, k);
  r.log_C.resize(N);
  std::vector<double> scratch(static_cast<std::size_t>(k));
  for (std::ptrdiff_t n = 0; n < N; ++n) {
    r.log_C(n) = update_row(stats, lp, static_cast<std::size_t>(n), r.gamma, scratch.data());
    if (std::isnan(r.log_C(n))) return finish(std::move(r), stats, iteration, n);
  }
  return finish(std::move(r), stats, iteration, -1);
}

WeightedCounts accumulate_counts(const SufficientStats& stats, const Eigen::MatrixXd& gamma) {
  const int k = static_cast<int>(gamma.cols());
  WeightedCounts out = empty_counts(k, stats.num_states());
#pragma omp parallel for schedule(dynamic)
  for (int i = 0; i < k; ++i) accumulate_component(stats, gamma, i, out);
  return out;
}

WeightedCounts accumulate_counts_serial(const SufficientStats& stats, const Eigen::MatrixXd& gamma) {
  const int k = static_cast<int>(gamma.cols());
  WeightedCounts out = empty_counts(k, stats.num_states());
  for (int i = 0; i < k; ++i) accumulate_component(stats, gamma, i, out);
  return out;
}

}  // namespace mcmix
