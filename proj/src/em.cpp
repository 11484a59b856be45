#include "mcmix/em.hpp"

#include <cmath>

#include "mcmix/kernels.hpp"

namespace mcmix {

namespace {

template <typename Row>
void normalize_or_uniform(Row&& row) {
  const double total = row.sum();
  if (total > 0.0)
    row /= total;
  else
    row.setConstant(1.0 / static_cast<double>(row.size()));
}

void check_init(const SufficientStats& stats, const Responsibilities& init) {
  if (init.k() < 1) throw ValidationError("need at least one component");
  if (init.size() != stats.size()) throw ValidationError("initial responsibilities must have one row per trajectory");
  init.validate(1e-9);
}

}  // namespace

double convergence_threshold(const SufficientStats& stats, double tol_scale) {
  return tol_scale * static_cast<double>(stats.size()) * stats.mean_transitions();
}

MixtureParams em_m_step(const SufficientStats& stats, const Eigen::MatrixXd& gamma) {
  const WeightedCounts counts = accumulate_counts(stats, gamma);
  const int k = static_cast<int>(gamma.cols());
  const int s = stats.num_states();
  MixtureParams p;
  p.mu = counts.component;
  normalize_or_uniform(p.mu);
  p.nu = counts.initial;
  p.P = counts.transitions;
  for (int i = 0; i < k; ++i) {
    normalize_or_uniform(p.nu.row(i));
    for (int a = 0; a < s; ++a) normalize_or_uniform(p.P[i].row(a));
  }
  return p;
}

FitResult em_fit(const SufficientStats& stats, const Responsibilities& init, const EmConfig& config) {
  check_init(stats, init);
  if (config.max_iters < 1) throw ValidationError("max_iters must be at least 1");
  const double threshold = convergence_threshold(stats, config.tol_scale);

  FitResult result;
  Eigen::MatrixXd gamma = init.gamma;
  for (int iter = 1; iter <= config.max_iters; ++iter) {
    MixtureParams params = em_m_step(stats, gamma);
    EStepResult e = e_step(stats, LogParams::from(params), iter);
    if (!std::isfinite(e.total)) throw NumericalFailure("log-likelihood is not finite", iter);

    result.params = std::move(params);
    gamma = std::move(e.gamma);
    result.objective_trace.push_back(e.total);
    result.iterations = iter;
    if (iter > 1) {
      const double delta = e.total - result.objective_trace[result.objective_trace.size() - 2];
      if (std::abs(delta) < threshold || delta == 0.0) {
        result.converged = true;
        break;
      }
    }
  }
  result.responsibilities.gamma = std::move(gamma);
  result.labels = argmax_labels(result.responsibilities.gamma);
  result.surviving_components = count_labelled_components(result.labels, init.k());
  return result;
}

}  // namespace mcmix
