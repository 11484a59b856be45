#pragma once

// Data-parallel inner loops shared by EM, VEM and the Bayes classifier.
//
// Each kernel has an OpenMP version and a `_serial` reference. The two are
// bitwise identical: parallel loops only split work across independent
// output cells, and every floating-point reduction runs in a fixed order.

#include <vector>

#include <Eigen/Dense>

#include "mcmix/model.hpp"

namespace mcmix {

/// Log-space component parameters: log mu(i), log nu_i(alpha), log P_i(alpha, beta).
/// Entries may be -infinity.
struct LogParams {
  Eigen::VectorXd log_mu;     ///< k
  Eigen::MatrixXd log_nu;     ///< k x s
  std::vector<double> log_P;  ///< k*s*s, index (i*s + alpha)*s + beta

  int k() const { return static_cast<int>(log_mu.size()); }
  int s() const { return static_cast<int>(log_nu.cols()); }
  double log_p(int i, int a, int b) const { return log_P[(static_cast<std::size_t>(i) * s() + a) * s() + b]; }

  static LogParams from(const MixtureParams& params);
};

struct EStepResult {
  Eigen::MatrixXd gamma;  ///< N x k
  Eigen::VectorXd log_C;  ///< N, log of each row's normalizer
  double total = 0.0;     ///< sum of log_C in trajectory order
};

/// Responsibility update: gamma[n][i] proportional to
/// mu(i) nu_i(Y_0) prod P_i(alpha, beta)^V(alpha, beta), computed with a max
/// shift in log space. Throws NumericalFailure (with `iteration`) if some
/// trajectory has log-probability -infinity under every component.
EStepResult e_step(const SufficientStats& stats, const LogParams& lp, int iteration = 0);
EStepResult e_step_serial(const SufficientStats& stats, const LogParams& lp, int iteration = 0);

/// Per-component responsibility-weighted counts:
/// component(i) = sum_n gamma[n][i], initial(i, alpha) = sum_n gamma[n][i] U^n(alpha),
/// transitions[i](alpha, beta) = sum_n gamma[n][i] V^n(alpha, beta).
struct WeightedCounts {
  Eigen::VectorXd component;
  Eigen::MatrixXd initial;
  std::vector<Eigen::MatrixXd> transitions;
};

WeightedCounts accumulate_counts(const SufficientStats& stats, const Eigen::MatrixXd& gamma);
WeightedCounts accumulate_counts_serial(const SufficientStats& stats, const Eigen::MatrixXd& gamma);

}  // namespace mcmix
