#pragma once

#include "mcmix/model.hpp"

namespace mcmix {

struct EmConfig {
  int max_iters = 1000;
  /// Stop once |delta L| < tol_scale * N * (mean transition count).
  double tol_scale = 1e-12;
};

/// Maximum-likelihood parameters from responsibility-weighted counts.
/// Rows (and nu_i) with zero total weight are set to uniform; a component
/// with zero weight gets mu(i) = 0.
MixtureParams em_m_step(const SufficientStats& stats, const Eigen::MatrixXd& gamma);

/// Classical EM for a mixture of Markov chains.
///
/// Each iteration runs the M-step on the current responsibilities, then the
/// E-step under the new parameters, and records L = sum_n log C_n. L is
/// therefore the exact log-likelihood of the parameters returned in
/// `FitResult::params`, and is nondecreasing across iterations.
///
/// The E-step is done in log space with log 0 = -inf; components that give a
/// trajectory zero probability receive zero responsibility for it.
/// Throws NumericalFailure if L becomes non-finite.
FitResult em_fit(const SufficientStats& stats, const Responsibilities& init, const EmConfig& config = {});

/// Convergence threshold tol_scale * N * mean(T_n).
double convergence_threshold(const SufficientStats& stats, double tol_scale);

}  // namespace mcmix
