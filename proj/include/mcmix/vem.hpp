#pragma once

#include <vector>

#include "mcmix/kernels.hpp"
#include "mcmix/model.hpp"

namespace mcmix {

/// Variational posterior over (mu, nu_i, P_i) under the priors
/// mu ~ Dir(1_k / k), nu_i ~ Dir(1_s), P_i(alpha, .) ~ Dir(1_s).
struct DirichletPosterior {
  Eigen::VectorXd N_hat;                      ///< k, posterior over mu
  Eigen::MatrixXd N_i_hat;                    ///< k x s, row i is the posterior over nu_i
  std::vector<Eigen::MatrixXd> N_ialpha_hat;  ///< k matrices s x s, row alpha is the posterior over P_i(alpha, .)
  Responsibilities responsibilities;
  std::vector<double> elbo_trace;

  int k() const { return static_cast<int>(N_hat.size()); }
  int s() const { return static_cast<int>(N_i_hat.cols()); }

  /// Dirichlet means of every factor.
  MixtureParams mean() const;
  /// Components with N_hat(i) >= threshold.
  int count_above(double threshold) const;
};

struct VemConfig {
  int k_max = 10;
  int max_iters = 1000;
  double tol_scale = 1e-12;
  /// Diagnostic only; survival is decided by assigned labels.
  double prune_threshold = 1.0;

  /// Throws ValidationError unless k_max >= 1, max_iters >= 1 and
  /// prune_threshold >= 1 / k_max.
  void validate() const;
};

/// Dirichlet parameters from responsibilities: prior offsets (1/k, 1, 1)
/// plus responsibility-weighted counts. Leaves `responsibilities` and
/// `elbo_trace` empty.
DirichletPosterior dirichlet_update(const SufficientStats& stats, const Eigen::MatrixXd& gamma);

/// Geometric-mean parameters exp(E[log theta]) of every Dirichlet factor,
/// in log form: psi(N(j)) - psi(sum_l N(l)).
LogParams geometric_means(const DirichletPosterior& posterior);

/// Variational lower bound for the responsibilities produced by an E-step
/// under `tilde = geometric_means(posterior)`:
///
///   L = sum_n log C_n - KL(Dir(N_hat) || Dir(1/k))
///       - sum_i KL(Dir(N_i_hat) || Dir(1)) - sum_{i,alpha} KL(Dir(N_ialpha_hat) || Dir(1)),
///
/// with KL(Dir(a) || Dir(a0)) = log B(a0) - log B(a) + sum_j (a_j - a0_j) log a~_j.
double elbo(const SufficientStats& stats, const DirichletPosterior& posterior, const LogParams& tilde,
            const Eigen::VectorXd& log_C);

struct VemResult {
  FitResult fit;
  DirichletPosterior posterior;
};

/// Variational EM with automatic pruning of unused components.
///
/// `init` must have k_max columns. The returned posterior holds the
/// Dirichlet parameters used in the final E-step together with that E-step's
/// responsibilities. `fit.params` are the Dirichlet means, and
/// `fit.surviving_components` counts components with at least one label.
/// Throws NumericalFailure if L becomes non-finite.
VemResult vem_fit(const SufficientStats& stats, const Responsibilities& init, const VemConfig& config = {});

}  // namespace mcmix
