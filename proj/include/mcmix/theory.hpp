#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "mcmix/model.hpp"

namespace mcmix {

/// D_KL(P_i || P_j) between the laws of (Y_0, ..., Y_T) under components i
/// and j, by propagating the marginal m_t of chain i:
///
///   KL = sum_a nu_i(a) log(nu_i(a)/nu_j(a))
///      + sum_{t<T} sum_a m_t(a) sum_b P_i(a,b) log(P_i(a,b)/P_j(a,b)),
///
/// with m_0 = nu_i and m_{t+1} = m_t P_i. Cost O(T s^2).
/// Returns +infinity when P_i puts mass on a trajectory P_j cannot produce.
double kl_trajectory(const MixtureParams& params, int i, int j, std::size_t T);

/// Stationary distribution of a row-stochastic matrix.
///
/// Requires a single closed communicating class, so the stationary measure
/// is unique; periodic chains are fine. Runs power iteration on the lazy
/// chain (P + I)/2 from the uniform vector until ||pi P - pi||_1 < tol.
/// Throws ConvergenceError if the measure is not unique or the iteration
/// cap is hit.
Eigen::VectorXd stationary_distribution(const Eigen::MatrixXd& P, double tol = 1e-12, long max_iters = 1'000'000);

/// Asymptotic per-step rate sum_a pi_i(a) D_KL(P_i(a,.) || P_j(a,.)).
/// Throws ConvergenceError naming component i if pi_i is not computable.
double kl_rate(const MixtureParams& params, int i, int j);

/// Lower bound on the misclassification probability of any label estimator:
///
///   (1/2) sum_i max_{j != i} exp(-KL_T(i || j)) / (1/mu(i) + 1/mu(j)).
///
/// Infinite KL and zero-weight components contribute zero.
double thm1_bound(const MixtureParams& params, std::size_t T);

struct KlReport {
  std::size_t horizon = 0;
  Eigen::MatrixXd pairwise;  ///< KL_T(i || j)
  Eigen::MatrixXd rates;     ///< asymptotic rates; NaN where pi_i is not unique
  double bound = 0.0;
  std::vector<std::string> rate_errors;
};

KlReport kl_report(const MixtureParams& params, std::size_t T);

struct BayesClassification {
  std::vector<int> labels;
  Eigen::MatrixXd posterior;  ///< N x k, P{Z = i | Y^n}
};

/// Bayes-optimal labels: P{Z = i | Y} proportional to mu(i) P_i(Y), computed
/// in log space; argmax with ties to the lowest index. Throws
/// ValidationError naming the first trajectory that every component rules out.
BayesClassification bayes_classify(const MixtureParams& params, const TrajectoryDataset& data);

struct BayesErrorEstimate {
  double error = 0.0;
  double std_error = 0.0;
  std::size_t samples = 0;
};

/// Monte Carlo misclassification rate of the Bayes classifier on `samples`
/// trajectories of T transitions drawn from `params`.
BayesErrorEstimate bayes_error_monte_carlo(const MixtureParams& params, std::size_t T, std::size_t samples,
                                           std::uint64_t seed);

}  // namespace mcmix
