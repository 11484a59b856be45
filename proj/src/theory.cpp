#include "mcmix/theory.hpp"

#include <cmath>
#include <limits>

#include "mcmix/kernels.hpp"

namespace mcmix {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// p log(p / q) with 0 log 0 = 0 and p > 0 = q giving +inf.
double kl_term(double p, double q) {
  if (p <= 0.0) return 0.0;
  if (q <= 0.0) return kInf;
  return p * std::log(p / q);
}

Eigen::VectorXd row_divergences(const Eigen::MatrixXd& Pi, const Eigen::MatrixXd& Pj) {
  const auto s = Pi.rows();
  Eigen::VectorXd r = Eigen::VectorXd::Zero(s);
  for (Eigen::Index a = 0; a < s; ++a)
    for (Eigen::Index b = 0; b < s; ++b) r(a) += kl_term(Pi(a, b), Pj(a, b));
  return r;
}

void check_components(const MixtureParams& params, int i, int j) {
  if (i < 0 || j < 0 || i >= params.k() || j >= params.k()) throw ValidationError("component index out of range");
}

// Number of closed communicating classes of the transition graph.
int closed_classes(const Eigen::MatrixXd& P) {
  const int s = static_cast<int>(P.rows());
  std::vector<char> reach(static_cast<std::size_t>(s) * s, 0);
  for (int a = 0; a < s; ++a) {
    reach[a * s + a] = 1;
    for (int b = 0; b < s; ++b)
      if (P(a, b) > 0.0) reach[a * s + b] = 1;
  }
  for (int m = 0; m < s; ++m)
    for (int a = 0; a < s; ++a)
      if (reach[a * s + m])
        for (int b = 0; b < s; ++b)
          if (reach[m * s + b]) reach[a * s + b] = 1;

  int classes = 0;
  std::vector<char> assigned(s, 0);
  for (int a = 0; a < s; ++a) {
    if (assigned[a]) continue;
    bool closed = true;
    for (int b = 0; b < s; ++b)
      if (reach[a * s + b] && !reach[b * s + a]) closed = false;
    if (!closed) continue;
    ++classes;
    for (int b = 0; b < s; ++b)
      if (reach[a * s + b]) assigned[b] = 1;
  }
  return classes;
}

}  // namespace

double kl_trajectory(const MixtureParams& params, int i, int j, std::size_t T) {
  check_components(params, i, j);
  if (i == j) return 0.0;
  const int s = params.s();
  double kl = 0.0;
  for (int a = 0; a < s; ++a) kl += kl_term(params.nu(i, a), params.nu(j, a));
  if (std::isinf(kl)) return kInf;

  const Eigen::VectorXd r = row_divergences(params.P[i], params.P[j]);
  Eigen::RowVectorXd m = params.nu.row(i);
  for (std::size_t t = 0; t < T; ++t) {
    for (int a = 0; a < s; ++a) {
      if (m(a) <= 0.0) continue;
      if (std::isinf(r(a))) return kInf;
      kl += m(a) * r(a);
    }
    m = m * params.P[i];
  }
  return kl;
}

Eigen::VectorXd stationary_distribution(const Eigen::MatrixXd& P, double tol, long max_iters) {
  const auto s = P.rows();
  if (closed_classes(P) != 1) throw ConvergenceError("stationary measure is not unique (chain is reducible)");
  const Eigen::MatrixXd lazy = 0.5 * (P + Eigen::MatrixXd::Identity(s, s));
  Eigen::RowVectorXd pi = Eigen::RowVectorXd::Constant(s, 1.0 / static_cast<double>(s));
  for (long iter = 0; iter < max_iters; ++iter) {
    const Eigen::RowVectorXd stepped = pi * P;
    if ((stepped - pi).lpNorm<1>() < tol) return pi.transpose();
    pi = pi * lazy;
    pi /= pi.sum();
  }
  throw ConvergenceError("power iteration for the stationary measure did not converge");
}

double kl_rate(const MixtureParams& params, int i, int j) {
  check_components(params, i, j);
  Eigen::VectorXd pi;
  try {
    pi = stationary_distribution(params.P[i]);
  } catch (const ConvergenceError& e) {
    throw ConvergenceError("component " + std::to_string(i) + ": " + e.what());
  }
  if (i == j) return 0.0;
  const Eigen::VectorXd r = row_divergences(params.P[i], params.P[j]);
  double rate = 0.0;
  for (Eigen::Index a = 0; a < r.size(); ++a) {
    if (pi(a) <= 0.0) continue;
    if (std::isinf(r(a))) return kInf;
    rate += pi(a) * r(a);
  }
  return rate;
}

double thm1_bound(const MixtureParams& params, std::size_t T) {
  params.validate(1e-9);
  const int k = params.k();
  double bound = 0.0;
  for (int i = 0; i < k; ++i) {
    if (params.mu(i) <= 0.0) continue;
    double best = 0.0;
    for (int j = 0; j < k; ++j) {
      if (j == i || params.mu(j) <= 0.0) continue;
      const double kl = kl_trajectory(params, i, j, T);
      if (std::isinf(kl)) continue;
      best = std::max(best, std::exp(-kl) / (1.0 / params.mu(i) + 1.0 / params.mu(j)));
    }
    bound += best;
  }
  return 0.5 * bound;
}

KlReport kl_report(const MixtureParams& params, std::size_t T) {
  params.validate(1e-9);
  const int k = params.k();
  KlReport rep;
  rep.horizon = T;
  rep.pairwise.resize(k, k);
  rep.rates.resize(k, k);
  for (int i = 0; i < k; ++i) {
    for (int j = 0; j < k; ++j) rep.pairwise(i, j) = kl_trajectory(params, i, j, T);
    try {
      for (int j = 0; j < k; ++j) rep.rates(i, j) = kl_rate(params, i, j);
    } catch (const ConvergenceError& e) {
      rep.rates.row(i).setConstant(std::numeric_limits<double>::quiet_NaN());
      rep.rate_errors.emplace_back(e.what());
    }
  }
  rep.bound = thm1_bound(params, T);
  return rep;
}

BayesClassification bayes_classify(const MixtureParams& params, const TrajectoryDataset& data) {
  params.validate(1e-9);
  if (data.num_states() != params.s()) throw ValidationError("dataset and model disagree on the state count");
  const SufficientStats stats(data);
  try {
    EStepResult e = e_step(stats, LogParams::from(params));
    BayesClassification out;
    out.labels = argmax_labels(e.gamma);
    out.posterior = std::move(e.gamma);
    return out;
  } catch (const NumericalFailure& e) {
    throw ValidationError(std::string("bayes_classify: ") + e.what());
  }
}

BayesErrorEstimate bayes_error_monte_carlo(const MixtureParams& params, std::size_t T, std::size_t samples,
                                           std::uint64_t seed) {
  if (samples == 0) throw ValidationError("Monte Carlo needs at least one sample");
  const SampledMixture draw = sample_mixture(params, samples, T, seed);
  const BayesClassification c = bayes_classify(params, draw.data);
  std::size_t wrong = 0;
  for (std::size_t n = 0; n < samples; ++n)
    if (c.labels[n] != draw.labels[n]) ++wrong;
  BayesErrorEstimate est;
  est.samples = samples;
  est.error = static_cast<double>(wrong) / static_cast<double>(samples);
  est.std_error = std::sqrt(est.error * (1.0 - est.error) / static_cast<double>(samples));
  return est;
}

}  // namespace mcmix
