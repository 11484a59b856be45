#include "mcmix/vem.hpp"

#include <cmath>

#include "mcmix/em.hpp"
#include "mcmix/special.hpp"

namespace mcmix {

namespace {

// KL(Dir(a) || Dir(prior * 1)) given log of the geometric means of Dir(a).
template <typename A, typename LogTilde>
double dirichlet_kl(const A& a, const LogTilde& log_tilde, double prior, double log_beta_prior) {
  double cross = 0.0;
  double log_b = 0.0;
  double total = 0.0;
  for (Eigen::Index j = 0; j < a.size(); ++j) {
    if (!(a(j) > 0.0)) throw DomainError("Dirichlet parameter must be positive");
    cross += (a(j) - prior) * log_tilde(j);
    log_b += std::lgamma(a(j));
    total += a(j);
  }
  log_b -= std::lgamma(total);
  return log_beta_prior - log_b + cross;
}

}  // namespace

MixtureParams DirichletPosterior::mean() const {
  MixtureParams p;
  p.mu = dirichlet_mean(N_hat);
  p.nu.resize(k(), s());
  p.P.resize(k());
  for (int i = 0; i < k(); ++i) {
    p.nu.row(i) = dirichlet_mean(N_i_hat.row(i).transpose()).transpose();
    p.P[i].resize(s(), s());
    for (int a = 0; a < s(); ++a) p.P[i].row(a) = dirichlet_mean(N_ialpha_hat[i].row(a).transpose()).transpose();
  }
  return p;
}

int DirichletPosterior::count_above(double threshold) const {
  return static_cast<int>((N_hat.array() >= threshold).count());
}

void VemConfig::validate() const {
  if (k_max < 1) throw ValidationError("k_max must be at least 1");
  if (max_iters < 1) throw ValidationError("max_iters must be at least 1");
  if (prune_threshold < 1.0 / k_max) throw ValidationError("prune_threshold must be at least 1/k_max");
}

DirichletPosterior dirichlet_update(const SufficientStats& stats, const Eigen::MatrixXd& gamma) {
  const WeightedCounts counts = accumulate_counts(stats, gamma);
  const int k = static_cast<int>(gamma.cols());
  DirichletPosterior post;
  post.N_hat = counts.component.array() + 1.0 / k;
  post.N_i_hat = counts.initial.array() + 1.0;
  post.N_ialpha_hat.resize(k);
  for (int i = 0; i < k; ++i) post.N_ialpha_hat[i] = counts.transitions[i].array() + 1.0;
  return post;
}

LogParams geometric_means(const DirichletPosterior& post) {
  const int k = post.k();
  const int s = post.s();
  LogParams lp;
  lp.log_mu.resize(k);
  const double psi_mu = digamma(post.N_hat.sum());
  for (int i = 0; i < k; ++i) lp.log_mu(i) = digamma(post.N_hat(i)) - psi_mu;

  lp.log_nu.resize(k, s);
  lp.log_P.resize(static_cast<std::size_t>(k) * s * s);
  for (int i = 0; i < k; ++i) {
    const double psi_nu = digamma(post.N_i_hat.row(i).sum());
    for (int a = 0; a < s; ++a) lp.log_nu(i, a) = digamma(post.N_i_hat(i, a)) - psi_nu;
    const Eigen::MatrixXd& rows = post.N_ialpha_hat[i];
    for (int a = 0; a < s; ++a) {
      const double psi_row = digamma(rows.row(a).sum());
      for (int b = 0; b < s; ++b)
        lp.log_P[(static_cast<std::size_t>(i) * s + a) * s + b] = digamma(rows(a, b)) - psi_row;
    }
  }
  return lp;
}

double elbo(const SufficientStats& stats, const DirichletPosterior& post, const LogParams& tilde,
            const Eigen::VectorXd& log_C) {
  const int k = post.k();
  const int s = post.s();
  if (static_cast<std::size_t>(log_C.size()) != stats.size())
    throw ValidationError("elbo needs one normalizer per trajectory");
  if (tilde.k() != k || tilde.s() != s) throw ValidationError("elbo: tilde parameters have the wrong shape");

  double L = log_C.sum();

  const double prior_mu = 1.0 / k;
  const double log_beta_mu = k * std::lgamma(prior_mu);  // Gamma(k * 1/k) = 1
  L -= dirichlet_kl(post.N_hat, tilde.log_mu, prior_mu, log_beta_mu);

  const double log_beta_flat = -std::lgamma(static_cast<double>(s));
  for (int i = 0; i < k; ++i) {
    L -= dirichlet_kl(post.N_i_hat.row(i), tilde.log_nu.row(i), 1.0, log_beta_flat);
    for (int a = 0; a < s; ++a) {
      const Eigen::Map<const Eigen::RowVectorXd> log_row(&tilde.log_P[(static_cast<std::size_t>(i) * s + a) * s], s);
      L -= dirichlet_kl(post.N_ialpha_hat[i].row(a), log_row, 1.0, log_beta_flat);
    }
  }
  return L;
}

VemResult vem_fit(const SufficientStats& stats, const Responsibilities& init, const VemConfig& config) {
  config.validate();
  if (init.k() != config.k_max) throw ValidationError("initial responsibilities must have k_max columns");
  if (init.size() != stats.size()) throw ValidationError("initial responsibilities must have one row per trajectory");
  init.validate(1e-9);
  const double threshold = convergence_threshold(stats, config.tol_scale);

  VemResult out;
  Eigen::MatrixXd gamma = init.gamma;
  std::vector<double> trace;
  DirichletPosterior post;
  for (int iter = 1; iter <= config.max_iters; ++iter) {
    post = dirichlet_update(stats, gamma);
    const LogParams tilde = geometric_means(post);
    EStepResult e = e_step(stats, tilde, iter);
    const double L = elbo(stats, post, tilde, e.log_C);
    if (!std::isfinite(L)) throw NumericalFailure("variational lower bound is not finite", iter);

    gamma = std::move(e.gamma);
    trace.push_back(L);
    out.fit.iterations = iter;
    if (iter > 1) {
      const double delta = L - trace[trace.size() - 2];
      if (std::abs(delta) < threshold || delta == 0.0) {
        out.fit.converged = true;
        break;
      }
    }
  }

  out.fit.params = post.mean();
  out.fit.responsibilities.gamma = gamma;
  out.fit.labels = argmax_labels(gamma);
  out.fit.surviving_components = count_labelled_components(out.fit.labels, config.k_max);
  out.fit.objective_trace = trace;
  post.responsibilities.gamma = std::move(gamma);
  post.elbo_trace = std::move(trace);
  out.posterior = std::move(post);
  return out;
}

}  // namespace mcmix
