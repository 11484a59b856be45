#include "doctest.h"

#include <cmath>
#include <limits>

#include "mcmix/theory.hpp"
#include "oracles.hpp"

using namespace mcmix;

namespace {

MixtureParams with_stationary_start(MixtureParams p) {
  for (int i = 0; i < p.k(); ++i) p.nu.row(i) = stationary_distribution(p.P[i]).transpose();
  return p;
}

MixtureParams duplicate_pair(std::uint64_t seed) {
  MixtureParams p = random_params(1, 3, seed);
  MixtureParams d;
  d.mu = Eigen::Vector2d(0.5, 0.5);
  d.nu.resize(2, 3);
  d.nu.row(0) = p.nu.row(0);
  d.nu.row(1) = p.nu.row(0);
  d.P = {p.P[0], p.P[0]};
  return d;
}

}  // namespace

TEST_CASE("kl of a component with itself is zero") {
  const MixtureParams p = random_params(3, 3, 1);
  for (int i = 0; i < 3; ++i)
    for (std::size_t T : {0, 1, 7, 100}) CHECK(kl_trajectory(p, i, i, T) == 0.0);
}

TEST_CASE("kl matches trajectory enumeration") {
  Rng rng(2);
  for (int rep = 0; rep < 30; ++rep) {
    const int s = 2 + rep % 2;
    const MixtureParams p = oracle::random_positive_params(2, s, rng, 0.01);
    for (std::size_t T = 0; T <= 6; ++T) {
      CHECK(std::abs(kl_trajectory(p, 0, 1, T) - oracle::kl_enumerated(p, 0, 1, T)) < 1e-10);
      CHECK(std::abs(kl_trajectory(p, 1, 0, T) - oracle::kl_enumerated(p, 1, 0, T)) < 1e-10);
    }
  }
}

TEST_CASE("kl is infinite on a support violation") {
  MixtureParams p;
  p.mu = Eigen::Vector2d(0.5, 0.5);
  p.nu = Eigen::MatrixXd::Constant(2, 2, 0.5);
  p.P = {Eigen::MatrixXd::Constant(2, 2, 0.5), Eigen::MatrixXd::Identity(2, 2)};
  CHECK(std::isinf(kl_trajectory(p, 0, 1, 1)));
  CHECK(std::isfinite(kl_trajectory(p, 1, 0, 5)));
  CHECK(kl_trajectory(p, 0, 1, 0) == 0.0);
}

TEST_CASE("stationary start gives constant kl increments equal to the rate") {
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const MixtureParams p = with_stationary_start(random_params(2, 3, seed));
    const double rate = kl_rate(p, 0, 1);
    const double k0 = kl_trajectory(p, 0, 1, 0);
    for (std::size_t T = 1; T <= 20; ++T) {
      const double inc = kl_trajectory(p, 0, 1, T) - kl_trajectory(p, 0, 1, T - 1);
      CHECK(inc == doctest::Approx(rate).epsilon(1e-9));
    }
    for (std::size_t T : {3, 10, 50}) {
      const double d1 = kl_trajectory(p, 0, 1, T) - k0;
      const double d2 = kl_trajectory(p, 0, 1, 2 * T) - k0;
      CHECK(d2 == doctest::Approx(2.0 * d1).epsilon(1e-9));
    }
  }
}

TEST_CASE("kl per step approaches the rate") {
  Rng rng(4);
  for (int rep = 0; rep < 20; ++rep) {
    const MixtureParams p = oracle::random_positive_params(2, 3, rng, 0.01);
    const double rate = kl_rate(p, 0, 1);
    const double per_step = kl_trajectory(p, 0, 1, 1000) / 1000.0;
    CHECK(std::abs(per_step - rate) / rate < 0.01);
  }
}

TEST_CASE("kl is nondecreasing in T and the rate is nonnegative") {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const MixtureParams p = random_params(3, 4, seed);
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j) {
        double prev = 0.0;
        for (std::size_t T = 0; T <= 30; ++T) {
          const double k = kl_trajectory(p, i, j, T);
          CHECK(k >= prev - 1e-12);
          prev = k;
        }
        CHECK(kl_rate(p, i, j) >= -1e-15);
      }
  }
}

TEST_CASE("kl rate is zero iff the rows agree on the support") {
  MixtureParams p = random_params(2, 3, 3);
  // Chain 0 never leaves {0, 1}; rows of state 2 are irrelevant to its rate.
  p.P[0] << 0.3, 0.7, 0.0, 0.6, 0.4, 0.0, 0.2, 0.2, 0.6;
  p.P[1] = p.P[0];
  p.P[1].row(2) << 0.9, 0.05, 0.05;
  CHECK(kl_rate(p, 0, 1) == doctest::Approx(0.0));
  p.P[1].row(0) << 0.4, 0.6, 0.0;
  CHECK(kl_rate(p, 0, 1) > 0.0);
}

TEST_CASE("stationary distribution") {
  Eigen::Matrix2d P;
  P << 0.9, 0.1, 0.5, 0.5;
  const Eigen::VectorXd pi = stationary_distribution(P);
  CHECK(pi(0) == doctest::Approx(5.0 / 6.0).epsilon(1e-12));
  CHECK(((pi.transpose() * P).transpose() - pi).cwiseAbs().sum() < 1e-12);

  Eigen::Matrix2d flip;
  flip << 0, 1, 1, 0;
  const Eigen::VectorXd half = stationary_distribution(flip);
  CHECK(half(0) == doctest::Approx(0.5));

  CHECK_THROWS_AS(stationary_distribution(Eigen::Matrix2d::Identity()), ConvergenceError);

  MixtureParams p = random_params(2, 2, 1);
  p.P[1] = Eigen::Matrix2d::Identity();
  try {
    kl_rate(p, 1, 0);
    FAIL("expected ConvergenceError");
  } catch (const ConvergenceError& e) {
    CHECK(std::string(e.what()).find("component 1") != std::string::npos);
  }
}

TEST_CASE("duplicate components give a bound of one quarter") {
  const MixtureParams p = duplicate_pair(5);
  for (std::size_t T : {0, 1, 10, 100}) CHECK(std::abs(thm1_bound(p, T) - 0.25) < 1e-12);
  const KlReport rep = kl_report(p, 10);
  CHECK(rep.pairwise.isZero());
  CHECK(std::abs(rep.bound - 0.25) < 1e-12);
}

TEST_CASE("bound is nonincreasing in T and lies in [0, 1]") {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const MixtureParams p = random_params(3, 3, seed + 40);
    double prev = 1.0;
    for (std::size_t T = 0; T <= 40; T += 2) {
      const double b = thm1_bound(p, T);
      CHECK(b >= 0.0);
      CHECK(b <= prev + 1e-15);
      prev = b;
    }
  }
}

TEST_CASE("zero-weight components and infinite kl contribute nothing") {
  MixtureParams p;
  p.mu = Eigen::Vector2d(1.0, 0.0);
  p.nu = Eigen::MatrixXd::Constant(2, 2, 0.5);
  p.P = {Eigen::MatrixXd::Constant(2, 2, 0.5), Eigen::MatrixXd::Constant(2, 2, 0.5)};
  CHECK(thm1_bound(p, 5) == 0.0);
  p.mu << 0.5, 0.5;
  p.nu << 1, 0, 0, 1;
  CHECK(thm1_bound(p, 5) == 0.0);
}

TEST_CASE("kl report shape") {
  const MixtureParams p = random_params(3, 3, 8);
  const KlReport rep = kl_report(p, 12);
  CHECK(rep.horizon == 12);
  for (int i = 0; i < 3; ++i) {
    CHECK(rep.pairwise(i, i) == 0.0);
    CHECK(rep.rates(i, i) == 0.0);
  }
  CHECK(rep.pairwise.minCoeff() >= 0.0);
  CHECK(rep.bound == doctest::Approx(thm1_bound(p, 12)));
  CHECK(rep.rate_errors.empty());
}

TEST_CASE("bayes classifier") {
  const MixtureParams one = random_params(1, 3, 1);
  const SampledMixture smp1 = sample_mixture(one, 20, 5, 2);
  const BayesClassification c1 = bayes_classify(one, smp1.data);
  for (std::size_t n = 0; n < 20; ++n) {
    CHECK(c1.labels[n] == 0);
    CHECK(c1.posterior(n, 0) == 1.0);
  }

  MixtureParams ex;
  ex.mu = Eigen::Vector2d(0.5, 0.5);
  ex.nu = Eigen::MatrixXd::Constant(2, 2, 0.5);
  ex.P = {Eigen::MatrixXd::Identity(2, 2), Eigen::MatrixXd::Constant(2, 2, 0.5)};
  const BayesClassification c2 = bayes_classify(ex, TrajectoryDataset({{0, 1, 1}}, 2));
  CHECK(c2.posterior(0, 0) == 0.0);
  CHECK(c2.posterior(0, 1) == 1.0);
  CHECK(c2.labels[0] == 1);

  ex.P[1] = Eigen::MatrixXd::Identity(2, 2);
  try {
    bayes_classify(ex, TrajectoryDataset({{0, 0}, {0, 1}}, 2));
    FAIL("expected ValidationError");
  } catch (const ValidationError& e) {
    CHECK(std::string(e.what()).find("1") != std::string::npos);
  }
}

TEST_CASE("bayes posterior matches hand-summed products") {
  Rng rng(6);
  for (int rep = 0; rep < 10; ++rep) {
    const MixtureParams p = oracle::random_positive_params(2, 2, rng);
    std::vector<Trajectory> all;
    oracle::enumerate_trajectories(2, 3, [&](const std::vector<int>& y) { all.push_back(y); });
    const TrajectoryDataset d(all, 2);
    const BayesClassification c = bayes_classify(p, d);
    for (std::size_t n = 0; n < all.size(); ++n) {
      const Eigen::VectorXd ref = oracle::posterior_by_products(p, all[n]);
      CHECK((c.posterior.row(n).transpose() - ref).cwiseAbs().maxCoeff() < 1e-12);
      CHECK(std::abs(c.posterior.row(n).sum() - 1.0) < 1e-12);
    }
  }
}

TEST_CASE("bound does not exceed the Bayes error") {
  for (std::uint64_t seed = 0; seed < 6; ++seed) {
    const MixtureParams p = random_params(2 + seed % 2, 3, seed + 90);
    for (std::size_t T : {1, 5}) {
      const BayesErrorEstimate est = bayes_error_monte_carlo(p, T, 20000, seed);
      CHECK(est.samples == 20000);
      CHECK(thm1_bound(p, T) <= est.error + 3.0 * est.std_error);
    }
  }
  const BayesErrorEstimate dup = bayes_error_monte_carlo(duplicate_pair(3), 10, 20000, 1);
  CHECK(std::abs(dup.error - 0.5) < 4.0 * dup.std_error + 1e-3);
}
