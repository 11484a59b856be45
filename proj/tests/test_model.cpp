#include "doctest.h"

#include "mcmix/model.hpp"
#include "mcmix/rng.hpp"
#include "oracles.hpp"

using namespace mcmix;

namespace {

MixtureParams single_chain(const Eigen::MatrixXd& P, const Eigen::RowVectorXd& nu) {
  MixtureParams p;
  p.mu = Eigen::VectorXd::Ones(1);
  p.nu = nu;
  p.P = {P};
  return p;
}

}  // namespace

TEST_CASE("dataset validation") {
  CHECK_THROWS_AS(TrajectoryDataset({{0, 2}}, 2), ValidationError);
  CHECK_THROWS_AS(TrajectoryDataset({{0, -1}}, 2), ValidationError);
  CHECK_THROWS_AS(TrajectoryDataset({{}}, 2), ValidationError);
  TrajectoryDataset d({{0, 1, 1}, {1}}, 2);
  CHECK(d.size() == 2);
  CHECK(d.transitions(0) == 2);
  CHECK(d.transitions(1) == 0);
  CHECK(d.short_trajectories() == std::vector<std::size_t>{1});
  CHECK(d.mean_transitions() == doctest::Approx(1.0));
}

TEST_CASE("params validation") {
  Rng rng(3);
  MixtureParams p = oracle::random_positive_params(2, 3, rng);
  CHECK_NOTHROW(p.validate());
  MixtureParams bad = p;
  bad.P[1](0, 0) += 1e-6;
  CHECK_THROWS_AS(bad.validate(), ValidationError);
  bad = p;
  bad.mu(0) = -0.1;
  bad.mu(1) = 1.1;
  CHECK_THROWS_AS(bad.validate(), ValidationError);
  bad = p;
  bad.P.pop_back();
  CHECK_THROWS_AS(bad.validate(), ValidationError);
}

TEST_CASE("random_params lies on the simplex") {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const MixtureParams p = random_params(4, 3, seed);
    CHECK(std::abs(p.mu.sum() - 1.0) < 1e-12);
    for (int i = 0; i < 4; ++i) {
      CHECK(std::abs(p.nu.row(i).sum() - 1.0) < 1e-12);
      for (int a = 0; a < 3; ++a) CHECK(std::abs(p.P[i].row(a).sum() - 1.0) < 1e-12);
      CHECK(p.P[i].minCoeff() >= 0.0);
    }
  }
}

TEST_CASE("sample_mixture with one state") {
  const MixtureParams p = single_chain(Eigen::MatrixXd::Ones(1, 1), Eigen::RowVectorXd::Ones(1));
  const SampledMixture s = sample_mixture(p, 1, 3, 9);
  CHECK(s.data[0] == Trajectory{0, 0, 0, 0});
  CHECK(s.labels == std::vector<int>{0});
}

TEST_CASE("zero-weight component is never sampled") {
  MixtureParams p = random_params(2, 3, 4);
  p.mu << 1.0, 0.0;
  const SampledMixture s = sample_mixture(p, 500, 2, 1);
  for (int z : s.labels) CHECK(z == 0);
}

TEST_CASE("absorbing deterministic chain") {
  MixtureParams p;
  p.mu = Eigen::Vector2d(0.5, 0.5);
  p.nu.resize(2, 2);
  p.nu << 1, 0, 0.5, 0.5;
  p.P = {Eigen::MatrixXd::Identity(2, 2), Eigen::MatrixXd::Constant(2, 2, 0.5)};
  const SampledMixture s = sample_mixture(p, 200, 4, 11);
  int zeros = 0;
  for (std::size_t n = 0; n < s.data.size(); ++n)
    if (s.labels[n] == 0) {
      ++zeros;
      CHECK(s.data[n] == Trajectory{0, 0, 0, 0, 0});
    }
  CHECK(zeros > 0);
}

TEST_CASE("sample_mixture is reproducible and matches its serial twin") {
  const MixtureParams p = random_params(3, 4, 8);
  const SampledMixture a = sample_mixture(p, 300, 20, 99);
  const SampledMixture b = sample_mixture(p, 300, 20, 99);
  const SampledMixture c = sample_mixture_serial(p, 300, 20, 99);
  CHECK(a.data.trajectories() == b.data.trajectories());
  CHECK(a.labels == b.labels);
  CHECK(a.data.trajectories() == c.data.trajectories());
  CHECK(a.labels == c.labels);
  const SampledMixture prefix = sample_mixture(p, 100, 20, 99);
  for (std::size_t n = 0; n < 100; ++n) CHECK(prefix.data[n] == a.data[n]);
}

TEST_CASE("sample_mixture rejects invalid params") {
  MixtureParams p = random_params(2, 2, 1);
  p.nu(0, 0) += 1e-6;
  CHECK_THROWS_AS(sample_mixture(p, 1, 1, 0), ValidationError);
}

TEST_CASE("empirical transition frequencies converge") {
  Rng rng(12);
  for (int rep = 0; rep < 3; ++rep) {
    const int s = 3;
    Eigen::MatrixXd P(s, s);
    for (int a = 0; a < s; ++a) {
      for (int b = 0; b < s; ++b) P(a, b) = 0.05 + rng.uniform();
      P.row(a) /= P.row(a).sum();
    }
    const MixtureParams p = single_chain(P, Eigen::RowVectorXd::Constant(s, 1.0 / s));
    const SampledMixture smp = sample_mixture(p, 1, 100000, 100 + rep);
    const Eigen::MatrixXd V = SufficientStats(smp.data).V(0);
    for (int a = 0; a < s; ++a) {
      const Eigen::RowVectorXd freq = V.row(a) / V.row(a).sum();
      CHECK((freq - P.row(a)).cwiseAbs().maxCoeff() < 0.02);
    }
  }
}

TEST_CASE("sufficient statistics by hand") {
  const TrajectoryDataset d({{0, 0, 1}, {1}, {0, 1, 0, 1}}, 2);
  const SufficientStats st(d);
  CHECK(st.U(0) == Eigen::Vector2d(1, 0));
  Eigen::Matrix2d v0;
  v0 << 1, 1, 0, 0;
  CHECK(st.V(0) == Eigen::MatrixXd(v0));
  CHECK(st.U(1) == Eigen::Vector2d(0, 1));
  CHECK(st.V(1).isZero());
  Eigen::Matrix2d v2;
  v2 << 0, 2, 1, 0;
  CHECK(st.V(2) == Eigen::MatrixXd(v2));
}

TEST_CASE("sufficient statistics invariants and concatenation") {
  const MixtureParams p = random_params(2, 4, 21);
  const SampledMixture a = sample_mixture(p, 30, 7, 1);
  const SampledMixture b = sample_mixture(p, 20, 3, 2);
  TrajectoryDataset joined = a.data;
  joined.append(b.data);
  const SufficientStats sa(a.data), sb(b.data), sj(joined);
  REQUIRE(sj.size() == 50);
  for (std::size_t n = 0; n < sj.size(); ++n) {
    const SufficientStats& part = n < 30 ? sa : sb;
    const std::size_t m = n < 30 ? n : n - 30;
    CHECK(sj.U(n) == part.U(m));
    CHECK(sj.V(n) == part.V(m));
    CHECK(sj.U(n).sum() == 1.0);
    CHECK(sj.V(n).sum() == static_cast<double>(joined.transitions(n)));
  }
}

TEST_CASE("dirichlet mean and variance") {
  CHECK(dirichlet_mean(Eigen::Vector2d(1, 1)).isApprox(Eigen::Vector2d(0.5, 0.5)));
  CHECK(dirichlet_mean(Eigen::Vector2d(3, 1)).isApprox(Eigen::Vector2d(0.75, 0.25)));
  Eigen::Vector4d c(0.1, 0.1, 0.1, 0.7);
  CHECK(dirichlet_mean(c).isApprox(c));
  CHECK_THROWS_AS(dirichlet_mean(Eigen::Vector2d(0, 0)), ValidationError);
  CHECK_THROWS_AS(dirichlet_mean(Eigen::VectorXd()), ValidationError);

  // Beta(1,1) variance is 1/12.
  CHECK(dirichlet_variance(Eigen::Vector2d(1, 1), 0) == doctest::Approx(1.0 / 12.0).epsilon(1e-14));
  CHECK_THROWS_AS(dirichlet_variance(Eigen::Vector2d(0, 0), 0), ValidationError);
  double prev = 1.0;
  for (double cc : {0.5, 1.0, 2.0, 10.0, 100.0}) {
    const double v0 = dirichlet_variance(Eigen::Vector2d(cc, cc), 0);
    CHECK(v0 == doctest::Approx(dirichlet_variance(Eigen::Vector2d(cc, cc), 1)));
    CHECK(v0 < prev);
    prev = v0;
  }
  Rng rng(4);
  for (int rep = 0; rep < 50; ++rep) {
    Eigen::VectorXd x(5);
    for (int i = 0; i < 5; ++i) x(i) = 1e-3 + 10 * rng.uniform();
    CHECK(std::abs(dirichlet_mean(x).sum() - 1.0) < 1e-12);
  }
}

TEST_CASE("argmax ties go to the lowest index") {
  Eigen::MatrixXd g(3, 3);
  g << 0.5, 0.5, 0.0, 0.2, 0.4, 0.4, 0.1, 0.2, 0.7;
  CHECK(argmax_labels(g) == std::vector<int>{0, 1, 2});
  CHECK(count_labelled_components({0, 0, 2}, 4) == 2);
}

TEST_CASE("responsibilities validation") {
  Responsibilities r{Eigen::MatrixXd::Constant(2, 2, 0.5)};
  CHECK_NOTHROW(r.validate());
  r.gamma(0, 0) = 0.6;
  CHECK_THROWS_AS(r.validate(), ValidationError);
}
