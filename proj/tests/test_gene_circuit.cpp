#include "doctest.h"

#include <algorithm>
#include <cmath>

#include "mcmix/gene_circuit.hpp"

using namespace mcmix;

namespace {

MisaParams no_binding() {
  MisaParams p;
  p.h_a = p.f_a = p.h_r = p.f_r = 0.0;
  return p;
}

struct MeanSe {
  double mean;
  double se;
};

MeanSe mean_over_runs(const std::vector<double>& xs) {
  double m = 0.0;
  for (double x : xs) m += x;
  m /= xs.size();
  double ss = 0.0;
  for (double x : xs) ss += (x - m) * (x - m);
  return {m, std::sqrt(ss / (xs.size() - 1) / xs.size())};
}

}  // namespace

TEST_CASE("rates and conditions") {
  MisaParams p;
  CHECK(p.production(0) == 10.0);
  CHECK(p.production(1) == 10.0);
  CHECK(p.production(2) == 100.0);
  CHECK(p.production(3) == 10.0);
  CHECK(condition_label(0) == "00");
  CHECK(condition_label(1) == "01");
  CHECK(condition_label(2) == "10");
  CHECK(condition_label(3) == "11");
  CHECK_NOTHROW(p.validate());
  CHECK_NOTHROW(no_binding().validate());
  p.d = 0.0;
  CHECK_THROWS_AS(p.validate(), ValidationError);
  p = MisaParams{};
  p.f_r = -1.0;
  CHECK_THROWS_AS(p.validate(), ValidationError);
}

TEST_CASE("propensities at zero and one protein") {
  MisaParams p;
  const auto z = misa_propensities(MisaState{3, 3, 0, 0}, p);
  CHECK(z[kDegradeA] == 0.0);
  CHECK(z[kDegradeB] == 0.0);
  CHECK(z[kActivateA] == 0.0);
  CHECK(z[kActivateB] == 0.0);
  CHECK(z[kRepressA] == 0.0);
  CHECK(z[kRepressB] == 0.0);
  CHECK(z[kProduceA] == 10.0);
  CHECK(z[kDeactivateA] == p.f_a);
  CHECK(z[kDerepressB] == p.f_r);

  const auto one = misa_propensities(MisaState{0, 0, 1, 1}, p);
  CHECK(one[kActivateA] == 0.0);
  CHECK(one[kRepressB] == 0.0);
  CHECK(one[kDegradeA] == 1.0);
  CHECK(one[kDeactivateA] == 0.0);

  const auto many = misa_propensities(MisaState{0, 0, 5, 7}, p);
  CHECK(many[kActivateA] == doctest::Approx(0.1 * 5 * 4));
  CHECK(many[kActivateB] == doctest::Approx(0.1 * 7 * 6));
  CHECK(many[kRepressA] == doctest::Approx(1e-3 * 7 * 6));
  CHECK(many[kRepressB] == doctest::Approx(1e-3 * 5 * 4));
  CHECK(many[kDegradeB] == 7.0);
}

TEST_CASE("reactions change the state as written") {
  MisaState s{0, 0, 3, 2};
  apply_reaction(s, kActivateA);
  CHECK(s == MisaState{2, 0, 1, 2});
  CHECK_THROWS_AS(apply_reaction(s, kRepressB), ValidationError);
  s = MisaState{0, 0, 3, 2};
  apply_reaction(s, kRepressA);
  CHECK(s == MisaState{1, 0, 3, 0});
  apply_reaction(s, kDerepressA);
  CHECK(s == MisaState{0, 0, 3, 2});
  CHECK_THROWS_AS(apply_reaction(s, kDeactivateA), ValidationError);
  MisaState e{0, 0, 0, 0};
  CHECK_THROWS_AS(apply_reaction(e, kDegradeA), ValidationError);
}

TEST_CASE("ssa steps keep the state valid") {
  MisaParams p;
  Rng rng(3);
  MisaState s;
  for (int i = 0; i < 200000; ++i) {
    const SsaEvent ev = misa_step_ssa(s, p, rng);
    REQUIRE(ev.wait > 0.0);
    REQUIRE(ev.state.a >= 0);
    REQUIRE(ev.state.b >= 0);
    REQUIRE(ev.state.gene_a >= 0);
    REQUIRE(ev.state.gene_a < 4);
    REQUIRE(ev.state.gene_b >= 0);
    REQUIRE(ev.state.gene_b < 4);
    s = ev.state;
  }
}

TEST_CASE("without binding each count is a birth-death process with mean g/d") {
  std::vector<double> a_means, b_means;
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const MisaTrajectory t = misa_simulate(no_binding(), 200.0, 1.0, seed, 20.0);
    double sa = 0.0, sb = 0.0;
    for (const auto& s : t.samples) {
      CHECK(s.state.gene_a == 0);
      sa += s.state.a;
      sb += s.state.b;
    }
    a_means.push_back(sa / t.samples.size());
    b_means.push_back(sb / t.samples.size());
  }
  const MeanSe a = mean_over_runs(a_means), b = mean_over_runs(b_means);
  MESSAGE("mean a " << a.mean << " +- " << a.se << ", mean b " << b.mean << " +- " << b.se);
  CHECK(std::abs(a.mean - 10.0) < 3.0 * a.se);
  CHECK(std::abs(b.mean - 10.0) < 3.0 * b.se);
}

TEST_CASE("sampling grid and reproducibility") {
  MisaParams p;
  const MisaTrajectory t = misa_simulate(p, 10.0, 1.0, 7);
  REQUIRE(t.samples.size() == 11);
  for (std::size_t i = 0; i < t.samples.size(); ++i) CHECK(t.samples[i].t == doctest::Approx(static_cast<double>(i)));
  const MisaTrajectory u = misa_simulate(p, 10.0, 1.0, 7);
  for (std::size_t i = 0; i < t.samples.size(); ++i) CHECK(t.samples[i].state == u.samples[i].state);
  const MisaTrajectory one = misa_simulate(p, 3.0, 5.0, 7);
  CHECK(one.samples.size() == 1);
  CHECK(one.samples[0].t == 0.0);
  const PointSet pts = t.points();
  CHECK(pts.rows() == 11);
  CHECK(pts(4, 0) == t.samples[4].state.a);
  CHECK(pts(4, 1) == t.samples[4].state.b);
}

TEST_CASE("weak repressor unbinding keeps counts low") {
  // With f_r = 0.01 each gene spends ~90% of the time repressed, producing
  // at rate 10; brief unrepressed spells give short excursions to ~100.
  auto low_fraction = [](double f_r) {
    MisaParams p;
    p.f_r = f_r;
    long low = 0, total = 0;
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
      const MisaTrajectory t = misa_simulate(p, 100.0, 1.0, seed);
      for (const auto& s : t.samples) {
        low += s.state.a <= 20 && s.state.b <= 20;
        ++total;
      }
    }
    return static_cast<double>(low) / total;
  };
  const double weak = low_fraction(0.01), strong = low_fraction(1.0);
  MESSAGE("fraction of samples with a, b <= 20: " << weak << " at f_r = 0.01, " << strong << " at f_r = 1");
  CHECK(weak >= 2.0 / 3.0);
  CHECK(strong <= 0.1);
}

TEST_CASE("strong unbinding gives competing high populations") {
  MisaParams p;
  p.f_r = 1.0;
  double sum_max = 0.0;
  long total = 0, a_high = 0, b_high = 0;
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const MisaTrajectory t = misa_simulate(p, 200.0, 1.0, seed);
    for (const auto& s : t.samples) {
      sum_max += std::max(s.state.a, s.state.b);
      a_high += s.state.a > s.state.b + 30;
      b_high += s.state.b > s.state.a + 30;
      ++total;
    }
  }
  const double mean_max = sum_max / total;
  MESSAGE("mean of max(a, b) at f_r = 1: " << mean_max);
  CHECK(mean_max >= 50.0);
  CHECK(mean_max <= 150.0);
  CHECK(a_high > total / 10);
  CHECK(b_high > total / 10);
}

TEST_CASE("identical groups are not separable") {
  MisaExperimentConfig cfg;
  cfg.f_r_2 = cfg.f_r_1;
  cfg.restarts = 10;
  double sum = 0.0;
  for (std::uint64_t seed = 0; seed < 3; ++seed) {
    const MisaExperimentResult r = misa_mixture_experiment(cfg, seed);
    CHECK(r.data.size() == 30);
    CHECK(r.data.num_states() == 4);
    CHECK(r.true_labels.size() == 30);
    CHECK(r.data.transitions(0) == 25);
    sum += r.accuracy;
  }
  MESSAGE("mean accuracy with identical groups: " << sum / 3);
  CHECK(sum / 3 <= 0.75);
}

TEST_CASE("pipeline is reproducible") {
  MisaExperimentConfig cfg;
  cfg.restarts = 5;
  cfg.T = 10;
  const MisaExperimentResult a = misa_mixture_experiment(cfg, 4);
  const MisaExperimentResult b = misa_mixture_experiment(cfg, 4);
  CHECK(a.data.trajectories() == b.data.trajectories());
  CHECK(a.estimated_labels == b.estimated_labels);
  CHECK(a.accuracy == b.accuracy);
}
