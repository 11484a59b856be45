#include "doctest.h"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <limits>
#include <sstream>

#include "mcmix/io.hpp"
#include "mcmix/multistart.hpp"

using namespace mcmix;

namespace {

TrajectoryDataset parse(const std::string& text, bool one_based = false, int s = 0) {
  std::istringstream in(text);
  return read_trajectories(in, one_based, s);
}

std::size_t parse_error_line(const std::string& text, bool one_based = false) {
  try {
    parse(text, one_based);
  } catch (const ParseError& e) {
    return e.line();
  }
  return 0;
}

}  // namespace

TEST_CASE("trajectory files") {
  const TrajectoryDataset d = parse("# s=4\n0 1 2\n\n# comment\n3,3, 0\n1\n");
  CHECK(d.num_states() == 4);
  CHECK(d.size() == 3);
  CHECK(d[1] == Trajectory{3, 3, 0});
  CHECK(d[2] == Trajectory{1});
  CHECK(parse("0 2\n1\n").num_states() == 3);
  CHECK(parse("0 1\n", false, 5).num_states() == 5);
  const TrajectoryDataset ob = parse("1 2 2\n", true);
  CHECK(ob[0] == Trajectory{0, 1, 1});

  CHECK(parse_error_line("0 1\n0 x 1\n") == 2);
  CHECK(parse_error_line("# s=2\n0 1\n0 2\n") == 3);
  CHECK(parse_error_line("0 -1\n") == 1);
  CHECK(parse_error_line("1 0\n", true) == 1);
  CHECK(parse_error_line("0 1.5\n") == 1);

  std::ostringstream out;
  write_trajectories(out, d);
  CHECK(out.str().rfind("# s=4\n", 0) == 0);
  std::istringstream back(out.str());
  CHECK(read_trajectories(back).trajectories() == d.trajectories());
  std::ostringstream one;
  write_trajectories(one, d, true);
  std::istringstream back1(one.str());
  CHECK(read_trajectories(back1, true).trajectories() == d.trajectories());
}

TEST_CASE("label files") {
  std::istringstream in("0\n2\n\n1\n");
  CHECK(read_labels(in) == std::vector<int>{0, 2, 1});
  std::istringstream bad("0\nq\n");
  CHECK_THROWS_AS(read_labels(bad), ParseError);
  std::ostringstream out;
  write_labels(out, {0, 1}, true);
  CHECK(out.str() == "1\n2\n");
  std::istringstream back(out.str());
  CHECK(read_labels(back, true) == std::vector<int>{0, 1});
}

TEST_CASE("parameter json round trip and validation") {
  const MixtureParams p = random_params(3, 4, 5);
  const json j = params_to_json(p);
  CHECK(j["k"] == 3);
  CHECK(j["s"] == 4);
  const MixtureParams q = params_from_json(json::parse(j.dump()));
  CHECK(q.mu == p.mu);
  CHECK(q.nu == p.nu);
  for (int i = 0; i < 3; ++i) CHECK(q.P[i] == p.P[i]);

  json bad = j;
  bad["mu"][0] = 0.9;
  CHECK_THROWS_AS(params_from_json(bad), ValidationError);
  bad = j;
  bad.erase("P");
  CHECK_THROWS_AS(params_from_json(bad), ParseError);
  bad = j;
  bad["k"] = 2;
  CHECK_THROWS_AS(params_from_json(bad), ParseError);
  bad = j;
  bad["nu"][0][0] = "x";
  CHECK_THROWS_AS(params_from_json(bad), ParseError);
}

TEST_CASE("non-finite numbers") {
  CHECK(to_json(std::numeric_limits<double>::infinity()) == "inf");
  CHECK(to_json(-std::numeric_limits<double>::infinity()) == "-inf");
  CHECK(to_json(std::numeric_limits<double>::quiet_NaN()) == "nan");
  const json doc = {{"a", "inf"}, {"b", "nan"}, {"c", 2.5}, {"d", "two"}, {"v", {1, "-inf"}}};
  CHECK(std::isinf(number_from_json(doc, "a")));
  CHECK(std::isnan(number_from_json(doc, "b")));
  CHECK(number_from_json(doc, "c") == 2.5);
  CHECK_THROWS_AS(number_from_json(doc, "d"), ParseError);
  CHECK_THROWS_AS(number_from_json(doc, "missing"), ParseError);
  const Eigen::VectorXd v = vector_from_json(doc, "v");
  CHECK(v(0) == 1.0);
  CHECK(std::isinf(v(1)));
}

TEST_CASE("posterior and fit json") {
  const SampledMixture smp = sample_mixture(random_params(2, 3, 1), 20, 6, 2);
  MultistartConfig cfg;
  cfg.k = 3;
  cfg.restarts = 2;
  const MultistartReport rep = multistart_fit(SufficientStats(smp.data), cfg, 4, &smp.labels);
  REQUIRE(rep.posterior);
  const json pj = posterior_to_json(*rep.posterior);
  for (const char* key : {"N_hat", "N_i_hat", "N_ialpha_hat", "responsibilities", "elbo_trace"})
    CHECK(pj.contains(key));
  const DirichletPosterior back = posterior_from_json(json::parse(pj.dump()));
  CHECK(back.N_hat == rep.posterior->N_hat);
  CHECK(back.N_i_hat == rep.posterior->N_i_hat);
  CHECK(back.N_ialpha_hat[2] == rep.posterior->N_ialpha_hat[2]);
  CHECK(back.responsibilities.gamma == rep.posterior->responsibilities.gamma);
  CHECK(back.elbo_trace == rep.posterior->elbo_trace);

  const json fj = fit_to_json(rep.best, true);
  CHECK(fj["surviving_components"] == rep.best.surviving_components);
  CHECK(fj["labels"][0] == rep.best.labels[0] + 1);

  std::ostringstream csv;
  write_restart_csv(csv, rep);
  const std::string text = csv.str();
  CHECK(text.rfind("restart,seed,objective,iterations,surviving,accuracy,failure\n", 0) == 0);
  CHECK(std::count(text.begin(), text.end(), '\n') == 3);
}

TEST_CASE("kl report json") {
  MixtureParams p;
  p.mu = Eigen::Vector2d(0.5, 0.5);
  p.nu = Eigen::MatrixXd::Constant(2, 2, 0.5);
  p.P = {Eigen::MatrixXd::Constant(2, 2, 0.5), Eigen::MatrixXd::Identity(2, 2)};
  const json j = kl_report_to_json(kl_report(p, 3));
  CHECK(j["pairwise"][0][1] == "inf");
  CHECK(j["pairwise"][0][0] == 0.0);
  CHECK(j.contains("bound"));
}

TEST_CASE("spectral model json keeps assignments") {
  PointSet x(40, 2);
  Rng rng(2);
  for (int i = 0; i < 40; ++i) x.row(i) << (i < 20 ? -5 : 5) + 0.3 * rng.normal(), 0.3 * rng.normal();
  KernelSpec k;
  k.sigma = 2.0;
  const SpectralModel m = spectral_fit(x, k, 2, 0, 1);
  const SpectralModel back = spectral_from_json(json::parse(spectral_to_json(m).dump()));
  CHECK(back.kernel.sigma == 2.0);
  CHECK(back.alpha == m.alpha);
  CHECK(back.centers == m.centers);
  CHECK(spectral_assign(back, x) == m.training_assignments);
}

TEST_CASE("tables and points") {
  std::istringstream in("traj,t,a,b\n0,0,1.5,2\n0,1,3,4\n# note\n1,0,5,6\n");
  const Table t = read_table(in);
  CHECK(t.header == std::vector<std::string>{"traj", "t", "a", "b"});
  CHECK(t.rows.rows() == 3);
  CHECK(t.column("b") == 3);
  CHECK_THROWS_AS(t.column("c"), ValidationError);
  const std::vector<PointSet> trajs = continuous_trajectories(t);
  REQUIRE(trajs.size() == 2);
  CHECK(trajs[0].rows() == 2);
  CHECK(trajs[0].cols() == 2);
  CHECK(trajs[0](1, 0) == 3.0);
  CHECK(continuous_trajectories(t, "traj", {"b"})[1](0, 0) == 6.0);

  std::istringstream pts("1 2\n3,4\n");
  const PointSet p = read_points(pts);
  CHECK(p.rows() == 2);
  CHECK(p(1, 1) == 4.0);
  std::istringstream ragged("1,2\n3\n");
  CHECK_THROWS_AS(read_points(ragged), ParseError);
  std::ostringstream out;
  write_points(out, p);
  std::istringstream back(out.str());
  CHECK(read_points(back) == p);
}

TEST_CASE("confusion and misa csv") {
  const AccuracyResult acc = accuracy({0, 0, 1}, {1, 1, 0});
  std::ostringstream out;
  write_confusion_csv(out, confusion({0, 0, 1}, {1, 1, 0}, acc.permutation));
  CHECK(out.str() == "true,est_0,est_1\n0,2,0\n1,0,1\n");

  const MisaTrajectory t = misa_simulate(MisaParams{}, 2.0, 1.0, 1);
  std::ostringstream m;
  write_misa_csv(m, {t}, {1});
  const std::string text = m.str();
  CHECK(text.rfind("traj,group,t,a,b,geneA,geneB\n", 0) == 0);
  CHECK(std::count(text.begin(), text.end(), '\n') == 4);
}

TEST_CASE("misa params json") {
  MisaParams p;
  p.f_r = 0.25;
  const MisaParams q = misa_params_from_json(misa_params_to_json(p));
  CHECK(q.f_r == 0.25);
  CHECK(q.g10 == 100.0);
  const MisaParams partial = misa_params_from_json(json{{"f_r", 0.5}});
  CHECK(partial.f_r == 0.5);
  CHECK(partial.h_a == 0.1);
  CHECK_THROWS_AS(misa_params_from_json(json{{"fr", 0.5}}), ParseError);
}

TEST_CASE("file helpers") {
  const auto dir = std::filesystem::temp_directory_path() / "mcmix_io_test";
  std::filesystem::remove_all(dir);
  write_text_file(dir / "sub" / "a.txt", "hello\n");
  CHECK(read_text_file(dir / "sub" / "a.txt") == "hello\n");
  CHECK_THROWS(read_text_file(dir / "missing.txt"));
  write_json_file(dir / "b.json", json{{"x", 1}});
  CHECK(read_json_file(dir / "b.json")["x"] == 1);
  write_text_file(dir / "bad.json", "{\n  \"x\": 1,\n  oops\n}\n");
  try {
    read_json_file(dir / "bad.json");
    FAIL("expected ParseError");
  } catch (const ParseError& e) {
    CHECK(e.line() == 3);
  }
  std::filesystem::remove_all(dir);
}
