#include "doctest.h"

#include <sstream>

#include "mcmix/experiments.hpp"

using namespace mcmix;

namespace {

int count_rows_with(const std::string& csv, const std::string& needle) {
  std::istringstream in(csv);
  std::string line;
  int n = 0;
  while (std::getline(in, line)) n += line.find(needle) != std::string::npos;
  return n;
}

const ExperimentTable& table(const ExperimentOutput& out, const std::string& name) {
  for (const auto& t : out.tables)
    if (t.filename == name) return t;
  throw std::runtime_error("missing table " + name);
}

}  // namespace

TEST_CASE("named recipes carry their defaults") {
  const ExperimentSpec f2 = ExperimentSpec::named("fig2");
  CHECK(f2.k_true == 4);
  CHECK(f2.states == 3);
  CHECK(f2.N == std::vector<int>{100});
  CHECK(f2.T == std::vector<int>{30});
  CHECK(f2.k_max == 10);
  CHECK(f2.restarts == 100);
  const ExperimentSpec f3 = ExperimentSpec::named("fig3");
  CHECK(f3.N == std::vector<int>{25, 100, 400});
  CHECK(f3.T == std::vector<int>{5, 10, 30, 100});
  CHECK(f3.trials == 250);
  const ExperimentSpec f4 = ExperimentSpec::named("fig4");
  CHECK(f4.k_true == 10);
  CHECK(f4.states == 7);
  CHECK(f4.k_max == 15);
  CHECK(f4.restarts == 1000);
  const ExperimentSpec f8 = ExperimentSpec::named("fig8");
  CHECK(f8.misa.f_r_1 == 0.01);
  CHECK(f8.misa.n_per_group == 15);
  CHECK(f8.misa.sigma == 50.0);
  CHECK(f8.misa.states == 4);
  CHECK_THROWS_AS(ExperimentSpec::named("fig9"), ValidationError);
}

TEST_CASE("overrides") {
  ExperimentSpec s = ExperimentSpec::named("fig3");
  s.apply(nlohmann::json{{"N", 50}, {"T", {5, 100}}, {"trials", 2}, {"algorithm", "em"}});
  CHECK(s.N == std::vector<int>{50});
  CHECK(s.T == std::vector<int>{5, 100});
  CHECK(s.trials == 2);
  CHECK(s.algorithm == Algorithm::em);
  CHECK_THROWS_AS(s.apply(nlohmann::json{{"Trials", 3}}), ValidationError);
  CHECK_THROWS_AS(s.apply(nlohmann::json{{"N", "many"}}), ValidationError);
  s.apply(nlohmann::json{{"T", nlohmann::json::array()}});
  CHECK_THROWS_AS(s.validate(), ValidationError);
}

TEST_CASE("small synthetic sweep is reproducible") {
  ExperimentSpec s = ExperimentSpec::named("fig3");
  s.apply(nlohmann::json{{"N", {25}}, {"T", {5, 30}}, {"trials", 2}, {"restarts", 3}});
  s.seed = 9;
  const ExperimentOutput a = run_experiment(s);
  const ExperimentOutput b = run_experiment(s);
  CHECK(a.failed_cells == 0);
  CHECK(table(a, "trials.csv").csv == table(b, "trials.csv").csv);
  CHECK(table(a, "cells.csv").csv == table(b, "cells.csv").csv);
  CHECK(count_rows_with(table(a, "trials.csv").csv, ",ok,") == 4);
  CHECK(a.summary["cells"].size() == 2);
  CHECK(a.summary["experiment"] == "fig3");
}

TEST_CASE("fig4 writes a restart scatter") {
  ExperimentSpec s = ExperimentSpec::named("fig4");
  s.apply(nlohmann::json{{"restarts", 4}, {"N", 30}, {"T", 10}});
  const ExperimentOutput out = run_experiment(s);
  const std::string& csv = table(out, "restarts.csv").csv;
  CHECK(csv.rfind("trial,restart,seed,objective,accuracy,surviving,iterations,failure\n", 0) == 0);
  std::istringstream in(csv);
  std::string line;
  int rows = 0;
  while (std::getline(in, line)) ++rows;
  CHECK(rows == 5);
}

TEST_CASE("failing cells are marked and the sweep continues") {
  ExperimentSpec s = ExperimentSpec::named("custom");
  s.apply(nlohmann::json{{"N", {10, 20}}, {"T", 5}, {"restarts", 2}, {"max_iters", 0}});
  const ExperimentOutput out = run_experiment(s);
  CHECK(out.failed_cells == 2);
  CHECK(count_rows_with(table(out, "trials.csv").csv, "failed,") == 2);
  CHECK(out.summary["failed_cells"] == 2);
  CHECK(out.summary["cells"].size() == 2);
}

TEST_CASE("misa sweep") {
  ExperimentSpec s = ExperimentSpec::named("fig8");
  s.apply(nlohmann::json{{"f_r_2", {0.25}}, {"T", {5}}, {"trials", 1}, {"restarts", 3}});
  const ExperimentOutput out = run_experiment(s);
  CHECK(out.failed_cells == 0);
  const std::string& cells = table(out, "cells.csv").csv;
  CHECK(cells.rfind("f_r_1,f_r_2,ratio,T,reps,succeeded,mean_accuracy,std_error\n", 0) == 0);
  CHECK(count_rows_with(cells, "0.01,0.25,25,5,1,1,") == 1);
}
