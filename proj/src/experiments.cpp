#include "mcmix/experiments.hpp"

#include <cmath>
#include <limits>
#include <sstream>

#include "mcmix/metrics.hpp"
#include "mcmix/rng.hpp"

namespace mcmix {

namespace {

using nlohmann::json;

struct Summary {
  double mean = std::numeric_limits<double>::quiet_NaN();
  double std_error = std::numeric_limits<double>::quiet_NaN();
  int count = 0;
};

Summary summarize(const std::vector<double>& xs) {
  Summary s;
  s.count = static_cast<int>(xs.size());
  if (xs.empty()) return s;
  double sum = 0.0;
  for (double x : xs) sum += x;
  s.mean = sum / s.count;
  if (s.count < 2) {
    s.std_error = 0.0;
    return s;
  }
  double ss = 0.0;
  for (double x : xs) ss += (x - s.mean) * (x - s.mean);
  s.std_error = std::sqrt(ss / (s.count - 1) / s.count);
  return s;
}

std::string csv_safe(std::string msg) {
  for (char& c : msg)
    if (c == ',' || c == '\n' || c == '"') c = ';';
  return msg;
}

template <class T>
std::vector<T> scalar_or_array(const json& j, const std::string& key) {
  if (j.is_array()) return j.get<std::vector<T>>();
  if (j.is_number()) return {j.get<T>()};
  throw ValidationError("'" + key + "' must be a number or an array of numbers");
}

ExperimentOutput run_synthetic(const ExperimentSpec& spec) {
  ExperimentOutput out;
  std::ostringstream trials, cells, restarts;
  trials.precision(17);
  cells.precision(17);
  restarts.precision(17);
  trials << "N,T,trial,seed,surviving,accuracy,objective,iterations,status,error\n";
  cells << "N,T,trials,succeeded,mean_accuracy,std_error,mean_surviving,frac_surviving_eq_k_true\n";
  const bool want_restarts = spec.name == "fig4";
  if (want_restarts) restarts << "trial,restart,seed,objective,accuracy,surviving,iterations,failure\n";

  MultistartConfig ms;
  ms.algorithm = spec.algorithm;
  ms.k = spec.k_max;
  ms.restarts = spec.restarts;
  ms.tol_scale = spec.tol_scale;
  ms.max_iters = spec.max_iters;

  json cell_summaries = json::array();
  std::size_t cell = 0;
  for (int N : spec.N) {
    for (int T : spec.T) {
      const std::uint64_t cell_seed = derive_seed(spec.seed, cell++);
      std::vector<double> accs, surv;
      int exact = 0;
      for (int t = 0; t < spec.trials; ++t) {
        const std::uint64_t seed = derive_seed(cell_seed, static_cast<std::uint64_t>(t));
        trials << N << ',' << T << ',' << t << ',' << seed << ',';
        try {
          const MixtureParams truth = random_params(spec.k_true, spec.states, derive_seed(seed, 0));
          const SampledMixture sample =
              sample_mixture(truth, static_cast<std::size_t>(N), static_cast<std::size_t>(T), derive_seed(seed, 1));
          const MultistartReport rep =
              multistart_fit(SufficientStats(sample.data), ms, derive_seed(seed, 2), &sample.labels);
          const double acc = accuracy(sample.labels, rep.best.labels).value;
          accs.push_back(acc);
          surv.push_back(rep.best.surviving_components);
          if (rep.best.surviving_components == spec.k_true) ++exact;
          trials << rep.best.surviving_components << ',' << acc << ',' << rep.best.objective() << ','
                 << rep.best.iterations << ",ok,\n";
          if (want_restarts)
            for (std::size_t r = 0; r < rep.seeds.size(); ++r)
              restarts << t << ',' << r << ',' << rep.seeds[r] << ',' << rep.all_objectives[r] << ','
                       << rep.all_accuracies[r] << ',' << rep.all_surviving[r] << ',' << rep.all_iterations[r] << ','
                       << csv_safe(rep.failures[r]) << '\n';
        } catch (const std::exception& e) {
          ++out.failed_cells;
          trials << ",,,,failed," << csv_safe(e.what()) << '\n';
        }
      }
      const Summary a = summarize(accs);
      const Summary sv = summarize(surv);
      const double frac = a.count ? static_cast<double>(exact) / a.count : std::numeric_limits<double>::quiet_NaN();
      cells << N << ',' << T << ',' << spec.trials << ',' << a.count << ',' << a.mean << ',' << a.std_error << ','
            << sv.mean << ',' << frac << '\n';
      cell_summaries.push_back({{"N", N},
                                {"T", T},
                                {"succeeded", a.count},
                                {"mean_accuracy", a.count ? json(a.mean) : json(nullptr)},
                                {"std_error", a.count ? json(a.std_error) : json(nullptr)},
                                {"exact_component_count", exact}});
    }
  }
  out.tables.push_back({"trials.csv", trials.str()});
  out.tables.push_back({"cells.csv", cells.str()});
  if (want_restarts) out.tables.push_back({"restarts.csv", restarts.str()});
  out.summary = {{"cells", std::move(cell_summaries)}};
  return out;
}

ExperimentOutput run_misa(const ExperimentSpec& spec) {
  ExperimentOutput out;
  std::ostringstream trials, cells;
  trials.precision(17);
  cells.precision(17);
  trials << "f_r_1,f_r_2,ratio,T,rep,seed,accuracy,surviving,status,error\n";
  cells << "f_r_1,f_r_2,ratio,T,reps,succeeded,mean_accuracy,std_error\n";

  json cell_summaries = json::array();
  std::size_t cell = 0;
  for (double f2 : spec.f_r_2) {
    for (int T : spec.T) {
      const std::uint64_t cell_seed = derive_seed(spec.seed, cell++);
      MisaExperimentConfig cfg = spec.misa;
      cfg.f_r_2 = f2;
      cfg.T = T;
      cfg.k_max = spec.k_max;
      cfg.restarts = spec.restarts;
      const double ratio = f2 / cfg.f_r_1;
      std::vector<double> accs;
      for (int r = 0; r < spec.trials; ++r) {
        const std::uint64_t seed = derive_seed(cell_seed, static_cast<std::uint64_t>(r));
        trials << cfg.f_r_1 << ',' << f2 << ',' << ratio << ',' << T << ',' << r << ',' << seed << ',';
        try {
          const MisaExperimentResult res = misa_mixture_experiment(cfg, seed);
          accs.push_back(res.accuracy);
          trials << res.accuracy << ',' << res.surviving_components << ",ok,\n";
        } catch (const std::exception& e) {
          ++out.failed_cells;
          trials << ",,failed," << csv_safe(e.what()) << '\n';
        }
      }
      const Summary a = summarize(accs);
      cells << cfg.f_r_1 << ',' << f2 << ',' << ratio << ',' << T << ',' << spec.trials << ',' << a.count << ','
            << a.mean << ',' << a.std_error << '\n';
      cell_summaries.push_back({{"f_r_2", f2},
                                {"T", T},
                                {"succeeded", a.count},
                                {"mean_accuracy", a.count ? json(a.mean) : json(nullptr)},
                                {"std_error", a.count ? json(a.std_error) : json(nullptr)}});
    }
  }
  out.tables.push_back({"trials.csv", trials.str()});
  out.tables.push_back({"cells.csv", cells.str()});
  out.summary = {{"cells", std::move(cell_summaries)}};
  return out;
}

}  // namespace

ExperimentSpec ExperimentSpec::named(const std::string& name) {
  ExperimentSpec s;
  s.name = name;
  if (name == "fig2") {
    s.trials = 20;
  } else if (name == "fig3") {
    s.N = {25, 100, 400};
    s.T = {5, 10, 30, 100};
    s.trials = 250;
    s.restarts = 10;
  } else if (name == "fig4") {
    s.k_true = 10;
    s.states = 7;
    s.N = {100};
    s.T = {50};
    s.k_max = 15;
    s.restarts = 1000;
  } else if (name == "fig8") {
    s.f_r_2 = {0.01, 0.025, 0.05, 0.1, 0.25, 0.5, 1.0};
    s.T = {5, 10, 25, 50};
    s.trials = 5;
  } else if (name != "custom") {
    throw ValidationError("unknown experiment '" + name + "' (expected fig2, fig3, fig4, fig8 or custom)");
  }
  return s;
}

void ExperimentSpec::apply(const json& o) {
  if (!o.is_object()) throw ValidationError("experiment overrides must be a JSON object");
  for (const auto& [key, v] : o.items()) {
    if (key == "k_true") k_true = v.get<int>();
    else if (key == "s" || key == "states") states = v.get<int>();
    else if (key == "N") N = scalar_or_array<int>(v, key);
    else if (key == "T") T = scalar_or_array<int>(v, key);
    else if (key == "trials") trials = v.get<int>();
    else if (key == "algorithm") algorithm = parse_algorithm(v.get<std::string>());
    else if (key == "k_max") k_max = v.get<int>();
    else if (key == "restarts") restarts = v.get<int>();
    else if (key == "tol_scale") tol_scale = v.get<double>();
    else if (key == "max_iters") max_iters = v.get<int>();
    else if (key == "seed") seed = v.get<std::uint64_t>();
    else if (key == "f_r_1") misa.f_r_1 = v.get<double>();
    else if (key == "f_r_2") f_r_2 = scalar_or_array<double>(v, key);
    else if (key == "sigma") misa.sigma = v.get<double>();
    else if (key == "misa_states") misa.states = v.get<int>();
    else if (key == "n_per_group") misa.n_per_group = v.get<int>();
    else if (key == "burn_in") misa.burn_in = v.get<double>();
    else if (key == "max_fit_points") misa.max_fit_points = v.get<int>();
    else throw ValidationError("unknown experiment parameter '" + key + "'");
  }
}

void ExperimentSpec::validate() const {
  auto positive = [](const std::vector<int>& xs, const char* what) {
    if (xs.empty()) throw ValidationError(std::string(what) + " grid is empty");
    for (int x : xs)
      if (x < 1) throw ValidationError(std::string(what) + " values must be at least 1");
  };
  positive(T, "T");
  if (trials < 1) throw ValidationError("trials must be at least 1");
  if (restarts < 1) throw ValidationError("restarts must be at least 1");
  if (k_max < 1) throw ValidationError("k_max must be at least 1");
  if (name == "fig8") {
    if (f_r_2.empty()) throw ValidationError("f_r_2 grid is empty");
    for (double f : f_r_2)
      if (!(f > 0.0)) throw ValidationError("f_r_2 values must be positive");
    if (!(misa.f_r_1 > 0.0)) throw ValidationError("f_r_1 must be positive");
  } else {
    positive(N, "N");
    if (k_true < 1 || states < 1) throw ValidationError("k_true and s must be at least 1");
  }
}

ExperimentOutput run_experiment(const ExperimentSpec& spec) {
  spec.validate();
  ExperimentOutput out = spec.name == "fig8" ? run_misa(spec) : run_synthetic(spec);
  out.summary["experiment"] = spec.name;
  out.summary["seed"] = spec.seed;
  out.summary["failed_cells"] = out.failed_cells;
  return out;
}

}  // namespace mcmix
