#pragma once

// Named experiment recipes. Each one produces plot-ready CSV tables; a
// failure inside one cell is recorded in that cell's row and the sweep
// continues.

#include <cstdint>
#include <string>
#include <vector>

#include "json.hpp"
#include "mcmix/gene_circuit.hpp"
#include "mcmix/multistart.hpp"

namespace mcmix {

struct ExperimentSpec {
  std::string name = "custom";  ///< fig2, fig3, fig4, fig8 or custom
  std::uint64_t seed = 0;

  // Synthetic mixtures (fig2, fig3, fig4, custom).
  int k_true = 4;
  int states = 3;
  std::vector<int> N = {100};
  std::vector<int> T = {30};
  int trials = 1;
  Algorithm algorithm = Algorithm::vem;
  int k_max = 10;
  int restarts = 100;
  double tol_scale = 1e-12;
  int max_iters = 1000;

  // MISA sweep (fig8).
  std::vector<double> f_r_2 = {0.01};
  MisaExperimentConfig misa;

  /// Defaults of the named recipe; throws ValidationError for an unknown name.
  static ExperimentSpec named(const std::string& name);
  /// Applies every recognized key of `overrides`; unknown keys throw
  /// ValidationError so typos do not pass silently.
  void apply(const nlohmann::json& overrides);
  void validate() const;
};

struct ExperimentTable {
  std::string filename;
  std::string csv;
};

struct ExperimentOutput {
  std::vector<ExperimentTable> tables;
  nlohmann::json summary;
  int failed_cells = 0;
};

/// Runs the recipe. Cell (c, trial t) uses seed derive_seed(derive_seed(seed, c), t).
ExperimentOutput run_experiment(const ExperimentSpec& spec);

}  // namespace mcmix
