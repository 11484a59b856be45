#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "mcmix/em.hpp"
#include "mcmix/vem.hpp"

namespace mcmix {

/// N rows drawn independently and uniformly from the (k-1)-simplex, by
/// normalizing k unit exponentials. Deterministic given `seed`.
Responsibilities sample_simplex_rows(std::size_t N, int k, std::uint64_t seed);

enum class Algorithm { em, vem };

Algorithm parse_algorithm(const std::string& name);
const char* to_string(Algorithm algorithm);

struct MultistartConfig {
  Algorithm algorithm = Algorithm::vem;
  int restarts = 100;
  int k = 10;  ///< components for EM, k_max for VEM
  int max_iters = 1000;
  double tol_scale = 1e-12;
  double prune_threshold = 1.0;
};

struct MultistartReport {
  FitResult best;
  std::optional<DirichletPosterior> posterior;  ///< set for VEM
  std::size_t best_index = 0;

  // One entry per restart, in restart order. Failed restarts have a NaN
  // objective and a nonempty failure message.
  std::vector<std::uint64_t> seeds;
  std::vector<double> all_objectives;
  std::vector<int> all_iterations;
  std::vector<int> all_surviving;
  std::vector<double> all_accuracies;  ///< empty unless true labels were given
  std::vector<std::string> failures;
};

/// Raised when every restart fails; the message lists each failure.
class MultistartFailure : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// Seed used by restart `index` of a run with master seed `master`.
std::uint64_t restart_seed(std::uint64_t master, std::size_t index);

/// Runs `config.restarts` independent fits from uniform random
/// responsibilities and keeps the one with the largest final objective
/// (exact ties go to the smaller seed). Restarts run in parallel over the
/// OpenMP thread pool; the report does not depend on the thread count.
///
/// When `true_labels` is given, per-restart permutation-matched accuracy is
/// recorded as well.
MultistartReport multistart_fit(const SufficientStats& stats, const MultistartConfig& config, std::uint64_t seed,
                                const std::vector<int>* true_labels = nullptr);

/// Serial reference for `multistart_fit`; produces an identical report.
MultistartReport multistart_fit_serial(const SufficientStats& stats, const MultistartConfig& config,
                                       std::uint64_t seed, const std::vector<int>* true_labels = nullptr);

}  // namespace mcmix
