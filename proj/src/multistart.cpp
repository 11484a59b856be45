#include "mcmix/multistart.hpp"

#include <cmath>
#include <limits>
#include <sstream>

#include "mcmix/metrics.hpp"
#include "mcmix/rng.hpp"

namespace mcmix {

namespace {

struct Candidate {
  std::size_t index = 0;
  std::uint64_t seed = 0;
  FitResult fit;
  std::optional<DirichletPosterior> posterior;
  bool valid = false;
};

// Strict total order: larger objective wins, exact ties go to the smaller seed.
bool better(const Candidate& a, const Candidate& b) {
  if (!b.valid) return a.valid;
  if (!a.valid) return false;
  const double la = a.fit.objective();
  const double lb = b.fit.objective();
  if (la != lb) return la > lb;
  return a.seed < b.seed;
}

Candidate run_restart(const SufficientStats& stats, const MultistartConfig& config, std::size_t index,
                      std::uint64_t seed) {
  Candidate c;
  c.index = index;
  c.seed = seed;
  const Responsibilities init = sample_simplex_rows(stats.size(), config.k, seed);
  if (config.algorithm == Algorithm::em) {
    c.fit = em_fit(stats, init, EmConfig{config.max_iters, config.tol_scale});
  } else {
    VemResult r = vem_fit(stats, init, VemConfig{config.k, config.max_iters, config.tol_scale, config.prune_threshold});
    c.fit = std::move(r.fit);
    c.posterior = std::move(r.posterior);
  }
  c.valid = true;
  return c;
}

MultistartReport prepare(const SufficientStats& stats, const MultistartConfig& config, std::uint64_t seed,
                         const std::vector<int>* true_labels) {
  if (config.restarts < 1) throw ValidationError("restarts must be at least 1");
  if (config.k < 1) throw ValidationError("k must be at least 1");
  if (true_labels && true_labels->size() != stats.size())
    throw ValidationError("true labels must have one entry per trajectory");
  const auto R = static_cast<std::size_t>(config.restarts);
  MultistartReport report;
  report.seeds.resize(R);
  for (std::size_t r = 0; r < R; ++r) report.seeds[r] = restart_seed(seed, r);
  report.all_objectives.assign(R, std::numeric_limits<double>::quiet_NaN());
  report.all_iterations.assign(R, 0);
  report.all_surviving.assign(R, 0);
  if (true_labels) report.all_accuracies.assign(R, std::numeric_limits<double>::quiet_NaN());
  report.failures.assign(R, {});
  return report;
}

// Records the per-restart diagnostics for one finished (or failed) restart.
void record(MultistartReport& report, const Candidate& c, const std::vector<int>* true_labels) {
  report.all_objectives[c.index] = c.fit.objective();
  report.all_iterations[c.index] = c.fit.iterations;
  report.all_surviving[c.index] = c.fit.surviving_components;
  if (true_labels) report.all_accuracies[c.index] = accuracy(*true_labels, c.fit.labels).value;
}

Candidate attempt(const SufficientStats& stats, const MultistartConfig& config, MultistartReport& report,
                  std::size_t r, const std::vector<int>* true_labels) {
  try {
    Candidate c = run_restart(stats, config, r, report.seeds[r]);
    record(report, c, true_labels);
    return c;
  } catch (const std::exception& e) {
    report.failures[r] = e.what();
    return {};
  }
}

MultistartReport finish(MultistartReport report, Candidate best) {
  if (!best.valid) {
    std::ostringstream msg;
    msg << "all " << report.failures.size() << " restarts failed:";
    for (std::size_t r = 0; r < report.failures.size(); ++r) msg << "\n  restart " << r << ": " << report.failures[r];
    throw MultistartFailure(msg.str());
  }
  report.best_index = best.index;
  report.best = std::move(best.fit);
  report.posterior = std::move(best.posterior);
  return report;
}

}  // namespace

Responsibilities sample_simplex_rows(std::size_t N, int k, std::uint64_t seed) {
  if (k < 1) throw ValidationError("sample_simplex_rows needs k >= 1");
  Rng rng(seed);
  Responsibilities out;
  out.gamma.resize(static_cast<Eigen::Index>(N), k);
  for (Eigen::Index n = 0; n < out.gamma.rows(); ++n) {
    double total = 0.0;
    for (int i = 0; i < k; ++i) {
      const double e = rng.exponential();
      out.gamma(n, i) = e;
      total += e;
    }
    if (total > 0.0)
      out.gamma.row(n) /= total;
    else
      out.gamma.row(n).setConstant(1.0 / k);
  }
  return out;
}

Algorithm parse_algorithm(const std::string& name) {
  if (name == "em") return Algorithm::em;
  if (name == "vem") return Algorithm::vem;
  throw ValidationError("unknown algorithm '" + name + "' (expected em or vem)");
}

const char* to_string(Algorithm algorithm) { return algorithm == Algorithm::em ? "em" : "vem"; }

std::uint64_t restart_seed(std::uint64_t master, std::size_t index) { return derive_seed(master, index); }

MultistartReport multistart_fit(const SufficientStats& stats, const MultistartConfig& config, std::uint64_t seed,
                                const std::vector<int>* true_labels) {
  MultistartReport report = prepare(stats, config, seed, true_labels);
  const auto R = static_cast<std::ptrdiff_t>(config.restarts);
  Candidate best;

#pragma omp parallel
  {
    Candidate local;
#pragma omp for schedule(dynamic)
    for (std::ptrdiff_t r = 0; r < R; ++r) {
      Candidate c = attempt(stats, config, report, static_cast<std::size_t>(r), true_labels);
      if (better(c, local)) local = std::move(c);
    }
#pragma omp critical(mcmix_multistart_reduce)
    if (better(local, best)) best = std::move(local);
  }
  return finish(std::move(report), std::move(best));
}

MultistartReport multistart_fit_serial(const SufficientStats& stats, const MultistartConfig& config,
                                       std::uint64_t seed, const std::vector<int>* true_labels) {
  MultistartReport report = prepare(stats, config, seed, true_labels);
  Candidate best;
  for (std::size_t r = 0; r < static_cast<std::size_t>(config.restarts); ++r) {
    Candidate c = attempt(stats, config, report, r, true_labels);
    if (better(c, best)) best = std::move(c);
  }
  return finish(std::move(report), std::move(best));
}

}  // namespace mcmix
