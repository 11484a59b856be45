#pragma once

// Stochastic simulation of the mutual-inhibition self-activation (MISA)
// two-gene circuit.
//
// Each gene is in condition ij, i = activator bound, j = repressor bound,
// encoded as 2*i + j. Reactions (propensities in parentheses):
//   A_ij -> A_ij + a            (g_ij)          B_ij -> B_ij + b          (g_ij)
//   a -> 0                      (d a)           b -> 0                    (d b)
//   A_0j + 2a <-> A_1j          (h_a a(a-1), f_a)
//   B_0j + 2b <-> B_1j          (h_a b(b-1), f_a)
//   A_i0 + 2b <-> A_i1          (h_r b(b-1), f_r)
//   B_i0 + 2a <-> B_i1          (h_r a(a-1), f_r)
// Bimolecular propensities use the ordered-pair convention h x(x-1).

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "mcmix/clustering.hpp"
#include "mcmix/model.hpp"
#include "mcmix/rng.hpp"

namespace mcmix {

struct MisaParams {
  double g00 = 10.0;
  double g01 = 10.0;
  double g10 = 100.0;
  double g11 = 10.0;
  double d = 1.0;
  double h_a = 1e-1;
  double f_a = 1.0;
  double h_r = 1e-3;
  double f_r = 1.0;

  /// Production rate of a gene in condition `cond` (= 2*i + j).
  double production(int cond) const;
  /// Production and degradation rates must be positive; binding and
  /// unbinding rates nonnegative. Throws ValidationError otherwise.
  void validate() const;
};

struct MisaState {
  int gene_a = 0;  ///< condition 2*i + j of gene A
  int gene_b = 0;
  long a = 0;
  long b = 0;

  bool operator==(const MisaState&) const = default;
};

/// Two-character condition label, e.g. "10" for activator bound, no repressor.
std::string condition_label(int cond);

inline constexpr int kMisaReactions = 12;

enum MisaReaction : int {
  kProduceA, kProduceB, kDegradeA, kDegradeB,
  kActivateA, kDeactivateA, kActivateB, kDeactivateB,
  kRepressA, kDerepressA, kRepressB, kDerepressB,
};

std::array<double, kMisaReactions> misa_propensities(const MisaState& state, const MisaParams& params);

/// Applies reaction `r` to `state`. Throws ValidationError if it would make a
/// count negative or the reaction is not enabled in the current condition.
void apply_reaction(MisaState& state, int r);

struct SsaEvent {
  MisaState state;
  double wait = 0.0;
  int reaction = -1;
};

/// One Gillespie step: exponential waiting time with rate sum_r a_r and a
/// reaction chosen with probability a_r / sum.
SsaEvent misa_step_ssa(const MisaState& state, const MisaParams& params, Rng& rng);

struct MisaSample {
  double t = 0.0;
  MisaState state;
};

struct MisaTrajectory {
  std::vector<MisaSample> samples;

  /// (a, b) per sample, one row each.
  PointSet points() const;
};

/// Runs the SSA from both genes in condition 00 with a = b = 0, discards
/// `burn_in` time units, then records the state at t = 0, dt, 2 dt, ... <= t_end
/// (the state just before each sample time). Deterministic given `seed`.
MisaTrajectory misa_simulate(const MisaParams& params, double t_end, double sample_interval, std::uint64_t seed,
                             double burn_in = 100.0);

struct MisaExperimentConfig {
  double f_r_1 = 0.01;
  double f_r_2 = 0.25;
  int n_per_group = 15;
  int T = 25;  ///< transitions per trajectory
  double sigma = 50.0;
  int states = 4;
  int k_max = 10;
  int restarts = 100;
  double burn_in = 100.0;
  /// Spectral clustering is fit on at most this many pooled samples.
  int max_fit_points = 1000;
  MisaParams base;
};

struct MisaExperimentResult {
  std::vector<MisaTrajectory> raw;
  TrajectoryDataset data;
  std::vector<int> true_labels;
  std::vector<int> estimated_labels;
  double accuracy = 0.0;
  int surviving_components = 0;
  SpectralModel model;
};

/// Two groups of MISA trajectories (f_r_1 and f_r_2) -> spectral states ->
/// multistart VEM -> permutation-matched accuracy against the group labels.
MisaExperimentResult misa_mixture_experiment(const MisaExperimentConfig& config, std::uint64_t seed);

}  // namespace mcmix
