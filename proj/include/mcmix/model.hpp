#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "mcmix/errors.hpp"

namespace mcmix {

/// A discrete trajectory Y_0, ..., Y_T of 0-based state indices.
using Trajectory = std::vector<int>;

/// Collection of discrete trajectories over the state space {0, ..., s-1}.
///
/// Trajectories may have different lengths. A trajectory with a single
/// state has zero transitions; it is allowed, and reported by
/// `short_trajectories()`.
class TrajectoryDataset {
public:
  TrajectoryDataset() = default;
  /// Throws ValidationError if a state is outside [0, num_states) or a
  /// trajectory is empty.
  TrajectoryDataset(std::vector<Trajectory> trajectories, int num_states);

  int num_states() const { return num_states_; }
  std::size_t size() const { return trajectories_.size(); }
  bool empty() const { return trajectories_.empty(); }

  const Trajectory& operator[](std::size_t n) const { return trajectories_[n]; }
  const std::vector<Trajectory>& trajectories() const { return trajectories_; }

  /// Transition count T_n = length - 1.
  std::size_t transitions(std::size_t n) const { return trajectories_[n].size() - 1; }
  double mean_transitions() const;
  /// Indices of trajectories with zero transitions.
  std::vector<std::size_t> short_trajectories() const;

  /// Appends the trajectories of `other` (which must share the state count).
  void append(const TrajectoryDataset& other);

private:
  std::vector<Trajectory> trajectories_;
  int num_states_ = 0;
};

/// Parameters (mu, nu_i, P_i) of a k-component Markov chain mixture.
struct MixtureParams {
  Eigen::VectorXd mu;              ///< length k
  Eigen::MatrixXd nu;              ///< k x s, row i is nu_i
  std::vector<Eigen::MatrixXd> P;  ///< k row-stochastic s x s matrices

  int k() const { return static_cast<int>(mu.size()); }
  int s() const { return static_cast<int>(nu.cols()); }

  /// Throws ValidationError on shape mismatch, negative entries, or any
  /// probability vector whose sum is off by more than `tol`.
  void validate(double tol = 1e-9) const;
};

/// Parameters with every probability vector drawn uniformly from its simplex.
MixtureParams random_params(int k, int s, std::uint64_t seed);

struct TransitionCount {
  int from;
  int to;
  double count;
};

/// Per-trajectory sufficient statistics: the initial state (U^n as an index)
/// and the nonzero transition counts V^n(alpha, beta), stored sparsely.
class SufficientStats {
public:
  SufficientStats() = default;
  explicit SufficientStats(const TrajectoryDataset& data);

  int num_states() const { return num_states_; }
  std::size_t size() const { return initial_.size(); }

  int initial_state(std::size_t n) const { return initial_[n]; }
  std::span<const TransitionCount> transitions(std::size_t n) const {
    return {entries_.data() + offsets_[n], entries_.data() + offsets_[n + 1]};
  }
  std::size_t transition_total(std::size_t n) const { return lengths_[n]; }
  double mean_transitions() const;

  /// Dense U^n (0/1 indicator of the initial state).
  Eigen::VectorXd U(std::size_t n) const;
  /// Dense V^n.
  Eigen::MatrixXd V(std::size_t n) const;

  /// Keeps only the trajectories listed in `order`, in that order.
  SufficientStats select(std::span<const std::size_t> order) const;

private:
  int num_states_ = 0;
  std::vector<int> initial_;
  std::vector<std::size_t> lengths_;
  std::vector<std::size_t> offsets_{0};
  std::vector<TransitionCount> entries_;
};

SufficientStats sufficient_stats(const TrajectoryDataset& data);

/// Posterior label probabilities gamma[n][i] = P{Z^n = i}, N x k.
struct Responsibilities {
  Eigen::MatrixXd gamma;

  std::size_t size() const { return static_cast<std::size_t>(gamma.rows()); }
  int k() const { return static_cast<int>(gamma.cols()); }
  /// Throws ValidationError unless every row lies on the simplex within `tol`.
  void validate(double tol = 1e-9) const;
};

/// Row-wise argmax; ties go to the lowest index.
std::vector<int> argmax_labels(const Eigen::MatrixXd& rows);

struct FitResult {
  MixtureParams params;
  Responsibilities responsibilities;
  std::vector<int> labels;
  std::vector<double> objective_trace;
  bool converged = false;
  int iterations = 0;
  int surviving_components = 0;

  double objective() const { return objective_trace.empty() ? 0.0 : objective_trace.back(); }
};

/// Number of distinct components that receive at least one label.
int count_labelled_components(const std::vector<int>& labels, int k);

struct SampledMixture {
  TrajectoryDataset data;
  std::vector<int> labels;
};

/// Draws N trajectories with T transitions each from the mixture.
/// Trajectory n uses stream n of `seed`, so prefixes are stable under N.
SampledMixture sample_mixture(const MixtureParams& params, std::size_t N, std::size_t T,
                              std::uint64_t seed);
/// Serial reference for `sample_mixture`; identical output.
SampledMixture sample_mixture_serial(const MixtureParams& params, std::size_t N, std::size_t T,
                                     std::uint64_t seed);

/// Dirichlet mean, counts / sum(counts). Throws ValidationError on an empty,
/// negative, or zero-sum input.
Eigen::VectorXd dirichlet_mean(const Eigen::VectorXd& counts);

/// Variance of coordinate i under Dir(counts).
double dirichlet_variance(const Eigen::VectorXd& counts, int i);

}  // namespace mcmix
