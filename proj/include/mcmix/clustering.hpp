#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "mcmix/model.hpp"

namespace mcmix {

/// M points in R^D, one per row.
using PointSet = Eigen::MatrixXd;

/// Index of the nearest center (rows of `centers`); ties go to the lowest index.
int nearest_center(const Eigen::MatrixXd& centers, const Eigen::Ref<const Eigen::RowVectorXd>& x);
std::vector<int> assign_nearest(const Eigen::MatrixXd& centers, const PointSet& points);

struct KMeansResult {
  Eigen::MatrixXd centers;  ///< s x D
  std::vector<int> assignments;
  std::vector<double> objective_trace;  ///< sum of squared distances after each assignment step
  int iterations = 0;

  double objective() const { return objective_trace.empty() ? 0.0 : objective_trace.back(); }
};

/// Lloyd's algorithm from distance-squared weighted (k-means++) seeding.
///
/// Iterates assign -> update until the assignment is a fixed point or
/// `max_iters` is reached. A cluster that empties is reseeded at the point
/// farthest from its current center. Throws ValidationError unless
/// 1 <= s <= M.
KMeansResult kmeans(const PointSet& points, int s, std::uint64_t seed, int max_iters = 300);

/// Kernel used for spectral clustering. Only "gaussian",
/// k(x, y) = exp(-|x - y|^2 / (2 sigma^2)), is built in.
struct KernelSpec {
  std::string name = "gaussian";
  double sigma = 1.0;

  void validate() const;
  double operator()(const Eigen::Ref<const Eigen::RowVectorXd>& x, const Eigen::Ref<const Eigen::RowVectorXd>& y) const;
};

/// K(a, b) = k(X_a, Y_b). Rows of the output are parallelized with OpenMP.
Eigen::MatrixXd kernel_matrix(const KernelSpec& kernel, const PointSet& X, const PointSet& Y);
Eigen::MatrixXd kernel_matrix_serial(const KernelSpec& kernel, const PointSet& X, const PointSet& Y);

struct SpectralModel {
  KernelSpec kernel;
  PointSet training;          ///< M x D
  Eigen::MatrixXd alpha;      ///< r x M, solves (K + eps I) alpha^T = V
  Eigen::MatrixXd embedding;  ///< M x r, rescaled eigenvectors V = D^{-1/2} v
  Eigen::VectorXd eigenvalues;  ///< r leading eigenvalues of D^{-1/2} K D^{-1/2}
  Eigen::MatrixXd centers;    ///< s x r
  std::vector<int> training_assignments;
  double ridge = 0.0;

  int s() const { return static_cast<int>(centers.rows()); }
  int r() const { return static_cast<int>(alpha.rows()); }
  int dimension() const { return static_cast<int>(training.cols()); }

  /// f(x) = sum_m alpha(., m) k(x_m, x), one row per input point.
  Eigen::MatrixXd embed(const PointSet& points) const;
};

/// Spectral clustering with out-of-sample extension.
///
/// Builds K and D = diag(row sums), takes the r leading eigenvectors of
/// D^{-1/2} K D^{-1/2} (sign fixed so the first non-negligible entry is
/// positive), rescales by D^{-1/2}, solves (K + eps I) alpha^T = V with
/// eps = 1e-10 trace(K) / M, and runs k-means on the rows of V.
///
/// `r = 0` means r = s. Throws ValidationError for a point with zero kernel
/// row sum (naming its index) or when M < s, and ConvergenceError if the
/// eigensolver fails.
SpectralModel spectral_fit(const PointSet& points, const KernelSpec& kernel, int s, int r, std::uint64_t seed);

/// Nearest-center cluster of each point's embedding; ties to the lowest index.
std::vector<int> spectral_assign(const SpectralModel& model, const PointSet& points);

/// Maps each continuous trajectory (one sample per row) to cluster indices.
TrajectoryDataset discretize_trajectories(const SpectralModel& model, const std::vector<PointSet>& trajectories);

/// Same, for plain nearest-center cells (e.g. k-means centers in raw space).
TrajectoryDataset discretize_trajectories(const Eigen::MatrixXd& centers, const std::vector<PointSet>& trajectories);

}  // namespace mcmix
