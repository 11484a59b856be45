#pragma once

#include <vector>

#include <Eigen/Dense>

namespace mcmix {

/// Minimum-cost perfect matching on a square cost matrix (Hungarian
/// algorithm, O(n^3)). Returns the column assigned to each row.
std::vector<int> solve_assignment(const Eigen::MatrixXd& cost);

struct AccuracyResult {
  double value = 0.0;
  /// permutation[e] is the true label matched to estimated label e. The
  /// label space is padded to max(k_true, k_est); matches into padding
  /// (values >= k_true) mean "no true class".
  std::vector<int> permutation;
};

/// Classification accuracy (1/N) sum 1{Z^n = pi(Zhat^n)} maximized over
/// bijections pi of the padded label space. Labels must be nonnegative.
/// Throws ValidationError on length mismatch, empty input, or negative labels.
AccuracyResult accuracy(const std::vector<int>& true_labels, const std::vector<int>& est_labels);

struct ConfusionMatrix {
  /// counts(i, j) = #{n : true = i, permuted est = j}. Rows cover the true
  /// labels, columns the padded permuted label space.
  Eigen::MatrixXi counts;

  int total() const { return counts.sum(); }
};

/// Throws ValidationError if `permutation` is not a bijection on
/// [0, permutation.size()) or does not cover every estimated label.
ConfusionMatrix confusion(const std::vector<int>& true_labels, const std::vector<int>& est_labels,
                          const std::vector<int>& permutation);

}  // namespace mcmix
