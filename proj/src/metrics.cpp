#include "mcmix/metrics.hpp"

#include <algorithm>
#include <limits>

#include "mcmix/errors.hpp"

namespace mcmix {

namespace {

int label_count(const std::vector<int>& labels) {
  int top = -1;
  for (int z : labels) {
    if (z < 0) throw ValidationError("labels must be nonnegative");
    top = std::max(top, z);
  }
  return top + 1;
}

}  // namespace

std::vector<int> solve_assignment(const Eigen::MatrixXd& cost) {
  const int n = static_cast<int>(cost.rows());
  if (cost.cols() != n) throw ValidationError("assignment cost matrix must be square");
  const double inf = std::numeric_limits<double>::infinity();
  // Potentials u (rows), v (cols); p[j] = row matched to column j. Index 0 is
  // a sentinel, real rows and columns are 1..n.
  std::vector<double> u(n + 1, 0.0), v(n + 1, 0.0);
  std::vector<int> p(n + 1, 0), way(n + 1, 0);
  for (int i = 1; i <= n; ++i) {
    p[0] = i;
    int j0 = 0;
    std::vector<double> minv(n + 1, inf);
    std::vector<char> used(n + 1, 0);
    do {
      used[j0] = 1;
      const int i0 = p[j0];
      double delta = inf;
      int j1 = 0;
      for (int j = 1; j <= n; ++j) {
        if (used[j]) continue;
        const double cur = cost(i0 - 1, j - 1) - u[i0] - v[j];
        if (cur < minv[j]) {
          minv[j] = cur;
          way[j] = j0;
        }
        if (minv[j] < delta) {
          delta = minv[j];
          j1 = j;
        }
      }
      for (int j = 0; j <= n; ++j) {
        if (used[j]) {
          u[p[j]] += delta;
          v[j] -= delta;
        } else {
          minv[j] -= delta;
        }
      }
      j0 = j1;
    } while (p[j0] != 0);
    do {
      const int j1 = way[j0];
      p[j0] = p[j1];
      j0 = j1;
    } while (j0 != 0);
  }
  std::vector<int> row_to_col(n, -1);
  for (int j = 1; j <= n; ++j)
    if (p[j] > 0) row_to_col[p[j] - 1] = j - 1;
  return row_to_col;
}

AccuracyResult accuracy(const std::vector<int>& true_labels, const std::vector<int>& est_labels) {
  if (true_labels.size() != est_labels.size()) throw ValidationError("label vectors differ in length");
  if (true_labels.empty()) throw ValidationError("accuracy of an empty labelling");
  const int size = std::max(label_count(true_labels), label_count(est_labels));

  // cost(e, t) = -#{n : est = e, true = t}
  Eigen::MatrixXd cost = Eigen::MatrixXd::Zero(size, size);
  for (std::size_t n = 0; n < true_labels.size(); ++n) cost(est_labels[n], true_labels[n]) -= 1.0;

  AccuracyResult out;
  out.permutation = solve_assignment(cost);
  double hits = 0.0;
  for (int e = 0; e < size; ++e) hits -= cost(e, out.permutation[e]);
  out.value = hits / static_cast<double>(true_labels.size());
  return out;
}

ConfusionMatrix confusion(const std::vector<int>& true_labels, const std::vector<int>& est_labels,
                          const std::vector<int>& permutation) {
  if (true_labels.size() != est_labels.size()) throw ValidationError("label vectors differ in length");
  const int size = static_cast<int>(permutation.size());
  std::vector<char> seen(size, 0);
  for (int target : permutation) {
    if (target < 0 || target >= size || seen[target]) throw ValidationError("permutation is not a bijection");
    seen[target] = 1;
  }
  if (label_count(est_labels) > size) throw ValidationError("permutation does not cover every estimated label");
  const int rows = std::max(label_count(true_labels), 1);

  ConfusionMatrix out;
  out.counts = Eigen::MatrixXi::Zero(rows, size);
  for (std::size_t n = 0; n < true_labels.size(); ++n) out.counts(true_labels[n], permutation[est_labels[n]]) += 1;
  return out;
}

}  // namespace mcmix
