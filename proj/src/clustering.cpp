#include "mcmix/clustering.hpp"

#include <cmath>
#include <limits>

#include "mcmix/rng.hpp"

namespace mcmix {

namespace {

double squared_distance(const Eigen::Ref<const Eigen::RowVectorXd>& x, const Eigen::Ref<const Eigen::RowVectorXd>& y) {
  return (x - y).squaredNorm();
}

Eigen::MatrixXd seed_centers(const PointSet& points, int s, Rng& rng) {
  const auto M = points.rows();
  Eigen::MatrixXd centers(s, points.cols());
  std::vector<char> chosen(M, 0);
  Eigen::VectorXd d2 = Eigen::VectorXd::Constant(M, std::numeric_limits<double>::infinity());

  auto pick = [&](Eigen::Index m, int c) {
    chosen[m] = 1;
    centers.row(c) = points.row(m);
    for (Eigen::Index q = 0; q < M; ++q) d2(q) = std::min(d2(q), squared_distance(points.row(q), points.row(m)));
  };

  pick(std::min<Eigen::Index>(static_cast<Eigen::Index>(rng.uniform() * M), M - 1), 0);
  for (int c = 1; c < s; ++c) {
    const double total = d2.sum();
    Eigen::Index next = -1;
    if (total > 0.0) {
      const double u = rng.uniform() * total;
      double acc = 0.0;
      for (Eigen::Index q = 0; q < M; ++q) {
        acc += d2(q);
        if (u < acc && d2(q) > 0.0) {
          next = q;
          break;
        }
      }
      if (next < 0)
        for (Eigen::Index q = M - 1; q >= 0; --q)
          if (d2(q) > 0.0) {
            next = q;
            break;
          }
    }
    // All remaining points coincide with a center: take the first unused one.
    if (next < 0)
      for (Eigen::Index q = 0; q < M; ++q)
        if (!chosen[q]) {
          next = q;
          break;
        }
    pick(next, c);
  }
  return centers;
}

double assign_all(const Eigen::MatrixXd& centers, const PointSet& points, std::vector<int>& out) {
  double total = 0.0;
  for (Eigen::Index m = 0; m < points.rows(); ++m) {
    const int c = nearest_center(centers, points.row(m));
    out[m] = c;
    total += squared_distance(points.row(m), centers.row(c));
  }
  return total;
}

}  // namespace

int nearest_center(const Eigen::MatrixXd& centers, const Eigen::Ref<const Eigen::RowVectorXd>& x) {
  int best = 0;
  double best_d = std::numeric_limits<double>::infinity();
  for (Eigen::Index c = 0; c < centers.rows(); ++c) {
    const double d = squared_distance(x, centers.row(c));
    if (d < best_d) {
      best_d = d;
      best = static_cast<int>(c);
    }
  }
  return best;
}

std::vector<int> assign_nearest(const Eigen::MatrixXd& centers, const PointSet& points) {
  if (points.cols() != centers.cols()) throw ValidationError("point dimension does not match the centers");
  std::vector<int> out(points.rows());
  assign_all(centers, points, out);
  return out;
}

KMeansResult kmeans(const PointSet& points, int s, std::uint64_t seed, int max_iters) {
  const auto M = points.rows();
  if (M < 1) throw ValidationError("kmeans needs at least one point");
  if (s < 1 || s > M) throw ValidationError("kmeans needs 1 <= s <= M");
  if (max_iters < 1) throw ValidationError("max_iters must be at least 1");

  Rng rng(seed);
  KMeansResult res;
  res.centers = seed_centers(points, s, rng);
  res.assignments.assign(M, -1);
  std::vector<int> next(M);

  for (int iter = 1; iter <= max_iters; ++iter) {
    const double objective = assign_all(res.centers, points, next);
    res.iterations = iter;
    res.objective_trace.push_back(objective);
    if (next == res.assignments) break;
    res.assignments = next;

    Eigen::MatrixXd sums = Eigen::MatrixXd::Zero(s, points.cols());
    std::vector<int> sizes(s, 0);
    for (Eigen::Index m = 0; m < M; ++m) {
      sums.row(res.assignments[m]) += points.row(m);
      ++sizes[res.assignments[m]];
    }
    for (int c = 0; c < s; ++c) {
      if (sizes[c] > 0) {
        res.centers.row(c) = sums.row(c) / sizes[c];
        continue;
      }
      // Empty cluster: move it onto the point farthest from its own center.
      Eigen::Index far = 0;
      double far_d = -1.0;
      for (Eigen::Index m = 0; m < M; ++m) {
        const double d = squared_distance(points.row(m), res.centers.row(res.assignments[m]));
        if (d > far_d) {
          far_d = d;
          far = m;
        }
      }
      res.centers.row(c) = points.row(far);
    }
  }
  return res;
}

void KernelSpec::validate() const {
  if (name != "gaussian") throw ValidationError("unknown kernel '" + name + "'");
  if (!(sigma > 0.0)) throw ValidationError("kernel bandwidth must be positive");
}

double KernelSpec::operator()(const Eigen::Ref<const Eigen::RowVectorXd>& x,
                              const Eigen::Ref<const Eigen::RowVectorXd>& y) const {
  return std::exp(-squared_distance(x, y) / (2.0 * sigma * sigma));
}

Eigen::MatrixXd kernel_matrix(const KernelSpec& kernel, const PointSet& X, const PointSet& Y) {
  kernel.validate();
  if (X.cols() != Y.cols()) throw ValidationError("kernel_matrix: dimension mismatch");
  Eigen::MatrixXd K(X.rows(), Y.rows());
  const auto rows = static_cast<std::ptrdiff_t>(X.rows());
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t a = 0; a < rows; ++a)
    for (Eigen::Index b = 0; b < Y.rows(); ++b) K(a, b) = kernel(X.row(a), Y.row(b));
  return K;
}

Eigen::MatrixXd kernel_matrix_serial(const KernelSpec& kernel, const PointSet& X, const PointSet& Y) {
  kernel.validate();
  if (X.cols() != Y.cols()) throw ValidationError("kernel_matrix: dimension mismatch");
  Eigen::MatrixXd K(X.rows(), Y.rows());
  for (Eigen::Index a = 0; a < X.rows(); ++a)
    for (Eigen::Index b = 0; b < Y.rows(); ++b) K(a, b) = kernel(X.row(a), Y.row(b));
  return K;
}

Eigen::MatrixXd SpectralModel::embed(const PointSet& points) const {
  if (points.cols() != training.cols()) throw ValidationError("point dimension does not match the training data");
  // (r x M) * (M x Q) -> transpose to Q x r
  return (alpha * kernel_matrix(kernel, training, points)).transpose();
}

SpectralModel spectral_fit(const PointSet& points, const KernelSpec& kernel, int s, int r, std::uint64_t seed) {
  kernel.validate();
  const auto M = points.rows();
  if (s < 1 || M < s) throw ValidationError("spectral_fit needs 1 <= s <= M");
  if (r == 0) r = s;
  if (r < 1 || r > M) throw ValidationError("embedding dimension must be in [1, M]");

  const Eigen::MatrixXd K = kernel_matrix(kernel, points, points);
  const Eigen::VectorXd degree = K.rowwise().sum();
  for (Eigen::Index m = 0; m < M; ++m)
    if (!(degree(m) > 0.0)) throw ValidationError("point " + std::to_string(m) + " has zero kernel row sum");
  const Eigen::VectorXd inv_sqrt = degree.array().rsqrt();
  const Eigen::MatrixXd A = inv_sqrt.asDiagonal() * K * inv_sqrt.asDiagonal();

  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(A);
  if (eig.info() != Eigen::Success) throw ConvergenceError("symmetric eigensolver did not converge");

  SpectralModel model;
  model.kernel = kernel;
  model.training = points;
  model.eigenvalues.resize(r);
  Eigen::MatrixXd V(M, r);
  for (int c = 0; c < r; ++c) {
    // Eigenvalues come in ascending order.
    const Eigen::Index col = M - 1 - c;
    model.eigenvalues(c) = eig.eigenvalues()(col);
    Eigen::VectorXd v = eig.eigenvectors().col(col);
    const double scale = v.cwiseAbs().maxCoeff();
    for (Eigen::Index m = 0; m < M; ++m) {
      if (std::abs(v(m)) > 1e-10 * scale) {
        if (v(m) < 0.0) v = -v;
        break;
      }
    }
    V.col(c) = inv_sqrt.asDiagonal() * v;
  }

  model.ridge = 1e-10 * K.trace() / static_cast<double>(M);
  const Eigen::MatrixXd regularized = K + model.ridge * Eigen::MatrixXd::Identity(M, M);
  Eigen::LDLT<Eigen::MatrixXd> solver(regularized);
  if (solver.info() != Eigen::Success) throw ConvergenceError("kernel system could not be factorized");
  model.alpha = solver.solve(V).transpose();
  model.embedding = std::move(V);

  KMeansResult km = kmeans(model.embedding, s, seed);
  model.centers = std::move(km.centers);
  model.training_assignments = std::move(km.assignments);
  return model;
}

std::vector<int> spectral_assign(const SpectralModel& model, const PointSet& points) {
  return assign_nearest(model.centers, model.embed(points));
}

TrajectoryDataset discretize_trajectories(const SpectralModel& model, const std::vector<PointSet>& trajectories) {
  std::vector<Trajectory> out;
  out.reserve(trajectories.size());
  for (const auto& traj : trajectories) out.push_back(spectral_assign(model, traj));
  return TrajectoryDataset(std::move(out), model.s());
}

TrajectoryDataset discretize_trajectories(const Eigen::MatrixXd& centers, const std::vector<PointSet>& trajectories) {
  std::vector<Trajectory> out;
  out.reserve(trajectories.size());
  for (const auto& traj : trajectories) out.push_back(assign_nearest(centers, traj));
  return TrajectoryDataset(std::move(out), static_cast<int>(centers.rows()));
}

}  // namespace mcmix
