#include "mcmix/model.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "mcmix/rng.hpp"

namespace mcmix {

namespace {

int sample_index(const double* probs, int n, double u) {
  double acc = 0.0;
  for (int i = 0; i < n; ++i) {
    acc += probs[i];
    if (u < acc) return i;
  }
  // u landed in the rounding slack above the last cumulative sum; return the
  // last index with positive mass.
  for (int i = n - 1; i >= 0; --i)
    if (probs[i] > 0.0) return i;
  return n - 1;
}

void check_simplex(const Eigen::Ref<const Eigen::VectorXd>& v, double tol, const std::string& name) {
  if ((v.array() < 0.0).any() || !v.allFinite())
    throw ValidationError(name + " has negative or non-finite entries");
  if (std::abs(v.sum() - 1.0) > tol)
    throw ValidationError(name + " sums to " + std::to_string(v.sum()) + ", not 1");
}

Eigen::VectorXd uniform_simplex(int n, Rng& rng) {
  Eigen::VectorXd v(n);
  for (int i = 0; i < n; ++i) v(i) = rng.exponential();
  return v / v.sum();
}

}  // namespace

TrajectoryDataset::TrajectoryDataset(std::vector<Trajectory> trajectories, int num_states)
    : trajectories_(std::move(trajectories)), num_states_(num_states) {
  if (num_states_ < 1) throw ValidationError("state count must be at least 1");
  for (std::size_t n = 0; n < trajectories_.size(); ++n) {
    const auto& traj = trajectories_[n];
    if (traj.empty()) throw ValidationError("trajectory " + std::to_string(n) + " is empty");
    for (int y : traj) {
      if (y < 0 || y >= num_states_)
        throw ValidationError("trajectory " + std::to_string(n) + " has state " + std::to_string(y) +
                              " outside [0, " + std::to_string(num_states_) + ")");
    }
  }
}

double TrajectoryDataset::mean_transitions() const {
  if (trajectories_.empty()) return 0.0;
  double total = 0.0;
  for (std::size_t n = 0; n < size(); ++n) total += static_cast<double>(transitions(n));
  return total / static_cast<double>(size());
}

std::vector<std::size_t> TrajectoryDataset::short_trajectories() const {
  std::vector<std::size_t> out;
  for (std::size_t n = 0; n < size(); ++n)
    if (trajectories_[n].size() == 1) out.push_back(n);
  return out;
}

void TrajectoryDataset::append(const TrajectoryDataset& other) {
  if (empty() && num_states_ == 0) num_states_ = other.num_states_;
  if (other.num_states_ != num_states_) throw ValidationError("cannot append datasets with different state counts");
  trajectories_.insert(trajectories_.end(), other.trajectories_.begin(), other.trajectories_.end());
}

void MixtureParams::validate(double tol) const {
  const int k_ = k();
  const int s_ = s();
  if (k_ < 1 || s_ < 1) throw ValidationError("mixture needs k >= 1 and s >= 1");
  if (nu.rows() != k_) throw ValidationError("nu must have k rows");
  if (static_cast<int>(P.size()) != k_) throw ValidationError("P must hold k matrices");
  check_simplex(mu, tol, "mu");
  for (int i = 0; i < k_; ++i) {
    check_simplex(nu.row(i).transpose(), tol, "nu_" + std::to_string(i));
    if (P[i].rows() != s_ || P[i].cols() != s_) throw ValidationError("P_" + std::to_string(i) + " must be s x s");
    for (int a = 0; a < s_; ++a)
      check_simplex(P[i].row(a).transpose(), tol, "row " + std::to_string(a) + " of P_" + std::to_string(i));
  }
}

MixtureParams random_params(int k, int s, std::uint64_t seed) {
  if (k < 1 || s < 1) throw ValidationError("random_params needs k >= 1 and s >= 1");
  Rng rng(seed);
  MixtureParams p;
  p.mu = uniform_simplex(k, rng);
  p.nu.resize(k, s);
  p.P.assign(k, Eigen::MatrixXd(s, s));
  for (int i = 0; i < k; ++i) {
    p.nu.row(i) = uniform_simplex(s, rng).transpose();
    for (int a = 0; a < s; ++a) p.P[i].row(a) = uniform_simplex(s, rng).transpose();
  }
  return p;
}

SufficientStats::SufficientStats(const TrajectoryDataset& data) : num_states_(data.num_states()) {
  const int s = num_states_;
  initial_.reserve(data.size());
  lengths_.reserve(data.size());
  offsets_.reserve(data.size() + 1);
  std::vector<double> dense(static_cast<std::size_t>(s) * s);
  for (const auto& traj : data.trajectories()) {
    initial_.push_back(traj.front());
    lengths_.push_back(traj.size() - 1);
    // Entries come out sorted by (from, to).
    for (std::size_t t = 0; t + 1 < traj.size(); ++t) dense[traj[t] * s + traj[t + 1]] += 1.0;
    for (int a = 0; a < s; ++a) {
      for (int b = 0; b < s; ++b) {
        double& c = dense[a * s + b];
        if (c > 0.0) {
          entries_.push_back({a, b, c});
          c = 0.0;
        }
      }
    }
    offsets_.push_back(entries_.size());
  }
}

double SufficientStats::mean_transitions() const {
  if (lengths_.empty()) return 0.0;
  return static_cast<double>(std::accumulate(lengths_.begin(), lengths_.end(), std::size_t{0})) /
         static_cast<double>(lengths_.size());
}

Eigen::VectorXd SufficientStats::U(std::size_t n) const {
  Eigen::VectorXd u = Eigen::VectorXd::Zero(num_states_);
  u(initial_[n]) = 1.0;
  return u;
}

Eigen::MatrixXd SufficientStats::V(std::size_t n) const {
  Eigen::MatrixXd v = Eigen::MatrixXd::Zero(num_states_, num_states_);
  for (const auto& e : transitions(n)) v(e.from, e.to) = e.count;
  return v;
}

SufficientStats SufficientStats::select(std::span<const std::size_t> order) const {
  SufficientStats out;
  out.num_states_ = num_states_;
  for (std::size_t n : order) {
    out.initial_.push_back(initial_.at(n));
    out.lengths_.push_back(lengths_.at(n));
    auto tr = transitions(n);
    out.entries_.insert(out.entries_.end(), tr.begin(), tr.end());
    out.offsets_.push_back(out.entries_.size());
  }
  return out;
}

SufficientStats sufficient_stats(const TrajectoryDataset& data) { return SufficientStats(data); }

void Responsibilities::validate(double tol) const {
  for (Eigen::Index n = 0; n < gamma.rows(); ++n) {
    if ((gamma.row(n).array() < 0.0).any() || !gamma.row(n).allFinite())
      throw ValidationError("responsibility row " + std::to_string(n) + " has invalid entries");
    if (std::abs(gamma.row(n).sum() - 1.0) > tol)
      throw ValidationError("responsibility row " + std::to_string(n) + " does not sum to 1");
  }
}

std::vector<int> argmax_labels(const Eigen::MatrixXd& rows) {
  std::vector<int> labels(static_cast<std::size_t>(rows.rows()), 0);
  for (Eigen::Index n = 0; n < rows.rows(); ++n) {
    int best = 0;
    for (Eigen::Index i = 1; i < rows.cols(); ++i)
      if (rows(n, i) > rows(n, best)) best = static_cast<int>(i);
    labels[n] = best;
  }
  return labels;
}

int count_labelled_components(const std::vector<int>& labels, int k) {
  std::vector<char> used(static_cast<std::size_t>(k), 0);
  for (int z : labels)
    if (z >= 0 && z < k) used[z] = 1;
  return static_cast<int>(std::count(used.begin(), used.end(), 1));
}

namespace {

SampledMixture sample_mixture_impl(const MixtureParams& params, std::size_t N, std::size_t T, std::uint64_t seed,
                                   bool parallel) {
  params.validate(1e-9);
  const int k = params.k();
  const int s = params.s();

  // Row-major copies so each categorical draw reads a contiguous row.
  const std::vector<double> mu(params.mu.data(), params.mu.data() + k);
  std::vector<double> nu(static_cast<std::size_t>(k) * s);
  std::vector<double> P(static_cast<std::size_t>(k) * s * s);
  for (int i = 0; i < k; ++i)
    for (int a = 0; a < s; ++a) {
      nu[i * s + a] = params.nu(i, a);
      for (int b = 0; b < s; ++b) P[(static_cast<std::size_t>(i) * s + a) * s + b] = params.P[i](a, b);
    }

  std::vector<Trajectory> trajectories(N, Trajectory(T + 1));
  std::vector<int> labels(N);
  const auto count = static_cast<std::ptrdiff_t>(N);

#pragma omp parallel for schedule(static) if (parallel)
  for (std::ptrdiff_t n = 0; n < count; ++n) {
    Rng rng(seed, static_cast<std::uint64_t>(n));
    const int z = sample_index(mu.data(), k, rng.uniform());
    labels[n] = z;
    Trajectory& y = trajectories[n];
    y[0] = sample_index(&nu[z * s], s, rng.uniform());
    const double* Pz = &P[static_cast<std::size_t>(z) * s * s];
    for (std::size_t t = 1; t <= T; ++t) y[t] = sample_index(Pz + y[t - 1] * s, s, rng.uniform());
  }
  return {TrajectoryDataset(std::move(trajectories), s), std::move(labels)};
}

}  // namespace

SampledMixture sample_mixture(const MixtureParams& params, std::size_t N, std::size_t T, std::uint64_t seed) {
  return sample_mixture_impl(params, N, T, seed, true);
}

SampledMixture sample_mixture_serial(const MixtureParams& params, std::size_t N, std::size_t T, std::uint64_t seed) {
  return sample_mixture_impl(params, N, T, seed, false);
}

Eigen::VectorXd dirichlet_mean(const Eigen::VectorXd& counts) {
  if (counts.size() == 0) throw ValidationError("dirichlet_mean of an empty vector");
  if ((counts.array() < 0.0).any()) throw ValidationError("dirichlet_mean needs nonnegative counts");
  const double total = counts.sum();
  if (!(total > 0.0)) throw ValidationError("dirichlet_mean of a zero-sum vector");
  return counts / total;
}

double dirichlet_variance(const Eigen::VectorXd& counts, int i) {
  if (i < 0 || i >= counts.size()) throw ValidationError("dirichlet_variance index out of range");
  if ((counts.array() < 0.0).any()) throw ValidationError("dirichlet_variance needs nonnegative counts");
  const double total = counts.sum();
  if (!(total > 0.0)) throw ValidationError("dirichlet_variance of a zero-sum vector");
  const double rest = total - counts(i);
  return counts(i) * rest / (total * total * (total + 1.0));
}

}  // namespace mcmix
