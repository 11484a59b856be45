#include "mcmix/gene_circuit.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "mcmix/metrics.hpp"
#include "mcmix/multistart.hpp"

namespace mcmix {

namespace {

constexpr int kActivator = 2;  // bit for i in cond = 2*i + j
constexpr int kRepressor = 1;  // bit for j

double pairs(long x) { return static_cast<double>(x) * static_cast<double>(x - 1); }

}  // namespace

double MisaParams::production(int cond) const {
  switch (cond) {
    case 0: return g00;
    case 1: return g01;
    case 2: return g10;
    case 3: return g11;
    default: throw ValidationError("gene condition must be in [0, 4)");
  }
}

void MisaParams::validate() const {
  for (double g : {g00, g01, g10, g11, d})
    if (!(g > 0.0) || !std::isfinite(g)) throw ValidationError("production and degradation rates must be positive");
  for (double r : {h_a, f_a, h_r, f_r})
    if (!(r >= 0.0) || !std::isfinite(r)) throw ValidationError("binding and unbinding rates must be nonnegative");
}

std::string condition_label(int cond) {
  if (cond < 0 || cond > 3) throw ValidationError("gene condition must be in [0, 4)");
  return {static_cast<char>('0' + cond / 2), static_cast<char>('0' + cond % 2)};
}

std::array<double, kMisaReactions> misa_propensities(const MisaState& st, const MisaParams& p) {
  std::array<double, kMisaReactions> r{};
  r[kProduceA] = p.production(st.gene_a);
  r[kProduceB] = p.production(st.gene_b);
  r[kDegradeA] = p.d * static_cast<double>(st.a);
  r[kDegradeB] = p.d * static_cast<double>(st.b);
  const bool a_act = st.gene_a & kActivator, a_rep = st.gene_a & kRepressor;
  const bool b_act = st.gene_b & kActivator, b_rep = st.gene_b & kRepressor;
  r[kActivateA] = a_act ? 0.0 : p.h_a * pairs(st.a);
  r[kDeactivateA] = a_act ? p.f_a : 0.0;
  r[kActivateB] = b_act ? 0.0 : p.h_a * pairs(st.b);
  r[kDeactivateB] = b_act ? p.f_a : 0.0;
  r[kRepressA] = a_rep ? 0.0 : p.h_r * pairs(st.b);
  r[kDerepressA] = a_rep ? p.f_r : 0.0;
  r[kRepressB] = b_rep ? 0.0 : p.h_r * pairs(st.a);
  r[kDerepressB] = b_rep ? p.f_r : 0.0;
  return r;
}

void apply_reaction(MisaState& st, int r) {
  auto bind = [](int& gene, int bit, long& count) {
    if ((gene & bit) || count < 2) throw ValidationError("binding reaction not enabled");
    gene |= bit;
    count -= 2;
  };
  auto unbind = [](int& gene, int bit, long& count) {
    if (!(gene & bit)) throw ValidationError("unbinding reaction not enabled");
    gene &= ~bit;
    count += 2;
  };
  switch (r) {
    case kProduceA: ++st.a; break;
    case kProduceB: ++st.b; break;
    case kDegradeA:
      if (st.a < 1) throw ValidationError("degradation with zero count");
      --st.a;
      break;
    case kDegradeB:
      if (st.b < 1) throw ValidationError("degradation with zero count");
      --st.b;
      break;
    case kActivateA: bind(st.gene_a, kActivator, st.a); break;
    case kDeactivateA: unbind(st.gene_a, kActivator, st.a); break;
    case kActivateB: bind(st.gene_b, kActivator, st.b); break;
    case kDeactivateB: unbind(st.gene_b, kActivator, st.b); break;
    case kRepressA: bind(st.gene_a, kRepressor, st.b); break;
    case kDerepressA: unbind(st.gene_a, kRepressor, st.b); break;
    case kRepressB: bind(st.gene_b, kRepressor, st.a); break;
    case kDerepressB: unbind(st.gene_b, kRepressor, st.a); break;
    default: throw ValidationError("unknown reaction index");
  }
}

SsaEvent misa_step_ssa(const MisaState& state, const MisaParams& params, Rng& rng) {
  const auto props = misa_propensities(state, params);
  const double total = std::accumulate(props.begin(), props.end(), 0.0);
  if (!(total > 0.0)) throw ValidationError("total propensity is zero");
  SsaEvent ev;
  ev.wait = rng.exponential() / total;
  const double u = rng.uniform() * total;
  double acc = 0.0;
  ev.reaction = -1;
  for (int r = 0; r < kMisaReactions; ++r) {
    acc += props[r];
    if (u < acc && props[r] > 0.0) {
      ev.reaction = r;
      break;
    }
  }
  if (ev.reaction < 0)
    for (int r = kMisaReactions - 1; r >= 0; --r)
      if (props[r] > 0.0) {
        ev.reaction = r;
        break;
      }
  ev.state = state;
  apply_reaction(ev.state, ev.reaction);
  return ev;
}

PointSet MisaTrajectory::points() const {
  PointSet out(static_cast<Eigen::Index>(samples.size()), 2);
  for (std::size_t n = 0; n < samples.size(); ++n) {
    out(static_cast<Eigen::Index>(n), 0) = static_cast<double>(samples[n].state.a);
    out(static_cast<Eigen::Index>(n), 1) = static_cast<double>(samples[n].state.b);
  }
  return out;
}

MisaTrajectory misa_simulate(const MisaParams& params, double t_end, double sample_interval, std::uint64_t seed,
                             double burn_in) {
  params.validate();
  if (!(t_end > 0.0)) throw ValidationError("t_end must be positive");
  if (!(sample_interval > 0.0)) throw ValidationError("sample interval must be positive");
  if (!(burn_in >= 0.0)) throw ValidationError("burn-in must be nonnegative");

  Rng rng(seed);
  MisaState state;
  double t = -burn_in;
  MisaTrajectory out;
  std::size_t next_index = 0;
  double next_sample = 0.0;
  while (next_sample <= t_end) {
    const SsaEvent ev = misa_step_ssa(state, params, rng);
    const double t_event = t + ev.wait;
    // Samples strictly before the event see the pre-event state.
    while (next_sample <= t_end && next_sample < t_event) {
      out.samples.push_back({next_sample, state});
      ++next_index;
      next_sample = static_cast<double>(next_index) * sample_interval;
    }
    state = ev.state;
    t = t_event;
  }
  return out;
}

MisaExperimentResult misa_mixture_experiment(const MisaExperimentConfig& cfg, std::uint64_t seed) {
  if (cfg.n_per_group < 1) throw ValidationError("n_per_group must be at least 1");
  if (cfg.T < 1) throw ValidationError("T must be at least 1");
  const int total = 2 * cfg.n_per_group;

  MisaExperimentResult res;
  res.raw.resize(total);
  res.true_labels.resize(total);
  const std::uint64_t sim_seed = derive_seed(seed, 0);
#pragma omp parallel for schedule(dynamic)
  for (int n = 0; n < total; ++n) {
    MisaParams p = cfg.base;
    p.f_r = n < cfg.n_per_group ? cfg.f_r_1 : cfg.f_r_2;
    res.raw[n] = misa_simulate(p, static_cast<double>(cfg.T), 1.0, derive_seed(sim_seed, n), cfg.burn_in);
  }
  for (int n = 0; n < total; ++n) res.true_labels[n] = n < cfg.n_per_group ? 0 : 1;

  std::vector<PointSet> continuous;
  continuous.reserve(total);
  Eigen::Index pooled_rows = 0;
  for (const auto& traj : res.raw) {
    continuous.push_back(traj.points());
    pooled_rows += continuous.back().rows();
  }
  PointSet pooled(pooled_rows, 2);
  Eigen::Index row = 0;
  for (const auto& pts : continuous) {
    pooled.middleRows(row, pts.rows()) = pts;
    row += pts.rows();
  }

  PointSet fit_points = pooled;
  if (cfg.max_fit_points > 0 && pooled.rows() > cfg.max_fit_points) {
    std::vector<Eigen::Index> idx(pooled.rows());
    std::iota(idx.begin(), idx.end(), 0);
    Rng pick(derive_seed(seed, 1));
    // Partial Fisher-Yates: the first max_fit_points entries become the sample.
    for (Eigen::Index m = 0; m < cfg.max_fit_points; ++m) {
      const auto span = static_cast<double>(pooled.rows() - m);
      const Eigen::Index j = m + std::min<Eigen::Index>(static_cast<Eigen::Index>(pick.uniform() * span),
                                                        pooled.rows() - m - 1);
      std::swap(idx[m], idx[j]);
    }
    std::sort(idx.begin(), idx.begin() + cfg.max_fit_points);
    fit_points.resize(cfg.max_fit_points, 2);
    for (Eigen::Index m = 0; m < cfg.max_fit_points; ++m) fit_points.row(m) = pooled.row(idx[m]);
  }

  res.model = spectral_fit(fit_points, KernelSpec{"gaussian", cfg.sigma}, cfg.states, 0, derive_seed(seed, 2));
  res.data = discretize_trajectories(res.model, continuous);

  MultistartConfig ms;
  ms.algorithm = Algorithm::vem;
  ms.k = cfg.k_max;
  ms.restarts = cfg.restarts;
  const MultistartReport report = multistart_fit(SufficientStats(res.data), ms, derive_seed(seed, 3));
  res.estimated_labels = report.best.labels;
  res.surviving_components = report.best.surviving_components;
  res.accuracy = accuracy(res.true_labels, res.estimated_labels).value;
  return res;
}

}  // namespace mcmix
