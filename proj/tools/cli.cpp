#include "cli.hpp"

#include <charconv>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>

#include <omp.h>

#include "CLI11.hpp"
#include "mcmix/clustering.hpp"
#include "mcmix/experiments.hpp"
#include "mcmix/gene_circuit.hpp"
#include "mcmix/io.hpp"
#include "mcmix/metrics.hpp"
#include "mcmix/multistart.hpp"
#include "mcmix/rng.hpp"
#include "mcmix/theory.hpp"

namespace mcmix::cli {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

/// JSON config files: top-level keys are global flags, nested objects are
/// subcommand sections, e.g. {"seed": 3, "fit": {"algorithm": "em"}}.
class JsonConfig : public CLI::Config {
public:
  std::string to_config(const CLI::App* app, bool default_also, bool, std::string) const override {
    return dump(app, default_also).dump(2) + "\n";
  }

  std::vector<CLI::ConfigItem> from_config(std::istream& input) const override {
    json j;
    try {
      input >> j;
    } catch (const json::exception& e) {
      throw CLI::ConversionError(std::string("config file is not valid JSON: ") + e.what());
    }
    if (!j.is_object()) throw CLI::ConversionError("config file must hold a JSON object");
    std::vector<CLI::ConfigItem> items;
    collect(j, {}, items);
    return items;
  }

private:
  static std::string scalar(const json& v) {
    if (v.is_string()) return v.get<std::string>();
    if (v.is_boolean()) return v.get<bool>() ? "true" : "false";
    if (v.is_number()) return v.dump();
    throw CLI::ConversionError("unsupported config value " + v.dump());
  }

  static void collect(const json& j, const std::vector<std::string>& parents, std::vector<CLI::ConfigItem>& items) {
    for (const auto& [key, value] : j.items()) {
      if (value.is_object()) {
        auto sub = parents;
        sub.push_back(key);
        collect(value, sub, items);
        continue;
      }
      CLI::ConfigItem item;
      item.parents = parents;
      item.name = key;
      if (value.is_array())
        for (const auto& v : value) item.inputs.push_back(scalar(v));
      else
        item.inputs.push_back(scalar(value));
      items.push_back(std::move(item));
    }
  }

  static json dump(const CLI::App* app, bool default_also) {
    json j = json::object();
    for (const CLI::Option* opt : app->get_options()) {
      if (opt->get_lnames().empty() || !opt->get_configurable()) continue;
      const std::string& name = opt->get_lnames().front();
      if (opt->count() > 0) {
        const auto& res = opt->results();
        j[name] = res.size() == 1 ? json(res.front()) : json(res);
      } else if (default_also && !opt->get_default_str().empty()) {
        j[name] = opt->get_default_str();
      }
    }
    for (const CLI::App* sub : app->get_subcommands({}))
      if (sub->parsed() || default_also) j[sub->get_name()] = dump(sub, default_also);
    return j;
  }
};

struct Globals {
  std::uint64_t seed = 0;
  int threads = 0;
  int k_max = 10;
  int restarts = 100;
  double tol_scale = 1e-12;
  std::string format = "csv";
  bool one_based = false;
  bool k_max_set = false;
  bool restarts_set = false;
};

/// Writes a CSV table as `<stem>.csv` or `<stem>.json` depending on --format.
fs::path write_table(const fs::path& dir, const std::string& stem, const std::string& csv, const Globals& g) {
  if (g.format == "json") {
    const fs::path p = dir / (stem + ".json");
    write_json_file(p, csv_to_json(csv));
    return p;
  }
  const fs::path p = dir / (stem + ".csv");
  write_text_file(p, csv);
  return p;
}

std::string to_text(const auto& writer) {
  std::ostringstream ss;
  ss.precision(17);
  writer(ss);
  return ss.str();
}

TrajectoryDataset load_trajectories(const fs::path& path, bool one_based, int states) {
  std::istringstream in(read_text_file(path));
  try {
    return read_trajectories(in, one_based, states);
  } catch (const ParseError& e) {
    throw ParseError(path.string() + ": " + e.what(), e.line());
  }
}

std::vector<int> load_labels(const fs::path& path, bool one_based) {
  std::istringstream in(read_text_file(path));
  try {
    return read_labels(in, one_based);
  } catch (const ParseError& e) {
    throw ParseError(path.string() + ": " + e.what(), e.line());
  }
}

// ---- simulate -------------------------------------------------------------

struct SimulateOptions {
  std::string model;
  int k = 4;
  int s = 3;
  std::size_t N = 100;
  std::size_t T = 30;
  std::string out;
};

json cmd_simulate(const SimulateOptions& o, const Globals& g) {
  const MixtureParams params =
      o.model.empty() ? random_params(o.k, o.s, derive_seed(g.seed, 0)) : params_from_json(read_json_file(o.model));
  const SampledMixture draw = sample_mixture(params, o.N, o.T, derive_seed(g.seed, 1));
  const fs::path dir(o.out);
  write_text_file(dir / "trajectories.txt", to_text([&](std::ostream& s) { write_trajectories(s, draw.data, g.one_based); }));
  write_text_file(dir / "labels.txt", to_text([&](std::ostream& s) { write_labels(s, draw.labels, g.one_based); }));
  write_json_file(dir / "model.json", params_to_json(params));
  return {{"status", "ok"},
          {"command", "simulate"},
          {"k", params.k()},
          {"s", params.s()},
          {"N", o.N},
          {"T", o.T},
          {"files", {(dir / "trajectories.txt").string(), (dir / "labels.txt").string(), (dir / "model.json").string()}}};
}

// ---- fit ------------------------------------------------------------------

struct FitOptions {
  std::string input;
  std::string labels;
  std::string algorithm = "vem";
  int states = 0;
  int max_iters = 1000;
  std::string out;
};

json cmd_fit(const FitOptions& o, const Globals& g, bool& partial) {
  const TrajectoryDataset data = load_trajectories(o.input, g.one_based, o.states);
  std::optional<std::vector<int>> truth;
  if (!o.labels.empty()) {
    truth = load_labels(o.labels, g.one_based);
    if (truth->size() != data.size()) throw ValidationError("label file length does not match the trajectory count");
  }
  MultistartConfig cfg;
  cfg.algorithm = parse_algorithm(o.algorithm);
  cfg.k = g.k_max;
  cfg.restarts = g.restarts;
  cfg.tol_scale = g.tol_scale;
  cfg.max_iters = o.max_iters;
  const MultistartReport rep = multistart_fit(SufficientStats(data), cfg, g.seed, truth ? &*truth : nullptr);

  const fs::path dir(o.out);
  std::vector<std::string> files;
  write_json_file(dir / "fit.json", fit_to_json(rep.best, g.one_based));
  files.push_back((dir / "fit.json").string());
  write_text_file(dir / "labels.txt", to_text([&](std::ostream& s) { write_labels(s, rep.best.labels, g.one_based); }));
  files.push_back((dir / "labels.txt").string());
  if (rep.posterior) {
    write_json_file(dir / "posterior.json", posterior_to_json(*rep.posterior));
    files.push_back((dir / "posterior.json").string());
  }
  files.push_back(write_table(dir, "restarts", to_text([&](std::ostream& s) { write_restart_csv(s, rep); }), g).string());

  json summary = {{"status", "ok"},
                  {"command", "fit"},
                  {"algorithm", to_string(cfg.algorithm)},
                  {"N", data.size()},
                  {"s", data.num_states()},
                  {"objective", to_json(rep.best.objective())},
                  {"surviving_components", rep.best.surviving_components},
                  {"best_restart", rep.best_index},
                  {"best_seed", rep.seeds[rep.best_index]}};
  if (truth) {
    const AccuracyResult acc = accuracy(*truth, rep.best.labels);
    const ConfusionMatrix cm = confusion(*truth, rep.best.labels, acc.permutation);
    files.push_back(
        write_table(dir, "confusion", to_text([&](std::ostream& s) { write_confusion_csv(s, cm, g.one_based); }), g)
            .string());
    summary["accuracy"] = acc.value;
    summary["permutation"] = acc.permutation;
  }
  json failures = json::array();
  for (std::size_t r = 0; r < rep.failures.size(); ++r)
    if (!rep.failures[r].empty()) failures.push_back({{"restart", r}, {"seed", rep.seeds[r]}, {"error", rep.failures[r]}});
  if (!failures.empty()) {
    partial = true;
    summary["status"] = "partial";
    summary["failures"] = std::move(failures);
  }
  summary["files"] = files;
  return summary;
}

// ---- cluster --------------------------------------------------------------

struct ClusterOptions {
  std::string input;
  std::string method = "spectral";
  int clusters = 2;
  double sigma = 1.0;
  int embedding_dim = 0;
  bool trajectories = false;
  std::string id_column = "traj";
  std::vector<std::string> dims;
  int max_fit_points = 0;
  std::string out;
};

json cmd_cluster(const ClusterOptions& o, const Globals& g) {
  const std::string text = read_text_file(o.input);
  std::istringstream in(text);
  Table table;
  try {
    table = read_table(in);
  } catch (const ParseError& e) {
    throw ParseError(o.input + ": " + e.what(), e.line());
  }
  std::vector<PointSet> trajs;
  PointSet points;
  if (o.trajectories) {
    trajs = continuous_trajectories(table, o.id_column, o.dims);
    Eigen::Index rows = 0;
    for (const auto& t : trajs) rows += t.rows();
    points.resize(rows, trajs.empty() ? 0 : trajs.front().cols());
    Eigen::Index r = 0;
    for (const auto& t : trajs) {
      points.middleRows(r, t.rows()) = t;
      r += t.rows();
    }
  } else if (!o.dims.empty()) {
    points.resize(table.rows.rows(), static_cast<Eigen::Index>(o.dims.size()));
    for (std::size_t c = 0; c < o.dims.size(); ++c) points.col(static_cast<Eigen::Index>(c)) = table.rows.col(table.column(o.dims[c]));
  } else {
    points = table.rows;
  }
  if (points.rows() == 0) throw ValidationError(o.input + ": no points found");

  PointSet fit_points = points;
  if (o.max_fit_points > 0 && points.rows() > o.max_fit_points) {
    // Evenly strided subsample keeps the choice reproducible without RNG state.
    fit_points.resize(o.max_fit_points, points.cols());
    for (Eigen::Index m = 0; m < o.max_fit_points; ++m)
      fit_points.row(m) = points.row(m * points.rows() / o.max_fit_points);
  }

  const fs::path dir(o.out);
  std::vector<int> assignments;
  json model;
  std::optional<TrajectoryDataset> discrete;
  if (o.method == "spectral") {
    const SpectralModel sm = spectral_fit(fit_points, KernelSpec{"gaussian", o.sigma}, o.clusters, o.embedding_dim, g.seed);
    assignments = spectral_assign(sm, points);
    model = spectral_to_json(sm);
    model["method"] = "spectral";
    if (o.trajectories) discrete = discretize_trajectories(sm, trajs);
  } else if (o.method == "kmeans") {
    const KMeansResult km = kmeans(fit_points, o.clusters, g.seed);
    assignments = assign_nearest(km.centers, points);
    model = {{"method", "kmeans"}, {"centers", to_json(km.centers)}, {"objective", km.objective()}, {"iterations", km.iterations}};
    if (o.trajectories) discrete = discretize_trajectories(km.centers, trajs);
  } else {
    throw ValidationError("unknown clustering method '" + o.method + "' (expected kmeans or spectral)");
  }

  std::vector<std::string> files;
  write_text_file(dir / "assignments.txt", to_text([&](std::ostream& s) { write_labels(s, assignments, g.one_based); }));
  files.push_back((dir / "assignments.txt").string());
  write_json_file(dir / "model.json", model);
  files.push_back((dir / "model.json").string());
  if (discrete) {
    write_text_file(dir / "trajectories.txt",
                    to_text([&](std::ostream& s) { write_trajectories(s, *discrete, g.one_based); }));
    files.push_back((dir / "trajectories.txt").string());
  }
  std::vector<int> sizes(o.clusters, 0);
  for (int a : assignments) ++sizes[a];
  return {{"status", "ok"}, {"command", "cluster"}, {"method", o.method}, {"points", points.rows()},
          {"cluster_sizes", sizes}, {"files", files}};
}

// ---- bound ----------------------------------------------------------------

struct BoundOptions {
  std::string model;
  std::size_t T = 30;
  std::string out;
};

json cmd_bound(const BoundOptions& o, const Globals& g, std::ostream& out) {
  const MixtureParams params = params_from_json(read_json_file(o.model));
  const KlReport rep = kl_report(params, o.T);
  const json j = kl_report_to_json(rep);
  if (!o.out.empty()) write_json_file(o.out, j);
  // The report itself goes to stdout; the summary is folded in.
  if (g.format == "json") {
    json doc = j;
    doc["status"] = "ok";
    doc["command"] = "bound";
    out << doc.dump(2) << '\n';
  } else {
    out.precision(17);
    out << "i";
    for (int c = 0; c < params.k(); ++c) out << ",kl_to_" << c + (g.one_based ? 1 : 0);
    out << '\n';
    for (int r = 0; r < params.k(); ++r) {
      out << r + (g.one_based ? 1 : 0);
      for (int c = 0; c < params.k(); ++c) out << ',' << rep.pairwise(r, c);
      out << '\n';
    }
    out << "bound," << rep.bound << '\n';
  }
  return {};
}

// ---- misa -----------------------------------------------------------------

struct MisaOptions {
  std::string params;
  MisaParams rates;
  double t_end = 25.0;
  double sample_interval = 1.0;
  double burn_in = 100.0;
  int count = 1;
  bool pipeline = false;
  double f_r_1 = 0.01;
  double f_r_2 = 0.25;
  int n_per_group = 15;
  int T = 25;
  double sigma = 50.0;
  int states = 4;
  int max_fit_points = 1000;
  std::string out;
};

json cmd_misa(const MisaOptions& o, const Globals& g, const CLI::App& sub) {
  MisaParams rates = o.params.empty() ? MisaParams{} : misa_params_from_json(read_json_file(o.params));
  // Explicit rate flags win over the JSON file.
  const std::pair<const char*, double MisaParams::*> flags[] = {
      {"--g00", &MisaParams::g00}, {"--g01", &MisaParams::g01}, {"--g10", &MisaParams::g10},
      {"--g11", &MisaParams::g11}, {"--d", &MisaParams::d},     {"--h-a", &MisaParams::h_a},
      {"--f-a", &MisaParams::f_a}, {"--h-r", &MisaParams::h_r}, {"--f-r", &MisaParams::f_r}};
  for (const auto& [flag, member] : flags)
    if (sub.get_option(flag)->count() > 0) rates.*member = o.rates.*member;
  rates.validate();
  const fs::path dir(o.out);

  if (o.pipeline) {
    MisaExperimentConfig cfg;
    cfg.base = rates;
    cfg.f_r_1 = o.f_r_1;
    cfg.f_r_2 = o.f_r_2;
    cfg.n_per_group = o.n_per_group;
    cfg.T = o.T;
    cfg.sigma = o.sigma;
    cfg.states = o.states;
    cfg.burn_in = o.burn_in;
    cfg.max_fit_points = o.max_fit_points;
    cfg.k_max = g.k_max;
    cfg.restarts = g.restarts;
    const MisaExperimentResult res = misa_mixture_experiment(cfg, g.seed);
    std::vector<std::string> files;
    write_text_file(dir / "misa.csv", to_text([&](std::ostream& s) { write_misa_csv(s, res.raw, res.true_labels); }));
    files.push_back((dir / "misa.csv").string());
    write_text_file(dir / "trajectories.txt", to_text([&](std::ostream& s) { write_trajectories(s, res.data, g.one_based); }));
    files.push_back((dir / "trajectories.txt").string());
    write_text_file(dir / "labels.txt", to_text([&](std::ostream& s) { write_labels(s, res.true_labels, g.one_based); }));
    files.push_back((dir / "labels.txt").string());
    write_text_file(dir / "estimated_labels.txt",
                    to_text([&](std::ostream& s) { write_labels(s, res.estimated_labels, g.one_based); }));
    files.push_back((dir / "estimated_labels.txt").string());
    write_json_file(dir / "spectral.json", spectral_to_json(res.model));
    files.push_back((dir / "spectral.json").string());
    return {{"status", "ok"},          {"command", "misa"},
            {"mode", "pipeline"},       {"accuracy", res.accuracy},
            {"surviving_components", res.surviving_components}, {"files", files}};
  }

  if (o.count < 1) throw ValidationError("--count must be at least 1");
  std::vector<MisaTrajectory> runs(static_cast<std::size_t>(o.count));
  const std::uint64_t base = derive_seed(g.seed, 0);
#pragma omp parallel for schedule(dynamic)
  for (int n = 0; n < o.count; ++n)
    runs[n] = misa_simulate(rates, o.t_end, o.sample_interval, derive_seed(base, static_cast<std::uint64_t>(n)), o.burn_in);
  const fs::path p =
      write_table(dir, "misa", to_text([&](std::ostream& s) { write_misa_csv(s, runs); }), g);
  write_json_file(dir / "misa_params.json", misa_params_to_json(rates));
  return {{"status", "ok"},
          {"command", "misa"},
          {"mode", "simulate"},
          {"trajectories", o.count},
          {"files", {p.string(), (dir / "misa_params.json").string()}}};
}

// ---- experiment -----------------------------------------------------------

struct ExperimentOptions {
  std::string name;
  std::vector<std::string> set;
  std::string overrides;
  int trials = 0;
  std::string out;
};

json cmd_experiment(const ExperimentOptions& o, const Globals& g, bool& partial) {
  ExperimentSpec spec = ExperimentSpec::named(o.name);
  spec.seed = g.seed;
  spec.tol_scale = g.tol_scale;
  if (g.k_max_set) spec.k_max = g.k_max;
  if (g.restarts_set) spec.restarts = g.restarts;
  if (o.trials > 0) spec.trials = o.trials;
  if (!o.overrides.empty()) spec.apply(read_json_file(o.overrides));
  for (const auto& kv : o.set) {
    const auto eq = kv.find('=');
    if (eq == std::string::npos) throw ValidationError("--set expects key=value, got '" + kv + "'");
    json value;
    const std::string raw = kv.substr(eq + 1);
    try {
      value = json::parse(raw);
    } catch (const json::exception&) {
      value = raw;
    }
    spec.apply(json{{kv.substr(0, eq), value}});
  }

  const ExperimentOutput res = run_experiment(spec);
  const fs::path dir(o.out);
  std::vector<std::string> files;
  for (const auto& t : res.tables) {
    const std::string stem = fs::path(t.filename).stem().string();
    files.push_back(write_table(dir, stem, t.csv, g).string());
  }
  json summary = res.summary;
  summary["command"] = "experiment";
  summary["status"] = res.failed_cells == 0 ? "ok" : "partial";
  summary["files"] = files;
  write_json_file(dir / "summary.json", summary);
  if (res.failed_cells > 0) partial = true;
  return summary;
}

json failure(const std::string& kind, const std::string& message) {
  return {{"status", "failed"}, {"error", {{"kind", kind}, {"message", message}}}};
}

}  // namespace

json csv_to_json(const std::string& csv) {
  std::istringstream in(csv);
  std::string line;
  std::vector<std::string> header;
  json rows = json::array();
  auto split = [](const std::string& l) {
    std::vector<std::string> out;
    std::string cur;
    for (char c : l) {
      if (c == ',') {
        out.push_back(cur);
        cur.clear();
      } else if (c != '\r') {
        cur += c;
      }
    }
    out.push_back(cur);
    return out;
  };
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    auto fields = split(line);
    if (header.empty()) {
      header = std::move(fields);
      continue;
    }
    json row = json::object();
    for (std::size_t c = 0; c < header.size(); ++c) {
      const std::string f = c < fields.size() ? fields[c] : "";
      double x = 0.0;
      const auto r = std::from_chars(f.data(), f.data() + f.size(), x);
      if (f.empty())
        row[header[c]] = nullptr;
      else if (r.ec == std::errc() && r.ptr == f.data() + f.size())
        row[header[c]] = to_json(x);
      else
        row[header[c]] = f;
    }
    rows.push_back(std::move(row));
  }
  return rows;
}

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Mixtures of Markov chains: simulation, EM/VEM fitting, clustering and bounds", "mcmix"};
  app.require_subcommand(1);
  app.fallthrough();
  app.config_formatter(std::make_shared<JsonConfig>());
  app.set_config("--config", "", "JSON file mirroring the command-line flags");

  Globals g;
  app.add_option("--seed", g.seed, "Master RNG seed")->capture_default_str();
  app.add_option("--threads", g.threads, "OpenMP threads (0 = runtime default)")->check(CLI::NonNegativeNumber);
  auto* k_opt = app.add_option("--k-max", g.k_max, "Components (EM) or maximum components (VEM)")
                    ->check(CLI::PositiveNumber)
                    ->capture_default_str();
  auto* r_opt = app.add_option("--restarts", g.restarts, "Random restarts")->check(CLI::PositiveNumber)->capture_default_str();
  app.add_option("--tol-scale", g.tol_scale, "Stop when |dL| < tol_scale * N * mean(T)")
      ->check(CLI::NonNegativeNumber)
      ->capture_default_str();
  app.add_option("--format", g.format, "Table output format")->check(CLI::IsMember({"csv", "json"}))->capture_default_str();
  app.add_flag("--one-based", g.one_based, "States and labels in files are 1-based");

  SimulateOptions sim;
  auto* simulate = app.add_subcommand("simulate", "Sample trajectories from a mixture");
  simulate->add_option("--model", sim.model, "Parameter JSON; omit for uniformly random parameters")->check(CLI::ExistingFile);
  simulate->add_option("--k", sim.k, "Components of the random model")->check(CLI::PositiveNumber)->capture_default_str();
  simulate->add_option("--s", sim.s, "States of the random model")->check(CLI::PositiveNumber)->capture_default_str();
  simulate->add_option("-N,--num-trajectories", sim.N, "Trajectories")->capture_default_str();
  simulate->add_option("-T,--transitions", sim.T, "Transitions per trajectory")->capture_default_str();
  simulate->add_option("-o,--out", sim.out, "Output directory")->required();

  FitOptions fit;
  auto* fit_cmd = app.add_subcommand("fit", "Fit a mixture with multistart EM or VEM");
  fit_cmd->add_option("-i,--input", fit.input, "Trajectory file")->required()->check(CLI::ExistingFile);
  fit_cmd->add_option("--labels", fit.labels, "True labels, for accuracy and a confusion matrix")->check(CLI::ExistingFile);
  fit_cmd->add_option("--algorithm", fit.algorithm, "em or vem")->check(CLI::IsMember({"em", "vem"}))->capture_default_str();
  fit_cmd->add_option("--states", fit.states, "State count (default: file header or max state + 1)");
  fit_cmd->add_option("--max-iters", fit.max_iters, "Iteration cap per restart")->check(CLI::PositiveNumber)->capture_default_str();
  fit_cmd->add_option("-o,--out", fit.out, "Output directory")->required();

  ClusterOptions cl;
  auto* cluster = app.add_subcommand("cluster", "Cluster points or continuous trajectories into discrete states");
  cluster->add_option("-i,--input", cl.input, "CSV of points (or trajectories with --trajectories)")
      ->required()
      ->check(CLI::ExistingFile);
  cluster->add_option("--method", cl.method, "kmeans or spectral")->check(CLI::IsMember({"kmeans", "spectral"}))->capture_default_str();
  cluster->add_option("-s,--clusters", cl.clusters, "Number of clusters")->check(CLI::PositiveNumber)->capture_default_str();
  cluster->add_option("--sigma", cl.sigma, "Gaussian kernel bandwidth")->check(CLI::PositiveNumber)->capture_default_str();
  cluster->add_option("--embedding-dim", cl.embedding_dim, "Spectral embedding dimension (0 = clusters)");
  cluster->add_flag("--trajectories", cl.trajectories, "Input rows carry a trajectory id; also emit discretized trajectories");
  cluster->add_option("--id-column", cl.id_column, "Trajectory id column")->capture_default_str();
  cluster->add_option("--dims", cl.dims, "Coordinate columns (by header name)")->delimiter(',');
  cluster->add_option("--max-fit-points", cl.max_fit_points, "Fit on an evenly strided subsample of this size (0 = all)");
  cluster->add_option("-o,--out", cl.out, "Output directory")->required();

  BoundOptions bd;
  auto* bound = app.add_subcommand("bound", "Pairwise trajectory KL divergences and the misclassification bound");
  bound->add_option("--model", bd.model, "Parameter JSON")->required()->check(CLI::ExistingFile);
  bound->add_option("-T,--transitions", bd.T, "Transitions per trajectory")->capture_default_str();
  bound->add_option("-o,--out", bd.out, "Also write the report JSON here");

  MisaOptions ms;
  auto* misa = app.add_subcommand("misa", "Simulate the MISA gene circuit, or run the cluster-and-fit pipeline");
  misa->add_option("--params", ms.params, "Rate JSON (g00, g01, g10, g11, d, h_a, f_a, h_r, f_r)")->check(CLI::ExistingFile);
  misa->add_option("--g00", ms.rates.g00);
  misa->add_option("--g01", ms.rates.g01);
  misa->add_option("--g10", ms.rates.g10);
  misa->add_option("--g11", ms.rates.g11);
  misa->add_option("--d", ms.rates.d);
  misa->add_option("--h-a", ms.rates.h_a);
  misa->add_option("--f-a", ms.rates.f_a);
  misa->add_option("--h-r", ms.rates.h_r);
  misa->add_option("--f-r", ms.rates.f_r);
  misa->add_option("--t-end", ms.t_end, "Last sample time")->capture_default_str();
  misa->add_option("--sample-interval", ms.sample_interval)->capture_default_str();
  misa->add_option("--burn-in", ms.burn_in)->capture_default_str();
  misa->add_option("--count", ms.count, "Independent trajectories")->capture_default_str();
  misa->add_flag("--pipeline", ms.pipeline, "Two groups -> spectral states -> VEM -> accuracy");
  misa->add_option("--f-r-1", ms.f_r_1)->capture_default_str();
  misa->add_option("--f-r-2", ms.f_r_2)->capture_default_str();
  misa->add_option("--n-per-group", ms.n_per_group)->capture_default_str();
  misa->add_option("-T,--transitions", ms.T, "Pipeline trajectory length")->capture_default_str();
  misa->add_option("--sigma", ms.sigma)->capture_default_str();
  misa->add_option("--states", ms.states)->capture_default_str();
  misa->add_option("--max-fit-points", ms.max_fit_points)->capture_default_str();
  misa->add_option("-o,--out", ms.out, "Output directory")->required();

  ExperimentOptions ex;
  auto* experiment = app.add_subcommand("experiment", "Run a named experiment recipe");
  experiment->add_option("name", ex.name, "fig2, fig3, fig4, fig8 or custom")
      ->required()
      ->check(CLI::IsMember({"fig2", "fig3", "fig4", "fig8", "custom"}));
  experiment->add_option("--set", ex.set, "Parameter override key=value (repeatable)");
  experiment->add_option("--overrides", ex.overrides, "JSON object of parameter overrides")->check(CLI::ExistingFile);
  experiment->add_option("--trials", ex.trials, "Trials (repetitions) per cell");
  experiment->add_option("-o,--out", ex.out, "Output directory")->required();

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  if (!reversed.empty()) reversed.pop_back();
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kOk;
  } catch (const CLI::ParseError& e) {
    err << e.what() << '\n';
    out << failure("usage", e.what()).dump(2) << '\n';
    return kUsageError;
  }
  g.k_max_set = k_opt->count() > 0;
  g.restarts_set = r_opt->count() > 0;
  if (g.threads > 0) omp_set_num_threads(g.threads);

  try {
    bool partial = false;
    json summary;
    if (simulate->parsed()) summary = cmd_simulate(sim, g);
    else if (fit_cmd->parsed()) summary = cmd_fit(fit, g, partial);
    else if (cluster->parsed()) summary = cmd_cluster(cl, g);
    else if (bound->parsed()) summary = cmd_bound(bd, g, out);
    else if (misa->parsed()) summary = cmd_misa(ms, g, *misa);
    else if (experiment->parsed()) summary = cmd_experiment(ex, g, partial);
    if (!summary.is_null()) {
      summary["seed"] = g.seed;
      out << summary.dump(2) << '\n';
    }
    return partial ? kPartialFailure : kOk;
  } catch (const ParseError& e) {
    out << failure("parse", e.what()).dump(2) << '\n';
    err << "error: " << e.what() << '\n';
    return kUsageError;
  } catch (const ValidationError& e) {
    out << failure("validation", e.what()).dump(2) << '\n';
    err << "error: " << e.what() << '\n';
    return kUsageError;
  } catch (const std::exception& e) {
    out << failure("runtime", e.what()).dump(2) << '\n';
    err << "error: " << e.what() << '\n';
    return kRuntimeFailure;
  }
}

}  // namespace mcmix::cli
