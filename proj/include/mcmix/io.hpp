#pragma once

// Text formats.
//
// Trajectories: one per line, integer states separated by whitespace and/or
// commas, optional header `# s=<int>`; other `#` lines and blank lines are
// skipped. Labels: one integer per line. States and labels are 0-based
// unless `one_based` is set, in which case they are shifted on the way in
// and out.
//
// Non-finite numbers in JSON are written as the strings "inf", "-inf" and
// "nan" and accepted back in that form.

#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "json.hpp"
#include "mcmix/clustering.hpp"
#include "mcmix/gene_circuit.hpp"
#include "mcmix/metrics.hpp"
#include "mcmix/model.hpp"
#include "mcmix/multistart.hpp"
#include "mcmix/theory.hpp"
#include "mcmix/vem.hpp"

namespace mcmix {

using json = nlohmann::json;

/// `num_states` > 0 overrides the header; with neither, s = max state + 1.
/// Throws ParseError with the offending line number.
TrajectoryDataset read_trajectories(std::istream& in, bool one_based = false, int num_states = 0);
void write_trajectories(std::ostream& out, const TrajectoryDataset& data, bool one_based = false);

std::vector<int> read_labels(std::istream& in, bool one_based = false);
void write_labels(std::ostream& out, const std::vector<int>& labels, bool one_based = false);

// Dense numeric helpers.
json to_json(const Eigen::VectorXd& v);
json to_json(const Eigen::MatrixXd& m);
json to_json(double x);
/// The *_from_json readers take member `field` of object `j`.
double number_from_json(const json& j, const std::string& field);
Eigen::VectorXd vector_from_json(const json& j, const std::string& field);
Eigen::MatrixXd matrix_from_json(const json& j, const std::string& field);

/// {"k", "s", "mu", "nu", "P"}.
json params_to_json(const MixtureParams& params);
/// Throws ParseError on a missing or malformed field and ValidationError if
/// the parameters are not probability distributions.
MixtureParams params_from_json(const json& j);

/// {"N_hat", "N_i_hat", "N_ialpha_hat", "responsibilities", "elbo_trace"}.
json posterior_to_json(const DirichletPosterior& posterior);
DirichletPosterior posterior_from_json(const json& j);

json fit_to_json(const FitResult& fit, bool one_based = false);
json kl_report_to_json(const KlReport& report);

/// {"kernel": {"name", "sigma"}, "alpha", "centers", "training", ...}.
json spectral_to_json(const SpectralModel& model);
SpectralModel spectral_from_json(const json& j);

/// A CSV table of numbers with an optional header row. Whitespace also
/// separates fields; `#` lines and blank lines are skipped.
struct Table {
  std::vector<std::string> header;  ///< empty if the file has none
  Eigen::MatrixXd rows;

  /// Column index by header name; throws ValidationError if absent.
  int column(const std::string& name) const;
};

Table read_table(std::istream& in);

/// Points file: CSV of real vectors, one per line.
PointSet read_points(std::istream& in);
void write_points(std::ostream& out, const PointSet& points);

/// Continuous trajectories from a table with a trajectory-id column: rows
/// with the same id, in file order, form one trajectory. `dims` names the
/// coordinate columns; empty means every column except `id_column` and "t".
std::vector<PointSet> continuous_trajectories(const Table& table, const std::string& id_column = "traj",
                                              std::vector<std::string> dims = {});

/// restart,seed,objective,iterations,surviving[,accuracy],failure
void write_restart_csv(std::ostream& out, const MultistartReport& report);

void write_confusion_csv(std::ostream& out, const ConfusionMatrix& matrix, bool one_based = false);

/// traj,group,t,a,b,geneA,geneB (gene conditions as "ij").
void write_misa_csv(std::ostream& out, const std::vector<MisaTrajectory>& trajectories,
                    const std::vector<int>& groups = {});

json misa_params_to_json(const MisaParams& params);
/// Missing fields keep their defaults.
MisaParams misa_params_from_json(const json& j);

// File wrappers; throw std::runtime_error naming the path on I/O failure.
std::string read_text_file(const std::filesystem::path& path);
void write_text_file(const std::filesystem::path& path, const std::string& text);
json read_json_file(const std::filesystem::path& path);
void write_json_file(const std::filesystem::path& path, const json& j);

}  // namespace mcmix
