#include "mcmix/io.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <limits>
#include <regex>
#include <sstream>

namespace mcmix {

namespace {

std::vector<std::string_view> split_fields(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t pos = 0;
  auto sep = [](char c) { return c == ',' || c == ' ' || c == '\t' || c == '\r'; };
  while (pos < line.size()) {
    while (pos < line.size() && sep(line[pos])) ++pos;
    const std::size_t start = pos;
    while (pos < line.size() && !sep(line[pos])) ++pos;
    if (pos > start) out.push_back(line.substr(start, pos - start));
  }
  return out;
}

bool blank(std::string_view line) { return split_fields(line).empty(); }

std::string_view trim_left(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  return s;
}

bool parse_int(std::string_view tok, long& out) {
  const auto r = std::from_chars(tok.data(), tok.data() + tok.size(), out);
  return r.ec == std::errc() && r.ptr == tok.data() + tok.size();
}

bool parse_double(std::string_view tok, double& out) {
  const auto r = std::from_chars(tok.data(), tok.data() + tok.size(), out);
  return r.ec == std::errc() && r.ptr == tok.data() + tok.size();
}

const json& field(const json& j, const std::string& name) {
  if (!j.is_object()) throw ParseError("expected a JSON object", 1);
  const auto it = j.find(name);
  if (it == j.end()) throw ParseError("missing field '" + name + "'", 1);
  return *it;
}

double to_number(const json& j, const std::string& what) {
  if (j.is_number()) return j.get<double>();
  if (j.is_string()) {
    const auto s = j.get<std::string>();
    if (s == "inf") return std::numeric_limits<double>::infinity();
    if (s == "-inf") return -std::numeric_limits<double>::infinity();
    if (s == "nan") return std::numeric_limits<double>::quiet_NaN();
  }
  throw ParseError("'" + what + "' must be a number", 1);
}

Eigen::VectorXd to_vector(const json& j, const std::string& what) {
  if (!j.is_array()) throw ParseError("'" + what + "' must be an array", 1);
  Eigen::VectorXd v(static_cast<Eigen::Index>(j.size()));
  for (std::size_t a = 0; a < j.size(); ++a) v(static_cast<Eigen::Index>(a)) = to_number(j[a], what);
  return v;
}

Eigen::MatrixXd to_matrix(const json& j, const std::string& what) {
  if (!j.is_array()) throw ParseError("'" + what + "' must be an array of rows", 1);
  const auto rows = static_cast<Eigen::Index>(j.size());
  if (rows == 0) return {};
  if (!j[0].is_array()) throw ParseError("'" + what + "' must be an array of rows", 1);
  const auto cols = static_cast<Eigen::Index>(j[0].size());
  Eigen::MatrixXd m(rows, cols);
  for (Eigen::Index r = 0; r < rows; ++r) {
    const auto& row = j[static_cast<std::size_t>(r)];
    if (!row.is_array() || static_cast<Eigen::Index>(row.size()) != cols)
      throw ParseError("'" + what + "' rows have unequal lengths", 1);
    for (Eigen::Index c = 0; c < cols; ++c) m(r, c) = to_number(row[static_cast<std::size_t>(c)], what);
  }
  return m;
}

std::vector<Eigen::MatrixXd> to_matrices(const json& j, const std::string& what) {
  if (!j.is_array()) throw ParseError("'" + what + "' must be an array of matrices", 1);
  std::vector<Eigen::MatrixXd> out;
  for (const auto& m : j) out.push_back(to_matrix(m, what));
  return out;
}

json matrices_to_json(const std::vector<Eigen::MatrixXd>& ms) {
  json out = json::array();
  for (const auto& m : ms) out.push_back(to_json(m));
  return out;
}

std::vector<int> shifted(const std::vector<int>& labels, bool one_based) {
  std::vector<int> out(labels);
  if (one_based)
    for (int& l : out) ++l;
  return out;
}

}  // namespace

TrajectoryDataset read_trajectories(std::istream& in, bool one_based, int num_states) {
  static const std::regex header(R"(#\s*s\s*=\s*(\d+)\s*)");
  std::vector<Trajectory> trajs;
  int header_states = 0;
  int max_state = -1;
  std::string line;
  std::size_t line_no = 0;
  const long offset = one_based ? 1 : 0;
  while (std::getline(in, line)) {
    ++line_no;
    const std::string_view view = trim_left(line);
    if (view.empty() || blank(view)) continue;
    if (view.front() == '#') {
      std::smatch m;
      const std::string text(view);
      if (std::regex_match(text, m, header)) {
        long s = 0;
        if (!parse_int(m[1].str(), s) || s < 1 || s > std::numeric_limits<int>::max())
          throw ParseError("invalid state count in header", line_no);
        if (header_states != 0 && header_states != s) throw ParseError("conflicting state-count headers", line_no);
        header_states = static_cast<int>(s);
      }
      continue;
    }
    Trajectory traj;
    for (const auto tok : split_fields(view)) {
      long v = 0;
      if (!parse_int(tok, v)) throw ParseError("'" + std::string(tok) + "' is not an integer state", line_no);
      v -= offset;
      if (v < 0)
        throw ParseError("state " + std::string(tok) + " is below the " + (one_based ? "1-based" : "0-based") +
                             " minimum",
                         line_no);
      if (v > std::numeric_limits<int>::max() - 1) throw ParseError("state out of range", line_no);
      const int state = static_cast<int>(v);
      const int limit = num_states > 0 ? num_states : header_states;
      if (limit > 0 && state >= limit)
        throw ParseError("state " + std::string(tok) + " exceeds the state count " + std::to_string(limit), line_no);
      max_state = std::max(max_state, state);
      traj.push_back(state);
    }
    trajs.push_back(std::move(traj));
  }
  int s = num_states > 0 ? num_states : header_states;
  if (s == 0) s = max_state + 1;
  if (s < 1) throw ParseError("no trajectories found", line_no);
  if (max_state >= s) throw ParseError("a state exceeds the declared state count " + std::to_string(s), line_no);
  return TrajectoryDataset(std::move(trajs), s);
}

void write_trajectories(std::ostream& out, const TrajectoryDataset& data, bool one_based) {
  out << "# s=" << data.num_states() << '\n';
  const int offset = one_based ? 1 : 0;
  for (const auto& traj : data.trajectories()) {
    for (std::size_t t = 0; t < traj.size(); ++t) out << (t ? " " : "") << traj[t] + offset;
    out << '\n';
  }
}

std::vector<int> read_labels(std::istream& in, bool one_based) {
  std::vector<int> labels;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto fields = split_fields(line);
    if (fields.empty() || fields.front().front() == '#') continue;
    if (fields.size() != 1) throw ParseError("expected one label per line", line_no);
    long v = 0;
    if (!parse_int(fields.front(), v)) throw ParseError("'" + std::string(fields.front()) + "' is not an integer", line_no);
    if (one_based) --v;
    if (v < 0 || v > std::numeric_limits<int>::max()) throw ParseError("label out of range", line_no);
    labels.push_back(static_cast<int>(v));
  }
  return labels;
}

void write_labels(std::ostream& out, const std::vector<int>& labels, bool one_based) {
  for (int l : labels) out << l + (one_based ? 1 : 0) << '\n';
}

json to_json(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  return x;
}

json to_json(const Eigen::VectorXd& v) {
  json out = json::array();
  for (Eigen::Index a = 0; a < v.size(); ++a) out.push_back(to_json(v(a)));
  return out;
}

json to_json(const Eigen::MatrixXd& m) {
  json out = json::array();
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    json row = json::array();
    for (Eigen::Index c = 0; c < m.cols(); ++c) row.push_back(to_json(m(r, c)));
    out.push_back(std::move(row));
  }
  return out;
}

double number_from_json(const json& j, const std::string& name) { return to_number(field(j, name), name); }

Eigen::VectorXd vector_from_json(const json& j, const std::string& name) { return to_vector(field(j, name), name); }

Eigen::MatrixXd matrix_from_json(const json& j, const std::string& name) { return to_matrix(field(j, name), name); }

json params_to_json(const MixtureParams& params) {
  return {{"k", params.k()},
          {"s", params.s()},
          {"mu", to_json(params.mu)},
          {"nu", to_json(params.nu)},
          {"P", matrices_to_json(params.P)}};
}

MixtureParams params_from_json(const json& j) {
  MixtureParams p;
  p.mu = vector_from_json(j, "mu");
  p.nu = matrix_from_json(j, "nu");
  p.P = to_matrices(field(j, "P"), "P");
  const double k = number_from_json(j, "k");
  const double s = number_from_json(j, "s");
  if (k != static_cast<double>(p.k())) throw ParseError("'k' does not match the length of 'mu'", 1);
  if (p.nu.rows() != p.k() || p.nu.cols() != static_cast<Eigen::Index>(s))
    throw ParseError("'nu' must be k x s", 1);
  p.validate();
  return p;
}

json posterior_to_json(const DirichletPosterior& post) {
  json trace = json::array();
  for (double L : post.elbo_trace) trace.push_back(to_json(L));
  return {{"k", post.k()},
          {"s", post.s()},
          {"N_hat", to_json(post.N_hat)},
          {"N_i_hat", to_json(post.N_i_hat)},
          {"N_ialpha_hat", matrices_to_json(post.N_ialpha_hat)},
          {"responsibilities", to_json(post.responsibilities.gamma)},
          {"elbo_trace", std::move(trace)}};
}

DirichletPosterior posterior_from_json(const json& j) {
  DirichletPosterior post;
  post.N_hat = vector_from_json(j, "N_hat");
  post.N_i_hat = matrix_from_json(j, "N_i_hat");
  post.N_ialpha_hat = to_matrices(field(j, "N_ialpha_hat"), "N_ialpha_hat");
  post.responsibilities.gamma = matrix_from_json(j, "responsibilities");
  const Eigen::VectorXd trace = vector_from_json(j, "elbo_trace");
  post.elbo_trace.assign(trace.data(), trace.data() + trace.size());
  if (post.N_i_hat.rows() != post.k() || static_cast<int>(post.N_ialpha_hat.size()) != post.k())
    throw ParseError("posterior factors disagree on k", 1);
  return post;
}

json fit_to_json(const FitResult& fit, bool one_based) {
  json trace = json::array();
  for (double L : fit.objective_trace) trace.push_back(to_json(L));
  return {{"params", params_to_json(fit.params)},
          {"labels", shifted(fit.labels, one_based)},
          {"objective", to_json(fit.objective())},
          {"objective_trace", std::move(trace)},
          {"converged", fit.converged},
          {"iterations", fit.iterations},
          {"surviving_components", fit.surviving_components}};
}

json kl_report_to_json(const KlReport& report) {
  return {{"horizon", report.horizon},
          {"pairwise", to_json(report.pairwise)},
          {"rates", to_json(report.rates)},
          {"bound", to_json(report.bound)},
          {"rate_errors", report.rate_errors}};
}

json spectral_to_json(const SpectralModel& model) {
  return {{"kernel", {{"name", model.kernel.name}, {"sigma", model.kernel.sigma}}},
          {"s", model.s()},
          {"r", model.r()},
          {"alpha", to_json(model.alpha)},
          {"centers", to_json(model.centers)},
          {"training", to_json(model.training)},
          {"eigenvalues", to_json(model.eigenvalues)},
          {"ridge", to_json(model.ridge)},
          {"training_assignments", model.training_assignments}};
}

SpectralModel spectral_from_json(const json& j) {
  SpectralModel m;
  const json& kernel = field(j, "kernel");
  const json& name = field(kernel, "name");
  if (!name.is_string()) throw ParseError("'kernel.name' must be a string", 1);
  m.kernel.name = name.get<std::string>();
  m.kernel.sigma = number_from_json(kernel, "sigma");
  m.kernel.validate();
  m.alpha = matrix_from_json(j, "alpha");
  m.centers = matrix_from_json(j, "centers");
  m.training = matrix_from_json(j, "training");
  if (j.contains("eigenvalues")) m.eigenvalues = vector_from_json(j, "eigenvalues");
  if (j.contains("ridge")) m.ridge = number_from_json(j, "ridge");
  if (j.contains("training_assignments")) m.training_assignments = j["training_assignments"].get<std::vector<int>>();
  if (m.alpha.cols() != m.training.rows()) throw ParseError("'alpha' must have one column per training point", 1);
  if (m.centers.cols() != m.alpha.rows()) throw ParseError("'centers' must live in the embedding space", 1);
  return m;
}

int Table::column(const std::string& name) const {
  for (std::size_t c = 0; c < header.size(); ++c)
    if (header[c] == name) return static_cast<int>(c);
  throw ValidationError("no column named '" + name + "'");
}

Table read_table(std::istream& in) {
  Table table;
  std::vector<std::vector<double>> rows;
  std::string line;
  std::size_t line_no = 0;
  std::size_t width = 0;
  bool first = true;
  while (std::getline(in, line)) {
    ++line_no;
    const auto view = trim_left(line);
    if (view.empty() || view.front() == '#' || blank(view)) continue;
    const auto fields = split_fields(view);
    std::vector<double> row;
    row.reserve(fields.size());
    bool numeric = true;
    for (const auto f : fields) {
      double x = 0.0;
      if (!parse_double(f, x)) {
        numeric = false;
        break;
      }
      row.push_back(x);
    }
    if (!numeric) {
      if (!first) throw ParseError("non-numeric field in data row", line_no);
      for (const auto f : fields) table.header.emplace_back(f);
      width = fields.size();
      first = false;
      continue;
    }
    if (width == 0) width = row.size();
    if (row.size() != width)
      throw ParseError("expected " + std::to_string(width) + " fields, found " + std::to_string(row.size()), line_no);
    rows.push_back(std::move(row));
    first = false;
  }
  table.rows.resize(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(width));
  for (std::size_t r = 0; r < rows.size(); ++r)
    for (std::size_t c = 0; c < width; ++c)
      table.rows(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = rows[r][c];
  return table;
}

PointSet read_points(std::istream& in) {
  Table t = read_table(in);
  if (t.rows.rows() == 0) throw ParseError("no points found", 1);
  return std::move(t.rows);
}

void write_points(std::ostream& out, const PointSet& points) {
  out.precision(17);
  for (Eigen::Index m = 0; m < points.rows(); ++m) {
    for (Eigen::Index c = 0; c < points.cols(); ++c) out << (c ? "," : "") << points(m, c);
    out << '\n';
  }
}

std::vector<PointSet> continuous_trajectories(const Table& table, const std::string& id_column,
                                              std::vector<std::string> dims) {
  const int id = table.column(id_column);
  if (dims.empty())
    for (const auto& h : table.header)
      if (h != id_column && h != "t") dims.push_back(h);
  if (dims.empty()) throw ValidationError("no coordinate columns selected");
  std::vector<int> cols;
  for (const auto& d : dims) cols.push_back(table.column(d));

  std::vector<PointSet> out;
  Eigen::Index start = 0;
  const auto R = table.rows.rows();
  while (start < R) {
    Eigen::Index end = start;
    while (end < R && table.rows(end, id) == table.rows(start, id)) ++end;
    PointSet traj(end - start, static_cast<Eigen::Index>(cols.size()));
    for (Eigen::Index r = start; r < end; ++r)
      for (std::size_t c = 0; c < cols.size(); ++c) traj(r - start, static_cast<Eigen::Index>(c)) = table.rows(r, cols[c]);
    out.push_back(std::move(traj));
    start = end;
  }
  return out;
}

void write_restart_csv(std::ostream& out, const MultistartReport& report) {
  const bool with_acc = !report.all_accuracies.empty();
  out.precision(17);
  out << "restart,seed,objective,iterations,surviving" << (with_acc ? ",accuracy" : "") << ",failure\n";
  for (std::size_t r = 0; r < report.seeds.size(); ++r) {
    out << r << ',' << report.seeds[r] << ',' << report.all_objectives[r] << ',' << report.all_iterations[r] << ','
        << report.all_surviving[r];
    if (with_acc) out << ',' << report.all_accuracies[r];
    std::string msg = report.failures[r];
    for (char& c : msg)
      if (c == ',' || c == '\n' || c == '"') c = ';';
    out << ',' << msg << '\n';
  }
}

void write_confusion_csv(std::ostream& out, const ConfusionMatrix& matrix, bool one_based) {
  const int offset = one_based ? 1 : 0;
  out << "true";
  for (Eigen::Index c = 0; c < matrix.counts.cols(); ++c) out << ",est_" << c + offset;
  out << '\n';
  for (Eigen::Index r = 0; r < matrix.counts.rows(); ++r) {
    out << r + offset;
    for (Eigen::Index c = 0; c < matrix.counts.cols(); ++c) out << ',' << matrix.counts(r, c);
    out << '\n';
  }
}

void write_misa_csv(std::ostream& out, const std::vector<MisaTrajectory>& trajectories, const std::vector<int>& groups) {
  if (!groups.empty() && groups.size() != trajectories.size())
    throw ValidationError("one group label per trajectory required");
  out << "traj,group,t,a,b,geneA,geneB\n";
  for (std::size_t n = 0; n < trajectories.size(); ++n)
    for (const auto& smp : trajectories[n].samples)
      out << n << ',' << (groups.empty() ? 0 : groups[n]) << ',' << smp.t << ',' << smp.state.a << ','
          << smp.state.b << ',' << condition_label(smp.state.gene_a) << ',' << condition_label(smp.state.gene_b)
          << '\n';
}

json misa_params_to_json(const MisaParams& p) {
  return {{"g00", p.g00}, {"g01", p.g01}, {"g10", p.g10}, {"g11", p.g11}, {"d", p.d},
          {"h_a", p.h_a}, {"f_a", p.f_a}, {"h_r", p.h_r}, {"f_r", p.f_r}};
}

MisaParams misa_params_from_json(const json& j) {
  if (!j.is_object()) throw ParseError("expected a JSON object of rates", 1);
  MisaParams p;
  const std::pair<const char*, double*> fields[] = {{"g00", &p.g00}, {"g01", &p.g01}, {"g10", &p.g10},
                                                    {"g11", &p.g11}, {"d", &p.d},     {"h_a", &p.h_a},
                                                    {"f_a", &p.f_a}, {"h_r", &p.h_r}, {"f_r", &p.f_r}};
  for (const auto& [name, dst] : fields)
    if (j.contains(name)) *dst = number_from_json(j, name);
  for (const auto& [key, value] : j.items()) {
    bool known = false;
    for (const auto& [name, dst] : fields) known = known || key == name;
    if (!known) throw ParseError("unknown rate '" + key + "'", 1);
  }
  p.validate();
  return p;
}

std::string read_text_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open '" + path.string() + "' for reading");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_text_file(const std::filesystem::path& path, const std::string& text) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open '" + path.string() + "' for writing");
  out << text;
  if (!out) throw std::runtime_error("write to '" + path.string() + "' failed");
}

json read_json_file(const std::filesystem::path& path) {
  const std::string text = read_text_file(path);
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    // Byte offset -> line number.
    const auto upto = std::min<std::size_t>(e.byte, text.size());
    const auto line = 1 + static_cast<std::size_t>(std::count(text.begin(), text.begin() + upto, '\n'));
    throw ParseError(path.string() + ": malformed JSON", line);
  }
}

void write_json_file(const std::filesystem::path& path, const json& j) { write_text_file(path, j.dump(2) + "\n"); }

}  // namespace mcmix
