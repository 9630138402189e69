#include "dqc/io.hpp"

#include <algorithm>
#include <charconv>
#include <sstream>

#include "dqc/errors.hpp"

namespace dqc {

namespace {

nlohmann::json matrix_json(const Eigen::MatrixXd& m) {
  nlohmann::json rows = nlohmann::json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    nlohmann::json row = nlohmann::json::array();
    for (Eigen::Index j = 0; j < m.cols(); ++j) row.push_back(m(i, j));
    rows.push_back(std::move(row));
  }
  return {{"shape", {m.rows(), m.cols()}}, {"data", std::move(rows)}};
}

std::ofstream open_out(const std::filesystem::path& path) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot write '" + path.string() + "'");
  return out;
}

}  // namespace

std::string format_double(double v) {
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, ptr);
}

void write_text(const std::filesystem::path& path, const std::string& text) {
  auto out = open_out(path);
  out << text;
  if (!out) throw IoError("failed writing '" + path.string() + "'");
}

std::string read_text(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open '" + path.string() + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

void write_matrix_csv(const std::filesystem::path& path, const Eigen::MatrixXd& m,
                      const std::vector<std::string>& header) {
  std::string text;
  for (std::size_t c = 0; c < header.size(); ++c) text += (c ? "," : "") + header[c];
  if (!header.empty()) text += '\n';
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    for (Eigen::Index j = 0; j < m.cols(); ++j) {
      if (j) text += ',';
      text += format_double(m(i, j));
    }
    text += '\n';
  }
  write_text(path, text);
}

Eigen::MatrixXd read_matrix_csv(const std::filesystem::path& path) {
  return load_matrix(path).values;
}

void export_svd(const std::filesystem::path& dir, const SvdFactorization& f) {
  write_matrix_csv(dir / "U.csv", f.U);
  write_matrix_csv(dir / "S.csv", f.S);
  write_matrix_csv(dir / "V.csv", f.V);
}

void write_points_csv(const std::filesystem::path& path, const PointSet& points) {
  std::string text = "id";
  for (std::size_t k = 0; k < points.dim(); ++k) text += ",c" + std::to_string(k + 1);
  if (points.labels) text += ",label";
  text += '\n';
  for (std::size_t i = 0; i < points.size(); ++i) {
    text += std::to_string(points.source_ids[i]);
    for (Eigen::Index k = 0; k < points.coords.cols(); ++k) {
      text += ',' + format_double(points.coords(static_cast<Eigen::Index>(i), k));
    }
    if (points.labels) text += ',' + (*points.labels)[i];
    text += '\n';
  }
  write_text(path, text);
}

PointSet read_points_csv(const std::filesystem::path& path) {
  const std::string text = read_text(path);
  const auto first_line = text.substr(0, text.find('\n'));
  TableFormat format;
  format.header = HeaderPolicy::kPresent;
  if (first_line.find(",label") != std::string::npos) format.label_column = "label";
  DataMatrix dm = parse_matrix(text, format);
  if (dm.feature_names.empty() || dm.feature_names.front() != "id" || dm.cols() < 2) {
    throw ParseError("point file '" + path.string() + "' must start with an id column");
  }
  const Eigen::Index n = dm.values.rows();
  PointSet p = PointSet::from_coords(dm.values.rightCols(dm.values.cols() - 1));
  for (Eigen::Index i = 0; i < n; ++i) {
    const double id = dm.values(i, 0);
    if (id < 0 || id != static_cast<double>(static_cast<std::size_t>(id))) {
      throw ParseError("row " + std::to_string(i + 2) + ": id must be a non-negative integer");
    }
    p.source_ids[static_cast<std::size_t>(i)] = static_cast<std::size_t>(id);
  }
  p.labels = dm.labels;
  return p;
}

void write_labels_csv(const std::filesystem::path& path, const std::vector<std::size_t>& ids,
                      const std::vector<int>& labels) {
  if (ids.size() != labels.size()) throw ArgumentError("id and label counts differ");
  std::string text = "id,label\n";
  for (std::size_t i = 0; i < ids.size(); ++i) {
    text += std::to_string(ids[i]) + ',' + std::to_string(labels[i]) + '\n';
  }
  write_text(path, text);
}

std::vector<std::string> read_label_column(const std::filesystem::path& path,
                                           const std::string& column) {
  // Other columns may be non-numeric, so this does not go through parse_matrix.
  auto split_line = [](std::string line, char delim) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    std::vector<std::string> cells;
    std::size_t start = 0;
    while (true) {
      const auto pos = line.find(delim, start);
      cells.push_back(line.substr(start, pos == std::string::npos ? pos : pos - start));
      if (pos == std::string::npos) break;
      start = pos + 1;
    }
    return cells;
  };

  std::istringstream in(read_text(path));
  std::string line;
  if (!std::getline(in, line)) throw EmptyInputError("'" + path.string() + "' is empty");
  const char delim = line.find('\t') != std::string::npos ? '\t' : ',';
  const auto names = split_line(line, delim);
  const auto it = std::find(names.begin(), names.end(), column);
  if (it == names.end()) {
    throw ParseError("'" + path.string() + "' has no column named '" + column + "'");
  }
  const auto label_idx = static_cast<std::size_t>(it - names.begin());

  std::vector<std::string> labels;
  std::size_t lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty() || line == "\r") continue;
    const auto cells = split_line(line, delim);
    if (cells.size() != names.size()) {
      throw ParseError("row " + std::to_string(lineno) + " has " + std::to_string(cells.size()) +
                       " fields, expected " + std::to_string(names.size()));
    }
    labels.push_back(cells[label_idx]);
  }
  if (labels.empty()) throw EmptyInputError("'" + path.string() + "' has no label rows");
  return labels;
}

nlohmann::json score_json(const ClusterResult& result) {
  nlohmann::json j;
  j["jaccard"] = result.jaccard ? nlohmann::json(*result.jaccard) : nlohmann::json(nullptr);
  j["n_clusters"] = result.n_clusters;
  j["epsilon"] = result.epsilon;
  return j;
}

nlohmann::json filter_stage_json(const FilterStageReport& r) {
  return {{"stage", r.stage},
          {"removed", r.removed},
          {"removed_names", r.removed_names},
          {"survivors", r.survivors.size()},
          {"threshold", r.threshold},
          {"entropy_before", r.entropy_before},
          {"entropy_after", r.entropy_after}};
}

nlohmann::json model_json(const QuantumModel& model) {
  nlohmann::json j;
  j["n"] = model.size();
  j["dim"] = model.dim();
  j["q"] = model.basis.size();
  j["sigma"] = model.params.sigma;
  j["mass"] = model.params.mass;
  j["basis_cutoff"] = model.params.basis_cutoff;
  j["points"] = matrix_json(model.points.coords);
  j["gram"] = matrix_json(model.gram);
  j["hamiltonian"] = matrix_json(model.hamiltonian);
  nlohmann::json xs = nlohmann::json::array();
  for (const auto& x : model.position) xs.push_back(matrix_json(x));
  j["position"] = std::move(xs);
  j["transform"] = matrix_json(model.basis.T);
  return j;
}

void export_model_csv(const std::filesystem::path& dir, const QuantumModel& model) {
  write_matrix_csv(dir / "gram.csv", model.gram);
  write_matrix_csv(dir / "hamiltonian.csv", model.hamiltonian);
  for (std::size_t k = 0; k < model.position.size(); ++k) {
    write_matrix_csv(dir / ("position_" + std::to_string(k + 1) + ".csv"), model.position[k]);
  }
  write_matrix_csv(dir / "transform.csv", model.basis.T);
}

FrameWriter::FrameWriter(const std::filesystem::path& path) : out_(open_out(path)), path_(path) {}

void FrameWriter::write(std::size_t stage, std::size_t step, const Eigen::MatrixXd& positions,
                        const Eigen::VectorXd& norms) {
  nlohmann::json rec;
  rec["stage"] = stage;
  rec["step"] = step;
  rec["positions"] = matrix_json(positions)["data"];
  rec["norms"] = std::vector<double>(norms.data(), norms.data() + norms.size());
  out_ << rec.dump() << '\n';
  if (!out_) throw IoError("failed writing '" + path_.string() + "'");
}

void FrameWriter::close() {
  out_.close();
  if (out_.fail()) throw IoError("failed closing '" + path_.string() + "'");
}

}  // namespace dqc
