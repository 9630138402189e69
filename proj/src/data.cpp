#include "dqc/data.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

#include "dqc/errors.hpp"

namespace dqc {

namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\r' || s.front() == '\n')) {
    s.remove_prefix(1);
  }
  while (!s.empty() && (s.back() == ' ' || s.back() == '\r' || s.back() == '\n')) {
    s.remove_suffix(1);
  }
  if (s.size() >= 2 && s.front() == '"' && s.back() == '"') {
    s = s.substr(1, s.size() - 2);
  }
  return s;
}

std::vector<std::string> split(std::string_view line, char delim) {
  std::vector<std::string> cells;
  std::size_t start = 0;
  while (true) {
    const auto pos = line.find(delim, start);
    const auto cell = line.substr(start, pos == std::string_view::npos ? pos : pos - start);
    cells.emplace_back(trim(cell));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return cells;
}

std::optional<double> parse_double(std::string_view s) {
  if (s.empty()) return std::nullopt;
  if (s.front() == '+') s.remove_prefix(1);
  double v = 0.0;
  const auto* end = s.data() + s.size();
  const auto [ptr, ec] = std::from_chars(s.data(), end, v);
  if (ec != std::errc() || ptr != end) return std::nullopt;
  return v;
}

std::optional<std::size_t> parse_index(std::string_view s) {
  std::size_t v = 0;
  const auto* end = s.data() + s.size();
  const auto [ptr, ec] = std::from_chars(s.data(), end, v);
  if (s.empty() || ec != std::errc() || ptr != end) return std::nullopt;
  return v;
}

std::size_t resolve_column(const std::string& spec, const std::vector<std::string>& header,
                           std::size_t width) {
  const auto it = std::find(header.begin(), header.end(), spec);
  if (it != header.end()) return static_cast<std::size_t>(it - header.begin());
  if (const auto idx = parse_index(spec); idx && *idx < width) return *idx;
  throw ParseError("unknown column '" + spec + "'");
}

}  // namespace

void DataMatrix::validate() const {
  if (values.rows() < 1 || values.cols() < 1) {
    throw ArgumentError("data matrix must have at least one row and one column");
  }
  if (!values.allFinite()) throw ArgumentError("data matrix contains non-finite entries");
  if (!feature_names.empty() && feature_names.size() != cols()) {
    throw ArgumentError("feature name count does not match column count");
  }
  if (labels && labels->size() != rows()) {
    throw ArgumentError("label count does not match row count");
  }
}

DataMatrix DataMatrix::select_rows(const std::vector<std::size_t>& rows_to_keep) const {
  DataMatrix out;
  out.values.resize(static_cast<Eigen::Index>(rows_to_keep.size()), values.cols());
  for (std::size_t k = 0; k < rows_to_keep.size(); ++k) {
    if (rows_to_keep[k] >= rows()) throw ArgumentError("row index out of range");
    out.values.row(static_cast<Eigen::Index>(k)) =
        values.row(static_cast<Eigen::Index>(rows_to_keep[k]));
  }
  out.feature_names = feature_names;
  if (labels) {
    out.labels.emplace();
    for (auto r : rows_to_keep) out.labels->push_back((*labels)[r]);
  }
  return out;
}

DataMatrix DataMatrix::select_cols(const std::vector<std::size_t>& cols_to_keep) const {
  DataMatrix out;
  out.values.resize(values.rows(), static_cast<Eigen::Index>(cols_to_keep.size()));
  for (std::size_t k = 0; k < cols_to_keep.size(); ++k) {
    if (cols_to_keep[k] >= cols()) throw ArgumentError("column index out of range");
    out.values.col(static_cast<Eigen::Index>(k)) =
        values.col(static_cast<Eigen::Index>(cols_to_keep[k]));
    if (!feature_names.empty()) out.feature_names.push_back(feature_names[cols_to_keep[k]]);
  }
  out.labels = labels;
  return out;
}

DataMatrix parse_matrix(const std::string& text, const TableFormat& format) {
  std::vector<std::pair<std::size_t, std::string>> lines;  // (1-based line number, text)
  {
    std::istringstream in(text);
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
      ++lineno;
      if (lineno == 1 && line.rfind("\xEF\xBB\xBF", 0) == 0) line.erase(0, 3);
      if (trim(line).empty()) continue;
      lines.emplace_back(lineno, std::move(line));
    }
  }
  if (lines.empty()) throw EmptyInputError("input contains no data");

  char delim = format.delimiter;
  if (delim == '\0') delim = lines.front().second.find('\t') != std::string::npos ? '\t' : ',';

  std::vector<std::vector<std::string>> rows;
  rows.reserve(lines.size());
  for (const auto& [lineno, line] : lines) rows.push_back(split(line, delim));
  const std::size_t width = rows.front().size();

  bool has_header = false;
  switch (format.header) {
    case HeaderPolicy::kPresent: has_header = true; break;
    case HeaderPolicy::kAbsent: has_header = false; break;
    case HeaderPolicy::kAuto:
      has_header = std::any_of(rows.front().begin(), rows.front().end(),
                               [](const std::string& c) { return !parse_double(c); });
      break;
  }
  std::vector<std::string> header;
  if (has_header) header = rows.front();

  std::vector<bool> skip(width, false);
  std::optional<std::size_t> label_col;
  if (format.label_column) {
    label_col = resolve_column(*format.label_column, header, width);
    skip[*label_col] = true;
  }
  for (const auto& c : format.drop_columns) skip[resolve_column(c, header, width)] = true;

  std::vector<std::size_t> value_cols;
  for (std::size_t c = 0; c < width; ++c) {
    if (!skip[c]) value_cols.push_back(c);
  }
  if (value_cols.empty()) throw ParseError("no numeric columns remain");

  const std::size_t first = has_header ? 1 : 0;
  const std::size_t n = rows.size() - first;
  if (n == 0) throw EmptyInputError("input has a header but no data rows");

  DataMatrix out;
  out.values.resize(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(value_cols.size()));
  if (has_header) {
    for (auto c : value_cols) out.feature_names.push_back(header[c]);
  }
  if (label_col) out.labels.emplace();

  for (std::size_t r = first; r < rows.size(); ++r) {
    const auto lineno = lines[r].first;
    const auto& cells = rows[r];
    if (cells.size() != width) {
      throw ParseError("row " + std::to_string(lineno) + " has " + std::to_string(cells.size()) +
                       " fields, expected " + std::to_string(width));
    }
    for (std::size_t k = 0; k < value_cols.size(); ++k) {
      const auto c = value_cols[k];
      const auto v = parse_double(cells[c]);
      if (!v || !std::isfinite(*v)) {
        throw ParseError("row " + std::to_string(lineno) + ", column " + std::to_string(c + 1) +
                         (has_header ? " (" + header[c] + ")" : std::string()) +
                         ": not a finite number: '" + cells[c] + "'");
      }
      out.values(static_cast<Eigen::Index>(r - first), static_cast<Eigen::Index>(k)) = *v;
    }
    if (label_col) out.labels->push_back(cells[*label_col]);
  }
  out.validate();
  return out;
}

DataMatrix load_matrix(const std::filesystem::path& path, const TableFormat& format) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open '" + path.string() + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_matrix(buf.str(), format);
}

SvdFactorization svd_decompose(const Eigen::MatrixXd& m, SvdMode mode) {
  if (m.rows() < 1 || m.cols() < 1) throw ArgumentError("cannot decompose an empty matrix");
  if (!m.allFinite()) throw ArgumentError("cannot decompose a matrix with non-finite entries");

  const unsigned opts = mode == SvdMode::kFull ? (Eigen::ComputeFullU | Eigen::ComputeFullV)
                                               : (Eigen::ComputeThinU | Eigen::ComputeThinV);
  SvdFactorization f;
  // Jacobi is more accurate for the small matrices this is used on; BDC is the
  // only practical choice once the short side grows.
  if (std::min(m.rows(), m.cols()) <= 64) {
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(m, opts);
    if (svd.info() != Eigen::Success) throw NumericalError("SVD did not converge");
    f.U = svd.matrixU();
    f.S = svd.singularValues();
    f.V = svd.matrixV();
  } else {
    Eigen::BDCSVD<Eigen::MatrixXd> svd(m, opts);
    if (svd.info() != Eigen::Success) throw NumericalError("SVD did not converge");
    f.U = svd.matrixU();
    f.S = svd.singularValues();
    f.V = svd.matrixV();
  }

  const Eigen::Index k = f.S.size();
  for (Eigen::Index c = 0; c < f.U.cols(); ++c) {
    Eigen::Index pivot = 0;
    f.U.col(c).cwiseAbs().maxCoeff(&pivot);
    if (f.U(pivot, c) < 0) {
      f.U.col(c) *= -1.0;
      if (c < k) f.V.col(c) *= -1.0;
    }
  }
  // Right null-space vectors (full mode, d > n) have no left partner.
  for (Eigen::Index c = k; c < f.V.cols(); ++c) {
    Eigen::Index pivot = 0;
    f.V.col(c).cwiseAbs().maxCoeff(&pivot);
    if (f.V(pivot, c) < 0) f.V.col(c) *= -1.0;
  }
  return f;
}

SvdFactorization svd_decompose(const DataMatrix& m, SvdMode mode) {
  m.validate();
  return svd_decompose(m.values, mode);
}

Eigen::MatrixXd low_rank_approx(const SvdFactorization& f, std::size_t rank) {
  if (rank < 1 || rank > f.rank_count()) {
    throw ArgumentError("rank " + std::to_string(rank) + " outside [1, " +
                        std::to_string(f.rank_count()) + "]");
  }
  const auto r = static_cast<Eigen::Index>(rank);
  return f.U.leftCols(r) * f.S.head(r).asDiagonal() * f.V.leftCols(r).transpose();
}

PointSet PointSet::from_coords(Eigen::MatrixXd c) {
  PointSet p;
  p.source_ids.resize(static_cast<std::size_t>(c.rows()));
  for (std::size_t i = 0; i < p.source_ids.size(); ++i) p.source_ids[i] = i;
  p.degenerate.assign(p.source_ids.size(), false);
  p.coords = std::move(c);
  return p;
}

PointSet PointSet::with_coords(Eigen::MatrixXd c) const {
  if (c.rows() != coords.rows()) throw ArgumentError("coordinate row count changed");
  PointSet p = *this;
  p.coords = std::move(c);
  return p;
}

PointSet PointSet::select(const std::vector<std::size_t>& rows) const {
  PointSet p;
  p.coords.resize(static_cast<Eigen::Index>(rows.size()), coords.cols());
  if (labels) p.labels.emplace();
  for (std::size_t k = 0; k < rows.size(); ++k) {
    const auto r = rows[k];
    if (r >= size()) throw ArgumentError("point index out of range");
    p.coords.row(static_cast<Eigen::Index>(k)) = coords.row(static_cast<Eigen::Index>(r));
    p.source_ids.push_back(source_ids[r]);
    p.degenerate.push_back(degenerate[r]);
    if (labels) p.labels->push_back((*labels)[r]);
  }
  return p;
}

PointSet reduce_and_rescale(const SvdFactorization& f, const std::vector<std::size_t>& components,
                            const ReduceOptions& options) {
  if (components.empty()) throw ArgumentError("component set is empty");
  const auto available = static_cast<std::size_t>(
      options.weighting == Weighting::kSingular ? f.S.size() : f.U.cols());
  for (auto c : components) {
    if (c >= available) {
      throw ArgumentError("component " + std::to_string(c) + " out of range (have " +
                          std::to_string(available) + ")");
    }
  }

  const Eigen::Index n = f.U.rows();
  Eigen::MatrixXd coords(n, static_cast<Eigen::Index>(components.size()));
  for (std::size_t k = 0; k < components.size(); ++k) {
    const auto c = static_cast<Eigen::Index>(components[k]);
    coords.col(static_cast<Eigen::Index>(k)) = f.U.col(c);
    if (options.weighting == Weighting::kSingular) coords.col(static_cast<Eigen::Index>(k)) *= f.S(c);
  }

  PointSet p = PointSet::from_coords(std::move(coords));
  for (Eigen::Index i = 0; i < n; ++i) {
    const double norm = p.coords.row(i).norm();
    if (norm < kDegenerateRowNorm) {
      p.coords.row(i).setZero();
      p.degenerate[static_cast<std::size_t>(i)] = true;
    } else if (options.rescale) {
      p.coords.row(i) /= norm;
    }
  }
  return p;
}

PointSet reduce_and_rescale(const SvdFactorization& f, const DataMatrix& source,
                            const std::vector<std::size_t>& components,
                            const ReduceOptions& options) {
  if (source.rows() != static_cast<std::size_t>(f.U.rows())) {
    throw ArgumentError("factorization does not belong to this data matrix");
  }
  PointSet p = reduce_and_rescale(f, components, options);
  p.labels = source.labels;
  return p;
}

}  // namespace dqc

namespace dqc {

double diameter(const Eigen::MatrixXd& coords) {
  double best = 0.0;
  for (Eigen::Index i = 0; i < coords.rows(); ++i) {
    for (Eigen::Index j = i + 1; j < coords.rows(); ++j) {
      best = std::max(best, (coords.row(i) - coords.row(j)).squaredNorm());
    }
  }
  return std::sqrt(best);
}

}  // namespace dqc
