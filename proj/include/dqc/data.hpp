#pragma once

#include <cstddef>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace dqc {

/// Record-by-feature numeric table. Expert labels ride along but are never
/// read by the clustering operations.
struct DataMatrix {
  Eigen::MatrixXd values;
  std::vector<std::string> feature_names;  // empty or one per column
  std::optional<std::vector<std::string>> labels;

  std::size_t rows() const { return static_cast<std::size_t>(values.rows()); }
  std::size_t cols() const { return static_cast<std::size_t>(values.cols()); }

  /// Throws ArgumentError if any invariant (finite, non-empty, label count) fails.
  void validate() const;

  /// Copy restricted to the given rows (in the given order).
  DataMatrix select_rows(const std::vector<std::size_t>& rows) const;
  /// Copy restricted to the given columns (in the given order).
  DataMatrix select_cols(const std::vector<std::size_t>& cols) const;
};

enum class HeaderPolicy { kAuto, kPresent, kAbsent };

/// How a delimited text table is read.
struct TableFormat {
  char delimiter = '\0';  // '\0' picks ',' or '\t' from the first line
  HeaderPolicy header = HeaderPolicy::kAuto;
  /// Column holding expert labels, by header name or 0-based index.
  std::optional<std::string> label_column;
  /// Columns skipped entirely (names or 0-based indices).
  std::vector<std::string> drop_columns;
};

DataMatrix load_matrix(const std::filesystem::path& path, const TableFormat& format = {});
DataMatrix parse_matrix(const std::string& text, const TableFormat& format = {});

/// M = U * diag(S) * V^T.
///
/// Full mode keeps square U (n x n) and V (d x d). Thin mode keeps only the
/// min(n, d) leading columns, which is what large feature counts need.
/// Each left singular vector is oriented so that its largest-magnitude entry
/// is positive (ties go to the lowest row); the matching right vector flips
/// with it.
struct SvdFactorization {
  Eigen::MatrixXd U;
  Eigen::VectorXd S;
  Eigen::MatrixXd V;

  std::size_t rank_count() const { return static_cast<std::size_t>(S.size()); }
};

enum class SvdMode { kFull, kThin };

SvdFactorization svd_decompose(const Eigen::MatrixXd& m, SvdMode mode = SvdMode::kFull);
SvdFactorization svd_decompose(const DataMatrix& m, SvdMode mode = SvdMode::kFull);

/// Sum of the `rank` leading rank-one terms S_k * u_k * v_k^T.
/// Its squared Frobenius error is the sum of the discarded S_k^2.
Eigen::MatrixXd low_rank_approx(const SvdFactorization& f, std::size_t rank);

/// Rows of the data expressed in a chosen subset of SVD components.
struct PointSet {
  Eigen::MatrixXd coords;                 // n x r
  std::vector<std::size_t> source_ids;    // original record index per row
  std::optional<std::vector<std::string>> labels;
  std::vector<bool> degenerate;           // row had ~zero norm before rescaling

  std::size_t size() const { return static_cast<std::size_t>(coords.rows()); }
  std::size_t dim() const { return static_cast<std::size_t>(coords.cols()); }

  /// Wraps raw coordinates with identity ids and no labels.
  static PointSet from_coords(Eigen::MatrixXd coords);
  /// Same ids, labels and flags, new coordinates (row count must match).
  PointSet with_coords(Eigen::MatrixXd coords) const;
  PointSet select(const std::vector<std::size_t>& rows) const;
};

enum class Weighting {
  kUnweighted,  // rows of U
  kSingular,    // rows of U * diag(S)
};

struct ReduceOptions {
  Weighting weighting = Weighting::kUnweighted;
  bool rescale = true;
};

inline constexpr double kDegenerateRowNorm = 1e-12;

/// Selects U columns (0-based) and optionally scales every row to unit length.
/// Rows whose selected norm is below kDegenerateRowNorm stay at the origin and
/// are flagged in PointSet::degenerate.
PointSet reduce_and_rescale(const SvdFactorization& f, const std::vector<std::size_t>& components,
                            const ReduceOptions& options = {});

/// Convenience overload that carries labels over from the source table.
PointSet reduce_and_rescale(const SvdFactorization& f, const DataMatrix& source,
                            const std::vector<std::size_t>& components,
                            const ReduceOptions& options = {});

/// Largest pairwise Euclidean distance between rows (0 for fewer than two rows).
double diameter(const Eigen::MatrixXd& coords);

}  // namespace dqc
