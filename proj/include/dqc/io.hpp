#pragma once

#include <filesystem>
#include <fstream>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <json.hpp>

#include "dqc/cluster.hpp"
#include "dqc/data.hpp"
#include "dqc/filter.hpp"
#include "dqc/model.hpp"

namespace dqc {

/// Shortest decimal text that parses back to the same double.
std::string format_double(double v);

/// Plain CSV with an optional header row; values written with format_double.
void write_matrix_csv(const std::filesystem::path& path, const Eigen::MatrixXd& m,
                      const std::vector<std::string>& header = {});
Eigen::MatrixXd read_matrix_csv(const std::filesystem::path& path);

/// Writes U.csv, S.csv and V.csv into `dir`.
void export_svd(const std::filesystem::path& dir, const SvdFactorization& f);

/// Point file: header "id,c1,...,cr[,label]", one row per point.
void write_points_csv(const std::filesystem::path& path, const PointSet& points);
PointSet read_points_csv(const std::filesystem::path& path);

/// Label file: header "id,label".
void write_labels_csv(const std::filesystem::path& path, const std::vector<std::size_t>& ids,
                      const std::vector<int>& labels);
/// Reads the "label" column of a labelled CSV (any other columns ignored).
std::vector<std::string> read_label_column(const std::filesystem::path& path,
                                           const std::string& column = "label");

/// {"jaccard": ..., "n_clusters": ..., "epsilon": ...}; jaccard is null when absent.
nlohmann::json score_json(const ClusterResult& result);

nlohmann::json filter_stage_json(const FilterStageReport& report);

/// N, H, X_k and T with explicit shapes.
nlohmann::json model_json(const QuantumModel& model);
/// gram.csv, hamiltonian.csv, position_<k>.csv and transform.csv into `dir`.
void export_model_csv(const std::filesystem::path& dir, const QuantumModel& model);

/// One JSON object per line:
///   {"stage": s, "step": t, "positions": [[...], ...], "norms": [...]}
class FrameWriter {
 public:
  explicit FrameWriter(const std::filesystem::path& path);
  void write(std::size_t stage, std::size_t step, const Eigen::MatrixXd& positions,
             const Eigen::VectorXd& norms);
  void close();

 private:
  std::ofstream out_;
  std::filesystem::path path_;
};

void write_text(const std::filesystem::path& path, const std::string& text);
std::string read_text(const std::filesystem::path& path);

}  // namespace dqc
