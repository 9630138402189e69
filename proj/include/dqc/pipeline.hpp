#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "dqc/data.hpp"
#include "dqc/evolution.hpp"
#include "dqc/model.hpp"

namespace dqc {

/// Every knob of the load -> filter -> reduce -> evolve -> extract -> score
/// workflow. Text form is one `key = value` per line; '#' starts a comment.
struct PipelineConfig {
  std::string input;
  char delimiter = '\0';                 // key "delimiter": auto | comma | tab
  HeaderPolicy header = HeaderPolicy::kAuto;
  std::string label_column;              // empty: no labels
  std::vector<std::string> drop_columns;

  /// 1-based SVD component numbers; empty means use the raw columns.
  std::vector<std::size_t> svd_components;
  Weighting weighting = Weighting::kUnweighted;
  bool rescale = true;

  std::size_t filter_stages = 0;
  double filter_std_multiplier = 0.0;

  double sigma = 0.1;
  double mass = 1.0;
  double dt = 0.1;
  std::size_t steps = 40;
  std::size_t stages = 1;
  double basis_cutoff = 1e-6;
  PotentialRule potential_rule = PotentialRule::kMidpoint;
  std::size_t potential_samples = 64;
  double sigma_stage_factor = 1.0;
  bool early_stop = false;

  double representative_threshold = 0.0;  // 0 evolves every point directly

  double epsilon = 0.0;                   // > 0 overrides epsilon_fraction
  double epsilon_fraction = 0.05;

  std::string output_dir = "dqc_out";
  std::uint64_t seed = 20090101;
  bool export_frames = false;

  /// Throws ConfigError on any out-of-range value.
  void validate() const;

  ModelParams model_params() const;
  EvolutionParams evolution_params() const;
  TableFormat table_format() const;

  bool operator==(const PipelineConfig&) const = default;
};

/// Names accepted by set_config_key, in serialization order.
const std::vector<std::string>& config_keys();

/// Assigns one key from its text value. Throws ConfigError for unknown keys
/// or unparsable values.
void set_config_key(PipelineConfig& config, const std::string& key, const std::string& value);

PipelineConfig parse_config(const std::string& text);
std::string serialize_config(const PipelineConfig& config);
PipelineConfig load_config(const std::filesystem::path& path);

/// Runs one stage of evolution for `points`, honouring the representative
/// path when enabled. Shared by the pipeline and the `evolve` subcommand so
/// both produce identical numbers.
EvolutionRun evolve_stage(const PointSet& points, const ModelParams& model_params,
                          const EvolutionParams& evo_params, double representative_threshold,
                          const FrameCallback& on_frame = {});

/// Stop-and-restart loop over evolve_stage: stage s uses sigma scaled by
/// sigma_stage_factor^(s-1) and starts from the final centroids of stage s-1.
std::vector<PointSet> run_dqc_stages(const PointSet& points, const ModelParams& model_params,
                                     const EvolutionParams& evo_params,
                                     double representative_threshold,
                                     const StageFrameCallback& on_frame = {});

struct PipelineSummary {
  std::size_t n_points = 0;
  std::size_t n_features = 0;
  std::size_t n_clusters = 0;
  std::optional<double> jaccard;
  std::vector<std::filesystem::path> artifacts;
};

/// Runs the whole workflow and writes its artifacts under config.output_dir:
///   config.txt, filter_report.jsonl (when filtering), positions_stage<s>.csv
///   for s = 0..stages, frames_stage<s>.jsonl (with export_frames),
///   labels.csv and score.json.
PipelineSummary run_pipeline(const PipelineConfig& config);

}  // namespace dqc
