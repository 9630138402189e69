#include "dqc/pipeline.hpp"

#include <charconv>
#include <cmath>
#include <sstream>

#include "dqc/cluster.hpp"
#include "dqc/errors.hpp"
#include "dqc/filter.hpp"
#include "dqc/io.hpp"

namespace dqc {

namespace fs = std::filesystem;

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

std::vector<std::string> split_list(const std::string& s) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = trim(item);
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

double to_double(const std::string& key, const std::string& v) {
  double out = 0.0;
  const auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (v.empty() || ec != std::errc() || ptr != v.data() + v.size() || !std::isfinite(out)) {
    throw ConfigError(key + ": expected a number, got '" + v + "'");
  }
  return out;
}

std::uint64_t to_unsigned(const std::string& key, const std::string& v) {
  std::uint64_t out = 0;
  const auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (v.empty() || ec != std::errc() || ptr != v.data() + v.size()) {
    throw ConfigError(key + ": expected a non-negative integer, got '" + v + "'");
  }
  return out;
}

bool to_bool(const std::string& key, const std::string& v) {
  if (v == "true" || v == "yes" || v == "1") return true;
  if (v == "false" || v == "no" || v == "0") return false;
  throw ConfigError(key + ": expected true or false, got '" + v + "'");
}

std::string join(const std::vector<std::string>& items) {
  std::string out;
  for (std::size_t i = 0; i < items.size(); ++i) out += (i ? "," : "") + items[i];
  return out;
}

std::string bool_text(bool b) { return b ? "true" : "false"; }

PointSet raw_points(const DataMatrix& data, bool rescale) {
  PointSet p = PointSet::from_coords(data.values);
  p.labels = data.labels;
  for (Eigen::Index i = 0; i < p.coords.rows(); ++i) {
    const double norm = p.coords.row(i).norm();
    if (norm < kDegenerateRowNorm) {
      p.coords.row(i).setZero();
      p.degenerate[static_cast<std::size_t>(i)] = true;
    } else if (rescale) {
      p.coords.row(i) /= norm;
    }
  }
  return p;
}

}  // namespace

void PipelineConfig::validate() const {
  if (input.empty()) throw ConfigError("input: no input file given");
  if (!(sigma > 0.0)) throw ConfigError("sigma must be positive");
  if (!(mass > 0.0)) throw ConfigError("mass must be positive");
  if (!(dt > 0.0)) throw ConfigError("dt must be positive");
  if (steps < 1) throw ConfigError("steps must be at least 1");
  if (stages < 1) throw ConfigError("stages must be at least 1");
  if (!(basis_cutoff > 0.0 && basis_cutoff < 1.0)) throw ConfigError("basis_cutoff must lie in (0, 1)");
  if (potential_samples < 1) throw ConfigError("potential_samples must be at least 1");
  if (!(sigma_stage_factor > 0.0)) throw ConfigError("sigma_stage_factor must be positive");
  if (!(representative_threshold >= 0.0 && representative_threshold < 1.0)) {
    throw ConfigError("representative_threshold must lie in [0, 1)");
  }
  if (!(epsilon >= 0.0)) throw ConfigError("epsilon must be non-negative");
  if (!(epsilon_fraction > 0.0)) throw ConfigError("epsilon_fraction must be positive");
  for (auto c : svd_components) {
    if (c < 1) throw ConfigError("svd_components are 1-based");
  }
  if (!std::isfinite(filter_std_multiplier)) throw ConfigError("filter_std_multiplier must be finite");
  if (output_dir.empty()) throw ConfigError("output_dir must not be empty");
}

ModelParams PipelineConfig::model_params() const {
  ModelParams p;
  p.sigma = sigma;
  p.mass = mass;
  p.basis_cutoff = basis_cutoff;
  p.potential_rule = potential_rule;
  p.potential_samples = potential_samples;
  p.seed = seed;
  return p;
}

EvolutionParams PipelineConfig::evolution_params() const {
  EvolutionParams p;
  p.dt = dt;
  p.steps = steps;
  p.stages = stages;
  p.early_stop = early_stop;
  p.sigma_stage_factor = sigma_stage_factor;
  return p;
}

TableFormat PipelineConfig::table_format() const {
  TableFormat f;
  f.delimiter = delimiter;
  f.header = header;
  if (!label_column.empty()) f.label_column = label_column;
  f.drop_columns = drop_columns;
  return f;
}

const std::vector<std::string>& config_keys() {
  static const std::vector<std::string> keys = {
      "input", "delimiter", "header", "label_column", "drop_columns",
      "svd_components", "weighting", "rescale",
      "filter_stages", "filter_std_multiplier",
      "sigma", "mass", "dt", "steps", "stages", "basis_cutoff",
      "potential_rule", "potential_samples", "sigma_stage_factor", "early_stop",
      "representative_threshold", "epsilon", "epsilon_fraction",
      "output_dir", "seed", "export_frames"};
  return keys;
}

void set_config_key(PipelineConfig& c, const std::string& key, const std::string& raw) {
  const std::string v = trim(raw);
  if (key == "input") {
    c.input = v;
  } else if (key == "delimiter") {
    if (v == "auto") c.delimiter = '\0';
    else if (v == "comma" || v == ",") c.delimiter = ',';
    else if (v == "tab" || v == "\\t") c.delimiter = '\t';
    else throw ConfigError("delimiter: expected auto, comma or tab");
  } else if (key == "header") {
    if (v == "auto") c.header = HeaderPolicy::kAuto;
    else if (v == "yes" || v == "true") c.header = HeaderPolicy::kPresent;
    else if (v == "no" || v == "false") c.header = HeaderPolicy::kAbsent;
    else throw ConfigError("header: expected auto, yes or no");
  } else if (key == "label_column") {
    c.label_column = v;
  } else if (key == "drop_columns") {
    c.drop_columns = split_list(v);
  } else if (key == "svd_components") {
    c.svd_components.clear();
    if (v != "none" && !v.empty()) {
      for (const auto& item : split_list(v)) {
        c.svd_components.push_back(static_cast<std::size_t>(to_unsigned(key, item)));
      }
    }
  } else if (key == "weighting") {
    if (v == "unweighted") c.weighting = Weighting::kUnweighted;
    else if (v == "singular") c.weighting = Weighting::kSingular;
    else throw ConfigError("weighting: expected unweighted or singular");
  } else if (key == "rescale") {
    c.rescale = to_bool(key, v);
  } else if (key == "filter_stages") {
    c.filter_stages = static_cast<std::size_t>(to_unsigned(key, v));
  } else if (key == "filter_std_multiplier") {
    c.filter_std_multiplier = to_double(key, v);
  } else if (key == "sigma") {
    c.sigma = to_double(key, v);
  } else if (key == "mass") {
    c.mass = to_double(key, v);
  } else if (key == "dt") {
    c.dt = to_double(key, v);
  } else if (key == "steps") {
    c.steps = static_cast<std::size_t>(to_unsigned(key, v));
  } else if (key == "stages") {
    c.stages = static_cast<std::size_t>(to_unsigned(key, v));
  } else if (key == "basis_cutoff") {
    c.basis_cutoff = to_double(key, v);
  } else if (key == "potential_rule") {
    if (v == "midpoint") c.potential_rule = PotentialRule::kMidpoint;
    else if (v == "sampled") c.potential_rule = PotentialRule::kSampled;
    else throw ConfigError("potential_rule: expected midpoint or sampled");
  } else if (key == "potential_samples") {
    c.potential_samples = static_cast<std::size_t>(to_unsigned(key, v));
  } else if (key == "sigma_stage_factor") {
    c.sigma_stage_factor = to_double(key, v);
  } else if (key == "early_stop") {
    c.early_stop = to_bool(key, v);
  } else if (key == "representative_threshold") {
    c.representative_threshold = to_double(key, v);
  } else if (key == "epsilon") {
    c.epsilon = to_double(key, v);
  } else if (key == "epsilon_fraction") {
    c.epsilon_fraction = to_double(key, v);
  } else if (key == "output_dir") {
    c.output_dir = v;
  } else if (key == "seed") {
    c.seed = to_unsigned(key, v);
  } else if (key == "export_frames") {
    c.export_frames = to_bool(key, v);
  } else {
    throw ConfigError("unknown config key '" + key + "'");
  }
}

PipelineConfig parse_config(const std::string& text) {
  PipelineConfig c;
  std::istringstream in(text);
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const std::string t = trim(line.substr(0, line.find('#')));
    if (t.empty()) continue;
    const auto eq = t.find('=');
    if (eq == std::string::npos) {
      throw ConfigError("config line " + std::to_string(lineno) + ": expected key = value");
    }
    set_config_key(c, trim(t.substr(0, eq)), t.substr(eq + 1));
  }
  return c;
}

std::string serialize_config(const PipelineConfig& c) {
  std::vector<std::string> comps;
  for (auto s : c.svd_components) comps.push_back(std::to_string(s));
  const char* delim = c.delimiter == ',' ? "comma" : c.delimiter == '\t' ? "tab" : "auto";
  const char* header = c.header == HeaderPolicy::kPresent  ? "yes"
                       : c.header == HeaderPolicy::kAbsent ? "no"
                                                           : "auto";
  std::ostringstream out;
  out << "input = " << c.input << '\n'
      << "delimiter = " << delim << '\n'
      << "header = " << header << '\n'
      << "label_column = " << c.label_column << '\n'
      << "drop_columns = " << join(c.drop_columns) << '\n'
      << "svd_components = " << (comps.empty() ? "none" : join(comps)) << '\n'
      << "weighting = " << (c.weighting == Weighting::kSingular ? "singular" : "unweighted") << '\n'
      << "rescale = " << bool_text(c.rescale) << '\n'
      << "filter_stages = " << c.filter_stages << '\n'
      << "filter_std_multiplier = " << format_double(c.filter_std_multiplier) << '\n'
      << "sigma = " << format_double(c.sigma) << '\n'
      << "mass = " << format_double(c.mass) << '\n'
      << "dt = " << format_double(c.dt) << '\n'
      << "steps = " << c.steps << '\n'
      << "stages = " << c.stages << '\n'
      << "basis_cutoff = " << format_double(c.basis_cutoff) << '\n'
      << "potential_rule = " << (c.potential_rule == PotentialRule::kSampled ? "sampled" : "midpoint")
      << '\n'
      << "potential_samples = " << c.potential_samples << '\n'
      << "sigma_stage_factor = " << format_double(c.sigma_stage_factor) << '\n'
      << "early_stop = " << bool_text(c.early_stop) << '\n'
      << "representative_threshold = " << format_double(c.representative_threshold) << '\n'
      << "epsilon = " << format_double(c.epsilon) << '\n'
      << "epsilon_fraction = " << format_double(c.epsilon_fraction) << '\n'
      << "output_dir = " << c.output_dir << '\n'
      << "seed = " << c.seed << '\n'
      << "export_frames = " << bool_text(c.export_frames) << '\n';
  return out.str();
}

PipelineConfig load_config(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open config '" + path.string() + "'");
  return parse_config(read_text(path));
}

EvolutionRun evolve_stage(const PointSet& points, const ModelParams& model_params,
                          const EvolutionParams& evo_params, double representative_threshold,
                          const FrameCallback& on_frame) {
  if (representative_threshold > 0.0) {
    const RepresentativeSet reps =
        select_representatives(points, model_params.sigma, representative_threshold);
    const QuantumModel model = build_subset_model(points, reps, model_params);
    return evolve_with_projection(points, reps, model, evo_params, -1.0, on_frame);
  }
  return evolve(build_model(points, model_params), evo_params, on_frame);
}

std::vector<PointSet> run_dqc_stages(const PointSet& points, const ModelParams& model_params,
                                     const EvolutionParams& evo_params,
                                     double representative_threshold,
                                     const StageFrameCallback& on_frame) {
  evo_params.validate();
  std::vector<PointSet> out;
  PointSet current = points;
  ModelParams params = model_params;
  for (std::size_t stage = 1; stage <= evo_params.stages; ++stage) {
    if (stage > 1) params.sigma *= evo_params.sigma_stage_factor;
    FrameCallback frame;
    if (on_frame) {
      frame = [&on_frame, stage](std::size_t step, const Eigen::MatrixXd& pos,
                                 const Eigen::VectorXd& norms) { on_frame(stage, step, pos, norms); };
    }
    const EvolutionRun run = evolve_stage(current, params, evo_params, representative_threshold, frame);
    current = current.with_coords(run.final_positions());
    out.push_back(current);
  }
  return out;
}

PipelineSummary run_pipeline(const PipelineConfig& config) {
  config.validate();
  DataMatrix data = load_matrix(config.input, config.table_format());

  PipelineSummary summary;
  const fs::path out = config.output_dir;
  fs::create_directories(out);
  auto record = [&summary](const fs::path& p) { summary.artifacts.push_back(p); };

  write_text(out / "config.txt", serialize_config(config));
  record(out / "config.txt");

  if (config.filter_stages > 0) {
    const FilterResult fr =
        filter_features(data, config.filter_stages, RetentionRule{config.filter_std_multiplier});
    std::string report;
    for (const auto& stage : fr.stages) report += filter_stage_json(stage).dump() + '\n';
    if (fr.stopped_early) {
      report += nlohmann::json{{"stopped_early", true}, {"reason", fr.stop_reason},
                               {"survivors", fr.kept.size()}}
                    .dump() +
                '\n';
    }
    write_text(out / "filter_report.jsonl", report);
    record(out / "filter_report.jsonl");
    data = fr.filtered;
  }
  summary.n_points = data.rows();
  summary.n_features = data.cols();

  PointSet points;
  if (config.svd_components.empty()) {
    points = raw_points(data, config.rescale);
  } else {
    std::vector<std::size_t> comps;
    for (auto c : config.svd_components) comps.push_back(c - 1);
    const SvdFactorization f = svd_decompose(data, SvdMode::kThin);
    points = reduce_and_rescale(f, data, comps, ReduceOptions{config.weighting, config.rescale});
  }

  write_points_csv(out / "positions_stage0.csv", points);
  record(out / "positions_stage0.csv");

  std::optional<FrameWriter> frames;
  StageFrameCallback on_frame;
  if (config.export_frames) {
    on_frame = [&](std::size_t stage, std::size_t step, const Eigen::MatrixXd& pos,
                   const Eigen::VectorXd& norms) {
      if (step == 0) {
        if (frames) frames->close();
        const auto path = out / ("frames_stage" + std::to_string(stage) + ".jsonl");
        frames.emplace(path);
        record(path);
      }
      frames->write(stage, step, pos, norms);
    };
  }
  const std::vector<PointSet> stages =
      run_dqc_stages(points, config.model_params(), config.evolution_params(),
                     config.representative_threshold, on_frame);
  if (frames) frames->close();
  for (std::size_t s = 0; s < stages.size(); ++s) {
    const auto path = out / ("positions_stage" + std::to_string(s + 1) + ".csv");
    write_points_csv(path, stages[s]);
    record(path);
  }
  points = stages.back();

  const double eps =
      config.epsilon > 0.0 ? config.epsilon : default_epsilon(points.coords, config.epsilon_fraction);
  ClusterResult clusters = extract_clusters(points.coords, eps);
  if (points.labels && points.size() >= 2) {
    clusters.jaccard = jaccard_score(clusters.labels, encode_labels(*points.labels));
  }
  write_labels_csv(out / "labels.csv", points.source_ids, clusters.labels);
  record(out / "labels.csv");
  write_text(out / "score.json", score_json(clusters).dump(2) + '\n');
  record(out / "score.json");

  summary.n_clusters = clusters.n_clusters;
  summary.jaccard = clusters.jaccard;
  return summary;
}

}  // namespace dqc
