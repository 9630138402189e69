#include "dqc/cli.hpp"

#include <iostream>
#include <map>
#include <optional>

#include <CLI11.hpp>

#include "dqc/cluster.hpp"
#include "dqc/errors.hpp"
#include "dqc/filter.hpp"
#include "dqc/io.hpp"
#include "dqc/pipeline.hpp"
#include "dqc/synthetic.hpp"

namespace dqc {

namespace fs = std::filesystem;

namespace {

struct TableArgs {
  std::string input;
  std::string delimiter = "auto";
  std::string header = "auto";
  std::string label_column;
  std::string drop_columns;

  void add_to(CLI::App* cmd) {
    cmd->add_option("--input,-i", input, "Delimited numeric table")->required();
    cmd->add_option("--delimiter", delimiter, "auto, comma or tab");
    cmd->add_option("--header", header, "auto, yes or no");
    cmd->add_option("--label-column", label_column, "Expert label column (name or 0-based index)");
    cmd->add_option("--drop-columns", drop_columns, "Comma-separated columns to ignore");
  }

  DataMatrix load() const {
    PipelineConfig c;
    set_config_key(c, "delimiter", delimiter);
    set_config_key(c, "header", header);
    set_config_key(c, "label_column", label_column);
    set_config_key(c, "drop_columns", drop_columns);
    return load_matrix(input, c.table_format());
  }
};

struct EvolveArgs {
  double sigma = 0.1;
  double mass = 1.0;
  double dt = 0.1;
  std::size_t steps = 40;
  std::size_t stages = 1;
  double basis_cutoff = 1e-6;
  std::string potential_rule = "midpoint";
  std::size_t potential_samples = 64;
  std::uint64_t seed = 20090101;
  double sigma_stage_factor = 1.0;
  bool early_stop = false;
  double representative_threshold = 0.0;

  void add_model_options(CLI::App* cmd) {
    cmd->add_option("--sigma", sigma, "Gaussian width");
    cmd->add_option("--mass", mass, "Evolution mass");
    cmd->add_option("--basis-cutoff", basis_cutoff, "Relative Gram eigenvalue cutoff");
    cmd->add_option("--potential-rule", potential_rule, "midpoint or sampled");
    cmd->add_option("--potential-samples", potential_samples, "Samples per element (sampled rule)");
    cmd->add_option("--seed", seed, "Seed for the sampled rule");
  }
  void add_to(CLI::App* cmd) {
    add_model_options(cmd);
    cmd->add_option("--dt", dt, "Timestep");
    cmd->add_option("--steps", steps, "Timesteps per stage");
    cmd->add_option("--stages", stages, "Stop-and-restart stages");
    cmd->add_option("--sigma-stage-factor", sigma_stage_factor, "Sigma multiplier per stage");
    cmd->add_flag("--early-stop", early_stop, "Stop a stage once points stall");
    cmd->add_option("--representative-threshold", representative_threshold,
                    "Residual threshold for the representative subset (0 = off)");
  }

  PipelineConfig as_config() const {
    PipelineConfig c;
    c.input = "-";
    c.sigma = sigma;
    c.mass = mass;
    c.dt = dt;
    c.steps = steps;
    c.stages = stages;
    c.basis_cutoff = basis_cutoff;
    set_config_key(c, "potential_rule", potential_rule);
    c.potential_samples = potential_samples;
    c.seed = seed;
    c.sigma_stage_factor = sigma_stage_factor;
    c.early_stop = early_stop;
    c.representative_threshold = representative_threshold;
    c.validate();
    return c;
  }
};

std::vector<std::size_t> parse_components(const std::string& text) {
  PipelineConfig c;
  set_config_key(c, "svd_components", text);
  c.input = "-";
  c.validate();
  std::vector<std::size_t> out;
  for (auto k : c.svd_components) out.push_back(k - 1);
  return out;
}

int cmd_svd(const TableArgs& table, const std::string& out_dir, const std::string& components,
            const std::string& weighting, bool no_rescale, std::ostream& out) {
  const DataMatrix data = table.load();
  const SvdMode mode = std::max(data.rows(), data.cols()) <= 2000 ? SvdMode::kFull : SvdMode::kThin;
  const SvdFactorization f = svd_decompose(data, mode);
  export_svd(out_dir, f);
  write_matrix_csv(fs::path(out_dir) / "singular_values.csv", f.S, {"singular_value"});
  if (!components.empty()) {
    PipelineConfig c;
    set_config_key(c, "weighting", weighting);
    const PointSet p = reduce_and_rescale(f, data, parse_components(components),
                                          ReduceOptions{c.weighting, !no_rescale});
    write_points_csv(fs::path(out_dir) / "points.csv", p);
  }
  for (Eigen::Index k = 0; k < f.S.size(); ++k) out << format_double(f.S(k)) << '\n';
  return kExitOk;
}

int cmd_filter(const TableArgs& table, std::size_t stages, double multiplier,
               const std::string& out_dir, std::ostream& out) {
  if (stages < 1) throw ArgumentError("--stages must be at least 1");
  const DataMatrix data = table.load();
  const FilterResult fr = filter_features(data, stages, RetentionRule{multiplier});
  std::string report;
  for (const auto& s : fr.stages) report += filter_stage_json(s).dump() + '\n';
  if (fr.stopped_early) {
    report += nlohmann::json{{"stopped_early", true}, {"reason", fr.stop_reason},
                             {"survivors", fr.kept.size()}}
                  .dump() +
              '\n';
  }
  write_text(fs::path(out_dir) / "filter_report.jsonl", report);

  std::vector<std::string> header = fr.filtered.feature_names;
  if (header.empty()) {
    for (auto k : fr.kept) header.push_back("f" + std::to_string(k + 1));
  }
  std::string text;
  for (std::size_t c = 0; c < header.size(); ++c) text += (c ? "," : "") + header[c];
  if (fr.filtered.labels) text += ",label";
  text += '\n';
  for (Eigen::Index i = 0; i < fr.filtered.values.rows(); ++i) {
    for (Eigen::Index j = 0; j < fr.filtered.values.cols(); ++j) {
      text += (j ? "," : "") + format_double(fr.filtered.values(i, j));
    }
    if (fr.filtered.labels) text += ',' + (*fr.filtered.labels)[static_cast<std::size_t>(i)];
    text += '\n';
  }
  write_text(fs::path(out_dir) / "filtered.csv", text);
  out << report;
  return kExitOk;
}

int cmd_evolve(const std::string& points_path, const EvolveArgs& args, const std::string& out_path,
               const std::string& frames_path) {
  const PipelineConfig c = args.as_config();
  const PointSet points = read_points_csv(points_path);
  std::optional<FrameWriter> frames;
  if (!frames_path.empty()) frames.emplace(frames_path);
  StageFrameCallback on_frame;
  if (frames) {
    on_frame = [&frames](std::size_t stage, std::size_t step, const Eigen::MatrixXd& pos,
                         const Eigen::VectorXd& norms) { frames->write(stage, step, pos, norms); };
  }
  const auto stages = run_dqc_stages(points, c.model_params(), c.evolution_params(),
                                     c.representative_threshold, on_frame);
  if (frames) frames->close();
  write_points_csv(out_path, stages.back());
  return kExitOk;
}

int cmd_cluster(const std::string& points_path, double epsilon, double fraction,
                const std::string& out_path, const std::string& score_path, std::ostream& out) {
  const PointSet points = read_points_csv(points_path);
  const double eps = epsilon > 0.0 ? epsilon : default_epsilon(points.coords, fraction);
  ClusterResult r = extract_clusters(points.coords, eps);
  if (points.labels && points.size() >= 2) {
    r.jaccard = jaccard_score(r.labels, encode_labels(*points.labels));
  }
  write_labels_csv(out_path, points.source_ids, r.labels);
  const std::string json = score_json(r).dump(2) + '\n';
  if (!score_path.empty()) write_text(score_path, json);
  out << json;
  return kExitOk;
}

int cmd_score(const std::string& predicted, const std::string& expert,
              const std::string& predicted_column, const std::string& expert_column,
              const std::string& out_path, std::ostream& out) {
  const auto p = read_label_column(predicted, predicted_column);
  const auto e = read_label_column(expert, expert_column);
  const double j = jaccard_score(encode_labels(p), encode_labels(e));
  const std::string json = nlohmann::json{{"jaccard", j}}.dump() + '\n';
  if (!out_path.empty()) write_text(out_path, json);
  out << json;
  return kExitOk;
}

int cmd_model(const std::string& points_path, const EvolveArgs& args, const std::string& out_json,
              const std::string& csv_dir) {
  const PipelineConfig c = args.as_config();
  const QuantumModel model = build_model(read_points_csv(points_path), c.model_params());
  if (!out_json.empty()) write_text(out_json, model_json(model).dump() + '\n');
  if (!csv_dir.empty()) export_model_csv(csv_dir, model);
  return kExitOk;
}

int cmd_generate(const std::string& kind, std::size_t per_blob, std::size_t n, double spread,
                 double radius, std::uint64_t seed, const std::string& out_path) {
  DataMatrix dm;
  if (kind == "blobs") {
    dm = make_three_blobs(per_blob, spread, seed, radius);
  } else if (kind == "ring") {
    dm = make_ring(n, radius, spread, seed);
  } else {
    throw ArgumentError("--kind must be blobs or ring");
  }
  std::string text;
  for (const auto& name : dm.feature_names) text += name + ',';
  text += "label\n";
  for (Eigen::Index i = 0; i < dm.values.rows(); ++i) {
    for (Eigen::Index j = 0; j < dm.values.cols(); ++j) text += format_double(dm.values(i, j)) + ',';
    text += (*dm.labels)[static_cast<std::size_t>(i)] + '\n';
  }
  write_text(out_path, text);
  return kExitOk;
}

int cmd_run(const std::string& config_path, const std::map<std::string, std::string>& overrides,
            bool export_frames, std::ostream& out) {
  PipelineConfig c;
  if (!config_path.empty()) c = load_config(config_path);
  for (const auto& [key, value] : overrides) set_config_key(c, key, value);
  if (export_frames) c.export_frames = true;
  const PipelineSummary s = run_pipeline(c);
  nlohmann::json j{{"points", s.n_points}, {"features", s.n_features}, {"n_clusters", s.n_clusters}};
  j["jaccard"] = s.jaccard ? nlohmann::json(*s.jaccard) : nlohmann::json(nullptr);
  j["output_dir"] = c.output_dir;
  out << j.dump() << '\n';
  return kExitOk;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Dynamic quantum clustering toolkit"};
  app.require_subcommand(1);

  TableArgs table;
  EvolveArgs evo;

  auto* svd = app.add_subcommand("svd", "Singular value decomposition and reduced coordinates");
  table.add_to(svd);
  std::string svd_out;
  std::string components;
  std::string weighting = "unweighted";
  bool no_rescale = false;
  svd->add_option("--out,-o", svd_out, "Output directory")->required();
  svd->add_option("--components", components, "1-based components for points.csv, e.g. 2,3,4");
  svd->add_option("--weighting", weighting, "unweighted or singular");
  svd->add_flag("--no-rescale", no_rescale, "Keep rows at their SVD length");

  auto* filter = app.add_subcommand("filter", "SVD-entropy feature filtering");
  table.add_to(filter);
  std::size_t filter_stages = 1;
  double multiplier = 0.0;
  std::string filter_out;
  filter->add_option("--stages", filter_stages, "Filtering stages (>= 1)");
  filter->add_option("--std-multiplier", multiplier, "Keep contribution > mean + c * std");
  filter->add_option("--out,-o", filter_out, "Output directory")->required();

  auto* evolve_cmd = app.add_subcommand("evolve", "Evolve a point file and write final positions");
  std::string points_path;
  std::string evolve_out;
  std::string frames_path;
  evolve_cmd->add_option("--points,-p", points_path, "Point CSV (id,c1..cr[,label])")->required();
  evo.add_to(evolve_cmd);
  evolve_cmd->add_option("--out,-o", evolve_out, "Output point CSV")->required();
  evolve_cmd->add_option("--frames", frames_path, "JSON-lines frame export");

  auto* cluster = app.add_subcommand("cluster", "Single-linkage cluster extraction");
  std::string cluster_points;
  double epsilon = 0.0;
  double fraction = 0.05;
  std::string cluster_out;
  std::string score_out;
  cluster->add_option("--points,-p", cluster_points, "Point CSV")->required();
  cluster->add_option("--epsilon", epsilon, "Absolute linkage distance (overrides fraction)");
  cluster->add_option("--epsilon-fraction", fraction, "Linkage distance as a fraction of the diameter");
  cluster->add_option("--out,-o", cluster_out, "Label CSV")->required();
  cluster->add_option("--score", score_out, "Score JSON");

  auto* score = app.add_subcommand("score", "Jaccard score between two label files");
  std::string predicted;
  std::string expert;
  std::string predicted_column = "label";
  std::string expert_column = "label";
  std::string score_file;
  score->add_option("--predicted", predicted, "Predicted labels CSV")->required();
  score->add_option("--expert", expert, "Expert labels CSV")->required();
  score->add_option("--predicted-column", predicted_column, "Label column name");
  score->add_option("--expert-column", expert_column, "Label column name");
  score->add_option("--out,-o", score_file, "Score JSON");

  auto* model = app.add_subcommand("model", "Export N, H, X_k and T for a point file");
  std::string model_points;
  std::string model_json_path;
  std::string model_csv_dir;
  model->add_option("--points,-p", model_points, "Point CSV")->required();
  evo.add_model_options(model);
  model->add_option("--json", model_json_path, "Structured JSON export");
  model->add_option("--csv-dir", model_csv_dir, "Directory for per-matrix CSV export");

  auto* generate = app.add_subcommand("generate", "Seeded synthetic data");
  std::string kind = "blobs";
  std::size_t per_blob = 30;
  std::size_t ring_n = 200;
  double spread = 0.1;
  double radius = 1.0;
  std::uint64_t gen_seed = 1;
  std::string gen_out;
  generate->add_option("--kind", kind, "blobs or ring");
  generate->add_option("--per-blob", per_blob, "Points per blob");
  generate->add_option("--n", ring_n, "Points on the ring");
  generate->add_option("--spread", spread, "Blob spread or ring radial noise");
  generate->add_option("--radius", radius, "Blob circle or ring radius");
  generate->add_option("--seed", gen_seed, "Generator seed");
  generate->add_option("--out,-o", gen_out, "Output CSV")->required();

  auto* run = app.add_subcommand("run", "Full pipeline from a config file");
  std::string config_path;
  bool export_frames = false;
  std::map<std::string, std::string> overrides;
  run->add_option("--config,-c", config_path, "key = value config file");
  run->add_flag("--export-frames", export_frames, "Write frames_stage<s>.jsonl");
  for (const auto& key : config_keys()) {
    if (key == "export_frames") continue;
    std::string flag = "--" + key;
    std::replace(flag.begin(), flag.end(), '_', '-');
    run->add_option_function<std::string>(
        flag, [&overrides, key](const std::string& v) { overrides[key] = v; },
        "Override config key " + key);
  }

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << '\n';
    return kExitConfigError;
  }

  try {
    if (*svd) return cmd_svd(table, svd_out, components, weighting, no_rescale, out);
    if (*filter) return cmd_filter(table, filter_stages, multiplier, filter_out, out);
    if (*evolve_cmd) return cmd_evolve(points_path, evo, evolve_out, frames_path);
    if (*cluster) return cmd_cluster(cluster_points, epsilon, fraction, cluster_out, score_out, out);
    if (*score) return cmd_score(predicted, expert, predicted_column, expert_column, score_file, out);
    if (*model) return cmd_model(model_points, evo, model_json_path, model_csv_dir);
    if (*generate) return cmd_generate(kind, per_blob, ring_n, spread, radius, gen_seed, gen_out);
    if (*run) return cmd_run(config_path, overrides, export_frames, out);
  } catch (const ArgumentError& e) {
    err << "error: " << e.what() << '\n';
    return kExitConfigError;
  } catch (const ParseError& e) {
    err << "error: " << e.what() << '\n';
    return kExitDataError;
  } catch (const IoError& e) {
    err << "error: " << e.what() << '\n';
    return kExitDataError;
  } catch (const std::filesystem::filesystem_error& e) {
    err << "error: " << e.what() << '\n';
    return kExitDataError;
  } catch (const std::exception& e) {
    err << "internal error: " << e.what() << '\n';
    return kExitNumericError;
  }
  return kExitConfigError;
}

}  // namespace dqc
