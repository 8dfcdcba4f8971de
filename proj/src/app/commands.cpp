#include "bcgnn/commands.hpp"

#include <fstream>
#include <sstream>

#include <json.hpp>

#include "bcgnn/errors.hpp"
#include "bcgnn/pipeline.hpp"

namespace bcgnn::app {
namespace {

void write_text(const std::filesystem::path& path, const std::string& text) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  out << text;
  if (!out) throw ValidationError("cannot write " + path.string());
}

}  // namespace

std::filesystem::path meta_path(const std::filesystem::path& output) {
  if (std::filesystem::is_directory(output)) return output / "meta.json";
  return std::filesystem::path(output.string() + ".meta.json");
}

void save_meta(const std::filesystem::path& output, const RunConfig& config) {
  nlohmann::ordered_json j;
  j["config_hash"] = config.hash();
  j["config"] = config.to_text();
  write_text(meta_path(output), j.dump(2) + "\n");
}

std::optional<RunMeta> load_meta(const std::filesystem::path& output) {
  const auto path = meta_path(output);
  std::ifstream in(path);
  if (!in) return std::nullopt;
  try {
    const auto j = nlohmann::json::parse(in);
    return RunMeta{j.at("config_hash").get<std::string>(), j.at("config").get<std::string>()};
  } catch (const nlohmann::json::exception& e) {
    throw ValidationError("metadata " + path.string() + ": " + e.what());
  }
}

void cmd_synth(const RunConfig& config, const std::filesystem::path& out_dir) {
  config.validate();
  std::vector<train::LabeledVideo> videos;
  for (auto& v : data::synth_dataset(config.synth_options()))
    videos.push_back({std::move(v.sequence), std::move(v.instances)});
  write_dataset(out_dir, videos);
  save_meta(out_dir, config);
}

TrainSummary cmd_train(const RunConfig& config, const std::filesystem::path& data_dir,
                       const std::filesystem::path& checkpoint, std::ostream& log) {
  config.validate();
  const auto videos = read_dataset(data_dir);
  const ModelConfig model_config = config.model_config();
  for (const auto& v : videos) {
    if (v.sequence.channels() != model_config.input_dim) {
      throw ValidationError("train: " + v.sequence.video_id + " has " +
                            std::to_string(v.sequence.channels()) + " feature channels, config expects " +
                            std::to_string(model_config.input_dim));
    }
  }

  const auto held_out = static_cast<std::size_t>(config.validation_fraction *
                                                 static_cast<double>(videos.size()));
  if (held_out >= videos.size()) throw ValidationError("train: validation split leaves no training videos");
  const std::span<const train::LabeledVideo> all(videos);
  const auto train_windows = train::make_training_windows(all.first(videos.size() - held_out), model_config,
                                                          config.effective_stride(), config.rescale_to);
  const auto val_windows = train::make_training_windows(all.last(held_out), model_config,
                                                        config.effective_stride(), config.rescale_to);

  const std::string hash = config.hash();
  Model model = Model::initialized(model_config, config.seed);
  auto result = train::train(model, train_windows, val_windows, config.train_config(),
                             [&](const train::EpochRecord& r) {
                               nlohmann::ordered_json j;
                               j["epoch"] = r.epoch;
                               j["train_loss"] = r.train_loss;
                               j["val_loss"] = r.val_loss;
                               j["improved"] = r.improved;
                               j["config_hash"] = hash;
                               log << j.dump() << "\n" << std::flush;
                             });
  train::save_checkpoint(checkpoint, config.to_text(), result.best_params);

  nlohmann::ordered_json done;
  done["best_epoch"] = result.best_epoch;
  done["epochs_run"] = result.history.size() - 1;
  done["early_stopped"] = result.early_stopped;
  done["config_hash"] = hash;
  log << done.dump() << "\n" << std::flush;
  return {std::move(result), hash};
}

eval::ProposalResults cmd_infer(const std::filesystem::path& checkpoint,
                                const std::filesystem::path& data_dir,
                                const std::filesystem::path& out_file,
                                const std::optional<RunConfig>& config, std::size_t jobs) {
  auto ckpt = train::load_checkpoint(checkpoint);
  const RunConfig stored = parse_run_config(ckpt.config_text);
  RunConfig resolved = config.value_or(stored);
  resolved.validate();
  if (!same_model(resolved, stored)) {
    throw ValidationError("infer: config does not match the network stored in " + checkpoint.string());
  }
  const Model model(resolved.model_config(), std::move(ckpt.params));

  const auto videos = read_dataset(data_dir);
  for (const auto& v : videos) {
    if (v.sequence.channels() != resolved.model_config().input_dim) {
      throw ValidationError("infer: " + v.sequence.video_id + " has " +
                            std::to_string(v.sequence.channels()) + " feature channels, checkpoint expects " +
                            std::to_string(resolved.model_config().input_dim));
    }
  }
  const InferenceOptions options{resolved.effective_stride(), resolved.rescale_to, resolved.nms_options()};
  auto results = infer_all(model, videos, options, jobs);
  eval::save_results(out_file, results);
  save_meta(out_file, resolved);
  return results;
}

eval::MetricsReport cmd_eval(const std::filesystem::path& results_file,
                             const std::filesystem::path& annotations_file,
                             const std::optional<RunConfig>& config, bool force,
                             const std::optional<std::filesystem::path>& report_file) {
  const auto results = eval::load_results(results_file);
  const auto meta = load_meta(results_file);

  RunConfig resolved;
  if (config) {
    resolved = *config;
    if (meta && meta->config_hash != resolved.hash() && !force) {
      throw ValidationError("eval: results were produced with config " + meta->config_hash +
                            " but this run uses " + resolved.hash() + " (pass --force to override)");
    }
  } else if (meta) {
    resolved = parse_run_config(meta->config_text);
  }
  resolved.validate();

  const auto annotations = data::load_annotations(annotations_file);
  const auto joined = join_results(results, annotations);
  auto report = eval::make_report(joined, resolved.thresholds(), resolved.hash());
  if (report_file) write_text(*report_file, eval::report_to_json(report) + "\n");
  return report;
}

}  // namespace bcgnn::app
