#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "bcgnn/data.hpp"
#include "bcgnn/model_config.hpp"
#include "bcgnn/postprocess.hpp"
#include "bcgnn/training.hpp"

namespace bcgnn::app {

/// Every setting the command line tool consumes. Serialized as flat
/// `key=value` lines; unknown keys are rejected and a round trip through
/// to_text/parse is lossless.
struct RunConfig {
  std::uint64_t seed = 7;

  // synthetic data
  std::size_t n_videos = 20;
  std::size_t video_length = 96;
  std::size_t feature_dim = 8;
  std::size_t min_instances = 1;
  std::size_t max_instances = 2;
  std::size_t synth_min_duration = 3;
  std::size_t synth_max_duration = 16;
  double noise = 0.2;
  std::uint32_t snippet_interval = 16;

  // windows and model
  std::size_t window = 32;
  std::size_t stride = 0;        // 0: window / 2
  std::size_t max_duration = 0;  // 0: window - 1
  std::size_t content_samples = 16;
  std::size_t base_dim = 32;
  std::size_t graph_dim = 32;
  std::size_t content_dim = 32;
  std::size_t rescale_to = 0;  // 0: keep native length
  bool directed = true;
  bool edge_update = true;
  bool gcn_baseline = false;

  // training
  double learning_rate = 1e-4;
  double weight_decay = 0.005;
  std::size_t max_epochs = 20;
  std::size_t patience = 5;
  double validation_fraction = 0.0;

  // post-processing and evaluation
  double soft_nms_sigma = 0.5;
  double soft_nms_floor = 0.001;
  std::size_t top_k = 100;
  std::string tiou_preset = "activitynet";  // or "thumos"

  friend bool operator==(const RunConfig&, const RunConfig&) = default;

  /// Throws ValidationError on out-of-range or inconsistent values.
  void validate() const;

  std::string to_text() const;
  /// FNV-1a 64 of to_text(), as 16 hex digits.
  std::string hash() const;

  std::size_t effective_stride() const;
  ModelConfig model_config() const;
  data::SynthOptions synth_options() const;
  train::TrainConfig train_config() const;
  eval::SoftNmsOptions nms_options() const;
  std::vector<double> thresholds() const;
};

/// Applies `key=value` lines on top of `base`. Blank lines and lines starting
/// with '#' are ignored.
RunConfig parse_run_config(const std::string& text, RunConfig base = {});
RunConfig load_run_config(const std::filesystem::path& path, RunConfig base = {});

/// Applies "directed=<bool>,edge_update=<bool>,gcn_baseline=<bool>" (any subset).
void apply_ablation(RunConfig& config, const std::string& spec);

/// True when both configs describe the same network and windowing.
bool same_model(const RunConfig& a, const RunConfig& b);

}  // namespace bcgnn::app
