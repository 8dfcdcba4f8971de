#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "bcgnn/data.hpp"
#include "bcgnn/graph_builder.hpp"
#include "bcgnn/model.hpp"
#include "bcgnn/param_store.hpp"
#include "bcgnn/proposal_head.hpp"

namespace bcgnn::train {

// ---- labels -----------------------------------------------------------------

struct Region {
  double lo = 0.0;
  double hi = 0.0;
  bool contains(double x) const { return x >= lo && x <= hi; }
};

/// Per instance with duration d: start region [s - d/10, s + d/10] and end
/// region [e - d/10, e + d/10].
struct BoundaryRegions {
  std::vector<Region> start;
  std::vector<Region> end;

  bool in_start(double x) const;
  bool in_end(double x) const;
};

BoundaryRegions boundary_regions(std::span<const data::GroundTruthInstance> instances);

struct LabelSet {
  std::vector<std::uint8_t> start;    // per window position
  std::vector<std::uint8_t> end;      // per window position
  std::vector<std::uint8_t> content;  // per edge
};

/// start[i] = 1 iff i lies in a start region (end likewise); content = 1 iff
/// both boundaries lie in their regions and the pair overlaps some instance
/// with tIoU > 0.5.
LabelSet assign_labels(std::span<const data::GroundTruthInstance> instances, std::size_t window,
                       std::span<const graph::Edge> edges);

// ---- losses -----------------------------------------------------------------

struct ClassWeights {
  double positive = 0.0;
  double negative = 0.0;
};

/// alpha+ = N / sum(b), alpha- = N / sum(1 - b). An absent class gets weight 0
/// and the present one weight 1.
ClassWeights class_weights(std::span<const std::uint8_t> labels);

/// -(1/N) sum [alpha+ b log p + alpha- (1 - b) log(1 - p)]. Throws
/// ValidationError unless every p lies strictly inside (0, 1).
Tensor weighted_bl_loss(const Tensor& probabilities, std::span<const std::uint8_t> labels);
/// Same loss from pre-sigmoid scores, using log-sigmoid for stability.
Tensor weighted_bl_loss_logits(const Tensor& logits, std::span<const std::uint8_t> labels);

/// Distinct start (end) locations present in the edge list, ascending.
std::vector<std::size_t> unique_starts(std::span<const graph::Edge> edges);
std::vector<std::size_t> unique_ends(std::span<const graph::Edge> edges);

/// L_bl(S) + L_bl(E) + L_bl(C) over deduplicated start/end sets and all edges.
Tensor total_loss(const head::HeadLogits& logits, std::span<const graph::Edge> edges,
                  const LabelSet& labels);
/// Value of the same objective from probabilities already in proposal form.
double total_loss(std::span<const head::CandidateProposal> proposals, const LabelSet& labels);

// ---- optimisation -----------------------------------------------------------

struct AdamWOptions {
  double learning_rate = 1e-4;
  double weight_decay = 0.005;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
};

/// Adam with decoupled weight decay. Parameters are rounded to float32 after
/// every step.
class AdamW {
 public:
  AdamW(ParamStore& params, AdamWOptions options);
  void step();
  std::size_t steps() const noexcept { return step_; }

 private:
  ParamStore& params_;
  AdamWOptions options_;
  std::vector<std::vector<double>> m_;
  std::vector<std::vector<double>> v_;
  std::size_t step_ = 0;
};

struct TrainConfig {
  double learning_rate = 1e-4;
  double weight_decay = 0.005;
  std::size_t max_epochs = 20;
  std::size_t patience = 5;
  std::uint64_t seed = 7;

  void validate() const;
};

/// One observation window with its labels, ready for the loss.
struct TrainingWindow {
  Tensor features;
  LabelSet labels;
};

struct LabeledVideo {
  data::FeatureSequence sequence;
  std::vector<data::GroundTruthInstance> instances;
};

/// Windows every video (after optional rescaling to `rescale_to` snippets)
/// and assigns labels. Windows without instances are kept, all-negative.
std::vector<TrainingWindow> make_training_windows(std::span<const LabeledVideo> videos,
                                                  const ModelConfig& config, std::size_t stride,
                                                  std::size_t rescale_to);

struct EpochRecord {
  std::size_t epoch = 0;  // 0 is the untrained model
  double train_loss = 0.0;
  double val_loss = 0.0;
  bool improved = false;
};

struct TrainResult {
  ParamStore best_params;
  std::vector<EpochRecord> history;
  std::size_t best_epoch = 0;
  bool early_stopped = false;
};

/// Mean total loss over windows (no parameter change).
double evaluate_loss(const Model& model, std::span<const TrainingWindow> windows);

/// One step per window, windows shuffled per epoch from (seed, epoch).
/// Selects the epoch with the lowest validation loss (training loss when no
/// validation windows are given) and stops after `patience` epochs without
/// improvement. Throws NumericError naming the first non-finite tensor.
TrainResult train(Model& model, std::span<const TrainingWindow> train_windows,
                  std::span<const TrainingWindow> val_windows, const TrainConfig& config,
                  const std::function<void(const EpochRecord&)>& on_epoch = {});

// ---- checkpoints ------------------------------------------------------------
//
// "BCGC", u32 version (1), u32 config length, config text, u32 tensor count,
// then per tensor: u32 name length, name, u32 rank, u32 dims..., f32 values.
// All integers little-endian.

struct Checkpoint {
  std::string config_text;
  ParamStore params;
};

std::string serialize_checkpoint(const std::string& config_text, const ParamStore& params);
Checkpoint deserialize_checkpoint(const std::string& bytes);
void save_checkpoint(const std::filesystem::path& path, const std::string& config_text,
                     const ParamStore& params);
Checkpoint load_checkpoint(const std::filesystem::path& path);

}  // namespace bcgnn::train
