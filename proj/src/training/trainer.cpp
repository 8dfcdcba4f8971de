#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#include "bcgnn/random.hpp"
#include "bcgnn/training.hpp"

namespace bcgnn::train {
namespace {

void require_finite(const Tensor& t, const std::string& name) {
  for (double v : t.values()) {
    if (!std::isfinite(v)) throw NumericError("non-finite values in " + name);
  }
}

void check_forward(const ForwardResult& out, const Tensor& loss) {
  require_finite(out.logits.start, "start logits");
  require_finite(out.logits.end, "end logits");
  require_finite(out.logits.content, "content logits");
  require_finite(loss, "loss");
}

}  // namespace

void TrainConfig::validate() const {
  if (!(learning_rate > 0.0)) throw ValidationError("train: learning_rate must be positive");
  if (!(weight_decay >= 0.0)) throw ValidationError("train: weight_decay must be nonnegative");
  if (max_epochs < 1) throw ValidationError("train: max_epochs must be at least 1");
}

std::vector<TrainingWindow> make_training_windows(std::span<const LabeledVideo> videos,
                                                  const ModelConfig& config, std::size_t stride,
                                                  std::size_t rescale_to) {
  const auto edges = graph::build_edge_set(config.window, config.max_duration);
  std::vector<TrainingWindow> out;
  for (const auto& video : videos) {
    data::FeatureSequence seq = video.sequence;
    std::vector<data::GroundTruthInstance> instances = video.instances;
    if (rescale_to > 0) {
      instances = data::rescale_instances(instances, seq.length(), rescale_to);
      seq = data::rescale_linear(seq, rescale_to);
    }
    for (auto& w : data::slide_windows(seq, instances, config.window, stride)) {
      out.push_back({w.features, assign_labels(w.instances, config.window, edges)});
    }
  }
  return out;
}

double evaluate_loss(const Model& model, std::span<const TrainingWindow> windows) {
  if (windows.empty()) return 0.0;
  double total = 0.0;
  for (const auto& w : windows) {
    const ForwardResult out = model.forward(w.features);
    const Tensor loss = total_loss(out.logits, model.edges(), w.labels);
    check_forward(out, loss);
    total += loss.item();
  }
  return total / static_cast<double>(windows.size());
}

TrainResult train(Model& model, std::span<const TrainingWindow> train_windows,
                  std::span<const TrainingWindow> val_windows, const TrainConfig& config,
                  const std::function<void(const EpochRecord&)>& on_epoch) {
  config.validate();
  if (train_windows.empty()) throw ValidationError("train: no training windows");

  ParamStore& params = model.params();
  AdamW optimizer(params, {config.learning_rate, config.weight_decay});
  auto selection_loss = [&](const EpochRecord& r) {
    return val_windows.empty() ? r.train_loss : r.val_loss;
  };

  TrainResult result;
  EpochRecord initial{0, evaluate_loss(model, train_windows), evaluate_loss(model, val_windows), true};
  result.history.push_back(initial);
  result.best_params = params.clone();
  double best = selection_loss(initial);
  if (on_epoch) on_epoch(initial);

  std::vector<std::size_t> order(train_windows.size());
  std::size_t since_improvement = 0;
  for (std::size_t epoch = 1; epoch <= config.max_epochs; ++epoch) {
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::mt19937_64 rng(derive_seed(config.seed, epoch));
    for (std::size_t k = order.size(); k > 1; --k) {
      const auto j = static_cast<std::size_t>(uniform_int(rng, 0, static_cast<std::int64_t>(k - 1)));
      std::swap(order[k - 1], order[j]);
    }

    for (std::size_t idx : order) {
      const auto& w = train_windows[idx];
      params.zero_grad();
      const ForwardResult out = model.forward(w.features);
      const Tensor loss = total_loss(out.logits, model.edges(), w.labels);
      check_forward(out, loss);
      loss.backward();
      for (const auto& e : params.entries()) {
        if (e.tensor.has_grad()) {
          for (double g : e.tensor.grad())
            if (!std::isfinite(g)) throw NumericError("non-finite gradient in " + e.name);
        }
      }
      optimizer.step();
    }

    EpochRecord record{epoch, evaluate_loss(model, train_windows), evaluate_loss(model, val_windows),
                       false};
    if (selection_loss(record) < best) {
      best = selection_loss(record);
      record.improved = true;
      result.best_params = params.clone();
      result.best_epoch = epoch;
      since_improvement = 0;
    } else {
      ++since_improvement;
    }
    result.history.push_back(record);
    if (on_epoch) on_epoch(record);
    if (config.patience > 0 && since_improvement >= config.patience) {
      result.early_stopped = true;
      break;
    }
  }
  // Leave the model holding the selected parameters.
  for (std::size_t k = 0; k < params.size(); ++k) {
    const auto src = result.best_params.entries()[k].tensor.values();
    std::copy(src.begin(), src.end(), params.entries()[k].tensor.mutable_values().begin());
  }
  return result;
}

}  // namespace bcgnn::train
