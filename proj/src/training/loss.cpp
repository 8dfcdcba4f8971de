#include <cmath>
#include <map>
#include <set>

#include "bcgnn/ops.hpp"
#include "bcgnn/training.hpp"

namespace bcgnn::train {
namespace {

void require_matching(const char* op, const Tensor& t, std::span<const std::uint8_t> labels) {
  if (t.rank() != 1 || t.numel() != labels.size() || labels.empty()) {
    throw ShapeError(op, "scores " + shape_string(t.shape()) + " vs " +
                             std::to_string(labels.size()) + " labels");
  }
}

// -(sum(w+ . log p) + sum(w- . log(1 - p))) with w folded with 1/N.
Tensor weighted_nll(const Tensor& log_p, const Tensor& log_not_p, std::span<const std::uint8_t> labels) {
  const ClassWeights alpha = class_weights(labels);
  const double n = static_cast<double>(labels.size());
  std::vector<double> pos(labels.size()), neg(labels.size());
  for (std::size_t k = 0; k < labels.size(); ++k) {
    pos[k] = labels[k] ? alpha.positive / n : 0.0;
    neg[k] = labels[k] ? 0.0 : alpha.negative / n;
  }
  const Shape shape{labels.size()};
  const Tensor total = ops::add(ops::sum(ops::mul(Tensor(shape, std::move(pos)), log_p)),
                                ops::sum(ops::mul(Tensor(shape, std::move(neg)), log_not_p)));
  return ops::scale(total, -1.0);
}

}  // namespace

ClassWeights class_weights(std::span<const std::uint8_t> labels) {
  std::size_t positives = 0;
  for (auto b : labels) positives += b ? 1 : 0;
  const std::size_t negatives = labels.size() - positives;
  const double n = static_cast<double>(labels.size());
  if (positives == 0) return {0.0, 1.0};
  if (negatives == 0) return {1.0, 0.0};
  return {n / static_cast<double>(positives), n / static_cast<double>(negatives)};
}

Tensor weighted_bl_loss(const Tensor& probabilities, std::span<const std::uint8_t> labels) {
  require_matching("weighted_bl_loss", probabilities, labels);
  for (double p : probabilities.values()) {
    if (!(p > 0.0 && p < 1.0)) {
      throw ValidationError("weighted_bl_loss: probability " + std::to_string(p) +
                            " outside (0, 1)");
    }
  }
  const Tensor not_p = ops::add_scalar(ops::scale(probabilities, -1.0), 1.0);
  return weighted_nll(ops::log(probabilities), ops::log(not_p), labels);
}

Tensor weighted_bl_loss_logits(const Tensor& logits, std::span<const std::uint8_t> labels) {
  require_matching("weighted_bl_loss_logits", logits, labels);
  return weighted_nll(ops::log_sigmoid(logits), ops::log_sigmoid(ops::scale(logits, -1.0)), labels);
}

std::vector<std::size_t> unique_starts(std::span<const graph::Edge> edges) {
  std::set<std::size_t> s;
  for (const auto& e : edges) s.insert(e.start);
  return {s.begin(), s.end()};
}

std::vector<std::size_t> unique_ends(std::span<const graph::Edge> edges) {
  std::set<std::size_t> s;
  for (const auto& e : edges) s.insert(e.end);
  return {s.begin(), s.end()};
}

Tensor total_loss(const head::HeadLogits& logits, std::span<const graph::Edge> edges,
                  const LabelSet& labels) {
  const auto starts = unique_starts(edges);
  const auto ends = unique_ends(edges);
  std::vector<std::uint8_t> b_start, b_end;
  for (auto i : starts) b_start.push_back(labels.start.at(i));
  for (auto j : ends) b_end.push_back(labels.end.at(j));
  const Tensor l_start = weighted_bl_loss_logits(ops::gather_rows(logits.start, starts), b_start);
  const Tensor l_end = weighted_bl_loss_logits(ops::gather_rows(logits.end, ends), b_end);
  const Tensor l_content = weighted_bl_loss_logits(logits.content, labels.content);
  return ops::add(ops::add(l_start, l_end), l_content);
}

double total_loss(std::span<const head::CandidateProposal> proposals, const LabelSet& labels) {
  if (proposals.size() != labels.content.size()) {
    throw ShapeError("total_loss", std::to_string(proposals.size()) + " proposals vs " +
                                       std::to_string(labels.content.size()) + " content labels");
  }
  // Proposals sharing a boundary carry the same boundary probability; keep one.
  std::map<std::size_t, double> start_p, end_p;
  std::vector<double> content_p;
  for (const auto& c : proposals) {
    start_p.emplace(c.t_start, c.p_start);
    end_p.emplace(c.t_end, c.p_end);
    content_p.push_back(c.p_content);
  }
  auto set_loss = [](const std::map<std::size_t, double>& probs, const std::vector<std::uint8_t>& all) {
    std::vector<double> p;
    std::vector<std::uint8_t> b;
    for (const auto& [pos, prob] : probs) {
      p.push_back(prob);
      b.push_back(all.at(pos));
    }
    const Shape shape{p.size()};
    return weighted_bl_loss(Tensor(shape, std::move(p)), b).item();
  };
  const Shape content_shape{content_p.size()};
  return set_loss(start_p, labels.start) + set_loss(end_p, labels.end) +
         weighted_bl_loss(Tensor(content_shape, std::move(content_p)), labels.content).item();
}

}  // namespace bcgnn::train
