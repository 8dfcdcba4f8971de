#include "bcgnn/proposal_head.hpp"

#include <array>
#include <cmath>

#include "bcgnn/ops.hpp"

namespace bcgnn::head {
namespace {

Tensor linear_score(const Tensor& rows, const Tensor& weight, const Tensor& bias, const char* op) {
  if (rows.rank() != 2 || weight.rank() != 1 || rows.dim(1) != weight.dim(0)) {
    throw ShapeError(op, "features " + shape_string(rows.shape()) + " incompatible with weight " +
                             shape_string(weight.shape()) + " at dimension 1");
  }
  const Tensor column = ops::reshape(weight, {weight.dim(0), 1});
  const Tensor scores = ops::add_bias(ops::matmul(rows, column), bias);
  return ops::reshape(scores, {rows.dim(0)});
}

double logistic(double x) {
  return x >= 0.0 ? 1.0 / (1.0 + std::exp(-x)) : std::exp(x) / (1.0 + std::exp(x));
}

}  // namespace

void register_params(ParamStore& params, const ModelConfig& config) {
  const std::size_t d = config.graph_dim;
  params.add("head.start.weight", {d}, d);
  params.add("head.start.bias", {1}, d);
  params.add("head.end.weight", {d}, d);
  params.add("head.end.bias", {1}, d);
  params.add("head.content.weight", {2 * d}, 2 * d);
  params.add("head.content.bias", {1}, 2 * d);
}

HeadLogits head_logits(const reasoning::NodeSet& nodes, const reasoning::DirectedEdgeSet& edges,
                       const ParamStore& params) {
  const std::array<Tensor, 2> pair{edges.s2e, edges.e2s};
  return {linear_score(nodes.start, params.at("head.start.weight"), params.at("head.start.bias"),
                       "head.start"),
          linear_score(nodes.end, params.at("head.end.weight"), params.at("head.end.bias"),
                       "head.end"),
          linear_score(ops::concat(pair, 1), params.at("head.content.weight"),
                       params.at("head.content.bias"), "head.content")};
}

std::vector<CandidateProposal> candidates_from_logits(const HeadLogits& logits,
                                                      std::span<const graph::Edge> edges) {
  if (logits.content.numel() != edges.size()) {
    throw ShapeError("candidates_from_logits", "content scores " +
                                                   std::to_string(logits.content.numel()) +
                                                   " do not match " + std::to_string(edges.size()) +
                                                   " edges");
  }
  std::vector<CandidateProposal> out;
  out.reserve(edges.size());
  for (std::size_t k = 0; k < edges.size(); ++k) {
    const auto& e = edges[k];
    out.push_back({e.start, e.end, logistic(logits.start.at(e.start)), logistic(logits.end.at(e.end)),
                   logistic(logits.content.at(k))});
  }
  return out;
}

std::vector<CandidateProposal> score_candidates(const reasoning::NodeSet& nodes,
                                                const reasoning::DirectedEdgeSet& edges,
                                                const ParamStore& params) {
  return candidates_from_logits(head_logits(nodes, edges, params), edges.pairs);
}

}  // namespace bcgnn::head
