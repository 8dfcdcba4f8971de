#include "bcgnn/graph_reasoning.hpp"

#include <string>

#include "bcgnn/ops.hpp"

namespace bcgnn::reasoning {
namespace {

std::string block_name(std::size_t block, const char* param) {
  return "grm.block" + std::to_string(block) + "." + param;
}

void require_square(const char* op, const Tensor& theta, std::size_t dim) {
  if (theta.rank() != 2 || theta.dim(0) != dim || theta.dim(1) != dim) {
    throw ShapeError(op, "parameter matrix " + shape_string(theta.shape()) + " must be [" +
                             std::to_string(dim) + " x " + std::to_string(dim) + "]");
  }
}

// rows @ theta^T, i.e. theta applied to each row vector.
Tensor apply(const Tensor& rows, const Tensor& theta) {
  return ops::matmul(rows, ops::transpose(theta));
}

Tensor normalize_by_head(const Tensor& e, std::span<const std::size_t> heads, std::size_t nodes) {
  const Tensor mass = ops::segment_sum(e, heads, nodes);
  return ops::div(e, ops::add_scalar(ops::gather_rows(mass, heads), kNormEpsilon));
}

}  // namespace

DirectedEdgeSet split_directed(const graph::BoundaryContentGraph& graph) {
  return {graph.edges, graph.edge_features, ops::scale(graph.edge_features, 1.0)};
}

DirectedEdgeSet share_undirected(const graph::BoundaryContentGraph& graph) {
  return {graph.edges, graph.edge_features, graph.edge_features};
}

DirectedEdgeSet edge_update(const NodeSet& nodes, const DirectedEdgeSet& edges,
                            const Tensor& theta_s2e, const Tensor& theta_e2s) {
  const std::size_t dim = nodes.start.dim(1);
  if (edges.s2e.rank() != 2 || edges.s2e.dim(1) != dim || edges.e2s.shape() != edges.s2e.shape()) {
    throw ShapeError("edge_update", "edge features " + shape_string(edges.s2e.shape()) +
                                        " do not match node dimension " + std::to_string(dim));
  }
  require_square("edge_update", theta_s2e, dim);
  if (!edges.shared()) require_square("edge_update", theta_e2s, dim);

  const auto starts = graph::edge_starts(edges.pairs);
  const auto ends = graph::edge_ends(edges.pairs);
  const Tensor endpoints =
      ops::mul(ops::gather_rows(nodes.start, starts), ops::gather_rows(nodes.end, ends));

  auto update = [&](const Tensor& d, const Tensor& theta) {
    return ops::relu(ops::add(apply(ops::mul(d, endpoints), theta), d));
  };
  DirectedEdgeSet out{edges.pairs, update(edges.s2e, theta_s2e), {}};
  out.e2s = edges.shared() ? out.s2e : update(edges.e2s, theta_e2s);
  return out;
}

MessageWeights normalize_edges(const DirectedEdgeSet& edges, std::size_t node_count) {
  for (const Tensor* t : {&edges.s2e, &edges.e2s}) {
    for (double v : t->values()) {
      if (v < 0.0) {
        throw ValidationError("normalize_edges: negative edge feature " + std::to_string(v) +
                              "; per-head normalisation needs nonnegative inputs");
      }
    }
  }
  const auto starts = graph::edge_starts(edges.pairs);
  const auto ends = graph::edge_ends(edges.pairs);
  return {normalize_by_head(edges.s2e, starts, node_count),
          normalize_by_head(edges.e2s, ends, node_count)};
}

NodeSet node_update(const NodeSet& nodes, std::span<const graph::Edge> pairs,
                    const MessageWeights& weights, const Tensor& theta_start,
                    const Tensor& theta_end) {
  const std::size_t count = nodes.start.dim(0);
  const std::size_t dim = nodes.start.dim(1);
  require_square("node_update", theta_start, dim);
  require_square("node_update", theta_end, dim);
  if (nodes.end.shape() != nodes.start.shape()) {
    throw ShapeError("node_update", "start nodes " + shape_string(nodes.start.shape()) +
                                        " and end nodes " + shape_string(nodes.end.shape()) +
                                        " differ");
  }
  const auto starts = graph::edge_starts(pairs);
  const auto ends = graph::edge_ends(pairs);

  // Messages into end node j come from start heads i over start->end edges.
  const Tensor to_end = ops::segment_sum(
      ops::mul(weights.s2e, ops::gather_rows(nodes.start, starts)), ends, count);
  // Messages into start node i come from end heads j over end->start edges.
  const Tensor to_start = ops::segment_sum(
      ops::mul(weights.e2s, ops::gather_rows(nodes.end, ends)), starts, count);

  return {ops::relu(ops::add(apply(to_start, theta_start), nodes.start)),
          ops::relu(ops::add(apply(to_end, theta_end), nodes.end))};
}

MessageWeights cosine_weights(const NodeSet& nodes, std::span<const graph::Edge> pairs) {
  const std::size_t dim = nodes.start.dim(1);
  const auto starts = graph::edge_starts(pairs);
  const auto ends = graph::edge_ends(pairs);
  const Tensor a = ops::gather_rows(nodes.start, starts);
  const Tensor b = ops::gather_rows(nodes.end, ends);
  const Tensor ones_col = Tensor::full({dim, 1}, 1.0);
  auto row_sum = [&](const Tensor& x) { return ops::matmul(x, ones_col); };
  const Tensor norms = ops::sqrt(ops::mul(ops::add_scalar(row_sum(ops::mul(a, a)), 1e-12),
                                          ops::add_scalar(row_sum(ops::mul(b, b)), 1e-12)));
  const Tensor cosine = ops::div(row_sum(ops::mul(a, b)), norms);
  const Tensor w = ops::relu(ops::scale(ops::add_scalar(cosine, 1.0), 0.5));
  const Tensor tiled = ops::matmul(w, Tensor::full({1, dim}, 1.0));
  DirectedEdgeSet as_edges{{pairs.begin(), pairs.end()}, tiled, tiled};
  return normalize_edges(as_edges, nodes.start.dim(0));
}

void register_params(ParamStore& params, const ModelConfig& config) {
  const std::size_t d = config.graph_dim;
  const auto& flags = config.ablation;
  const bool updates_edges = flags.edge_update && !flags.gcn_baseline;
  for (std::size_t b = 0; b < kReasoningBlocks; ++b) {
    if (updates_edges && flags.directed) {
      params.add(block_name(b, "theta_s2e"), {d, d}, d);
      params.add(block_name(b, "theta_e2s"), {d, d}, d);
    } else if (updates_edges) {
      params.add(block_name(b, "theta_edge"), {d, d}, d);
    }
    params.add(block_name(b, "theta_start"), {d, d}, d);
    params.add(block_name(b, "theta_end"), {d, d}, d);
  }
}

std::pair<NodeSet, DirectedEdgeSet> grb(const NodeSet& nodes, const DirectedEdgeSet& edges,
                                        const ParamStore& params, std::size_t block,
                                        const AblationFlags& flags) {
  const std::size_t count = nodes.start.dim(0);
  DirectedEdgeSet updated = edges;
  MessageWeights weights;
  if (flags.gcn_baseline) {
    weights = cosine_weights(nodes, edges.pairs);
  } else {
    if (flags.edge_update) {
      if (edges.shared()) {
        const Tensor& theta = params.at(block_name(block, "theta_edge"));
        updated = edge_update(nodes, edges, theta, theta);
      } else {
        updated = edge_update(nodes, edges, params.at(block_name(block, "theta_s2e")),
                              params.at(block_name(block, "theta_e2s")));
      }
    }
    weights = normalize_edges(updated, count);
  }
  NodeSet next = node_update(nodes, edges.pairs, weights, params.at(block_name(block, "theta_start")),
                             params.at(block_name(block, "theta_end")));
  return {std::move(next), std::move(updated)};
}

std::pair<NodeSet, DirectedEdgeSet> grm(const NodeSet& nodes, const DirectedEdgeSet& edges,
                                        const ParamStore& params, const AblationFlags& flags) {
  std::pair<NodeSet, DirectedEdgeSet> state{nodes, edges};
  for (std::size_t b = 0; b < kReasoningBlocks; ++b)
    state = grb(state.first, state.second, params, b, flags);
  return state;
}

}  // namespace bcgnn::reasoning
