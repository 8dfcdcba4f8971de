#pragma once

#include <cstddef>
#include <span>
#include <utility>
#include <vector>

#include "bcgnn/graph_builder.hpp"
#include "bcgnn/model_config.hpp"
#include "bcgnn/param_store.hpp"

// Graph reasoning over the boundary-content graph. Every undirected edge is
// split into a start->end and an end->start directed edge; a reasoning block
// then updates edges from their endpoint nodes, normalises edge features per
// head node, and aggregates head-node features into tail nodes.
namespace bcgnn::reasoning {

/// Denominator offset of the per-head normalisation.
inline constexpr double kNormEpsilon = 1e-6;

struct NodeSet {
  Tensor start;  // [l_w x D_g]
  Tensor end;    // [l_w x D_g]
};

struct DirectedEdgeSet {
  std::vector<graph::Edge> pairs;
  Tensor s2e;  // [|pairs| x D_g], d_(i,j): start i -> end j
  Tensor e2s;  // [|pairs| x D_g], d_(j,i): end j -> start i

  /// Undirected variant: both directions are one feature row.
  bool shared() const noexcept { return s2e.same_storage(e2s); }
};

/// Per-head normalised edge features, used only as message weights.
struct MessageWeights {
  Tensor s2e;  // normalised over the end nodes reachable from each start node
  Tensor e2s;  // normalised over the start nodes reachable from each end node
};

/// Both directions initialised to the undirected edge feature.
DirectedEdgeSet split_directed(const graph::BoundaryContentGraph& graph);
/// One shared feature row for both directions.
DirectedEdgeSet share_undirected(const graph::BoundaryContentGraph& graph);

/// d' = relu(theta x (d * f_s,i * f_e,j) + d) for each direction. When the
/// edge set is shared, only theta_s2e is used and the result stays shared.
DirectedEdgeSet edge_update(const NodeSet& nodes, const DirectedEdgeSet& edges,
                            const Tensor& theta_s2e, const Tensor& theta_e2s);

/// e~^p_(h,t) = e^p_(h,t) / (sum_k e^p_(h,k) + kNormEpsilon). Throws
/// ValidationError when any entry is negative.
MessageWeights normalize_edges(const DirectedEdgeSet& edges, std::size_t node_count);

/// n~_t = relu(theta_node x sum_h (e~_(h,t) * n_h) + n_t). End nodes receive
/// over start->end edges with theta_end; start nodes over end->start edges
/// with theta_start. Nodes without incoming edges reduce to relu(n_t).
NodeSet node_update(const NodeSet& nodes, std::span<const graph::Edge> pairs,
                    const MessageWeights& weights, const Tensor& theta_start,
                    const Tensor& theta_end);

/// GCN-baseline message weights: (1 + cos(n_s,i, n_e,j)) / 2 per pair,
/// broadcast across the feature dimension, normalised per head.
MessageWeights cosine_weights(const NodeSet& nodes, std::span<const graph::Edge> pairs);

/// Adds grm.block{0,1}.* parameters for the configured variant.
void register_params(ParamStore& params, const ModelConfig& config);

/// One reasoning block. Returns the updated nodes and the updated,
/// un-normalised edges.
std::pair<NodeSet, DirectedEdgeSet> grb(const NodeSet& nodes, const DirectedEdgeSet& edges,
                                        const ParamStore& params, std::size_t block,
                                        const AblationFlags& flags);

inline constexpr std::size_t kReasoningBlocks = 2;

/// kReasoningBlocks stacked blocks with separate parameters.
std::pair<NodeSet, DirectedEdgeSet> grm(const NodeSet& nodes, const DirectedEdgeSet& edges,
                                        const ParamStore& params, const AblationFlags& flags);

}  // namespace bcgnn::reasoning
