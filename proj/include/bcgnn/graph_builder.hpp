#pragma once

#include <compare>
#include <cstddef>
#include <span>
#include <vector>

#include "bcgnn/model_config.hpp"
#include "bcgnn/param_store.hpp"
#include "bcgnn/tensor.hpp"

// Backbone convolutions and construction of the boundary-content graph: start
// and end locations become nodes, and every legal (start, end) pair becomes an
// edge carrying the interpolated content between the two locations.
namespace bcgnn::graph {

struct Edge {
  std::size_t start = 0;
  std::size_t end = 0;

  friend auto operator<=>(const Edge&, const Edge&) = default;
};

/// All (i, j) with 0 <= i < j < window and j - i <= max_duration, sorted.
std::vector<Edge> build_edge_set(std::size_t window, std::size_t max_duration);
/// Closed-form size of build_edge_set(window, max_duration).
std::size_t edge_count(std::size_t window, std::size_t max_duration);

std::vector<std::size_t> edge_starts(std::span<const Edge> edges);
std::vector<std::size_t> edge_ends(std::span<const Edge> edges);

struct BoundaryContentGraph {
  Tensor start_nodes;    // [l_w x D_g], row i is f_{s,i}
  Tensor end_nodes;      // [l_w x D_g], row j is f_{e,j}
  std::vector<Edge> edges;
  Tensor edge_features;  // [|edges| x D_g], row k belongs to edges[k]
};

struct Branches {
  Tensor start;    // [D_g x l_w]
  Tensor end;      // [D_g x l_w]
  Tensor content;  // [D_c x l_w]
};

/// Adds base.* and gcm.* parameters.
void register_params(ParamStore& params, const ModelConfig& config);

/// relu(conv2(relu(conv1(x)))), [D_i x l_w] -> [D_b x l_w].
Tensor base_forward(const Tensor& input, const ParamStore& params);

/// Three independent relu(conv) heads over the backbone output.
Branches gcm_branches(const Tensor& base, const ParamStore& params);

/// relu(fc1(flatten(interp_content(content, i, j, N)))), a D_g vector.
Tensor edge_content_feature(const Tensor& content, std::size_t start, std::size_t end,
                            const ParamStore& params, std::size_t samples);

/// Batched edge_content_feature for every edge, [|edges| x D_g].
Tensor edge_content_features(const Tensor& content, std::span<const Edge> edges,
                             const ParamStore& params, std::size_t samples);

BoundaryContentGraph construct_graph(const Tensor& input, const ParamStore& params,
                                     const ModelConfig& config);

}  // namespace bcgnn::graph
