#pragma once

#include <cstddef>
#include <vector>

#include "bcgnn/graph_reasoning.hpp"
#include "bcgnn/model_config.hpp"
#include "bcgnn/param_store.hpp"

namespace bcgnn::head {

/// One scored start-end pair in window-local snippet indices.
struct CandidateProposal {
  std::size_t t_start = 0;
  std::size_t t_end = 0;
  double p_start = 0.0;
  double p_end = 0.0;
  double p_content = 0.0;
};

/// Pre-sigmoid scores. start/end are indexed by node, content by edge.
struct HeadLogits {
  Tensor start;    // [l_w]
  Tensor end;      // [l_w]
  Tensor content;  // [|edges|]
};

/// head.{start,end,content}.{weight,bias}.
void register_params(ParamStore& params, const ModelConfig& config);

/// start = theta_SO . n_s,i + b, end = theta_EO . n_e,j + b,
/// content = theta_CO . (e_s2e,(i,j) || e_e2s,(j,i)) + b.
HeadLogits head_logits(const reasoning::NodeSet& nodes, const reasoning::DirectedEdgeSet& edges,
                       const ParamStore& params);

/// Sigmoid of head_logits, one proposal per edge in edge order.
std::vector<CandidateProposal> score_candidates(const reasoning::NodeSet& nodes,
                                                const reasoning::DirectedEdgeSet& edges,
                                                const ParamStore& params);

/// Builds proposals from already computed logits (no graph recording).
std::vector<CandidateProposal> candidates_from_logits(const HeadLogits& logits,
                                                      std::span<const graph::Edge> edges);

}  // namespace bcgnn::head
