#include "bcgnn/model.hpp"

#include <string>

#include "bcgnn/errors.hpp"
#include "bcgnn/graph_reasoning.hpp"

namespace bcgnn {

void ModelConfig::validate() const {
  auto fail = [](const std::string& msg) { throw ValidationError("model config: " + msg); };
  if (window < 2) fail("window must be at least 2");
  if (max_duration < 1) fail("max_duration must be at least 1");
  if (content_samples < 2) fail("content_samples must be at least 2");
  if (input_dim < 1 || base_dim < 1 || graph_dim < 1 || content_dim < 1)
    fail("feature dimensions must be positive");
  if (kernel % 2 == 0) fail("kernel size must be odd");
}

ParamStore make_param_layout(const ModelConfig& config) {
  config.validate();
  ParamStore params;
  graph::register_params(params, config);
  reasoning::register_params(params, config);
  head::register_params(params, config);
  return params;
}

Model::Model(ModelConfig config)
    : config_(config),
      params_(make_param_layout(config)),
      edges_(graph::build_edge_set(config.window, config.max_duration)) {}

Model::Model(ModelConfig config, ParamStore params)
    : config_(config), edges_(graph::build_edge_set(config.window, config.max_duration)) {
  const ParamStore layout = make_param_layout(config);
  if (layout.size() != params.size()) {
    throw ValidationError("model parameters: expected " + std::to_string(layout.size()) +
                          " tensors for this configuration, got " + std::to_string(params.size()));
  }
  for (std::size_t k = 0; k < layout.size(); ++k) {
    const auto& want = layout.entries()[k];
    const auto& got = params.entries()[k];
    if (want.name != got.name || want.tensor.shape() != got.tensor.shape()) {
      throw ValidationError("model parameters: expected " + want.name + " " +
                            shape_string(want.tensor.shape()) + ", got " + got.name + " " +
                            shape_string(got.tensor.shape()));
    }
  }
  params_ = std::move(params);
}

Model Model::initialized(ModelConfig config, std::uint64_t seed) {
  Model m(config);
  m.params_.initialize_uniform(seed);
  return m;
}

ForwardResult Model::forward(const Tensor& window_features) const {
  return forward(window_features, params_);
}

ForwardResult Model::forward(const Tensor& window_features, const ParamStore& params) const {
  const auto g = graph::construct_graph(window_features, params, config_);
  const auto edges =
      config_.ablation.directed ? reasoning::split_directed(g) : reasoning::share_undirected(g);
  const auto [nodes, updated] =
      reasoning::grm({g.start_nodes, g.end_nodes}, edges, params, config_.ablation);
  return {head::head_logits(nodes, updated, params)};
}

std::vector<head::CandidateProposal> Model::propose(const Tensor& window_features) const {
  return head::candidates_from_logits(forward(window_features).logits, edges_);
}

}  // namespace bcgnn
