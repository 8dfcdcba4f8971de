#pragma once

#include <cstdint>
#include <vector>

#include "bcgnn/graph_builder.hpp"
#include "bcgnn/model_config.hpp"
#include "bcgnn/param_store.hpp"
#include "bcgnn/proposal_head.hpp"

namespace bcgnn {

struct ForwardResult {
  head::HeadLogits logits;
};

/// Backbone, graph construction, two reasoning blocks and the output head,
/// wired for one observation window.
class Model {
 public:
  /// Registers all parameters (zero valued) for `config`.
  explicit Model(ModelConfig config);
  /// Takes ownership of existing parameters; throws ValidationError when a
  /// name or shape differs from what `config` requires.
  Model(ModelConfig config, ParamStore params);

  static Model initialized(ModelConfig config, std::uint64_t seed);

  const ModelConfig& config() const noexcept { return config_; }
  const ParamStore& params() const noexcept { return params_; }
  ParamStore& params() noexcept { return params_; }
  const std::vector<graph::Edge>& edges() const noexcept { return edges_; }

  /// window_features: [D_i x l_w].
  ForwardResult forward(const Tensor& window_features) const;
  /// Same network evaluated with substitute parameters of identical layout.
  ForwardResult forward(const Tensor& window_features, const ParamStore& params) const;

  std::vector<head::CandidateProposal> propose(const Tensor& window_features) const;

 private:
  ModelConfig config_;
  ParamStore params_;
  std::vector<graph::Edge> edges_;
};

/// Parameter layout (names and shapes, insertion order) for `config`.
ParamStore make_param_layout(const ModelConfig& config);

}  // namespace bcgnn
