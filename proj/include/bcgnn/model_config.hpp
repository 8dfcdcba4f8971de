#pragma once

#include <cstddef>

namespace bcgnn {

/// Graph-reasoning variants compared in the ablation study.
struct AblationFlags {
  bool directed = true;      // separate start->end / end->start edge features and weights
  bool edge_update = true;   // apply the edge update inside each reasoning block
  bool gcn_baseline = false; // cosine-similarity message weights, no edge update

  friend bool operator==(const AblationFlags&, const AblationFlags&) = default;
};

struct ModelConfig {
  std::size_t window = 32;          // l_w
  std::size_t max_duration = 31;    // D_max, longest start-end distance kept as an edge
  std::size_t content_samples = 16; // N
  std::size_t input_dim = 8;        // D_i
  std::size_t base_dim = 32;        // D_b
  std::size_t graph_dim = 32;       // D_g
  std::size_t content_dim = 32;     // D_c
  std::size_t kernel = 3;
  AblationFlags ablation;

  /// Throws ValidationError on inconsistent settings.
  void validate() const;

  friend bool operator==(const ModelConfig&, const ModelConfig&) = default;
};

}  // namespace bcgnn
