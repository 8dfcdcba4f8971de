#include "bcgnn/graph_builder.hpp"

#include <algorithm>
#include <string>

#include "bcgnn/data.hpp"
#include "bcgnn/ops.hpp"

namespace bcgnn::graph {
namespace {

void add_conv(ParamStore& params, const std::string& name, std::size_t out, std::size_t in,
              std::size_t kernel) {
  params.add(name + ".weight", {out, in, kernel}, in * kernel);
  params.add(name + ".bias", {out}, in * kernel);
}

Tensor conv_relu(const Tensor& x, const ParamStore& params, const std::string& name) {
  return ops::relu(ops::conv1d(x, params.at(name + ".weight"), params.at(name + ".bias")));
}

}  // namespace

std::vector<Edge> build_edge_set(std::size_t window, std::size_t max_duration) {
  std::vector<Edge> edges;
  edges.reserve(edge_count(window, max_duration));
  for (std::size_t i = 0; i < window; ++i)
    for (std::size_t j = i + 1; j < window && j - i <= max_duration; ++j) edges.push_back({i, j});
  return edges;
}

std::size_t edge_count(std::size_t window, std::size_t max_duration) {
  if (window < 2) return 0;
  const std::size_t d = std::min(max_duration, window - 1);
  // sum_{k=1..d} (window - k)
  return d * window - d * (d + 1) / 2;
}

std::vector<std::size_t> edge_starts(std::span<const Edge> edges) {
  std::vector<std::size_t> out(edges.size());
  std::transform(edges.begin(), edges.end(), out.begin(), [](const Edge& e) { return e.start; });
  return out;
}

std::vector<std::size_t> edge_ends(std::span<const Edge> edges) {
  std::vector<std::size_t> out(edges.size());
  std::transform(edges.begin(), edges.end(), out.begin(), [](const Edge& e) { return e.end; });
  return out;
}

void register_params(ParamStore& params, const ModelConfig& c) {
  add_conv(params, "base.conv1", c.base_dim, c.input_dim, c.kernel);
  add_conv(params, "base.conv2", c.base_dim, c.base_dim, c.kernel);
  add_conv(params, "gcm.conv_start", c.graph_dim, c.base_dim, c.kernel);
  add_conv(params, "gcm.conv_end", c.graph_dim, c.base_dim, c.kernel);
  add_conv(params, "gcm.conv_content", c.content_dim, c.base_dim, c.kernel);
  const std::size_t flat = c.content_dim * c.content_samples;
  params.add("gcm.fc1.weight", {c.graph_dim, flat}, flat);
  params.add("gcm.fc1.bias", {c.graph_dim}, flat);
}

Tensor base_forward(const Tensor& input, const ParamStore& params) {
  return conv_relu(conv_relu(input, params, "base.conv1"), params, "base.conv2");
}

Branches gcm_branches(const Tensor& base, const ParamStore& params) {
  return {conv_relu(base, params, "gcm.conv_start"), conv_relu(base, params, "gcm.conv_end"),
          conv_relu(base, params, "gcm.conv_content")};
}

Tensor edge_content_feature(const Tensor& content, std::size_t start, std::size_t end,
                            const ParamStore& params, std::size_t samples) {
  const Tensor sampled = data::interp_content(content, start, end, samples);
  const Tensor flat = ops::reshape(sampled, {1, sampled.numel()});
  const Tensor fc = ops::add_bias(ops::matmul(flat, ops::transpose(params.at("gcm.fc1.weight"))),
                                  params.at("gcm.fc1.bias"));
  return ops::reshape(ops::relu(fc), {fc.numel()});
}

Tensor edge_content_features(const Tensor& content, std::span<const Edge> edges,
                             const ParamStore& params, std::size_t samples) {
  std::vector<double> positions;
  positions.reserve(edges.size() * samples);
  for (const auto& e : edges) {
    if (e.start >= e.end) {
      throw ValidationError("edge_content_features: illegal pair (" + std::to_string(e.start) +
                            ", " + std::to_string(e.end) + ")");
    }
    const auto p = data::content_sample_positions(e.start, e.end, samples);
    positions.insert(positions.end(), p.begin(), p.end());
  }
  const Tensor projected = ops::lerp_project(content, params.at("gcm.fc1.weight"), positions, samples);
  return ops::relu(ops::add_bias(projected, params.at("gcm.fc1.bias")));
}

BoundaryContentGraph construct_graph(const Tensor& input, const ParamStore& params,
                                     const ModelConfig& config) {
  if (input.rank() != 2 || input.dim(0) != config.input_dim || input.dim(1) != config.window) {
    throw ShapeError("construct_graph", "input " + shape_string(input.shape()) +
                                            " does not match configured [" +
                                            std::to_string(config.input_dim) + " x " +
                                            std::to_string(config.window) + "]");
  }
  const Branches branches = gcm_branches(base_forward(input, params), params);
  BoundaryContentGraph g;
  g.edges = build_edge_set(config.window, config.max_duration);
  g.start_nodes = ops::transpose(branches.start);
  g.end_nodes = ops::transpose(branches.end);
  g.edge_features = edge_content_features(branches.content, g.edges, params, config.content_samples);
  return g;
}

}  // namespace bcgnn::graph
