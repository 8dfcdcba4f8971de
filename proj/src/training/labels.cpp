#include <algorithm>

#include "bcgnn/postprocess.hpp"
#include "bcgnn/training.hpp"

namespace bcgnn::train {

bool BoundaryRegions::in_start(double x) const {
  return std::any_of(start.begin(), start.end(), [x](const Region& r) { return r.contains(x); });
}

bool BoundaryRegions::in_end(double x) const {
  return std::any_of(end.begin(), end.end(), [x](const Region& r) { return r.contains(x); });
}

BoundaryRegions boundary_regions(std::span<const data::GroundTruthInstance> instances) {
  BoundaryRegions r;
  for (const auto& g : instances) {
    const double margin = (g.end - g.start) / 10.0;
    r.start.push_back({g.start - margin, g.start + margin});
    r.end.push_back({g.end - margin, g.end + margin});
  }
  return r;
}

LabelSet assign_labels(std::span<const data::GroundTruthInstance> instances, std::size_t window,
                       std::span<const graph::Edge> edges) {
  const BoundaryRegions regions = boundary_regions(instances);
  LabelSet labels;
  labels.start.resize(window);
  labels.end.resize(window);
  for (std::size_t i = 0; i < window; ++i) {
    labels.start[i] = regions.in_start(static_cast<double>(i)) ? 1 : 0;
    labels.end[i] = regions.in_end(static_cast<double>(i)) ? 1 : 0;
  }
  labels.content.resize(edges.size());
  for (std::size_t k = 0; k < edges.size(); ++k) {
    const auto& e = edges[k];
    if (!labels.start[e.start] || !labels.end[e.end]) continue;
    const eval::Interval pair{static_cast<double>(e.start), static_cast<double>(e.end)};
    labels.content[k] = std::any_of(instances.begin(), instances.end(), [&](const auto& g) {
                          return eval::tiou(pair, {g.start, g.end}) > 0.5;
                        })
                            ? 1
                            : 0;
  }
  return labels;
}

}  // namespace bcgnn::train
