#include <algorithm>
#include <numeric>

#include "bcgnn/postprocess.hpp"

namespace bcgnn::eval {
namespace {

std::vector<double> threshold_range(int last_step) {
  std::vector<double> t;
  for (int k = 0; k <= last_step; ++k) t.push_back(0.5 + 0.05 * k);
  return t;
}

}  // namespace

std::vector<double> activitynet_thresholds() { return threshold_range(9); }
std::vector<double> thumos_thresholds() { return threshold_range(10); }

std::map<std::size_t, double> ar_at_an(const std::map<std::string, VideoResult>& per_video,
                                       std::span<const double> thresholds,
                                       std::span<const std::size_t> an_values) {
  if (thresholds.empty()) throw ValidationError("ar_at_an: no tIoU thresholds");

  // best_rank[v][g][t]: smallest rank (1-based) of a proposal reaching
  // threshold t on ground truth g, or 0 when none does. Recall at AN is then a
  // count of entries with 0 < rank <= AN.
  std::vector<std::vector<std::vector<std::size_t>>> best_rank;
  for (const auto& [id, video] : per_video) {
    if (video.ground_truth.empty()) continue;
    std::vector<ScoredProposal> ranked = video.proposals;
    std::stable_sort(ranked.begin(), ranked.end(),
                     [](const auto& a, const auto& b) { return a.score > b.score; });
    auto& ranks = best_rank.emplace_back();
    for (const auto& g : video.ground_truth) {
      auto& per_t = ranks.emplace_back(thresholds.size(), 0);
      for (std::size_t r = 0; r < ranked.size(); ++r) {
        const double overlap = tiou({g.start, g.end}, {ranked[r].start, ranked[r].end});
        for (std::size_t t = 0; t < thresholds.size(); ++t)
          if (per_t[t] == 0 && overlap >= thresholds[t]) per_t[t] = r + 1;
      }
    }
  }

  std::map<std::size_t, double> result;
  for (std::size_t an : an_values) {
    if (best_rank.empty()) {
      result[an] = 0.0;
      continue;
    }
    double over_thresholds = 0.0;
    for (std::size_t t = 0; t < thresholds.size(); ++t) {
      double over_videos = 0.0;
      for (const auto& ranks : best_rank) {
        std::size_t hits = 0;
        for (const auto& per_t : ranks) hits += (per_t[t] != 0 && per_t[t] <= an) ? 1 : 0;
        over_videos += static_cast<double>(hits) / static_cast<double>(ranks.size());
      }
      over_thresholds += over_videos / static_cast<double>(best_rank.size());
    }
    result[an] = over_thresholds / static_cast<double>(thresholds.size());
  }
  return result;
}

std::vector<double> ar_curve(const std::map<std::string, VideoResult>& per_video,
                             std::span<const double> thresholds) {
  std::vector<std::size_t> grid(100);
  std::iota(grid.begin(), grid.end(), std::size_t{1});
  const auto ar = ar_at_an(per_video, thresholds, grid);
  std::vector<double> curve;
  curve.reserve(grid.size());
  for (std::size_t an : grid) curve.push_back(ar.at(an));
  return curve;
}

double auc(std::span<const double> curve) {
  if (curve.size() != 100) {
    throw ValidationError("auc: expected AR at AN = 1..100 (100 points), got " +
                          std::to_string(curve.size()));
  }
  double area = 0.0;
  for (std::size_t k = 0; k + 1 < curve.size(); ++k) area += 0.5 * (curve[k] + curve[k + 1]);
  return area / 100.0 * 100.0;
}

}  // namespace bcgnn::eval
