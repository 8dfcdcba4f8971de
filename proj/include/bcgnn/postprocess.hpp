#pragma once

#include <cstddef>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "bcgnn/data.hpp"
#include "bcgnn/proposal_head.hpp"

// Inference post-processing (score fusion, Soft-NMS) and proposal metrics.
namespace bcgnn::eval {

struct Interval {
  double start = 0.0;
  double end = 0.0;
};

/// |a ∩ b| / |a ∪ b|, in [0, 1]. Zero when the union is empty.
double tiou(Interval a, Interval b);

struct ScoredProposal {
  double start = 0.0;
  double end = 0.0;
  double score = 0.0;

  friend bool operator==(const ScoredProposal&, const ScoredProposal&) = default;
};

/// score = p_start * p_end * p_content.
ScoredProposal fuse_scores(const head::CandidateProposal& candidate);

struct SoftNmsOptions {
  double sigma = 0.5;
  double score_floor = 0.001;
  std::size_t top_k = 100;
};

/// Gaussian Soft-NMS: repeatedly keep the highest remaining score (earliest
/// input position on ties), multiply every other remaining score by
/// exp(-tiou^2 / sigma), drop those below the floor, stop after top_k.
/// Output is sorted by final score, descending.
std::vector<ScoredProposal> soft_nms(std::span<const ScoredProposal> proposals,
                                     const SoftNmsOptions& options);

/// 0.5, 0.55, ..., 0.95.
std::vector<double> activitynet_thresholds();
/// 0.5, 0.55, ..., 1.0.
std::vector<double> thumos_thresholds();

struct VideoResult {
  std::vector<ScoredProposal> proposals;  // any order; ranked by score here
  std::vector<data::GroundTruthInstance> ground_truth;
};

/// For each AN: keep the AN best proposals per video, compute per-video
/// recall at every threshold, average recall over videos (videos without
/// ground truth excluded), then average over thresholds.
std::map<std::size_t, double> ar_at_an(const std::map<std::string, VideoResult>& per_video,
                                       std::span<const double> thresholds,
                                       std::span<const std::size_t> an_values);

/// AR-vs-AN curve on AN = 1..100.
std::vector<double> ar_curve(const std::map<std::string, VideoResult>& per_video,
                             std::span<const double> thresholds);

/// Trapezoidal area under AR(AN) over AN in [1, 100], normalised by 100 and
/// scaled by 100. `curve[k]` is AR at AN = k + 1; needs exactly 100 points.
double auc(std::span<const double> curve);

}  // namespace bcgnn::eval
