#pragma once

#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "bcgnn/postprocess.hpp"

namespace bcgnn::eval {

using ProposalResults = std::map<std::string, std::vector<ScoredProposal>>;

// Result file: {"<video_id>": [{"start": float, "end": float, "score": float}, ...]}
std::string results_to_json(const ProposalResults& results);
ProposalResults parse_results(const std::string& json_text);
void save_results(const std::filesystem::path& path, const ProposalResults& results);
ProposalResults load_results(const std::filesystem::path& path);

struct MetricsReport {
  std::string config_hash;
  std::vector<double> thresholds;
  std::vector<double> curve;  // AR at AN = 1..100
  double auc = 0.0;

  double ar_at(std::size_t an) const { return curve.at(an - 1); }
};

MetricsReport make_report(const std::map<std::string, VideoResult>& per_video,
                          std::span<const double> thresholds, std::string config_hash);

/// {"config_hash", "AR@1", "AR@10", "AR@50", "AR@100", "AUC", "thresholds", "curve"}
std::string report_to_json(const MetricsReport& report);

}  // namespace bcgnn::eval
