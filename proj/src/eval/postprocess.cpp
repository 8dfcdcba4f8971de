#include <algorithm>
#include <cmath>

#include "bcgnn/postprocess.hpp"

namespace bcgnn::eval {

double tiou(Interval a, Interval b) {
  const double inter = std::max(0.0, std::min(a.end, b.end) - std::max(a.start, b.start));
  const double uni = (a.end - a.start) + (b.end - b.start) - inter;
  return uni > 0.0 ? inter / uni : 0.0;
}

ScoredProposal fuse_scores(const head::CandidateProposal& c) {
  return {static_cast<double>(c.t_start), static_cast<double>(c.t_end),
          c.p_start * c.p_end * c.p_content};
}

std::vector<ScoredProposal> soft_nms(std::span<const ScoredProposal> proposals,
                                     const SoftNmsOptions& options) {
  if (!(options.sigma > 0.0)) throw ValidationError("soft_nms: sigma must be positive");
  std::vector<ScoredProposal> pool(proposals.begin(), proposals.end());
  std::vector<ScoredProposal> kept;
  while (!pool.empty() && kept.size() < options.top_k) {
    // max_element returns the first maximum, i.e. the earliest survivor.
    const auto best_it = std::max_element(
        pool.begin(), pool.end(), [](const auto& x, const auto& y) { return x.score < y.score; });
    const ScoredProposal best = *best_it;
    pool.erase(best_it);
    kept.push_back(best);

    std::vector<ScoredProposal> survivors;
    survivors.reserve(pool.size());
    for (auto p : pool) {
      const double overlap = tiou({best.start, best.end}, {p.start, p.end});
      p.score *= std::exp(-(overlap * overlap) / options.sigma);
      if (p.score >= options.score_floor) survivors.push_back(p);
    }
    pool = std::move(survivors);
  }
  std::stable_sort(kept.begin(), kept.end(),
                   [](const auto& x, const auto& y) { return x.score > y.score; });
  return kept;
}

}  // namespace bcgnn::eval
