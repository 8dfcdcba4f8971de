#include "bcgnn/pipeline.hpp"

#include <algorithm>
#include <atomic>
#include <thread>

#include "bcgnn/errors.hpp"

namespace bcgnn::app {

void write_dataset(const std::filesystem::path& dir, std::span<const train::LabeledVideo> videos) {
  std::filesystem::create_directories(dir);
  std::vector<data::VideoAnnotation> annotations;
  for (const auto& v : videos) {
    data::save_features(dir / (v.sequence.video_id + kFeatureExtension), v.sequence);
    annotations.push_back({v.sequence.video_id, v.sequence.length(), v.instances});
  }
  data::save_annotations(dir / kAnnotationsFile, annotations);
}

std::vector<train::LabeledVideo> read_dataset(const std::filesystem::path& dir) {
  const auto annotations = data::load_annotations(dir / kAnnotationsFile);
  std::vector<train::LabeledVideo> out;
  out.reserve(annotations.size());
  for (const auto& a : annotations) {
    auto seq = data::load_features(dir / (a.id + kFeatureExtension));
    if (seq.length() != a.duration_snippets) {
      throw ValidationError("dataset: " + a.id + " has " + std::to_string(seq.length()) +
                            " snippets but its annotation says " +
                            std::to_string(a.duration_snippets));
    }
    out.push_back({std::move(seq), a.instances});
  }
  return out;
}

std::vector<eval::ScoredProposal> infer_video(const Model& model, const data::FeatureSequence& video,
                                              const InferenceOptions& options) {
  const std::size_t native = video.length();
  const bool rescale = options.rescale_to > 0;
  const data::FeatureSequence seq = rescale ? data::rescale_linear(video, options.rescale_to) : video;
  const std::size_t length = seq.length();
  const double to_native = rescale ? static_cast<double>(native) / static_cast<double>(length) : 1.0;

  std::map<std::pair<std::size_t, std::size_t>, double> best;
  for (const auto& w : data::slide_windows(seq, {}, model.config().window, options.stride)) {
    for (const auto& c : model.propose(w.features)) {
      const std::size_t s = static_cast<std::size_t>(c.t_start) + w.start;
      const std::size_t e = static_cast<std::size_t>(c.t_end) + w.start;
      if (e > length - 1) continue;
      const double score = eval::fuse_scores(c).score;
      auto [it, inserted] = best.try_emplace({s, e}, score);
      if (!inserted) it->second = std::max(it->second, score);
    }
  }

  std::vector<eval::ScoredProposal> merged;
  merged.reserve(best.size());
  for (const auto& [key, score] : best) {
    merged.push_back({static_cast<double>(key.first) * to_native,
                      static_cast<double>(key.second) * to_native, score});
  }
  return eval::soft_nms(merged, options.nms);
}

eval::ProposalResults infer_all(const Model& model, std::span<const train::LabeledVideo> videos,
                                const InferenceOptions& options, std::size_t jobs) {
  std::vector<std::vector<eval::ScoredProposal>> outputs(videos.size());
  std::vector<std::exception_ptr> errors(videos.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t k = next++; k < videos.size(); k = next++) {
      try {
        outputs[k] = infer_video(model, videos[k].sequence, options);
      } catch (...) {
        errors[k] = std::current_exception();
      }
    }
  };
  const std::size_t threads = std::clamp<std::size_t>(jobs, 1, std::max<std::size_t>(1, videos.size()));
  if (threads == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (std::size_t t = 0; t < threads; ++t) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }
  for (const auto& e : errors)
    if (e) std::rethrow_exception(e);

  eval::ProposalResults results;
  for (std::size_t k = 0; k < videos.size(); ++k)
    results[videos[k].sequence.video_id] = std::move(outputs[k]);
  return results;
}

std::map<std::string, eval::VideoResult> join_results(const eval::ProposalResults& results,
                                                      std::span<const data::VideoAnnotation> annotations) {
  std::map<std::string, eval::VideoResult> joined;
  for (const auto& a : annotations) joined[a.id].ground_truth = a.instances;
  for (const auto& [id, proposals] : results) {
    auto it = joined.find(id);
    if (it == joined.end()) throw ValidationError("results: video '" + id + "' has no annotation");
    it->second.proposals = proposals;
  }
  return joined;
}

}  // namespace bcgnn::app
