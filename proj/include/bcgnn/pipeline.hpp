#pragma once

#include <cstddef>
#include <filesystem>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "bcgnn/model.hpp"
#include "bcgnn/postprocess.hpp"
#include "bcgnn/result_io.hpp"
#include "bcgnn/training.hpp"

namespace bcgnn::app {

// Dataset directory: annotations.json plus one <id>.bcgf feature file per video.
inline constexpr const char* kAnnotationsFile = "annotations.json";
inline constexpr const char* kFeatureExtension = ".bcgf";

void write_dataset(const std::filesystem::path& dir, std::span<const train::LabeledVideo> videos);
/// Videos in annotation order. Throws ValidationError when a feature file
/// disagrees with its annotation (length) or is missing.
std::vector<train::LabeledVideo> read_dataset(const std::filesystem::path& dir);

struct InferenceOptions {
  std::size_t stride = 16;
  std::size_t rescale_to = 0;
  eval::SoftNmsOptions nms;
};

/// Windows the video, scores every candidate, maps it to video coordinates,
/// keeps the best score per (start, end), applies Soft-NMS. Proposals that
/// reach into a zero-padded tail are dropped.
std::vector<eval::ScoredProposal> infer_video(const Model& model, const data::FeatureSequence& video,
                                              const InferenceOptions& options);

/// infer_video over many videos on up to `jobs` threads. Output does not
/// depend on `jobs`.
eval::ProposalResults infer_all(const Model& model, std::span<const train::LabeledVideo> videos,
                                const InferenceOptions& options, std::size_t jobs);

/// Pairs results with ground truth. Videos missing from the results count as
/// having no proposals; result ids without annotations are an error.
std::map<std::string, eval::VideoResult> join_results(const eval::ProposalResults& results,
                                                      std::span<const data::VideoAnnotation> annotations);

}  // namespace bcgnn::app
