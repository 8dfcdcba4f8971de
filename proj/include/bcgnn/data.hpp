#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "bcgnn/errors.hpp"
#include "bcgnn/tensor.hpp"

namespace bcgnn::data {

/// Snippet-level features of one video, [D_i x l_s].
struct FeatureSequence {
  std::string video_id;
  Tensor features;
  std::uint32_t snippet_interval = 1;

  std::size_t length() const { return features.dim(1); }
  std::size_t channels() const { return features.dim(0); }
};

/// Action instance in snippet coordinates, 0 <= start < end.
struct GroundTruthInstance {
  double start = 0.0;
  double end = 0.0;

  friend bool operator==(const GroundTruthInstance&, const GroundTruthInstance&) = default;
};

struct VideoAnnotation {
  std::string id;
  std::size_t duration_snippets = 0;
  std::vector<GroundTruthInstance> instances;
};

struct ObservationWindow {
  std::size_t start = 0;  // offset into the video, in snippets
  Tensor features;        // [D_i x l_w]
  std::vector<GroundTruthInstance> instances;  // window-local coordinates
  bool padded = false;    // sequence shorter than l_w; tail is zero
};

// ---- feature files ---------------------------------------------------------
//
// Layout (little-endian): "BCGF", u32 version (1), u32 D_i, u32 l_s,
// u32 snippet interval, then D_i * l_s f32 in row-major order.

class FeatureFileError : public ValidationError {
 public:
  enum class Kind { missing_file, corrupt_header, truncated_payload, non_finite_value, io_failure };

  FeatureFileError(Kind kind, const std::string& what) : ValidationError(what), kind_(kind) {}
  Kind kind() const noexcept { return kind_; }

 private:
  Kind kind_;
};

/// Reads a feature file; the video id is the file stem.
FeatureSequence load_features(const std::filesystem::path& path);
/// Values are written as f32.
void save_features(const std::filesystem::path& path, const FeatureSequence& sequence);

// ---- annotations -----------------------------------------------------------
//
// {"videos":[{"id": str, "duration_snippets": int,
//             "instances":[{"start": float, "end": float}]}]}

std::vector<VideoAnnotation> parse_annotations(const std::string& json_text);
std::string annotations_to_json(std::span<const VideoAnnotation> videos);
std::vector<VideoAnnotation> load_annotations(const std::filesystem::path& path);
void save_annotations(const std::filesystem::path& path, std::span<const VideoAnnotation> videos);

// ---- windows and resampling ------------------------------------------------

/// 0, stride, 2*stride, ... plus a trailing window flush with the sequence end
/// when the regular grid leaves a tail uncovered. A sequence shorter than the
/// window yields the single start 0.
std::vector<std::size_t> window_starts(std::size_t length, std::size_t window, std::size_t stride);

/// Cuts observation windows. An instance is kept, in window-local
/// coordinates, only when both boundaries fall on positions 0..window-1 of
/// the window; otherwise it is omitted from that window. Requires window >= 2 and 1 <= stride <= window.
std::vector<ObservationWindow> slide_windows(const FeatureSequence& sequence,
                                             std::span<const GroundTruthInstance> annotations,
                                             std::size_t window, std::size_t stride);

/// Resamples every channel onto `target_length` evenly spaced points spanning
/// the original extent.
FeatureSequence rescale_linear(const FeatureSequence& sequence, std::size_t target_length);

/// Scales coordinates by target_length / source_length.
std::vector<GroundTruthInstance> rescale_instances(std::span<const GroundTruthInstance> instances,
                                                   std::size_t source_length,
                                                   std::size_t target_length);

/// Sample positions i + n (j - i) / (N - 1), n = 0..N-1.
std::vector<double> content_sample_positions(std::size_t start, std::size_t end, std::size_t samples);

/// Differentiable [D_c x N] interpolation of content columns start..end.
/// Throws ValidationError unless start < end < content.dim(1) and N >= 2.
Tensor interp_content(const Tensor& content, std::size_t start, std::size_t end, std::size_t samples);

// ---- synthetic data ---------------------------------------------------------

struct SynthOptions {
  std::uint64_t seed = 7;
  std::size_t videos = 20;
  std::size_t length = 96;
  std::size_t channels = 8;
  std::size_t min_instances = 1;
  std::size_t max_instances = 2;
  std::size_t min_duration = 3;
  std::size_t max_duration = 16;
  double noise = 0.2;
  std::uint32_t snippet_interval = 16;
  std::string id_prefix = "video_";
};

struct SyntheticVideo {
  FeatureSequence sequence;
  std::vector<GroundTruthInstance> instances;
};

/// Deterministic stand-in for two-stream features. Each video gets its own
/// generator seeded from (seed, index), so any subset can be regenerated
/// independently. Channel roles cycle with period four: boxcar over the
/// instance, onset ramp, offset ramp, progress ramp; everything else is
/// Gaussian background noise. Instances have integer boundaries, are at least
/// min_duration long and are separated by at least two snippets.
std::vector<SyntheticVideo> synth_dataset(const SynthOptions& options);
SyntheticVideo synth_video(const SynthOptions& options, std::size_t index);

}  // namespace bcgnn::data
