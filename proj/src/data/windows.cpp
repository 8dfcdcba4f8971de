#include <algorithm>
#include <cmath>

#include "bcgnn/data.hpp"
#include "bcgnn/ops.hpp"

namespace bcgnn::data {

std::vector<std::size_t> window_starts(std::size_t length, std::size_t window, std::size_t stride) {
  if (window < 2) throw ValidationError("window length must be at least 2");
  if (stride < 1 || stride > window) {
    throw ValidationError("stride must lie in [1, window], got " + std::to_string(stride));
  }
  if (length <= window) return {0};
  std::vector<std::size_t> starts;
  for (std::size_t s = 0; s + window <= length; s += stride) starts.push_back(s);
  if (starts.back() + window < length) starts.push_back(length - window);
  return starts;
}

std::vector<ObservationWindow> slide_windows(const FeatureSequence& sequence,
                                             std::span<const GroundTruthInstance> annotations,
                                             std::size_t window, std::size_t stride) {
  const std::size_t length = sequence.length();
  const std::size_t channels = sequence.channels();
  const auto src = sequence.features.values();
  std::vector<ObservationWindow> windows;
  for (std::size_t start : window_starts(length, window, stride)) {
    ObservationWindow w;
    w.start = start;
    w.padded = length < window;
    std::vector<double> values(channels * window, 0.0);
    const std::size_t copy = std::min(window, length - start);
    for (std::size_t c = 0; c < channels; ++c)
      std::copy_n(src.begin() + static_cast<std::ptrdiff_t>(c * length + start), copy,
                  values.begin() + static_cast<std::ptrdiff_t>(c * window));
    w.features = Tensor({channels, window}, std::move(values));

    const double lo = static_cast<double>(start);
    const double hi = lo + static_cast<double>(window - 1);  // last position in the window
    for (const auto& g : annotations) {
      if (g.start >= lo && g.end <= hi) w.instances.push_back({g.start - lo, g.end - lo});
    }
    windows.push_back(std::move(w));
  }
  return windows;
}

FeatureSequence rescale_linear(const FeatureSequence& sequence, std::size_t target_length) {
  if (target_length < 2) throw ValidationError("rescale target length must be at least 2");
  const std::size_t length = sequence.length();
  const std::size_t channels = sequence.channels();
  const auto src = sequence.features.values();
  std::vector<double> out(channels * target_length);
  for (std::size_t k = 0; k < target_length; ++k) {
    const double pos = static_cast<double>(k) * static_cast<double>(length - 1) /
                       static_cast<double>(target_length - 1);
    auto x0 = static_cast<std::size_t>(std::floor(pos));
    if (x0 > length - 2) x0 = length - 2;
    const double f = pos - static_cast<double>(x0);
    for (std::size_t c = 0; c < channels; ++c) {
      const double v0 = src[c * length + x0];
      const double v1 = src[c * length + x0 + 1];
      out[c * target_length + k] = f == 0.0 ? v0 : (1.0 - f) * v0 + f * v1;
    }
  }
  return {sequence.video_id, Tensor({channels, target_length}, std::move(out)),
          sequence.snippet_interval};
}

std::vector<GroundTruthInstance> rescale_instances(std::span<const GroundTruthInstance> instances,
                                                   std::size_t source_length,
                                                   std::size_t target_length) {
  const double ratio = static_cast<double>(target_length) / static_cast<double>(source_length);
  std::vector<GroundTruthInstance> out;
  out.reserve(instances.size());
  for (const auto& g : instances) out.push_back({g.start * ratio, g.end * ratio});
  return out;
}

std::vector<double> content_sample_positions(std::size_t start, std::size_t end, std::size_t samples) {
  std::vector<double> pos(samples);
  const double span = static_cast<double>(end) - static_cast<double>(start);
  for (std::size_t n = 0; n < samples; ++n)
    pos[n] = static_cast<double>(start) +
             static_cast<double>(n) * span / static_cast<double>(samples - 1);
  return pos;
}

Tensor interp_content(const Tensor& content, std::size_t start, std::size_t end, std::size_t samples) {
  if (content.rank() != 2) throw ShapeError("interp_content", "content must be [D_c x l_w]");
  if (start >= end) {
    throw ValidationError("interp_content: illegal pair (" + std::to_string(start) + ", " +
                          std::to_string(end) + "), start must precede end");
  }
  if (end >= content.dim(1)) {
    throw ValidationError("interp_content: end " + std::to_string(end) + " outside window of " +
                          std::to_string(content.dim(1)));
  }
  if (samples < 2) throw ValidationError("interp_content: need at least two samples");
  const auto positions = content_sample_positions(start, end, samples);
  return ops::reshape(ops::lerp_gather(content, positions, samples), {content.dim(0), samples});
}

}  // namespace bcgnn::data
