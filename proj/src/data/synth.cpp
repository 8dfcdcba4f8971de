#include <algorithm>
#include <cmath>
#include <numeric>
#include <cstdio>
#include <random>

#include "bcgnn/data.hpp"
#include "bcgnn/random.hpp"

namespace bcgnn::data {
namespace {

constexpr std::size_t kGap = 2;  // minimum spacing between consecutive instances

void validate(const SynthOptions& o) {
  if (o.videos < 1) throw ValidationError("synth: number of videos must be at least 1");
  if (o.length < 2) throw ValidationError("synth: video length must be at least 2");
  if (o.channels < 1) throw ValidationError("synth: feature dimension must be at least 1");
  if (o.min_instances > o.max_instances) {
    throw ValidationError("synth: min_instances exceeds max_instances");
  }
  if (o.min_duration < 3 || o.min_duration > o.max_duration) {
    throw ValidationError("synth: durations must satisfy 3 <= min_duration <= max_duration");
  }
  if (!(o.noise >= 0.0)) throw ValidationError("synth: noise must be nonnegative");
  if (o.snippet_interval < 1) throw ValidationError("synth: snippet interval must be positive");
  const std::size_t n = o.max_instances;
  if (n > 0 && n * o.min_duration + (n - 1) * kGap > o.length - 1) {
    throw ValidationError("synth: cannot pack " + std::to_string(n) + " instances of at least " +
                          std::to_string(o.min_duration) + " snippets into " +
                          std::to_string(o.length) + " snippets");
  }
}

double ramp(double distance) { return std::max(0.0, 1.0 - std::abs(distance) / 2.0); }

}  // namespace

SyntheticVideo synth_video(const SynthOptions& o, std::size_t index) {
  validate(o);
  std::mt19937_64 rng(derive_seed(o.seed, index));

  const auto count = static_cast<std::size_t>(uniform_int(
      rng, static_cast<std::int64_t>(o.min_instances), static_cast<std::int64_t>(o.max_instances)));
  std::vector<std::size_t> durations(count);
  for (auto& d : durations)
    d = static_cast<std::size_t>(uniform_int(rng, static_cast<std::int64_t>(o.min_duration),
                                             static_cast<std::int64_t>(o.max_duration)));
  const std::size_t budget = o.length - 1;
  const std::size_t gaps = count > 0 ? (count - 1) * kGap : 0;
  auto used = [&] { return std::accumulate(durations.begin(), durations.end(), gaps); };
  while (used() > budget) {
    auto longest = std::max_element(durations.begin(), durations.end());
    --*longest;  // validate() guarantees this terminates above min_duration
  }

  // Spread the slack over the count + 1 gaps via sorted cut points.
  const std::size_t slack = budget - used();
  std::vector<std::size_t> cuts(count);
  for (auto& c : cuts) c = static_cast<std::size_t>(uniform_int(rng, 0, static_cast<std::int64_t>(slack)));
  std::sort(cuts.begin(), cuts.end());

  SyntheticVideo video;
  std::size_t cursor = 0;
  std::size_t previous_cut = 0;
  for (std::size_t k = 0; k < count; ++k) {
    cursor += cuts[k] - previous_cut;
    previous_cut = cuts[k];
    const std::size_t start = cursor;
    const std::size_t end = start + durations[k];
    video.instances.push_back({static_cast<double>(start), static_cast<double>(end)});
    cursor = end + kGap;
  }

  const std::size_t len = o.length;
  std::vector<double> values(o.channels * len);
  for (double& v : values) v = normal(rng, 0.0, o.noise);
  for (const auto& g : video.instances) {
    const double s = g.start, e = g.end;
    for (std::size_t c = 0; c < o.channels; ++c) {
      const double amplitude = c < 4 ? 1.0 : 0.5;
      double* row = values.data() + c * len;
      for (std::size_t t = 0; t < len; ++t) {
        const double x = static_cast<double>(t);
        switch (c % 4) {
          case 0:
            if (x >= s && x <= e) row[t] += amplitude;
            break;
          case 1:
            row[t] += amplitude * ramp(x - s);
            break;
          case 2:
            row[t] += amplitude * ramp(x - e);
            break;
          default:
            if (x >= s && x <= e) row[t] += amplitude * (x - s) / (e - s);
            break;
        }
      }
    }
  }
  // Feature files hold f32; keep the in-memory copy identical to a reload.
  for (double& v : values) v = static_cast<double>(static_cast<float>(v));
  char id[32];
  std::snprintf(id, sizeof id, "%04zu", index);
  video.sequence = {o.id_prefix + id, Tensor({o.channels, len}, std::move(values)),
                    o.snippet_interval};
  return video;
}

std::vector<SyntheticVideo> synth_dataset(const SynthOptions& options) {
  validate(options);
  std::vector<SyntheticVideo> out;
  out.reserve(options.videos);
  for (std::size_t i = 0; i < options.videos; ++i) out.push_back(synth_video(options, i));
  return out;
}

}  // namespace bcgnn::data
