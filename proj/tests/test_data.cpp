#include <doctest.h>

#include <cmath>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <limits>

#include "bcgnn/data.hpp"
#include "support.hpp"

using namespace bcgnn;
using namespace bcgnn::data;
namespace fs = std::filesystem;

namespace {

fs::path scratch_dir(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / ("bcgnn_test_data_" + name);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

std::string read_bytes(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), {}};
}

void write_bytes(const fs::path& p, const std::string& bytes) {
  std::ofstream out(p, std::ios::binary);
  out << bytes;
}

FeatureSequence ramp_sequence(std::size_t channels, std::size_t length) {
  std::vector<double> v(channels * length);
  for (std::size_t c = 0; c < channels; ++c)
    for (std::size_t t = 0; t < length; ++t) v[c * length + t] = static_cast<double>(100 * c + t);
  return {"ramp", Tensor({channels, length}, std::move(v)), 16};
}

}  // namespace

TEST_CASE("feature files round-trip and use the documented layout") {
  const auto dir = scratch_dir("roundtrip");
  testing::Rng rng(1);
  std::vector<double> v = testing::random_values(rng, 3 * 7);
  for (auto& x : v) x = static_cast<float>(x);
  const FeatureSequence seq{"clip", Tensor({3, 7}, v), 8};
  save_features(dir / "clip.bcgf", seq);

  const std::string bytes = read_bytes(dir / "clip.bcgf");
  REQUIRE(bytes.size() == 4 + 4 * 4 + 3 * 7 * 4);
  CHECK(bytes.substr(0, 4) == "BCGF");
  std::uint32_t header[4];
  std::memcpy(header, bytes.data() + 4, sizeof header);
  CHECK(header[0] == 1);
  CHECK(header[1] == 3);
  CHECK(header[2] == 7);
  CHECK(header[3] == 8);
  float first;
  std::memcpy(&first, bytes.data() + 20, 4);
  CHECK(static_cast<double>(first) == v[0]);

  const FeatureSequence back = load_features(dir / "clip.bcgf");
  CHECK(back.video_id == "clip");
  CHECK(back.snippet_interval == 8);
  CHECK(back.features.shape() == Shape{3, 7});
  CHECK(testing::to_vector(back.features) == v);
}

TEST_CASE("feature file errors are distinguishable") {
  const auto dir = scratch_dir("errors");
  save_features(dir / "ok.bcgf", ramp_sequence(2, 5));
  const std::string good = read_bytes(dir / "ok.bcgf");

  auto kind_of = [&](const std::string& bytes) {
    write_bytes(dir / "x.bcgf", bytes);
    try {
      load_features(dir / "x.bcgf");
    } catch (const FeatureFileError& e) {
      return e.kind();
    }
    FAIL("expected FeatureFileError");
    return FeatureFileError::Kind::io_failure;
  };

  try {
    load_features(dir / "missing.bcgf");
    FAIL("expected FeatureFileError");
  } catch (const FeatureFileError& e) {
    CHECK(e.kind() == FeatureFileError::Kind::missing_file);
  }
  CHECK(kind_of("BCG") == FeatureFileError::Kind::corrupt_header);
  CHECK(kind_of("XXXX" + good.substr(4)) == FeatureFileError::Kind::corrupt_header);
  std::string wrong_version = good;
  wrong_version[4] = 2;
  CHECK(kind_of(wrong_version) == FeatureFileError::Kind::corrupt_header);
  CHECK(kind_of(good.substr(0, good.size() - 3)) == FeatureFileError::Kind::truncated_payload);
  std::string nan_payload = good;
  const float nan = std::numeric_limits<float>::quiet_NaN();
  std::memcpy(nan_payload.data() + 24, &nan, 4);
  CHECK(kind_of(nan_payload) == FeatureFileError::Kind::non_finite_value);
}

TEST_CASE("annotations round-trip and reject malformed input") {
  const std::vector<VideoAnnotation> videos{{"a", 40, {{1.0, 5.5}, {10.0, 20.0}}}, {"b", 12, {}}};
  const auto back = parse_annotations(annotations_to_json(videos));
  REQUIRE(back.size() == 2);
  CHECK(back[0].id == "a");
  CHECK(back[0].duration_snippets == 40);
  CHECK(back[0].instances == videos[0].instances);
  CHECK(back[1].instances.empty());

  CHECK_THROWS_AS(parse_annotations("not json"), ValidationError);
  CHECK_THROWS_AS(parse_annotations(R"({"clips": []})"), ValidationError);
  CHECK_THROWS_AS(parse_annotations(R"({"videos":[{"id":"a","duration_snippets":9,"instances":[{"start":5,"end":2}]}]})"),
                  ValidationError);
}

TEST_CASE("window starts cover the sequence") {
  CHECK(window_starts(96, 32, 16) == std::vector<std::size_t>{0, 16, 32, 48, 64});
  CHECK(window_starts(100, 32, 16) == std::vector<std::size_t>{0, 16, 32, 48, 64, 68});
  CHECK(window_starts(20, 32, 16) == std::vector<std::size_t>{0});
  CHECK(window_starts(32, 32, 8) == std::vector<std::size_t>{0});
  CHECK_THROWS_AS(window_starts(10, 1, 1), ValidationError);
  CHECK_THROWS_AS(window_starts(10, 4, 5), ValidationError);
  CHECK_THROWS_AS(window_starts(10, 4, 0), ValidationError);

  testing::Rng rng(2);
  for (int trial = 0; trial < 200; ++trial) {
    const std::size_t window = testing::random_size(rng, 2, 40);
    const std::size_t stride = testing::random_size(rng, 1, window);
    const std::size_t length = testing::random_size(rng, 1, 200);
    const auto starts = window_starts(length, window, stride);
    CHECK(starts.front() == 0);
    if (length >= window) {
      CHECK(starts.back() + window == length);
      for (std::size_t k = 1; k < starts.size(); ++k) CHECK(starts[k] - starts[k - 1] <= stride);
    }
  }
}

TEST_CASE("windows keep only fully contained instances") {
  const FeatureSequence seq = ramp_sequence(2, 40);
  const std::vector<GroundTruthInstance> gt{{2, 9}, {14, 20}, {15, 31}, {30, 39}};
  const auto windows = slide_windows(seq, gt, 16, 8);
  REQUIRE(windows.size() == 4);
  CHECK(windows[0].start == 0);
  CHECK(windows[0].instances == std::vector<GroundTruthInstance>{{2, 9}});
  CHECK(windows[1].instances == std::vector<GroundTruthInstance>{{6, 12}});
  CHECK(windows[2].instances.empty());
  CHECK(windows[3].start == 24);
  CHECK(windows[3].instances == std::vector<GroundTruthInstance>{{6, 15}});
  CHECK(windows[3].features.at(1, 0) == 100.0 + 24.0);
  for (const auto& w : windows) CHECK_FALSE(w.padded);
}

TEST_CASE("short sequences give one zero-padded window") {
  const FeatureSequence seq = ramp_sequence(2, 5);
  const std::vector<GroundTruthInstance> gt{{1, 3}};
  const auto windows = slide_windows(seq, gt, 8, 4);
  REQUIRE(windows.size() == 1);
  CHECK(windows[0].padded);
  CHECK(windows[0].features.at(1, 4) == 104.0);
  CHECK(windows[0].features.at(1, 5) == 0.0);
  CHECK(windows[0].instances == gt);
}

TEST_CASE("linear rescaling samples evenly spaced positions") {
  const FeatureSequence seq = ramp_sequence(2, 11);
  const auto out = rescale_linear(seq, 21);
  REQUIRE(out.features.shape() == Shape{2, 21});
  for (std::size_t k = 0; k < 21; ++k) {
    CHECK(out.features.at(0, k) == doctest::Approx(k * 10.0 / 20.0));
    CHECK(out.features.at(1, k) == doctest::Approx(100.0 + k * 10.0 / 20.0));
  }
  const auto same = rescale_linear(seq, 11);
  CHECK(testing::to_vector(same.features) == testing::to_vector(seq.features));
  const std::vector<GroundTruthInstance> gt{{2, 6}};
  CHECK(rescale_instances(gt, 10, 20) == std::vector<GroundTruthInstance>{{4, 12}});
  CHECK_THROWS_AS(rescale_linear(seq, 1), ValidationError);
}

TEST_CASE("content interpolation samples i + n (j - i) / (N - 1)") {
  const auto pos = content_sample_positions(2, 8, 4);
  CHECK(pos == std::vector<double>{2.0, 4.0, 6.0, 8.0});

  testing::Rng rng(3);
  for (int trial = 0; trial < 100; ++trial) {
    const std::size_t len = testing::random_size(rng, 2, 20);
    const std::size_t i = testing::random_size(rng, 0, len - 2);
    const std::size_t j = testing::random_size(rng, i + 1, len - 1);
    const std::size_t n = testing::random_size(rng, 2, 9);
    const Tensor content = testing::random_tensor(rng, {3, len});
    const Tensor out = interp_content(content, i, j, n);
    REQUIRE(out.shape() == Shape{3, n});
    for (std::size_t c = 0; c < 3; ++c)
      for (std::size_t k = 0; k < n; ++k) {
        const double x = i + static_cast<double>(k) * (j - i) / static_cast<double>(n - 1);
        const auto x0 = std::min<std::size_t>(static_cast<std::size_t>(x), len - 2);
        const double f = x - x0;
        const double expected = (1 - f) * content.at(c, x0) + f * content.at(c, x0 + 1);
        CHECK(out.at(c, k) == doctest::Approx(expected).epsilon(1e-12));
      }
    // endpoints hit the boundary columns exactly
    CHECK(out.at(0, 0) == content.at(0, i));
    CHECK(out.at(0, n - 1) == doctest::Approx(content.at(0, j)).epsilon(1e-12));
  }
  const Tensor content = Tensor::zeros({2, 6});
  CHECK_THROWS_AS(interp_content(content, 3, 3, 4), ValidationError);
  CHECK_THROWS_AS(interp_content(content, 4, 2, 4), ValidationError);
  CHECK_THROWS_AS(interp_content(content, 1, 6, 4), ValidationError);
  CHECK_THROWS_AS(interp_content(content, 1, 4, 1), ValidationError);
}

TEST_CASE("synthetic data is deterministic and well formed") {
  SynthOptions o;
  o.videos = 12;
  const auto a = synth_dataset(o);
  const auto b = synth_dataset(o);
  REQUIRE(a.size() == 12);
  for (std::size_t k = 0; k < a.size(); ++k) {
    CHECK(testing::to_vector(a[k].sequence.features) == testing::to_vector(b[k].sequence.features));
    CHECK(a[k].instances == b[k].instances);
    // each video is reproducible on its own
    const auto single = synth_video(o, k);
    CHECK(single.instances == a[k].instances);
    CHECK(a[k].sequence.features.shape() == Shape{o.channels, o.length});
    CHECK(a[k].instances.size() >= o.min_instances);
    CHECK(a[k].instances.size() <= o.max_instances);
    for (std::size_t i = 0; i < a[k].instances.size(); ++i) {
      const auto& g = a[k].instances[i];
      CHECK(g.end - g.start >= static_cast<double>(o.min_duration));
      CHECK(g.end <= static_cast<double>(o.length - 1));
      if (i > 0) CHECK(g.start > a[k].instances[i - 1].end);
    }
  }
  CHECK(a[0].sequence.video_id == "video_0000");

  SynthOptions other = o;
  other.seed = 8;
  CHECK(testing::to_vector(synth_video(other, 0).sequence.features) !=
        testing::to_vector(a[0].sequence.features));
}

TEST_CASE("synthetic packing that cannot fit is refused") {
  SynthOptions o;
  o.length = 10;
  o.min_instances = 3;
  o.max_instances = 3;
  o.min_duration = 4;
  o.max_duration = 4;
  CHECK_THROWS_AS(synth_dataset(o), ValidationError);
  o.min_duration = 2;
  CHECK_THROWS_AS(synth_dataset(o), ValidationError);
}
