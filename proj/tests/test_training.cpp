#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <limits>

#include "bcgnn/errors.hpp"
#include "bcgnn/ops.hpp"
#include "bcgnn/postprocess.hpp"
#include "bcgnn/training.hpp"
#include "reference.hpp"
#include "support.hpp"

using namespace bcgnn;
using namespace bcgnn::train;

namespace {

ModelConfig tiny() {
  ModelConfig c;
  c.window = 8;
  c.max_duration = 7;
  c.content_samples = 4;
  c.input_dim = 4;
  c.base_dim = 6;
  c.graph_dim = 5;
  c.content_dim = 4;
  return c;
}

std::vector<LabeledVideo> tiny_videos(std::size_t count, std::uint64_t seed) {
  data::SynthOptions o;
  o.seed = seed;
  o.videos = count;
  o.length = 16;
  o.channels = 4;
  o.min_duration = 3;
  o.max_duration = 5;
  std::vector<LabeledVideo> out;
  for (auto& v : data::synth_dataset(o)) out.push_back({v.sequence, v.instances});
  return out;
}

std::vector<std::uint8_t> random_labels(testing::Rng& rng, std::size_t n) {
  std::vector<std::uint8_t> b(n);
  const double rate = uniform(rng, 0.0, 1.0);
  for (auto& x : b) x = uniform01(rng) < rate ? 1 : 0;
  return b;
}

}  // namespace

TEST_CASE("labels follow boundary regions and the overlap rule") {
  const std::vector<data::GroundTruthInstance> gt{{2, 12}, {20, 25}};
  const auto edges = graph::build_edge_set(32, 31);
  const LabelSet labels = assign_labels(gt, 32, edges);
  // margins are d / 10: 1.0 for the first instance, 0.5 for the second
  for (std::size_t i = 0; i < 32; ++i) {
    const bool start = (i >= 1 && i <= 3) || i == 20;
    const bool end = (i >= 11 && i <= 13) || i == 25;
    CHECK(labels.start[i] == (start ? 1 : 0));
    CHECK(labels.end[i] == (end ? 1 : 0));
  }
  for (std::size_t k = 0; k < edges.size(); ++k) {
    const auto [i, j] = edges[k];
    bool expected = false;
    if (labels.start[i] && labels.end[j]) {
      for (const auto& g : gt) {
        const double inter = std::max(0.0, std::min<double>(j, g.end) - std::max<double>(i, g.start));
        const double uni = (j - i) + (g.end - g.start) - inter;
        expected = expected || inter / uni > 0.5;
      }
    }
    CHECK(labels.content[k] == (expected ? 1 : 0));
  }
  // (1, 25) has both boundaries in regions but matches neither instance
  const auto it = std::find(edges.begin(), edges.end(), graph::Edge{1, 25});
  CHECK(labels.content[static_cast<std::size_t>(it - edges.begin())] == 0);
  CHECK(labels.content[static_cast<std::size_t>(
            std::find(edges.begin(), edges.end(), graph::Edge{2, 12}) - edges.begin())] == 1);
}

TEST_CASE("empty windows are all negative") {
  const auto edges = graph::build_edge_set(8, 7);
  const LabelSet labels = assign_labels({}, 8, edges);
  for (auto b : labels.start) CHECK(b == 0);
  for (auto b : labels.content) CHECK(b == 0);
}

TEST_CASE("class weights balance positives and negatives") {
  const std::vector<std::uint8_t> b{1, 0, 0, 0};
  CHECK(class_weights(b).positive == doctest::Approx(4.0));
  CHECK(class_weights(b).negative == doctest::Approx(4.0 / 3.0));
  const std::vector<std::uint8_t> none{0, 0};
  CHECK(class_weights(none).positive == 0.0);
  CHECK(class_weights(none).negative == 1.0);
  const std::vector<std::uint8_t> all{1, 1, 1};
  CHECK(class_weights(all).positive == 1.0);
  CHECK(class_weights(all).negative == 0.0);
}

TEST_CASE("weighted binary logistic loss matches the reference on random inputs") {
  testing::Rng rng(1);
  for (int trial = 0; trial < 200; ++trial) {
    const std::size_t n = testing::random_size(rng, 1, 40);
    const auto p = testing::random_values(rng, n, 0.001, 0.999);
    const auto b = random_labels(rng, n);
    const double expected = reference::weighted_bl_loss(p, b);
    const Tensor pt({n}, p);
    CHECK(weighted_bl_loss(pt, b).item() == doctest::Approx(expected).epsilon(1e-12));
    std::vector<double> logits(n);
    for (std::size_t k = 0; k < n; ++k) logits[k] = std::log(p[k] / (1.0 - p[k]));
    CHECK(weighted_bl_loss_logits(Tensor({n}, logits), b).item() == doctest::Approx(expected).epsilon(1e-9));
  }
  const std::vector<std::uint8_t> b{1, 0};
  CHECK_THROWS_AS(weighted_bl_loss(Tensor({2}, {1.0, 0.5}), b), ValidationError);
  CHECK_THROWS_AS(weighted_bl_loss(Tensor({2}, {0.5, 0.0}), b), ValidationError);
  CHECK_THROWS_AS(weighted_bl_loss(Tensor({3}, {0.5, 0.5, 0.5}), b), ShapeError);
}

TEST_CASE("loss from logits stays finite for saturated scores") {
  const std::vector<std::uint8_t> b{1, 0};
  const Tensor logits({2}, {-800.0, 800.0}, true);
  const Tensor loss = weighted_bl_loss_logits(logits, b);
  CHECK(std::isfinite(loss.item()));
  loss.backward();
  for (double g : logits.grad()) CHECK(std::isfinite(g));
}

TEST_CASE("total loss agrees between the graph and proposal forms") {
  testing::Rng rng(2);
  const ModelConfig c = tiny();
  const Model m = Model::initialized(c, 3);
  const auto videos = tiny_videos(3, 4);
  for (const auto& w : make_training_windows(videos, c, 4, 0)) {
    const auto out = m.forward(w.features);
    const double graph_form = total_loss(out.logits, m.edges(), w.labels).item();
    const double proposal_form = total_loss(head::candidates_from_logits(out.logits, m.edges()), w.labels);
    CHECK(graph_form == doctest::Approx(proposal_form).epsilon(1e-9));
  }
}

TEST_CASE("unique boundary sets are deduplicated and sorted") {
  const auto edges = graph::build_edge_set(5, 2);
  CHECK(unique_starts(edges) == std::vector<std::size_t>{0, 1, 2, 3});
  CHECK(unique_ends(edges) == std::vector<std::size_t>{1, 2, 3, 4});
}

TEST_CASE("AdamW step matches a hand-written update") {
  ParamStore p;
  Tensor& w = p.add("w", {3}, 1);
  const std::vector<double> start{0.5, -0.25, 1.0};
  std::copy(start.begin(), start.end(), w.mutable_values().begin());
  AdamW opt(p, {0.01, 0.1, 0.9, 0.999, 1e-8});

  std::vector<double> ref = start, m(3, 0.0), v(3, 0.0);
  for (int step = 1; step <= 3; ++step) {
    p.zero_grad();
    ops::sum(ops::mul(p.at("w"), p.at("w"))).backward();
    opt.step();
    for (std::size_t i = 0; i < 3; ++i) {
      const double g = 2.0 * ref[i];
      m[i] = 0.9 * m[i] + 0.1 * g;
      v[i] = 0.999 * v[i] + 0.001 * g * g;
      const double mh = m[i] / (1 - std::pow(0.9, step)), vh = v[i] / (1 - std::pow(0.999, step));
      ref[i] -= 0.01 * (mh / (std::sqrt(vh) + 1e-8) + 0.1 * ref[i]);
      ref[i] = static_cast<float>(ref[i]);
    }
  }
  for (std::size_t i = 0; i < 3; ++i) CHECK(p.at("w").values()[i] == doctest::Approx(ref[i]).epsilon(1e-6));
}

TEST_CASE("checkpoints round-trip bit-exactly and reject corruption") {
  const ModelConfig c = tiny();
  const Model m = Model::initialized(c, 8);
  const std::string bytes = serialize_checkpoint("window=8\n", m.params());
  CHECK(bytes.substr(0, 4) == "BCGC");
  const Checkpoint back = deserialize_checkpoint(bytes);
  CHECK(back.config_text == "window=8\n");
  REQUIRE(back.params.size() == m.params().size());
  for (std::size_t k = 0; k < back.params.size(); ++k) {
    CHECK(back.params.entries()[k].name == m.params().entries()[k].name);
    CHECK(testing::to_vector(back.params.entries()[k].tensor) ==
          testing::to_vector(m.params().entries()[k].tensor));
  }
  CHECK(serialize_checkpoint("window=8\n", back.params) == bytes);

  const auto path = std::filesystem::temp_directory_path() / "bcgnn_test_ckpt.bin";
  save_checkpoint(path, "x=1\n", m.params());
  CHECK(load_checkpoint(path).config_text == "x=1\n");

  CHECK_THROWS_AS(deserialize_checkpoint("XXXX" + bytes.substr(4)), ValidationError);
  CHECK_THROWS_AS(deserialize_checkpoint(bytes.substr(0, bytes.size() - 1)), ValidationError);
  CHECK_THROWS_AS(deserialize_checkpoint(bytes + "z"), ValidationError);
  std::string v2 = bytes;
  v2[4] = 2;
  CHECK_THROWS_AS(deserialize_checkpoint(v2), ValidationError);
  CHECK_THROWS_AS(load_checkpoint("/nonexistent/ckpt"), ValidationError);
}

TEST_CASE("training lowers the loss and is reproducible") {
  const ModelConfig c = tiny();
  const auto videos = tiny_videos(4, 9);
  const auto windows = make_training_windows(videos, c, 4, 0);
  TrainConfig cfg;
  cfg.learning_rate = 3e-3;
  cfg.max_epochs = 4;
  Model a = Model::initialized(c, 1);
  Model b = Model::initialized(c, 1);
  std::vector<EpochRecord> seen;
  const auto ra = train::train(a, windows, {}, cfg, [&](const EpochRecord& r) { seen.push_back(r); });
  const auto rb = train::train(b, windows, {}, cfg);
  CHECK(seen.size() == ra.history.size());
  CHECK(ra.history.front().epoch == 0);
  CHECK(ra.history.back().train_loss < ra.history.front().train_loss);
  CHECK(serialize_checkpoint("", ra.best_params) == serialize_checkpoint("", rb.best_params));
  // the model is left holding the selected parameters
  CHECK(serialize_checkpoint("", a.params()) == serialize_checkpoint("", ra.best_params));
}

TEST_CASE("early stopping halts when validation stops improving") {
  const ModelConfig c = tiny();
  const auto videos = tiny_videos(4, 10);
  const auto windows = make_training_windows(videos, c, 4, 0);
  // Validation labels are the complement of the training labels, so fitting
  // the training set can only hurt validation loss.
  std::vector<TrainingWindow> inverted = windows;
  for (auto& w : inverted)
    for (auto* v : {&w.labels.start, &w.labels.end, &w.labels.content})
      for (auto& x : *v) x = 1 - x;
  TrainConfig cfg;
  cfg.learning_rate = 3e-3;
  cfg.max_epochs = 20;
  cfg.patience = 2;
  Model m = Model::initialized(c, 2);
  const auto r = train::train(m, windows, inverted, cfg);
  CHECK(r.early_stopped);
  CHECK(r.history.size() < 21);
  CHECK(r.history.size() - 1 - r.best_epoch == 2);
}

TEST_CASE("non-finite inputs raise a numeric error") {
  const ModelConfig c = tiny();
  auto windows = make_training_windows(tiny_videos(1, 11), c, 8, 0);
  windows[0].features.mutable_values()[0] = std::numeric_limits<double>::quiet_NaN();
  Model m = Model::initialized(c, 3);
  CHECK_THROWS_AS(train::train(m, windows, {}, TrainConfig{}), NumericError);
  TrainConfig bad;
  bad.learning_rate = 0.0;
  CHECK_THROWS_AS(train::train(m, windows, {}, bad), ValidationError);
}
