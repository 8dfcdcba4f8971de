#include <doctest.h>

#include <cmath>
#include <json.hpp>

#include "bcgnn/errors.hpp"
#include "bcgnn/postprocess.hpp"
#include "bcgnn/result_io.hpp"
#include "reference.hpp"
#include "support.hpp"

using namespace bcgnn;
using namespace bcgnn::eval;

namespace {

std::vector<ScoredProposal> random_proposals(testing::Rng& rng, std::size_t n, double horizon) {
  std::vector<ScoredProposal> out;
  for (std::size_t k = 0; k < n; ++k) {
    const double s = uniform(rng, 0.0, horizon - 1.0);
    const double e = uniform(rng, s + 0.5, horizon);
    out.push_back({std::round(s), std::round(e) + 1.0, uniform(rng, 0.0, 1.0)});
  }
  return out;
}

}  // namespace

TEST_CASE("tIoU basics") {
  CHECK(tiou({0, 10}, {0, 10}) == 1.0);
  CHECK(tiou({0, 10}, {5, 15}) == doctest::Approx(5.0 / 15.0));
  CHECK(tiou({0, 4}, {6, 9}) == 0.0);
  CHECK(tiou({0, 4}, {4, 9}) == 0.0);
  CHECK(tiou({3, 3}, {3, 3}) == 0.0);
  testing::Rng rng(1);
  for (int trial = 0; trial < 500; ++trial) {
    const double a = uniform(rng, 0, 50), b = a + uniform(rng, 0.1, 20);
    const double c = uniform(rng, 0, 50), d = c + uniform(rng, 0.1, 20);
    const double v = tiou({a, b}, {c, d});
    CHECK(v >= 0.0);
    CHECK(v <= 1.0);
    CHECK(v == doctest::Approx(tiou({c, d}, {a, b})));
    CHECK(std::abs(v - reference::tiou(a, b, c, d)) <= 1e-12);
  }
}

TEST_CASE("score fusion multiplies the three probabilities") {
  const head::CandidateProposal c{3, 9, 0.5, 0.8, 0.25};
  const auto s = fuse_scores(c);
  CHECK(s.start == 3.0);
  CHECK(s.end == 9.0);
  CHECK(s.score == doctest::Approx(0.1));
}

TEST_CASE("Soft-NMS matches the reference and honours its options") {
  testing::Rng rng(2);
  for (int trial = 0; trial < 150; ++trial) {
    const auto props = random_proposals(rng, testing::random_size(rng, 0, 60), 40.0);
    const SoftNmsOptions opt{uniform(rng, 0.1, 1.0), uniform(rng, 0.0, 0.05), testing::random_size(rng, 1, 30)};
    const auto got = soft_nms(props, opt);
    std::vector<reference::Scored> pool;
    for (const auto& p : props) pool.push_back({p.start, p.end, p.score});
    const auto want = reference::soft_nms(pool, opt.sigma, opt.score_floor, opt.top_k);
    REQUIRE(got.size() == want.size());
    CHECK(got.size() <= opt.top_k);
    for (std::size_t k = 0; k < got.size(); ++k) {
      CHECK(got[k].start == want[k].start);
      CHECK(got[k].end == want[k].end);
      CHECK(std::abs(got[k].score - want[k].score) <= 1e-12);
      if (k > 0) CHECK(got[k].score <= got[k - 1].score);
    }
  }
  const std::vector<ScoredProposal> one{{0, 1, 0.5}};
  CHECK_THROWS_AS(soft_nms(one, {0.0, 0.001, 10}), ValidationError);
}

TEST_CASE("Soft-NMS decays overlapping proposals") {
  const std::vector<ScoredProposal> props{{0, 10, 0.9}, {0, 10, 0.8}, {20, 30, 0.7}};
  const auto out = soft_nms(props, {0.5, 0.001, 100});
  REQUIRE(out.size() == 3);
  CHECK(out[0].score == 0.9);
  CHECK(out[1].score == 0.7);
  CHECK(out[2].score == doctest::Approx(0.8 * std::exp(-2.0)));
}

TEST_CASE("threshold presets") {
  const auto an = activitynet_thresholds();
  const auto th = thumos_thresholds();
  REQUIRE(an.size() == 10);
  REQUIRE(th.size() == 11);
  CHECK(an.front() == doctest::Approx(0.5));
  CHECK(an.back() == doctest::Approx(0.95));
  CHECK(th.back() == doctest::Approx(1.0));
}

TEST_CASE("average recall on a hand-worked example") {
  std::map<std::string, VideoResult> videos;
  // two ground truths; the top proposal hits the first exactly, the second
  // proposal overlaps the second with tIoU 0.6
  videos["a"] = {{{0, 10, 0.9}, {20, 30, 0.8}, {50, 60, 0.1}}, {{0, 10}, {22, 32}}};
  videos["b"] = {{{0, 5, 0.3}}, {}};  // no ground truth: ignored
  const std::vector<double> t{0.5, 0.7};
  const std::vector<std::size_t> ans{1, 2, 3};
  const auto ar = ar_at_an(videos, t, ans);
  const double overlap = 8.0 / 12.0;
  CHECK(overlap > 0.5);
  CHECK(overlap < 0.7);
  CHECK(ar.at(1) == doctest::Approx((0.5 + 0.5) / 2.0));
  CHECK(ar.at(2) == doctest::Approx((1.0 + 0.5) / 2.0));
  CHECK(ar.at(3) == doctest::Approx(ar.at(2)));
}

TEST_CASE("AR is averaged per video before thresholds") {
  std::map<std::string, VideoResult> videos;
  videos["x"] = {{{0, 10, 0.9}}, {{0, 10}}};
  videos["y"] = {{}, {{0, 10}, {20, 30}, {40, 50}, {60, 70}}};
  const std::vector<double> t{0.5};
  const std::vector<std::size_t> ans{5};
  // per video: 1.0 and 0.0, average 0.5 (pooled instances would give 0.2)
  CHECK(ar_at_an(videos, t, ans).at(5) == doctest::Approx(0.5));
}

TEST_CASE("AR never decreases with more proposals") {
  testing::Rng rng(3);
  for (int trial = 0; trial < 30; ++trial) {
    std::map<std::string, VideoResult> videos;
    for (int v = 0; v < 4; ++v) {
      VideoResult r;
      r.proposals = random_proposals(rng, testing::random_size(rng, 0, 40), 50.0);
      for (const auto& g : random_proposals(rng, testing::random_size(rng, 1, 3), 50.0))
        r.ground_truth.push_back({g.start, g.end});
      videos["v" + std::to_string(v)] = r;
    }
    const auto curve = ar_curve(videos, activitynet_thresholds());
    REQUIRE(curve.size() == 100);
    for (std::size_t k = 1; k < curve.size(); ++k) CHECK(curve[k] >= curve[k - 1]);
  }
}

TEST_CASE("AUC uses the trapezoid rule over AN 1..100") {
  CHECK(auc(std::vector<double>(100, 1.0)) == doctest::Approx(99.0));
  CHECK(auc(std::vector<double>(100, 0.0)) == 0.0);
  testing::Rng rng(4);
  for (int trial = 0; trial < 200; ++trial) {
    const auto curve = testing::random_values(rng, 100, 0.0, 1.0);
    CHECK(std::abs(auc(curve) - reference::auc(curve)) <= 1e-9);
  }
  CHECK_THROWS_AS(auc(std::vector<double>(99, 1.0)), ValidationError);
}

TEST_CASE("result files round-trip") {
  ProposalResults r;
  r["v1"] = {{1.0, 4.0, 0.5}, {2.0, 9.0, 0.25}};
  r["v2"] = {};
  const auto back = parse_results(results_to_json(r));
  CHECK(back == r);
  const auto j = nlohmann::json::parse(results_to_json(r));
  CHECK(j["v1"][0]["start"] == 1.0);
  CHECK(j["v1"][0]["score"] == 0.5);
  CHECK_THROWS_AS(parse_results("[1, 2]"), ValidationError);
  CHECK_THROWS_AS(parse_results(R"({"v": [{"start": 5, "end": 2, "score": 1}]})"), ValidationError);
}

TEST_CASE("metrics report carries the config hash and headline numbers") {
  std::map<std::string, VideoResult> videos;
  videos["a"] = {{{0, 10, 0.9}}, {{0, 10}}};
  const auto report = make_report(videos, activitynet_thresholds(), "abc123");
  const auto j = nlohmann::json::parse(report_to_json(report));
  CHECK(j["config_hash"] == "abc123");
  CHECK(j["AR@100"].get<double>() == doctest::Approx(1.0));
  CHECK(j["AUC"].get<double>() == doctest::Approx(99.0));
  CHECK(j["curve"].size() == 100);
  CHECK(report.ar_at(10) == doctest::Approx(1.0));
}
