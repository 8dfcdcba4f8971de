#include <doctest.h>

#include <cmath>

#include "bcgnn/errors.hpp"
#include "bcgnn/model.hpp"
#include "bcgnn/ops.hpp"
#include "bcgnn/proposal_head.hpp"
#include "support.hpp"

using namespace bcgnn;

namespace {

ModelConfig tiny() {
  ModelConfig c;
  c.window = 6;
  c.max_duration = 4;
  c.content_samples = 3;
  c.input_dim = 2;
  c.base_dim = 4;
  c.graph_dim = 3;
  c.content_dim = 2;
  return c;
}

double sigmoid(double x) { return 1.0 / (1.0 + std::exp(-x)); }

}  // namespace

TEST_CASE("head scores are sigmoids of linear maps") {
  testing::Rng rng(1);
  const ModelConfig c = tiny();
  ParamStore params;
  head::register_params(params, c);
  params.initialize_uniform(2);
  const std::size_t d = c.graph_dim;
  const auto edges = graph::build_edge_set(c.window, c.max_duration);
  const reasoning::NodeSet nodes{testing::random_tensor(rng, {c.window, d}),
                                 testing::random_tensor(rng, {c.window, d})};
  const reasoning::DirectedEdgeSet directed{edges, testing::random_tensor(rng, {edges.size(), d}),
                                            testing::random_tensor(rng, {edges.size(), d})};
  const auto proposals = head::score_candidates(nodes, directed, params);
  REQUIRE(proposals.size() == edges.size());

  const auto ws = params.at("head.start.weight").values();
  const auto we = params.at("head.end.weight").values();
  const auto wc = params.at("head.content.weight").values();
  const double bs = params.at("head.start.bias").item(), be = params.at("head.end.bias").item(),
               bc = params.at("head.content.bias").item();
  for (std::size_t k = 0; k < edges.size(); ++k) {
    const auto [i, j] = edges[k];
    double s = bs, e = be, cc = bc;
    for (std::size_t q = 0; q < d; ++q) {
      s += ws[q] * nodes.start.at(i, q);
      e += we[q] * nodes.end.at(j, q);
      cc += wc[q] * directed.s2e.at(k, q) + wc[d + q] * directed.e2s.at(k, q);
    }
    CHECK(proposals[k].t_start == i);
    CHECK(proposals[k].t_end == j);
    CHECK(proposals[k].p_start == doctest::Approx(sigmoid(s)).epsilon(1e-12));
    CHECK(proposals[k].p_end == doctest::Approx(sigmoid(e)).epsilon(1e-12));
    CHECK(proposals[k].p_content == doctest::Approx(sigmoid(cc)).epsilon(1e-12));
  }
}

TEST_CASE("model refuses parameters of the wrong layout") {
  ModelConfig c = tiny();
  ParamStore params = make_param_layout(c);
  CHECK_NOTHROW(Model(c, params.clone()));
  ModelConfig wider = c;
  wider.graph_dim = 5;
  CHECK_THROWS_AS(Model(wider, params.clone()), ValidationError);
  ModelConfig undirected = c;
  undirected.ablation.directed = false;
  CHECK_THROWS_AS(Model(undirected, params.clone()), ValidationError);
}

TEST_CASE("model forward produces one score per node and edge") {
  testing::Rng rng(3);
  const ModelConfig c = tiny();
  const Model m = Model::initialized(c, 5);
  const Tensor x = testing::random_tensor(rng, {c.input_dim, c.window});
  const auto out = m.forward(x);
  CHECK(out.logits.start.numel() == c.window);
  CHECK(out.logits.end.numel() == c.window);
  CHECK(out.logits.content.numel() == m.edges().size());
  const auto proposals = m.propose(x);
  CHECK(proposals.size() == m.edges().size());
  for (const auto& p : proposals) {
    CHECK(p.p_start > 0.0);
    CHECK(p.p_start < 1.0);
    CHECK(p.t_start < p.t_end);
  }
  CHECK_THROWS_AS(m.forward(testing::random_tensor(rng, {c.input_dim, c.window + 1})), ShapeError);
}

TEST_CASE("whole network passes a gradient check for every variant") {
  testing::Rng rng(4);
  ModelConfig c = tiny();
  const Tensor x = testing::random_tensor(rng, {c.input_dim, c.window});
  for (const AblationFlags flags : {AblationFlags{true, true, false}, AblationFlags{false, true, false},
                                    AblationFlags{true, false, false}, AblationFlags{true, true, true}}) {
    c.ablation = flags;
    Model m = Model::initialized(c, 6);
    auto loss = [&](const ParamStore& p) {
      const auto out = m.forward(x, p);
      return ops::add(ops::add(ops::sum(ops::sigmoid(out.logits.start)), ops::sum(out.logits.end)),
                      ops::sum(ops::sigmoid(out.logits.content)));
    };
    CHECK(grad_check(loss, m.params(), 1e-5) <= 1e-5);
  }
}
