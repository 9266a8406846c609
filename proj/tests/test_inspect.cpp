#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <cmath>
#include <memory>
#include <string>
#include <vector>

#include "doctest.h"
#include "dot_check.hpp"
#include "gmatch/inspect.hpp"
#include "gmatch/model.hpp"
#include "json.hpp"
#include "synthetic.hpp"

using namespace gmatch;
using testsupport::DotChecker;

namespace {

ModelConfig small_config() {
  ModelConfig cfg;
  cfg.embed_dim = 6;
  cfg.lstm_layers = 1;
  cfg.lstm_hidden = 8;
  cfg.gat_layers = 1;
  cfg.heads = 2;
  cfg.head_dim = 4;
  cfg.relation_dim = 4;
  cfg.classifier_hidden = 8;
  cfg.num_classes = 3;
  return cfg;
}

struct Scene {
  LabeledPair pair;
  Vocab vocab;
  RelationVocab rels;
  SentencePairGraph graph;
  // The trace holds handles into the tape and parameter storage, so both
  // must outlive it.
  std::unique_ptr<ModelParams> params;
  ad::Tape tape;
  ForwardTrace trace;
  ImportanceReport report;

  Scene() {
    pair.pair_id = "scene-1";
    pair.label = 0;
    pair.premise.tokens = {"a", "dog", "runs"};
    pair.premise.heads = {1, 2, ParsedSentence::kRootHead};
    pair.premise.deprels = {"det", "nsubj", "root"};
    pair.premise.root_index = 2;
    pair.hypothesis.tokens = {"the", "dog", "sleeps"};
    pair.hypothesis.heads = {1, 2, ParsedSentence::kRootHead};
    pair.hypothesis.deprels = {"det", "nsubj", "root"};
    pair.hypothesis.root_index = 2;

    vocab = build_vocab({pair}, 1);
    rels = build_relation_vocab({pair});
    StrategyConfig strat;
    strat.strategy = Strategy::kFull;
    graph = build_pair_graph(pair, strat, rels, 3);

    params = std::make_unique<ModelParams>(small_config(), vocab.size(), rels.size(), 7);
    forward(tape, pair, graph, vocab, *params, &trace);
    report = importance_report(trace, graph);
  }
};

int count_interactive(const SentencePairGraph& g) {
  int n = 0;
  for (const Edge& e : g.edges) n += e.kind == EdgeKind::kInteractive ? 1 : 0;
  return n;
}

}  // namespace

TEST_CASE("node importance is the fusion attention, one simplex per sentence") {
  Scene s;
  const auto [wp, wq] = node_importance(s.trace);
  REQUIRE(wp.size() == 3);
  REQUIRE(wq.size() == 3);
  double sp = 0, sq = 0;
  for (int t = 0; t < 3; ++t) {
    CHECK(wp[t] == s.trace.fusion_p.data()[t]);
    CHECK(wq[t] == s.trace.fusion_q.data()[t]);
    sp += wp[t];
    sq += wq[t];
  }
  CHECK(sp == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(sq == doctest::Approx(1.0).epsilon(1e-12));

  ForwardTrace empty;
  CHECK_THROWS_AS(node_importance(empty), std::logic_error);
}

TEST_CASE("edge importance adds the endpoint weights") {
  Scene s;
  const auto weights = edge_importance(s.trace, s.graph);
  REQUIRE(weights.size() == s.graph.edges.size());

  const auto [wp, wq] = node_importance(s.trace);
  std::vector<double> combined = wp;
  combined.insert(combined.end(), wq.begin(), wq.end());
  for (std::size_t i = 0; i < weights.size(); ++i) {
    const Edge& e = s.graph.edges[i];
    CHECK(weights[i] == combined[e.src] + combined[e.dst]);
    if (e.kind == EdgeKind::kSelf) CHECK(weights[i] == 2 * combined[e.src]);
  }

  SentencePairGraph other = s.graph;
  other.premise_len = 2;
  CHECK_THROWS_AS(edge_importance(s.trace, other), std::logic_error);
}

TEST_CASE("the report bundles weights, logits and the argmax label") {
  Scene s;
  CHECK(s.report.node_weights.size() == 6);
  CHECK(s.report.edge_weights == edge_importance(s.trace, s.graph));
  REQUIRE(s.report.logits.size() == 3);
  int best = 0;
  for (int k = 1; k < 3; ++k) {
    if (s.report.logits[k] > s.report.logits[best]) best = k;
  }
  CHECK(s.report.predicted_label == best);
  for (int t = 0; t < 3; ++t) {
    CHECK(s.report.node_weights[t] == s.trace.fusion_p.data()[t]);
    CHECK(s.report.node_weights[3 + t] == s.trace.fusion_q.data()[t]);
  }
}

TEST_CASE("the default cutoff is half the mean edge weight") {
  ImportanceReport report;
  report.edge_weights = {1.0, 2.0, 3.0};
  CHECK(default_dot_threshold(report) == 1.0);
  report.edge_weights.clear();
  CHECK(default_dot_threshold(report) == 0);

  Scene s;
  double total = 0;
  for (double w : s.report.edge_weights) total += w;
  CHECK(default_dot_threshold(s.report) ==
        0.5 * total / static_cast<double>(s.report.edge_weights.size()));
}

TEST_CASE("rendered graph passes a DOT grammar check") {
  Scene s;
  const std::string dot = export_dot(s.graph, s.report, 0.0);
  const DotChecker::Summary sum = DotChecker::check(dot);
  CHECK(sum.directed);
  CHECK(sum.node_stmts == 6);
  // Nothing scores strictly below zero, so every edge is rendered.
  CHECK(sum.edge_stmts == static_cast<int>(s.graph.edges.size()));
  CHECK(sum.dashed_edges == count_interactive(s.graph));
  CHECK(dot.find("cluster_p") != std::string::npos);
  CHECK(dot.find("cluster_q") != std::string::npos);
  CHECK(dot.find("\"premise\"") != std::string::npos);
  CHECK(dot.find("\"hypothesis\"") != std::string::npos);
}

TEST_CASE("the cutoff drops weak interactive edges and only those") {
  Scene s;
  const double thr = default_dot_threshold(s.report);
  int kept_inter = 0;
  for (std::size_t i = 0; i < s.graph.edges.size(); ++i) {
    if (s.graph.edges[i].kind != EdgeKind::kInteractive) continue;
    if (s.report.edge_weights[i] >= thr) ++kept_inter;
  }
  const int locals = static_cast<int>(s.graph.edges.size()) - count_interactive(s.graph);

  const DotChecker::Summary sum = DotChecker::check(export_dot(s.graph, s.report, thr));
  CHECK(sum.edge_stmts == locals + kept_inter);
  CHECK(sum.dashed_edges == kept_inter);

  // An impossible bar silences every interactive edge but no local one.
  const DotChecker::Summary quiet = DotChecker::check(export_dot(s.graph, s.report, 1e9));
  CHECK(quiet.edge_stmts == locals);
  CHECK(quiet.dashed_edges == 0);
}

TEST_CASE("export rejects a report built for another graph") {
  Scene s;
  ImportanceReport bad = s.report;
  bad.edge_weights.pop_back();
  CHECK_THROWS_AS(export_dot(s.graph, bad, 0.0), std::logic_error);
}

TEST_CASE("token text is escaped into valid DOT labels") {
  SentencePairGraph g;
  g.premise_len = 1;
  g.hypothesis_len = 1;
  g.nodes = {"he\"said", "back\\slash"};
  g.edges.push_back({0, 0, RelationVocab::kSelf, EdgeKind::kSelf});
  g.edges.push_back({1, 1, RelationVocab::kSelf, EdgeKind::kSelf});
  g.edges.push_back({0, 1, RelationVocab::kInter, EdgeKind::kInteractive});

  ImportanceReport report;
  report.node_weights = {0.9, 0.1};
  report.edge_weights = {1.8, 0.2, 1.0};
  report.logits = {0.0, 1.0};
  report.predicted_label = 1;

  const std::string dot = export_dot(g, report, 0.0);
  const DotChecker::Summary sum = DotChecker::check(dot);
  CHECK(sum.directed);
  CHECK(sum.node_stmts == 2);
  CHECK(sum.edge_stmts == 3);
  CHECK(dot.find("\\\"") != std::string::npos);
  CHECK(dot.find("\\\\") != std::string::npos);
}

TEST_CASE("importance maps onto darkness and pen width") {
  SentencePairGraph g;
  g.premise_len = 1;
  g.hypothesis_len = 1;
  g.nodes = {"hot", "cold"};
  g.edges.push_back({0, 0, RelationVocab::kSelf, EdgeKind::kSelf});
  g.edges.push_back({1, 1, RelationVocab::kSelf, EdgeKind::kSelf});

  ImportanceReport report;
  report.node_weights = {0.9, 0.1};
  report.edge_weights = {1.8, 0.2};
  report.logits = {0.0};
  report.predicted_label = 0;

  const std::string dot = export_dot(g, report, 0.0);
  // Max weight: scale 1.0 -> black fill, white text, widest pen.
  CHECK(dot.find("fillcolor=\"gray0\"") != std::string::npos);
  CHECK(dot.find("fontcolor=\"white\"") != std::string::npos);
  CHECK(dot.find("penwidth=3.500") != std::string::npos);
  // Min weight: scale 0.1 -> gray90, black text, slimmest pen.
  CHECK(dot.find("fillcolor=\"gray90\"") != std::string::npos);
  CHECK(dot.find("fontcolor=\"black\"") != std::string::npos);
  CHECK(dot.find("penwidth=0.800") != std::string::npos);

  // A flat profile renders everything at full scale.
  report.node_weights = {0.5, 0.5};
  report.edge_weights = {1.0, 1.0};
  const std::string flat = export_dot(g, report, 0.0);
  CHECK(flat.find("gray90") == std::string::npos);
  CHECK(flat.find("penwidth=3.500") != std::string::npos);
}

TEST_CASE("report JSON mirrors the report and the graph") {
  Scene s;
  const std::string text = report_to_json(s.report, s.graph, s.pair.pair_id, "entailment");
  CHECK(text.back() == '\n');
  const nlohmann::json j = nlohmann::json::parse(text);
  CHECK(text == j.dump(2) + "\n");

  CHECK(j.at("pair_id") == "scene-1");
  CHECK(j.at("predicted_label") == "entailment");
  REQUIRE(j.at("logits").size() == 3);
  for (int k = 0; k < 3; ++k) CHECK(j.at("logits")[k] == s.report.logits[k]);

  const auto& wp = j.at("node_weights").at("premise");
  const auto& wq = j.at("node_weights").at("hypothesis");
  REQUIRE(wp.size() == 3);
  REQUIRE(wq.size() == 3);
  double sp = 0, sq = 0;
  for (int t = 0; t < 3; ++t) {
    sp += wp[t].get<double>();
    sq += wq[t].get<double>();
  }
  CHECK(sp == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(sq == doctest::Approx(1.0).epsilon(1e-12));

  const auto& edges = j.at("edges");
  REQUIRE(edges.size() == s.graph.edges.size());
  for (std::size_t i = 0; i < s.graph.edges.size(); ++i) {
    CHECK(edges[i].at("src") == s.graph.edges[i].src);
    CHECK(edges[i].at("dst") == s.graph.edges[i].dst);
    CHECK(edges[i].at("rel") == s.graph.edges[i].relation);
    CHECK(edges[i].at("kind") == edge_kind_name(s.graph.edges[i].kind));
    CHECK(edges[i].at("weight") == s.report.edge_weights[i]);
  }
}
