// Microbenchmarks for the pieces that dominate training time: the matmul
// kernel, one gated attention layer, and the full forward/backward pass.
#include <cstdint>
#include <string>
#include <vector>

#include "benchmark/benchmark.h"

#include "gmatch/ad/gradcheck.hpp"
#include "gmatch/ad/ops.hpp"
#include "gmatch/graph.hpp"
#include "gmatch/model.hpp"
#include "gmatch/rng.hpp"
#include "gmatch/vocab.hpp"

using namespace gmatch;

namespace {

LabeledPair bench_pair(int m, int n) {
  Rng rng(mix_seed(1, fnv1a("bench-pair")));
  const std::vector<std::string> words = {"the", "dog", "cat", "runs", "sees",
                                          "park", "old",  "man", "fast"};
  auto sentence = [&](int len) {
    ParsedSentence s;
    for (int i = 0; i < len; ++i) {
      s.tokens.push_back(words[rng.uniform_int(0, static_cast<int>(words.size()) - 1)]);
      s.deprels.push_back(i == 0 ? "root" : "dep");
      s.heads.push_back(i == 0 ? ParsedSentence::kRootHead : rng.uniform_int(0, i - 1));
    }
    s.root_index = 0;
    return s;
  };
  LabeledPair pair;
  pair.pair_id = "bench-1";
  pair.label = 0;
  pair.premise = sentence(m);
  pair.hypothesis = sentence(n);
  return pair;
}

ModelConfig bench_config() {
  ModelConfig cfg;
  cfg.embed_dim = 32;
  cfg.lstm_layers = 1;
  cfg.lstm_hidden = 32;
  cfg.gat_layers = 2;
  cfg.heads = 2;
  cfg.head_dim = 16;
  cfg.relation_dim = 16;
  cfg.classifier_hidden = 32;
  cfg.num_classes = 3;
  return cfg;
}

// Everything a forward pass needs, built once per benchmark.
struct Fixture {
  LabeledPair pair;
  Vocab vocab;
  RelationVocab rels;
  ModelParams params;
  SentencePairGraph graph;

  Fixture(int m, int n, Strategy strategy)
      : pair(bench_pair(m, n)),
        vocab(build_vocab({pair}, 1)),
        rels(build_relation_vocab({pair})),
        params(bench_config(), vocab.size(), rels.size(), 7),
        graph(make_graph(strategy)) {
    ad::randomize_params(params.store(), 7, 0.3);
  }

  SentencePairGraph make_graph(Strategy strategy) const {
    StrategyConfig cfg;
    cfg.strategy = strategy;
    cfg.alpha = 0.7;
    return build_pair_graph(pair, cfg, rels, eval_graph_seed(pair.pair_id));
  }
};

void BM_Matmul(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  Rng rng(9);
  std::vector<ad::real> a(static_cast<std::size_t>(n) * n), b(a);
  for (auto& x : a) x = rng.uniform() - 0.5;
  for (auto& x : b) x = rng.uniform() - 0.5;
  for (auto _ : state) {
    ad::Tape tape;
    ad::Value out =
        ad::matmul(tape, tape.constant(a, {n, n}), tape.constant(b, {n, n}));
    benchmark::DoNotOptimize(out.data().data());
  }
  state.SetItemsProcessed(state.iterations() * 2LL * n * n * n);
}
BENCHMARK(BM_Matmul)->Arg(16)->Arg(64)->Arg(128);

void BM_BuildGraphDenoise(benchmark::State& state) {
  const int len = static_cast<int>(state.range(0));
  const Fixture fx(len, len, Strategy::kDenoise);
  std::uint64_t seed = 0;
  for (auto _ : state) {
    const SentencePairGraph g = build_pair_graph(fx.pair, {Strategy::kDenoise, 0.7, {}, true},
                                                 fx.rels, seed++);
    benchmark::DoNotOptimize(g.edges.size());
  }
}
BENCHMARK(BM_BuildGraphDenoise)->Arg(8)->Arg(16);

void BM_GgatLayer(benchmark::State& state) {
  const int len = static_cast<int>(state.range(0));
  const Fixture fx(len, len, Strategy::kFull);
  const int d = fx.params.config().node_dim();
  Rng rng(11);
  std::vector<ad::real> h(static_cast<std::size_t>(fx.graph.num_nodes()) * d);
  for (auto& x : h) x = rng.uniform() - 0.5;
  for (auto _ : state) {
    ad::Tape tape;
    ad::Value out = ggat_layer(tape, tape.constant(h, {fx.graph.num_nodes(), d}), fx.graph,
                               fx.params, 0);
    benchmark::DoNotOptimize(out.data().data());
  }
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(fx.graph.edges.size()));
}
BENCHMARK(BM_GgatLayer)->Arg(8)->Arg(16);

void BM_Forward(benchmark::State& state) {
  const int len = static_cast<int>(state.range(0));
  const Fixture fx(len, len, Strategy::kFull);
  for (auto _ : state) {
    ad::Tape tape;
    ad::Value logits = forward(tape, fx.pair, fx.graph, fx.vocab, fx.params);
    benchmark::DoNotOptimize(logits.data().data());
  }
}
BENCHMARK(BM_Forward)->Arg(8)->Arg(16);

void BM_ForwardBackward(benchmark::State& state) {
  const int len = static_cast<int>(state.range(0));
  Fixture fx(len, len, Strategy::kFull);
  for (auto _ : state) {
    fx.params.store().zero_grads();
    ad::Tape tape;
    ad::Value loss =
        ad::cross_entropy(tape, forward(tape, fx.pair, fx.graph, fx.vocab, fx.params),
                          fx.pair.label);
    tape.backward(loss);
    benchmark::DoNotOptimize(loss.data().data());
  }
}
BENCHMARK(BM_ForwardBackward)->Arg(8)->Arg(16);

}  // namespace

BENCHMARK_MAIN();
