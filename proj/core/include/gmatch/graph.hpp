#pragma once

#include <cstdint>
#include <set>
#include <string>
#include <vector>

#include "gmatch/dataset.hpp"
#include "gmatch/rng.hpp"
#include "gmatch/vocab.hpp"

namespace gmatch {

enum class EdgeKind { kLocalDep, kLocalSeq, kInteractive, kSelf };

const char* edge_kind_name(EdgeKind kind);

struct Edge {
  int src = 0;
  int dst = 0;
  int relation = 0;
  EdgeKind kind = EdgeKind::kLocalDep;

  friend bool operator==(const Edge& a, const Edge& b) {
    return a.src == b.src && a.dst == b.dst && a.relation == b.relation && a.kind == b.kind;
  }
};

enum class Strategy { kRoot, kCooccurrence, kDenoise, kFull };

Strategy strategy_from_name(const std::string& name);
const char* strategy_name(Strategy s);

struct StrategyConfig {
  Strategy strategy = Strategy::kDenoise;
  double alpha = 0.9;                 // denoise keep probability
  std::set<std::string> stopwords;    // lowercased; cooccurrence only
  bool resample_each_epoch = true;    // denoise only
};

// Premise tokens occupy node ids 0..M-1, hypothesis tokens M..M+N-1.
struct SentencePairGraph {
  std::vector<std::string> nodes;
  std::vector<Edge> edges;
  int premise_len = 0;
  int hypothesis_len = 0;
  Strategy strategy = Strategy::kDenoise;
  std::uint64_t seed = 0;

  int num_nodes() const { return premise_len + hypothesis_len; }
};

std::set<std::string> default_stopwords();
// One word per line, lowercased on load.
std::set<std::string> load_stopwords(const std::string& path);

// Per non-root token: head->token with the deprel id, token->head with the
// inverse id. Per adjacent pair: SEQ edges both ways. A dependency between
// adjacent tokens and the SEQ pair coexist as parallel edges.
// Throws StructuralError when a deprel is missing from `rels` (possible when
// evaluating against a relation table frozen at training time).
std::vector<Edge> build_local_edges(const ParsedSentence& s, int offset,
                                    const RelationVocab& rels);

// One root-root connection, both directions.
std::vector<Edge> interactive_root(const ParsedSentence& p, const ParsedSentence& q);

// Both directions for every (i, j) whose lowercased tokens match and are not
// stopwords.
std::vector<Edge> interactive_cooccurrence(const ParsedSentence& p, const ParsedSentence& q,
                                           const std::set<std::string>& stopwords);

// Each of the M*N candidate pairs is kept independently iff the next uniform
// draw is <= alpha, enumerated premise-major so alpha=1 reproduces the full
// strategy edge-for-edge.
std::vector<Edge> interactive_denoise(const ParsedSentence& p, const ParsedSentence& q,
                                      double alpha, Rng& rng);

// Local edges for both sentences, interactive edges per cfg.strategy, a
// fallback root-root connection when the strategy yielded none, then a SELF
// loop on every node. `seed` feeds only the denoise draws.
SentencePairGraph build_pair_graph(const LabeledPair& pair, const StrategyConfig& cfg,
                                   const RelationVocab& rels, std::uint64_t seed);

// Seed derivations keep runs reproducible: the training seed depends on
// (run seed, pair, epoch) so denoise masks resample per epoch yet replay
// identically on resume; the evaluation seed depends on the pair alone.
std::uint64_t train_graph_seed(std::uint64_t run_seed, const std::string& pair_id, int epoch,
                               bool resample_each_epoch);
std::uint64_t eval_graph_seed(const std::string& pair_id);

// {"M":..,"N":..,"edges":[{src,dst,rel,kind}],"nodes":[..],"seed":..,"strategy":..}
std::string graph_to_json(const SentencePairGraph& g);

}  // namespace gmatch
