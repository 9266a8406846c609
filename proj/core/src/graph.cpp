#include "gmatch/graph.hpp"

#include <fstream>
#include <stdexcept>

#include "json.hpp"

namespace gmatch {

const char* edge_kind_name(EdgeKind kind) {
  switch (kind) {
    case EdgeKind::kLocalDep: return "dep";
    case EdgeKind::kLocalSeq: return "seq";
    case EdgeKind::kInteractive: return "inter";
    case EdgeKind::kSelf: return "self";
  }
  return "?";
}

Strategy strategy_from_name(const std::string& name) {
  if (name == "root") return Strategy::kRoot;
  if (name == "cooccur" || name == "cooccurrence") return Strategy::kCooccurrence;
  if (name == "denoise") return Strategy::kDenoise;
  if (name == "full") return Strategy::kFull;
  throw std::invalid_argument("unknown strategy: " + name);
}

const char* strategy_name(Strategy s) {
  switch (s) {
    case Strategy::kRoot: return "root";
    case Strategy::kCooccurrence: return "cooccur";
    case Strategy::kDenoise: return "denoise";
    case Strategy::kFull: return "full";
  }
  return "?";
}

std::set<std::string> default_stopwords() {
  return {"a",     "an",    "the",  "and",   "or",     "but",    "if",    "of",
          "at",    "by",    "for",  "with",  "about",  "into",   "through",
          "during", "before", "after", "above", "below", "to",    "from",  "up",
          "down",  "in",    "out",  "on",    "off",    "over",   "under", "again",
          "then",  "once",  "here", "there", "all",    "any",    "both",  "each",
          "such",  "no",    "nor",  "not",   "so",     "than",   "too",   "very",
          "is",    "are",   "was",  "were",  "be"};
}

std::set<std::string> load_stopwords(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw FormatError("cannot open stopword file: " + path);
  std::set<std::string> words;
  std::string line;
  while (std::getline(is, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (!line.empty()) words.insert(lowercase_ascii(line));
  }
  return words;
}

std::vector<Edge> build_local_edges(const ParsedSentence& s, int offset,
                                    const RelationVocab& rels) {
  std::vector<Edge> edges;
  const int n = s.length();
  for (int t = 0; t < n; ++t) {
    if (s.heads[t] == ParsedSentence::kRootHead) continue;
    const int rel = rels.id(s.deprels[t]);
    if (rel < 0) {
      throw StructuralError("deprel '" + s.deprels[t] + "' missing from relation table");
    }
    edges.push_back({offset + s.heads[t], offset + t, rel, EdgeKind::kLocalDep});
    edges.push_back({offset + t, offset + s.heads[t], rels.inverse(rel), EdgeKind::kLocalDep});
  }
  for (int i = 0; i + 1 < n; ++i) {
    edges.push_back({offset + i, offset + i + 1, RelationVocab::kSeq, EdgeKind::kLocalSeq});
    edges.push_back({offset + i + 1, offset + i, RelationVocab::kSeq, EdgeKind::kLocalSeq});
  }
  return edges;
}

namespace {

void connect(std::vector<Edge>& edges, int u, int v) {
  edges.push_back({u, v, RelationVocab::kInter, EdgeKind::kInteractive});
  edges.push_back({v, u, RelationVocab::kInter, EdgeKind::kInteractive});
}

}  // namespace

std::vector<Edge> interactive_root(const ParsedSentence& p, const ParsedSentence& q) {
  std::vector<Edge> edges;
  connect(edges, p.root_index, p.length() + q.root_index);
  return edges;
}

std::vector<Edge> interactive_cooccurrence(const ParsedSentence& p, const ParsedSentence& q,
                                           const std::set<std::string>& stopwords) {
  std::vector<Edge> edges;
  const int m = p.length();
  for (int i = 0; i < m; ++i) {
    const std::string word = lowercase_ascii(p.tokens[i]);
    if (stopwords.count(word)) continue;
    for (int j = 0; j < q.length(); ++j) {
      if (word == lowercase_ascii(q.tokens[j])) connect(edges, i, m + j);
    }
  }
  return edges;
}

std::vector<Edge> interactive_denoise(const ParsedSentence& p, const ParsedSentence& q,
                                      double alpha, Rng& rng) {
  if (alpha < 0 || alpha > 1) throw std::invalid_argument("alpha must be in [0,1]");
  std::vector<Edge> edges;
  const int m = p.length();
  for (int i = 0; i < m; ++i) {
    for (int j = 0; j < q.length(); ++j) {
      if (rng.uniform() <= alpha) connect(edges, i, m + j);
    }
  }
  return edges;
}

SentencePairGraph build_pair_graph(const LabeledPair& pair, const StrategyConfig& cfg,
                                   const RelationVocab& rels, std::uint64_t seed) {
  SentencePairGraph g;
  g.premise_len = pair.premise.length();
  g.hypothesis_len = pair.hypothesis.length();
  g.strategy = cfg.strategy;
  g.seed = seed;
  g.nodes = pair.premise.tokens;
  g.nodes.insert(g.nodes.end(), pair.hypothesis.tokens.begin(), pair.hypothesis.tokens.end());

  g.edges = build_local_edges(pair.premise, 0, rels);
  const auto hyp = build_local_edges(pair.hypothesis, g.premise_len, rels);
  g.edges.insert(g.edges.end(), hyp.begin(), hyp.end());

  std::vector<Edge> inter;
  switch (cfg.strategy) {
    case Strategy::kRoot:
      inter = interactive_root(pair.premise, pair.hypothesis);
      break;
    case Strategy::kCooccurrence:
      inter = interactive_cooccurrence(pair.premise, pair.hypothesis, cfg.stopwords);
      break;
    case Strategy::kDenoise: {
      Rng rng(seed);
      inter = interactive_denoise(pair.premise, pair.hypothesis, cfg.alpha, rng);
      break;
    }
    case Strategy::kFull: {
      Rng rng(seed);
      inter = interactive_denoise(pair.premise, pair.hypothesis, 1.0, rng);
      break;
    }
  }
  if (inter.empty()) inter = interactive_root(pair.premise, pair.hypothesis);
  g.edges.insert(g.edges.end(), inter.begin(), inter.end());

  for (int v = 0; v < g.num_nodes(); ++v) {
    g.edges.push_back({v, v, RelationVocab::kSelf, EdgeKind::kSelf});
  }
  return g;
}

std::uint64_t train_graph_seed(std::uint64_t run_seed, const std::string& pair_id, int epoch,
                               bool resample_each_epoch) {
  const std::uint64_t base = mix_seed(run_seed, fnv1a(pair_id));
  return resample_each_epoch ? mix_seed(base, static_cast<std::uint64_t>(epoch) + 1) : base;
}

std::uint64_t eval_graph_seed(const std::string& pair_id) {
  return mix_seed(fnv1a(pair_id), fnv1a("eval-graph"));
}

std::string graph_to_json(const SentencePairGraph& g) {
  nlohmann::json j;
  j["nodes"] = g.nodes;
  j["M"] = g.premise_len;
  j["N"] = g.hypothesis_len;
  j["strategy"] = strategy_name(g.strategy);
  j["seed"] = g.seed;
  auto& edges = j["edges"] = nlohmann::json::array();
  for (const Edge& e : g.edges) {
    edges.push_back({{"src", e.src},
                     {"dst", e.dst},
                     {"rel", e.relation},
                     {"kind", edge_kind_name(e.kind)}});
  }
  return j.dump(2) + "\n";
}

}  // namespace gmatch
