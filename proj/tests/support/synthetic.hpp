#pragma once

#include <cstdint>
#include <cstdio>
#include <string>
#include <vector>

#include "gmatch/dataset.hpp"
#include "gmatch/rng.hpp"

namespace gmatch::testsupport {

inline const std::vector<std::string>& word_pool() {
  static const std::vector<std::string> pool = {
      "the",  "a",    "dog",   "cat",  "bird",  "man",   "woman", "child", "runs", "sleeps",
      "sees", "eats", "small", "old",  "happy", "fast",  "park",  "house", "tree", "ball",
  };
  return pool;
}

inline const std::vector<std::string>& deprel_pool() {
  static const std::vector<std::string> pool = {"det",  "amod",   "nsubj",
                                                "dobj", "advmod", "prep"};
  return pool;
}

// Random rooted tree over `len` tokens: a random insertion order makes the
// first token the root and lets every later one pick a head among the
// earlier ones, so the result is acyclic and connected by construction.
inline ParsedSentence random_sentence(Rng& rng, int len) {
  ParsedSentence s;
  for (int i = 0; i < len; ++i) {
    s.tokens.push_back(word_pool()[rng.uniform_int(0, static_cast<int>(word_pool().size()) - 1)]);
    s.deprels.push_back(
        deprel_pool()[rng.uniform_int(0, static_cast<int>(deprel_pool().size()) - 1)]);
  }
  std::vector<int> order(len);
  for (int i = 0; i < len; ++i) order[i] = i;
  rng.shuffle(order);
  s.heads.assign(len, ParsedSentence::kRootHead);
  for (int k = 1; k < len; ++k) {
    s.heads[order[k]] = order[rng.uniform_int(0, k - 1)];
  }
  s.root_index = order[0];
  s.deprels[s.root_index] = "root";
  return s;
}

inline LabeledPair random_pair(Rng& rng, const std::string& id, int max_len, int num_labels) {
  LabeledPair pair;
  pair.pair_id = id;
  pair.label = rng.uniform_int(0, num_labels - 1);
  pair.premise = random_sentence(rng, rng.uniform_int(1, max_len));
  pair.hypothesis = random_sentence(rng, rng.uniform_int(1, max_len));
  return pair;
}

inline ParsedSentence subject_sentence(const std::string& det, const std::string& entity,
                                       const std::string& verb) {
  ParsedSentence s;
  s.tokens = {det, entity, verb};
  s.heads = {1, 2, ParsedSentence::kRootHead};
  s.deprels = {"det", "nsubj", "root"};
  s.root_index = 2;
  return s;
}

// Two-class task: does the hypothesis talk about the premise's subject?
// Verbs are label-independent noise, so the cross-sentence entity match is
// the only signal. Labels alternate, entities are drawn fresh per pair.
inline std::vector<LabeledPair> entity_task(int n_pairs, int n_entities, std::uint64_t seed) {
  Rng rng(mix_seed(seed, fnv1a("entity-task")));
  std::vector<std::string> entities, p_verbs, q_verbs;
  for (int i = 0; i < n_entities; ++i) entities.push_back("ent" + std::to_string(i));
  for (const char* v : {"runs", "sleeps", "jumps", "waits", "sings", "falls"}) {
    p_verbs.push_back(v);
  }
  for (const char* v : {"rests", "moves", "stays", "plays", "walks", "eats"}) {
    q_verbs.push_back(v);
  }

  std::vector<LabeledPair> pairs;
  pairs.reserve(n_pairs);
  for (int i = 0; i < n_pairs; ++i) {
    const int e = rng.uniform_int(0, n_entities - 1);
    int e2 = e;
    const int label = i % 2;
    if (label == 0) {
      while (e2 == e) e2 = rng.uniform_int(0, n_entities - 1);
    }
    LabeledPair pair;
    char id[16];
    std::snprintf(id, sizeof(id), "syn-%05d", i);
    pair.pair_id = id;
    pair.label = label;
    pair.premise = subject_sentence(
        "the", entities[e], p_verbs[rng.uniform_int(0, static_cast<int>(p_verbs.size()) - 1)]);
    pair.hypothesis = subject_sentence(
        "a", entities[e2], q_verbs[rng.uniform_int(0, static_cast<int>(q_verbs.size()) - 1)]);
    pairs.push_back(std::move(pair));
  }
  return pairs;
}

// Entity task with only two verbs per side, so the cross-sentence entity
// match dominates the lexical statistics. Harder to solve from word
// frequencies alone, which makes it a good probe for whether the
// interactive connections carry their weight.
inline std::vector<LabeledPair> sharp_task(int n_pairs, int n_entities, std::uint64_t seed) {
  Rng rng(mix_seed(seed, fnv1a("sharp-task")));
  std::vector<std::string> entities;
  for (int i = 0; i < n_entities; ++i) entities.push_back("ent" + std::to_string(i));
  const std::vector<std::string> p_verbs = {"runs", "sleeps"};
  const std::vector<std::string> q_verbs = {"rests", "moves"};

  std::vector<LabeledPair> pairs;
  pairs.reserve(n_pairs);
  for (int i = 0; i < n_pairs; ++i) {
    const int label = i % 2;
    const int pe = rng.uniform_int(0, n_entities - 1);
    int qe = pe;
    if (label == 0) {
      while (qe == pe) qe = rng.uniform_int(0, n_entities - 1);
    }
    LabeledPair pair;
    char id[32];
    std::snprintf(id, sizeof(id), "sharp-%05d", i);
    pair.pair_id = id;
    pair.label = label;
    pair.premise = subject_sentence("the", entities[pe], p_verbs[rng.uniform_int(0, 1)]);
    pair.hypothesis = subject_sentence("a", entities[qe], q_verbs[rng.uniform_int(0, 1)]);
    pairs.push_back(std::move(pair));
  }
  return pairs;
}

}  // namespace gmatch::testsupport
