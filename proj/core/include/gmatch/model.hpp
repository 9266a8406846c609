#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "gmatch/ad/ops.hpp"
#include "gmatch/ad/params.hpp"
#include "gmatch/embeddings.hpp"
#include "gmatch/graph.hpp"
#include "gmatch/vocab.hpp"

namespace gmatch {

struct ModelConfig {
  int embed_dim = 300;
  int lstm_layers = 3;
  int lstm_hidden = 256;  // total per token; each direction contributes half
  int gat_layers = 2;
  int heads = 4;
  int head_dim = 64;
  int relation_dim = 128;
  int classifier_hidden = 256;
  int num_classes = 3;
  double leaky_slope = 0.2;
  bool symmetric = false;
  bool ablate_contextual = false;
  bool ablate_gates = false;
  bool ablate_fusion_attention = false;
  bool tanh_after_aggregate = false;  // move tanh outside the neighbor sum

  // Node state width d_n; equals heads*head_dim so GAT layers stack.
  int node_dim() const { return lstm_hidden; }

  void validate() const;  // throws std::invalid_argument
};

std::string config_to_json(const ModelConfig& cfg);
// Starts from defaults; fields present in the JSON object override them.
// Unknown keys are an error.
ModelConfig config_from_json(const std::string& text);

// All trainable arrays, registered in a fixed order that doubles as the
// checkpoint manifest order. The same LSTM stack encodes both sentences.
class ModelParams {
 public:
  // `pretrained` (when given) must be [vocab_size x embed_dim] and fills the
  // embedding table; everything else is drawn from `seed`.
  ModelParams(const ModelConfig& cfg, int vocab_size, int num_relations, std::uint64_t seed,
              const EmbeddingMatrix* pretrained = nullptr);

  const ModelConfig& config() const { return cfg_; }
  int vocab_size() const { return vocab_size_; }
  int num_relations() const { return num_relations_; }

  ad::ParamStore& store() { return store_; }
  const ad::ParamStore& store() const { return store_; }
  ad::Value param(const std::string& name) const;  // throws if missing

 private:
  ModelConfig cfg_;
  int vocab_size_ = 0;
  int num_relations_ = 0;
  ad::ParamStore store_;
};

struct GatLayerTrace {
  std::vector<ad::Value> attention;  // per head: [E x 1], sums to 1 per dst node
  ad::Value gates;                   // [E x head_dim]; invalid when gates are ablated
};

struct ForwardTrace {
  ad::Value h_p, h_q;                 // contextual states [M x d_n], [N x d_n]
  std::vector<GatLayerTrace> layers;  // one per GAT layer
  ad::Value fusion_p, fusion_q;       // [M x 1], [N x 1]; each sums to 1
  ad::Value s_p, s_q;                 // [1 x d_n]
  ad::Value features;                 // [1 x 4*d_n]
  ad::Value logits;                   // [1 x num_classes]
};

std::vector<int> token_ids(const ParsedSentence& s, const Vocab& vocab);

// Stacked Bi-LSTM over each sentence (shared weights), zero initial states,
// forward and backward final-layer states concatenated per token. With
// ablate_contextual, a learned linear projection of the raw embeddings.
std::pair<ad::Value, ad::Value> encode_contextual(ad::Tape& tape,
                                                  const std::vector<int>& premise_ids,
                                                  const std::vector<int>& hypothesis_ids,
                                                  const ModelParams& params);

// z = LeakyReLU(W_a . [W_e h_i ; W_e h_j]) for one head; h_i is the edge
// receiver. Single-pair form used by tests; the layer computes every edge
// at once along the same formula.
ad::Value attention_scores(ad::Tape& tape, ad::Value h_i, ad::Value h_j,
                           const ModelParams& params, int layer, int head);

// g = ReLU(W_g . [h_i ; h_j ; e_rel]); one gate per edge, shared across
// heads.
ad::Value relational_gate(ad::Tape& tape, ad::Value h_i, ad::Value h_j, int rel_id,
                          const ModelParams& params, int layer);

// One gated multi-head attention layer over the pair graph: per head,
// softmax attention over each node's incoming edge instances, per-edge
// message g o tanh(alpha * W_c h_src), summed per receiver; head outputs
// concatenated. ablate_gates drops the g factor.
ad::Value ggat_layer(ad::Tape& tape, ad::Value h, const SentencePairGraph& graph,
                     const ModelParams& params, int layer, GatLayerTrace* trace = nullptr);

struct FusionResult {
  ad::Value s_p, s_q;          // [1 x d_n]
  ad::Value alpha_p, alpha_q;  // [M x 1], [N x 1]
};

// Self-attentive pooling of each sentence's node states; uniform weights
// when ablate_fusion_attention is set.
FusionResult fuse(ad::Tape& tape, ad::Value u_p, ad::Value u_q, const ModelParams& params);

// [S_P ; S_Q ; S_P - S_Q ; S_P o S_Q]; the difference block is |S_P - S_Q|
// in symmetric mode.
ad::Value match_features(ad::Tape& tape, ad::Value s_p, ad::Value s_q, bool symmetric);

ad::Value classify(ad::Tape& tape, ad::Value s_p, ad::Value s_q, const ModelParams& params,
                   ad::Value* features_out = nullptr);

ad::Value forward(ad::Tape& tape, const LabeledPair& pair, const SentencePairGraph& graph,
                  const Vocab& vocab, const ModelParams& params,
                  ForwardTrace* trace = nullptr);

}  // namespace gmatch
