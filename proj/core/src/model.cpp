#include "gmatch/model.hpp"

#include <cmath>
#include <stdexcept>

#include "json.hpp"

namespace gmatch {

using ad::Tape;
using ad::Value;

void ModelConfig::validate() const {
  auto positive = [](int v, const char* name) {
    if (v <= 0) throw std::invalid_argument(std::string(name) + " must be positive");
  };
  positive(embed_dim, "embed_dim");
  positive(lstm_layers, "lstm_layers");
  positive(lstm_hidden, "lstm_hidden");
  positive(gat_layers, "gat_layers");
  positive(heads, "heads");
  positive(head_dim, "head_dim");
  positive(relation_dim, "relation_dim");
  positive(classifier_hidden, "classifier_hidden");
  if (num_classes < 2) throw std::invalid_argument("num_classes must be at least 2");
  if (heads * head_dim != lstm_hidden) {
    throw std::invalid_argument("heads*head_dim must equal lstm_hidden, got " +
                                std::to_string(heads) + "*" + std::to_string(head_dim) +
                                " vs " + std::to_string(lstm_hidden));
  }
  if (lstm_hidden % 2 != 0) {
    throw std::invalid_argument("lstm_hidden must be even (two directions)");
  }
  if (leaky_slope <= 0 || leaky_slope >= 1) {
    throw std::invalid_argument("leaky_slope must be in (0,1)");
  }
}

std::string config_to_json(const ModelConfig& cfg) {
  nlohmann::json j;
  j["embed_dim"] = cfg.embed_dim;
  j["lstm_layers"] = cfg.lstm_layers;
  j["lstm_hidden"] = cfg.lstm_hidden;
  j["gat_layers"] = cfg.gat_layers;
  j["heads"] = cfg.heads;
  j["head_dim"] = cfg.head_dim;
  j["relation_dim"] = cfg.relation_dim;
  j["classifier_hidden"] = cfg.classifier_hidden;
  j["num_classes"] = cfg.num_classes;
  j["leaky_slope"] = cfg.leaky_slope;
  j["symmetric"] = cfg.symmetric;
  j["ablate_contextual"] = cfg.ablate_contextual;
  j["ablate_gates"] = cfg.ablate_gates;
  j["ablate_fusion_attention"] = cfg.ablate_fusion_attention;
  j["tanh_after_aggregate"] = cfg.tanh_after_aggregate;
  return j.dump();
}

ModelConfig config_from_json(const std::string& text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw std::invalid_argument(std::string("bad config JSON: ") + e.what());
  }
  if (!j.is_object()) throw std::invalid_argument("config JSON must be an object");

  ModelConfig cfg;
  for (const auto& [key, value] : j.items()) {
    if (key == "embed_dim") cfg.embed_dim = value.get<int>();
    else if (key == "lstm_layers") cfg.lstm_layers = value.get<int>();
    else if (key == "lstm_hidden") cfg.lstm_hidden = value.get<int>();
    else if (key == "gat_layers") cfg.gat_layers = value.get<int>();
    else if (key == "heads") cfg.heads = value.get<int>();
    else if (key == "head_dim") cfg.head_dim = value.get<int>();
    else if (key == "relation_dim") cfg.relation_dim = value.get<int>();
    else if (key == "classifier_hidden") cfg.classifier_hidden = value.get<int>();
    else if (key == "num_classes") cfg.num_classes = value.get<int>();
    else if (key == "leaky_slope") cfg.leaky_slope = value.get<double>();
    else if (key == "symmetric") cfg.symmetric = value.get<bool>();
    else if (key == "ablate_contextual") cfg.ablate_contextual = value.get<bool>();
    else if (key == "ablate_gates") cfg.ablate_gates = value.get<bool>();
    else if (key == "ablate_fusion_attention") cfg.ablate_fusion_attention = value.get<bool>();
    else if (key == "tanh_after_aggregate") cfg.tanh_after_aggregate = value.get<bool>();
    else throw std::invalid_argument("unknown config key: " + key);
  }
  return cfg;
}

namespace {

std::string lstm_name(int layer, const char* dir, const char* what) {
  return "lstm.l" + std::to_string(layer) + "." + dir + "." + what;
}

std::string gat_name(int layer, const std::string& what) {
  return "gat.l" + std::to_string(layer) + "." + what;
}

std::string head_name(int layer, int head, const char* what) {
  return gat_name(layer, "h" + std::to_string(head) + "." + what);
}

}  // namespace

ModelParams::ModelParams(const ModelConfig& cfg, int vocab_size, int num_relations,
                         std::uint64_t seed, const EmbeddingMatrix* pretrained)
    : cfg_(cfg), vocab_size_(vocab_size), num_relations_(num_relations) {
  cfg_.validate();
  if (vocab_size < 2) throw std::invalid_argument("vocab_size must cover the specials");
  if (num_relations < 3) throw std::invalid_argument("num_relations must cover the specials");

  Rng rng(mix_seed(seed, fnv1a("init")));
  auto xavier = [&rng](Value v) {
    const double limit = std::sqrt(6.0 / (v.shape()[0] + v.shape()[1]));
    for (ad::real& x : v.data()) x = static_cast<ad::real>(rng.uniform(-limit, limit));
  };
  auto matrix = [&](const std::string& name, int r, int c) {
    Value v = store_.create(name, {r, c});
    xavier(v);
    return v;
  };
  auto table = [&](const std::string& name, int r, int c) {
    Value v = store_.create(name, {r, c});
    for (ad::real& x : v.data()) x = static_cast<ad::real>(rng.uniform(-0.05, 0.05));
    return v;
  };
  auto bias = [&](const std::string& name, int c) {
    return store_.create(name, {1, c});  // leaves start zero-filled
  };

  Value embed = store_.create("embed", {vocab_size, cfg_.embed_dim});
  if (pretrained != nullptr) {
    if (pretrained->rows != vocab_size || pretrained->cols != cfg_.embed_dim) {
      throw std::invalid_argument("pretrained embeddings are " +
                                  std::to_string(pretrained->rows) + "x" +
                                  std::to_string(pretrained->cols) + ", expected " +
                                  std::to_string(vocab_size) + "x" +
                                  std::to_string(cfg_.embed_dim));
    }
    embed.data() = pretrained->data;
  } else {
    for (ad::real& x : embed.data()) x = static_cast<ad::real>(rng.uniform(-0.05, 0.05));
    std::fill_n(embed.data().begin(), cfg_.embed_dim, ad::real(0));  // PAD row
  }

  const int d_n = cfg_.node_dim();
  if (cfg_.ablate_contextual) {
    matrix("proj.w", cfg_.embed_dim, d_n);
    bias("proj.b", d_n);
  } else {
    const int h = cfg_.lstm_hidden / 2;
    for (int l = 0; l < cfg_.lstm_layers; ++l) {
      const int in_dim = l == 0 ? cfg_.embed_dim : cfg_.lstm_hidden;
      for (const char* dir : {"fw", "bw"}) {
        matrix(lstm_name(l, dir, "w"), in_dim + h, 4 * h);
        Value b = bias(lstm_name(l, dir, "b"), 4 * h);
        // Forget gate (second block of the i,f,g,o layout) opens at 1.
        std::fill_n(b.data().begin() + h, h, ad::real(1));
      }
    }
  }

  for (int k = 0; k < cfg_.gat_layers; ++k) {
    for (int m = 0; m < cfg_.heads; ++m) {
      matrix(head_name(k, m, "we"), d_n, cfg_.head_dim);
      matrix(head_name(k, m, "wa"), 2 * cfg_.head_dim, 1);
      matrix(head_name(k, m, "wc"), d_n, cfg_.head_dim);
    }
    matrix(gat_name(k, "wg"), 2 * d_n + cfg_.relation_dim, cfg_.head_dim);
    table(gat_name(k, "rel"), num_relations, cfg_.relation_dim);
  }

  matrix("fuse.wp", d_n, d_n);
  matrix("fuse.w1", d_n, 1);
  matrix("fuse.wq", d_n, d_n);
  matrix("fuse.w2", d_n, 1);

  matrix("cls.w1", 4 * d_n, cfg_.classifier_hidden);
  bias("cls.b1", cfg_.classifier_hidden);
  matrix("cls.w2", cfg_.classifier_hidden, cfg_.num_classes);
  bias("cls.b2", cfg_.num_classes);
}

Value ModelParams::param(const std::string& name) const {
  Value v = store_.find(name);
  if (!v.valid()) throw std::logic_error("unknown parameter: " + name);
  return v;
}

std::vector<int> token_ids(const ParsedSentence& s, const Vocab& vocab) {
  std::vector<int> ids;
  ids.reserve(s.tokens.size());
  for (const auto& tok : s.tokens) ids.push_back(vocab.id(tok));
  return ids;
}

namespace {

// One direction of one LSTM layer over x [n x in_dim] -> [n x h].
Value lstm_direction(Tape& tape, Value x, Value w, Value b, bool backwards) {
  const int n = x.shape()[0];
  const int h = b.shape()[1] / 4;
  Value h_prev = tape.constant(std::vector<ad::real>(h, 0), {1, h});
  Value c_prev = tape.constant(std::vector<ad::real>(h, 0), {1, h});
  std::vector<Value> states(n);
  for (int step = 0; step < n; ++step) {
    const int t = backwards ? n - 1 - step : step;
    Value x_t = ad::slice_rows(tape, x, t, t + 1);
    Value pre = ad::add(tape, ad::matmul(tape, ad::concat(tape, {x_t, h_prev}, 1), w), b);
    Value i = ad::sigmoid(tape, ad::slice_cols(tape, pre, 0, h));
    Value f = ad::sigmoid(tape, ad::slice_cols(tape, pre, h, 2 * h));
    Value g = ad::tanh(tape, ad::slice_cols(tape, pre, 2 * h, 3 * h));
    Value o = ad::sigmoid(tape, ad::slice_cols(tape, pre, 3 * h, 4 * h));
    Value c = ad::add(tape, ad::mul(tape, f, c_prev), ad::mul(tape, i, g));
    h_prev = ad::mul(tape, o, ad::tanh(tape, c));
    c_prev = c;
    states[t] = h_prev;
  }
  return ad::concat(tape, states, 0);
}

Value encode_sentence(Tape& tape, const std::vector<int>& ids, const ModelParams& params) {
  if (ids.empty()) throw std::invalid_argument("cannot encode an empty sentence");
  const ModelConfig& cfg = params.config();
  Value x = ad::gather_rows(tape, params.param("embed"), ids);
  if (cfg.ablate_contextual) {
    return ad::add_rowvec(tape, ad::matmul(tape, x, params.param("proj.w")),
                          params.param("proj.b"));
  }
  for (int l = 0; l < cfg.lstm_layers; ++l) {
    Value fw = lstm_direction(tape, x, params.param(lstm_name(l, "fw", "w")),
                              params.param(lstm_name(l, "fw", "b")), false);
    Value bw = lstm_direction(tape, x, params.param(lstm_name(l, "bw", "w")),
                              params.param(lstm_name(l, "bw", "b")), true);
    x = ad::concat(tape, {fw, bw}, 1);
  }
  return x;
}

}  // namespace

std::pair<Value, Value> encode_contextual(Tape& tape, const std::vector<int>& premise_ids,
                                          const std::vector<int>& hypothesis_ids,
                                          const ModelParams& params) {
  return {encode_sentence(tape, premise_ids, params),
          encode_sentence(tape, hypothesis_ids, params)};
}

Value attention_scores(Tape& tape, Value h_i, Value h_j, const ModelParams& params, int layer,
                       int head) {
  Value we = params.param(head_name(layer, head, "we"));
  Value wa = params.param(head_name(layer, head, "wa"));
  Value pi = ad::matmul(tape, h_i, we);
  Value pj = ad::matmul(tape, h_j, we);
  return ad::leaky_relu(tape, ad::matmul(tape, ad::concat(tape, {pi, pj}, 1), wa),
                        static_cast<ad::real>(params.config().leaky_slope));
}

Value relational_gate(Tape& tape, Value h_i, Value h_j, int rel_id, const ModelParams& params,
                      int layer) {
  Value rel = ad::gather_rows(tape, params.param(gat_name(layer, "rel")), {rel_id});
  Value input = ad::concat(tape, {h_i, h_j, rel}, 1);
  return ad::relu(tape, ad::matmul(tape, input, params.param(gat_name(layer, "wg"))));
}

Value ggat_layer(Tape& tape, Value h, const SentencePairGraph& graph, const ModelParams& params,
                 int layer, GatLayerTrace* trace) {
  const ModelConfig& cfg = params.config();
  const int v = graph.num_nodes();
  if (h.shape().size() != 2 || h.shape()[0] != v || h.shape()[1] != cfg.node_dim()) {
    throw ad::ShapeError("ggat_layer: states " + ad::shape_str(h.shape()) +
                         " do not match " + std::to_string(v) + " nodes");
  }

  std::vector<int> src_ids, dst_ids, rel_ids;
  src_ids.reserve(graph.edges.size());
  dst_ids.reserve(graph.edges.size());
  rel_ids.reserve(graph.edges.size());
  std::vector<bool> has_incoming(v, false);
  for (const Edge& e : graph.edges) {
    src_ids.push_back(e.src);
    dst_ids.push_back(e.dst);
    rel_ids.push_back(e.relation);
    has_incoming[e.dst] = true;
  }
  for (int i = 0; i < v; ++i) {
    if (!has_incoming[i]) {
      throw std::logic_error("ggat_layer: node " + std::to_string(i) +
                             " has no incoming edges; self-loops missing");
    }
  }

  Value h_src = ad::gather_rows(tape, h, src_ids);
  Value gates;
  if (!cfg.ablate_gates) {
    Value h_dst = ad::gather_rows(tape, h, dst_ids);
    Value rel_rows = ad::gather_rows(tape, params.param(gat_name(layer, "rel")), rel_ids);
    Value gate_in = ad::concat(tape, {h_dst, h_src, rel_rows}, 1);
    gates = ad::relu(tape, ad::matmul(tape, gate_in, params.param(gat_name(layer, "wg"))));
  }
  if (trace != nullptr) {
    trace->attention.clear();
    trace->gates = gates;
  }

  std::vector<Value> head_outputs;
  head_outputs.reserve(cfg.heads);
  for (int m = 0; m < cfg.heads; ++m) {
    Value proj = ad::matmul(tape, h, params.param(head_name(layer, m, "we")));
    Value score_in = ad::concat(
        tape, {ad::gather_rows(tape, proj, dst_ids), ad::gather_rows(tape, proj, src_ids)}, 1);
    Value z = ad::leaky_relu(tape,
                             ad::matmul(tape, score_in, params.param(head_name(layer, m, "wa"))),
                             static_cast<ad::real>(cfg.leaky_slope));
    Value alpha = ad::segment_softmax(tape, z, dst_ids);
    if (trace != nullptr) trace->attention.push_back(alpha);

    Value msg_src = ad::gather_rows(
        tape, ad::matmul(tape, h, params.param(head_name(layer, m, "wc"))), src_ids);
    Value scaled = ad::scale_rows(tape, msg_src, alpha);
    Value msg = cfg.tanh_after_aggregate ? scaled : ad::tanh(tape, scaled);
    if (!cfg.ablate_gates) msg = ad::mul(tape, msg, gates);
    Value agg = ad::segment_sum(tape, msg, dst_ids, v);
    head_outputs.push_back(cfg.tanh_after_aggregate ? ad::tanh(tape, agg) : agg);
  }
  return ad::concat(tape, head_outputs, 1);
}

namespace {

// alpha = softmax(w_1 . tanh(U W)) over rows; S = sum_i alpha_i U_i.
std::pair<Value, Value> attentive_pool(Tape& tape, Value u, Value w, Value w1, bool uniform) {
  const int rows = u.shape()[0];
  Value alpha;
  if (uniform) {
    alpha = tape.constant(std::vector<ad::real>(rows, ad::real(1) / rows), {rows, 1});
  } else {
    Value scores = ad::matmul(tape, ad::tanh(tape, ad::matmul(tape, u, w)), w1);
    alpha = ad::segment_softmax(tape, scores, std::vector<int>(rows, 0));
  }
  Value ones = tape.constant(std::vector<ad::real>(rows, 1), {1, rows});
  Value pooled = ad::matmul(tape, ones, ad::scale_rows(tape, u, alpha));
  return {pooled, alpha};
}

}  // namespace

FusionResult fuse(Tape& tape, Value u_p, Value u_q, const ModelParams& params) {
  const bool uniform = params.config().ablate_fusion_attention;
  auto [s_p, alpha_p] =
      attentive_pool(tape, u_p, params.param("fuse.wp"), params.param("fuse.w1"), uniform);
  auto [s_q, alpha_q] =
      attentive_pool(tape, u_q, params.param("fuse.wq"), params.param("fuse.w2"), uniform);
  return {s_p, s_q, alpha_p, alpha_q};
}

Value match_features(Tape& tape, Value s_p, Value s_q, bool symmetric) {
  Value diff = ad::sub(tape, s_p, s_q);
  if (symmetric) diff = ad::abs(tape, diff);
  return ad::concat(tape, {s_p, s_q, diff, ad::mul(tape, s_p, s_q)}, 1);
}

Value classify(Tape& tape, Value s_p, Value s_q, const ModelParams& params,
               Value* features_out) {
  Value feat = match_features(tape, s_p, s_q, params.config().symmetric);
  if (features_out != nullptr) *features_out = feat;
  Value hidden = ad::relu(
      tape, ad::add(tape, ad::matmul(tape, feat, params.param("cls.w1")), params.param("cls.b1")));
  return ad::add(tape, ad::matmul(tape, hidden, params.param("cls.w2")), params.param("cls.b2"));
}

Value forward(Tape& tape, const LabeledPair& pair, const SentencePairGraph& graph,
              const Vocab& vocab, const ModelParams& params, ForwardTrace* trace) {
  const int m = pair.premise.length();
  const int n = pair.hypothesis.length();
  if (graph.premise_len != m || graph.hypothesis_len != n) {
    throw std::logic_error("forward: graph was built for different sentence lengths");
  }
  if (params.vocab_size() != vocab.size()) {
    throw std::logic_error("forward: vocab size does not match the parameters");
  }

  auto [h_p, h_q] = encode_contextual(tape, token_ids(pair.premise, vocab),
                                      token_ids(pair.hypothesis, vocab), params);
  Value h = ad::concat(tape, {h_p, h_q}, 0);
  if (trace != nullptr) {
    trace->h_p = h_p;
    trace->h_q = h_q;
    trace->layers.assign(params.config().gat_layers, {});
  }
  for (int k = 0; k < params.config().gat_layers; ++k) {
    h = ggat_layer(tape, h, graph, params, k, trace ? &trace->layers[k] : nullptr);
  }

  Value u_p = ad::slice_rows(tape, h, 0, m);
  Value u_q = ad::slice_rows(tape, h, m, m + n);
  FusionResult fused = fuse(tape, u_p, u_q, params);
  Value features;
  Value logits = classify(tape, fused.s_p, fused.s_q, params, &features);

  if (trace != nullptr) {
    trace->fusion_p = fused.alpha_p;
    trace->fusion_q = fused.alpha_q;
    trace->s_p = fused.s_p;
    trace->s_q = fused.s_q;
    trace->features = features;
    trace->logits = logits;
  }
  return logits;
}

}  // namespace gmatch
