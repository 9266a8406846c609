#include "gmatch/train.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numeric>
#include <stdexcept>

namespace gmatch {

using ad::Tape;
using ad::Value;

void TrainConfig::validate() const {
  if (learning_rate <= 0) throw std::invalid_argument("learning_rate must be positive");
  if (batch_size < 1) throw std::invalid_argument("batch_size must be at least 1");
  if (epochs < 0) throw std::invalid_argument("epochs must be nonnegative");
  if (eval_every < 1) throw std::invalid_argument("eval_every must be at least 1");
  if (adam_beta1 < 0 || adam_beta1 >= 1 || adam_beta2 < 0 || adam_beta2 >= 1) {
    throw std::invalid_argument("adam betas must be in [0,1)");
  }
  if (adam_eps <= 0) throw std::invalid_argument("adam_eps must be positive");
  if (clip_norm <= 0) throw std::invalid_argument("clip_norm must be positive");
}

void AdamState::init(const ad::ParamStore& store) {
  t = 0;
  m.clear();
  v.clear();
  for (const auto& [name, value] : store.entries()) {
    m[name].assign(value.size(), 0);
    v[name].assign(value.size(), 0);
  }
}

void adam_step(ad::ParamStore& params, AdamState& state, const TrainConfig& cfg) {
  double scale = 1.0;
  if (cfg.clip_gradients) {
    double sq = 0;
    for (const auto& [name, entry] : params.entries()) {
      ad::Value value = entry;  // shallow handle; grad() needs a non-const one
      for (ad::real g : value.grad()) sq += static_cast<double>(g) * g;
    }
    const double norm = std::sqrt(sq);
    if (norm > cfg.clip_norm) scale = cfg.clip_norm / norm;
  }

  state.t += 1;
  const double bc1 = 1.0 - std::pow(cfg.adam_beta1, static_cast<double>(state.t));
  const double bc2 = 1.0 - std::pow(cfg.adam_beta2, static_cast<double>(state.t));
  for (const auto& [name, entry] : params.entries()) {
    ad::Value value = entry;
    auto& grad = value.grad();
    auto mit = state.m.find(name);
    auto vit = state.v.find(name);
    if (mit == state.m.end() || vit == state.v.end()) {
      throw std::logic_error("adam state missing parameter: " + name);
    }
    auto& m = mit->second;
    auto& v = vit->second;
    auto& data = value.data();
    for (std::size_t i = 0; i < grad.size(); ++i) {
      const double g = static_cast<double>(grad[i]) * scale;
      if (!std::isfinite(g)) {
        throw std::runtime_error("non-finite gradient in parameter '" + name + "'");
      }
      m[i] = static_cast<ad::real>(cfg.adam_beta1 * m[i] + (1.0 - cfg.adam_beta1) * g);
      v[i] = static_cast<ad::real>(cfg.adam_beta2 * v[i] + (1.0 - cfg.adam_beta2) * g * g);
      const double m_hat = m[i] / bc1;
      const double v_hat = v[i] / bc2;
      data[i] -= static_cast<ad::real>(cfg.learning_rate * m_hat /
                                       (std::sqrt(v_hat) + cfg.adam_eps));
    }
  }
}

namespace {

int argmax(const std::vector<ad::real>& xs) {
  return static_cast<int>(std::max_element(xs.begin(), xs.end()) - xs.begin());
}

}  // namespace

int predict(const LabeledPair& pair, const ModelParams& params, const Vocab& vocab,
            const RelationVocab& rels, const StrategyConfig& strategy) {
  const SentencePairGraph graph =
      build_pair_graph(pair, strategy, rels, eval_graph_seed(pair.pair_id));
  Tape tape;
  Value logits = forward(tape, pair, graph, vocab, params);
  return argmax(logits.data());
}

double evaluate(const std::vector<LabeledPair>& pairs, const ModelParams& params,
                const Vocab& vocab, const RelationVocab& rels,
                const StrategyConfig& strategy) {
  if (pairs.empty()) return 0;
  int correct = 0;
  for (const LabeledPair& pair : pairs) {
    if (predict(pair, params, vocab, rels, strategy) == pair.label) ++correct;
  }
  return static_cast<double>(correct) / static_cast<double>(pairs.size());
}

namespace {

std::string csv_number(double x) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.9g", x);
  return buf;
}

}  // namespace

RunMetrics train(const std::vector<LabeledPair>& train_pairs,
                 const std::vector<LabeledPair>& val_pairs, ModelParams& params,
                 AdamState& adam, const Vocab& vocab, const RelationVocab& rels,
                 const LabelSet& labels, const StrategyConfig& strategy,
                 const TrainConfig& cfg, int start_epoch) {
  cfg.validate();
  if (train_pairs.empty()) throw std::invalid_argument("no training pairs");
  if (params.config().num_classes != labels.size()) {
    throw std::invalid_argument("num_classes does not match the label set");
  }

  RunMetrics metrics;
  std::ofstream csv;
  if (!cfg.metrics_path.empty()) {
    csv.open(cfg.metrics_path, std::ios::trunc);
    if (!csv) throw std::runtime_error("cannot write metrics: " + cfg.metrics_path);
    csv << "epoch,train_loss,train_acc,val_acc,seconds\n" << std::flush;
  }

  const bool has_val = !val_pairs.empty();
  double best_val = -1;
  auto save = [&](int completed_epoch) {
    if (cfg.checkpoint_path.empty()) return;
    save_checkpoint(cfg.checkpoint_path,
                    make_checkpoint(params, adam, vocab, rels, labels, strategy,
                                    completed_epoch, best_val, cfg.seed));
  };
  if (cfg.epochs <= start_epoch) {
    save(start_epoch);
    return metrics;
  }

  std::vector<std::size_t> order(train_pairs.size());
  for (int epoch = start_epoch + 1; epoch <= cfg.epochs; ++epoch) {
    const auto t0 = std::chrono::steady_clock::now();
    std::iota(order.begin(), order.end(), std::size_t{0});
    Rng shuffle_rng(mix_seed(cfg.seed, fnv1a("shuffle"), static_cast<std::uint64_t>(epoch)));
    shuffle_rng.shuffle(order);

    double loss_total = 0;
    int correct = 0;
    for (std::size_t b0 = 0; b0 < order.size(); b0 += cfg.batch_size) {
      const std::size_t b1 = std::min(order.size(), b0 + cfg.batch_size);
      const ad::real inv_batch = ad::real(1) / static_cast<ad::real>(b1 - b0);
      params.store().zero_grads();
      for (std::size_t k = b0; k < b1; ++k) {
        const LabeledPair& pair = train_pairs[order[k]];
        const std::uint64_t gseed =
            train_graph_seed(cfg.seed, pair.pair_id, epoch, strategy.resample_each_epoch);
        const SentencePairGraph graph = build_pair_graph(pair, strategy, rels, gseed);
        Tape tape;
        Value logits = forward(tape, pair, graph, vocab, params);
        Value loss = ad::cross_entropy(tape, logits, pair.label);
        if (!std::isfinite(loss.scalar())) {
          throw std::runtime_error("non-finite loss at epoch " + std::to_string(epoch) +
                                   ", batch " + std::to_string(b0 / cfg.batch_size) +
                                   ", pair " + pair.pair_id);
        }
        tape.backward(ad::mul(tape, loss, tape.scalar(inv_batch)));
        loss_total += loss.scalar();
        if (argmax(logits.data()) == pair.label) ++correct;
      }
      adam_step(params.store(), adam, cfg);
    }

    EpochMetrics em;
    em.epoch = epoch;
    em.train_loss = loss_total / static_cast<double>(train_pairs.size());
    em.train_acc = static_cast<double>(correct) / static_cast<double>(train_pairs.size());
    if (has_val && (epoch % cfg.eval_every == 0 || epoch == cfg.epochs)) {
      em.val_acc = evaluate(val_pairs, params, vocab, rels, strategy);
      if (em.val_acc > best_val) {
        best_val = em.val_acc;
        metrics.best_val_acc = em.val_acc;
        metrics.best_epoch = epoch;
        save(epoch);
      }
    } else if (!has_val) {
      save(epoch);
    }
    em.seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    metrics.epochs.push_back(em);

    if (csv.is_open()) {
      csv << em.epoch << ',' << csv_number(em.train_loss) << ',' << csv_number(em.train_acc)
          << ',' << (em.val_acc < 0 ? std::string() : csv_number(em.val_acc)) << ','
          << csv_number(em.seconds) << '\n'
          << std::flush;
    }
  }
  return metrics;
}

CheckpointData make_checkpoint(const ModelParams& params, const AdamState& adam,
                               const Vocab& vocab, const RelationVocab& rels,
                               const LabelSet& labels, const StrategyConfig& strategy,
                               int epoch, double best_val_acc, std::uint64_t seed) {
  CheckpointData data;
  data.config = params.config();
  data.strategy = strategy;
  data.vocab_words = vocab.words();
  data.relation_labels = rels.labels();
  data.label_names = labels.names();
  data.epoch = epoch;
  data.adam_t = adam.t;
  data.best_val_acc = best_val_acc;
  data.seed = seed;
  for (const auto& [name, value] : params.store().entries()) {
    data.arrays.push_back({"param." + name, value.shape(), value.data()});
  }
  for (const char* moment : {"m", "v"}) {
    const auto& table = *moment == 'm' ? adam.m : adam.v;
    for (const auto& [name, value] : params.store().entries()) {
      const auto it = table.find(name);
      if (it == table.end()) {
        throw std::logic_error("adam state missing parameter: " + name);
      }
      data.arrays.push_back(
          {std::string("adam.") + moment + "." + name, value.shape(), it->second});
    }
  }
  return data;
}

Pipeline pipeline_from_checkpoint(const CheckpointData& data) {
  Pipeline p;
  p.config = data.config;
  p.strategy = data.strategy;
  p.vocab = Vocab::from_words(data.vocab_words);
  p.relations = RelationVocab::from_labels(data.relation_labels);
  p.labels = LabelSet::from_names(data.label_names);
  p.epoch = data.epoch;
  p.best_val_acc = data.best_val_acc;
  p.seed = data.seed;
  p.params = std::make_unique<ModelParams>(p.config, p.vocab.size(), p.relations.size(),
                                           data.seed);
  p.adam.init(p.params->store());
  p.adam.t = data.adam_t;

  for (const auto& [name, entry] : p.params->store().entries()) {
    const NamedArray* stored = data.find("param." + name);
    if (stored == nullptr) throw FormatError("checkpoint lacks parameter: " + name);
    if (stored->shape != entry.shape()) {
      throw FormatError("checkpoint parameter '" + name + "' has shape " +
                        ad::shape_str(stored->shape) + ", expected " +
                        ad::shape_str(entry.shape()));
    }
    ad::Value value = entry;
    value.data() = stored->data;
    if (const NamedArray* m = data.find("adam.m." + name)) p.adam.m[name] = m->data;
    if (const NamedArray* v = data.find("adam.v." + name)) p.adam.v[name] = v->data;
  }
  return p;
}

std::vector<AlphaResult> alpha_sweep(const std::vector<LabeledPair>& train_pairs,
                                     const std::vector<LabeledPair>& val_pairs,
                                     const ModelConfig& model_cfg, StrategyConfig strategy,
                                     const TrainConfig& train_cfg,
                                     const std::vector<double>& alphas, const Vocab& vocab,
                                     const RelationVocab& rels, const LabelSet& labels) {
  if (strategy.strategy != Strategy::kDenoise) {
    throw std::invalid_argument("alpha sweep needs the denoise strategy");
  }
  TrainConfig cfg = train_cfg;
  cfg.checkpoint_path.clear();
  cfg.metrics_path.clear();

  const auto& eval_pairs = val_pairs.empty() ? train_pairs : val_pairs;
  std::vector<AlphaResult> results;
  for (double alpha : alphas) {
    strategy.alpha = alpha;
    ModelParams params(model_cfg, vocab.size(), rels.size(), cfg.seed);
    AdamState adam;
    adam.init(params.store());
    train(train_pairs, {}, params, adam, vocab, rels, labels, strategy, cfg);
    results.push_back({alpha, evaluate(eval_pairs, params, vocab, rels, strategy)});
  }
  return results;
}

}  // namespace gmatch
