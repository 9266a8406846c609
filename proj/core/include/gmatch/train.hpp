#pragma once

#include <cstdint>
#include <memory>
#include <string>
#include <unordered_map>
#include <vector>

#include "gmatch/checkpoint.hpp"
#include "gmatch/dataset.hpp"
#include "gmatch/graph.hpp"
#include "gmatch/model.hpp"

namespace gmatch {

struct TrainConfig {
  double learning_rate = 5e-4;
  int batch_size = 64;
  int epochs = 300;
  std::uint64_t seed = 0;
  double adam_beta1 = 0.9;
  double adam_beta2 = 0.999;
  double adam_eps = 1e-8;
  int eval_every = 1;           // validation cadence in epochs
  std::string checkpoint_path;  // empty: no checkpoint written
  std::string metrics_path;     // empty: no CSV written
  bool clip_gradients = false;  // cap the global gradient norm at clip_norm
  double clip_norm = 5.0;

  void validate() const;  // throws std::invalid_argument
};

struct EpochMetrics {
  int epoch = 0;          // 1-based
  double train_loss = 0;  // epoch mean per-pair cross-entropy
  double train_acc = 0;
  double val_acc = -1;  // -1 when validation did not run this epoch
  double seconds = 0;
};

struct RunMetrics {
  std::vector<EpochMetrics> epochs;
  double best_val_acc = -1;
  int best_epoch = -1;
};

// First and second moments per parameter, keyed by name. Step count lives
// here so bias correction survives checkpointing.
struct AdamState {
  std::int64_t t = 0;
  std::unordered_map<std::string, std::vector<ad::real>> m, v;

  void init(const ad::ParamStore& store);  // zero moments for every entry
};

// One Adam update from the gradients currently accumulated in the store.
// Increments state.t. Throws on non-finite gradients, naming the parameter.
void adam_step(ad::ParamStore& params, AdamState& state, const TrainConfig& cfg);

// Argmax prediction with the pair's deterministic evaluation graph seed.
int predict(const LabeledPair& pair, const ModelParams& params, const Vocab& vocab,
            const RelationVocab& rels, const StrategyConfig& strategy);

double evaluate(const std::vector<LabeledPair>& pairs, const ModelParams& params,
                const Vocab& vocab, const RelationVocab& rels,
                const StrategyConfig& strategy);

// Shuffled mini-batch training: per batch, gradients of the batch-mean loss
// accumulate pair by pair, then one Adam step. Denoise graphs are resampled
// per epoch when the strategy says so, keyed only by (seed, pair, epoch), so
// a resumed run replays the exact remaining trajectory. Validation runs
// every eval_every epochs and on the last one; the checkpoint tracks the
// best validation accuracy (with no validation set, every epoch overwrites
// it, so it holds the final state). With epochs <= start_epoch the initial
// state is checkpointed as-is. The metrics CSV gains one row per epoch as
// it finishes.
RunMetrics train(const std::vector<LabeledPair>& train_pairs,
                 const std::vector<LabeledPair>& val_pairs, ModelParams& params,
                 AdamState& adam, const Vocab& vocab, const RelationVocab& rels,
                 const LabelSet& labels, const StrategyConfig& strategy,
                 const TrainConfig& cfg, int start_epoch = 0);

CheckpointData make_checkpoint(const ModelParams& params, const AdamState& adam,
                               const Vocab& vocab, const RelationVocab& rels,
                               const LabelSet& labels, const StrategyConfig& strategy,
                               int epoch, double best_val_acc, std::uint64_t seed);

// A full runnable bundle rebuilt from a checkpoint.
struct Pipeline {
  ModelConfig config;
  StrategyConfig strategy;
  Vocab vocab;
  RelationVocab relations;
  LabelSet labels = LabelSet::binary();
  std::unique_ptr<ModelParams> params;
  AdamState adam;
  int epoch = 0;
  double best_val_acc = -1;
  std::uint64_t seed = 0;
};

Pipeline pipeline_from_checkpoint(const CheckpointData& data);

struct AlphaResult {
  double alpha = 0;
  double accuracy = 0;
};

// One full train/eval per alpha under the denoise strategy, fresh
// parameters each time, same seed. Accuracy is measured on val_pairs when
// given, the training set otherwise.
std::vector<AlphaResult> alpha_sweep(const std::vector<LabeledPair>& train_pairs,
                                     const std::vector<LabeledPair>& val_pairs,
                                     const ModelConfig& model_cfg, StrategyConfig strategy,
                                     const TrainConfig& train_cfg,
                                     const std::vector<double>& alphas, const Vocab& vocab,
                                     const RelationVocab& rels, const LabelSet& labels);

}  // namespace gmatch
