// Command-line front end: dataset prep, graph construction, training,
// evaluation, the denoise sweep, gradient checking, and pair inspection.

#include <cstdint>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <memory>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "gmatch/ad/gradcheck.hpp"
#include "gmatch/ad/ops.hpp"
#include "gmatch/checkpoint.hpp"
#include "gmatch/conllu.hpp"
#include "gmatch/dataset.hpp"
#include "gmatch/embeddings.hpp"
#include "gmatch/graph.hpp"
#include "gmatch/inspect.hpp"
#include "gmatch/model.hpp"
#include "gmatch/rng.hpp"
#include "gmatch/train.hpp"
#include "gmatch/vocab.hpp"

namespace {

using namespace gmatch;

LabelSet parse_label_set(const std::string& spec) {
  if (spec == "snli3") return LabelSet::snli3();
  if (spec == "binary") return LabelSet::binary();
  return LabelSet::from_file(spec);
}

std::vector<LabeledPair> load_dataset(const std::string& path, const LabelSet& labels) {
  LoadReport report = load_pairs(path, labels);
  for (const auto& w : report.warnings) std::cerr << "gmatch: warning: " << w << "\n";
  if (report.pairs.empty()) throw std::runtime_error(path + ": no pairs loaded");
  return report.pairs;
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const std::string& path, const std::string& body) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open " + path + " for writing");
  out << body;
  if (!out) throw std::runtime_error("write to " + path + " failed");
}

// Flags shared by every command that constructs graphs.
struct StrategyOpts {
  std::string name = "denoise";
  double alpha = 0.9;
  std::string stopwords_path;
  bool no_resample = false;

  CLI::Option* name_opt = nullptr;

  void add(CLI::App* app) {
    name_opt = app->add_option("--strategy", name, "interactive edge strategy")
                   ->check(CLI::IsMember({"root", "cooccur", "cooccurrence", "denoise", "full"}))
                   ->capture_default_str();
    app->add_option("--alpha", alpha, "denoise keep probability")
        ->check(CLI::Range(0.0, 1.0))
        ->capture_default_str();
    app->add_option("--stopwords", stopwords_path,
                    "stopword list for cooccur/denoise, one word per line");
    app->add_flag("--no-resample", no_resample,
                  "freeze denoise graphs instead of resampling each epoch");
  }

  bool given() const { return name_opt != nullptr && name_opt->count() > 0; }

  StrategyConfig build() const {
    StrategyConfig cfg;
    cfg.strategy = strategy_from_name(name);
    cfg.alpha = alpha;
    if (!stopwords_path.empty()) cfg.stopwords = load_stopwords(stopwords_path);
    cfg.resample_each_epoch = !no_resample;
    return cfg;
  }
};

// Flags shared by train and sweep-alpha that shape the model.
struct ModelOpts {
  std::string config;
  bool symmetric = false;
  std::vector<std::string> ablate;

  void add(CLI::App* app) {
    app->add_option("--config", config, "model config: JSON file, or inline if it starts with {");
    app->add_flag("--symmetric", symmetric,
                  "order-insensitive matching features (|s_p - s_q| instead of s_p - s_q)");
    app->add_option("--ablate", ablate, "disable a component (repeatable)")
        ->check(CLI::IsMember({"contextual", "gates", "fusion"}));
  }

  ModelConfig build(const LabelSet& labels) const {
    ModelConfig cfg;
    if (!config.empty()) {
      const std::string text = config.front() == '{' ? config : read_file(config);
      cfg = config_from_json(text);
    }
    cfg.num_classes = labels.size();
    if (symmetric) cfg.symmetric = true;
    for (const auto& a : ablate) {
      if (a == "contextual") cfg.ablate_contextual = true;
      if (a == "gates") cfg.ablate_gates = true;
      if (a == "fusion") cfg.ablate_fusion_attention = true;
    }
    cfg.validate();
    return cfg;
  }
};

struct OptimOpts {
  double lr = 5e-4;
  int batch = 64;
  int epochs = 300;
  std::uint64_t seed = 0;
  int eval_every = 1;
  double clip = 0;

  CLI::Option* seed_opt = nullptr;

  void add(CLI::App* app) {
    app->add_option("--lr", lr, "Adam learning rate")->capture_default_str();
    app->add_option("--batch", batch, "mini-batch size")->capture_default_str();
    app->add_option("--epochs", epochs, "total epochs to train to")->capture_default_str();
    seed_opt = app->add_option("--seed", seed, "run seed")->capture_default_str();
    app->add_option("--eval-every", eval_every, "validation cadence in epochs")
        ->capture_default_str();
    app->add_option("--clip", clip, "global gradient norm cap, 0 disables")
        ->capture_default_str();
  }

  TrainConfig build(const std::string& checkpoint, const std::string& metrics) const {
    TrainConfig cfg;
    cfg.learning_rate = lr;
    cfg.batch_size = batch;
    cfg.epochs = epochs;
    cfg.seed = seed;
    cfg.eval_every = eval_every;
    cfg.checkpoint_path = checkpoint;
    cfg.metrics_path = metrics;
    if (clip > 0) {
      cfg.clip_gradients = true;
      cfg.clip_norm = clip;
    }
    cfg.validate();
    return cfg;
  }
};

std::vector<double> parse_alphas(const std::string& csv) {
  std::vector<double> alphas;
  std::stringstream ss(csv);
  std::string item;
  while (std::getline(ss, item, ',')) {
    const auto begin = item.find_first_not_of(" \t");
    if (begin == std::string::npos) throw std::runtime_error("--alphas: empty entry");
    const auto end = item.find_last_not_of(" \t");
    item = item.substr(begin, end - begin + 1);
    std::size_t used = 0;
    double a = 0;
    try {
      a = std::stod(item, &used);
    } catch (const std::exception&) {
      throw std::runtime_error("--alphas: bad number '" + item + "'");
    }
    if (used != item.size()) throw std::runtime_error("--alphas: bad number '" + item + "'");
    if (a < 0 || a > 1) throw std::runtime_error("--alphas: " + item + " outside [0, 1]");
    alphas.push_back(a);
  }
  if (alphas.empty()) throw std::runtime_error("--alphas: no values");
  return alphas;
}

RelationVocab relations_over(const std::vector<LabeledPair>& train,
                             const std::vector<LabeledPair>& val) {
  if (val.empty()) return build_relation_vocab(train);
  std::vector<LabeledPair> all = train;
  all.insert(all.end(), val.begin(), val.end());
  return build_relation_vocab(all);
}

void print_run_summary(const RunMetrics& run, const std::string& checkpoint) {
  if (!run.epochs.empty()) {
    const EpochMetrics& last = run.epochs.back();
    std::printf("epoch %d  train_loss %.6f  train_acc %.4f\n", last.epoch, last.train_loss,
                last.train_acc);
  }
  if (run.best_epoch >= 0)
    std::printf("best val_acc %.4f at epoch %d\n", run.best_val_acc, run.best_epoch);
  if (!checkpoint.empty()) std::printf("checkpoint: %s\n", checkpoint.c_str());
}

// ---------------------------------------------------------------------------
// prep: validate a JSONL dataset, or assemble one from parsed sentence files.

int cmd_prep(const std::string& data, const std::string& premises, const std::string& hypotheses,
             const std::string& pair_labels, const std::string& labels_spec,
             const std::string& out) {
  const LabelSet labels = parse_label_set(labels_spec);

  if (premises.empty() && hypotheses.empty() && pair_labels.empty()) {
    if (data.empty()) throw std::runtime_error("prep: need --data, or --premises/--hypotheses/--pair-labels");
    LoadReport report = load_pairs(data, labels);
    for (const auto& w : report.warnings) std::cerr << "gmatch: warning: " << w << "\n";
    std::printf("%zu pairs ok, %zu warnings\n", report.pairs.size(), report.warnings.size());
    return 0;
  }

  if (premises.empty() || hypotheses.empty() || pair_labels.empty())
    throw std::runtime_error("prep: --premises, --hypotheses and --pair-labels go together");
  if (out.empty()) throw std::runtime_error("prep: --out is required when assembling");

  const std::vector<ParsedSentence> ps = parse_conllu(read_file(premises));
  const std::vector<ParsedSentence> hs = parse_conllu(read_file(hypotheses));

  std::vector<std::string> names;
  {
    std::ifstream in(pair_labels);
    if (!in) throw std::runtime_error("cannot open " + pair_labels);
    std::string line;
    while (std::getline(in, line)) {
      if (!line.empty() && line.back() == '\r') line.pop_back();
      if (!line.empty()) names.push_back(line);
    }
  }
  if (ps.size() != hs.size() || ps.size() != names.size()) {
    throw std::runtime_error("prep: count mismatch: " + std::to_string(ps.size()) +
                             " premises, " + std::to_string(hs.size()) + " hypotheses, " +
                             std::to_string(names.size()) + " labels");
  }

  std::ostringstream body;
  for (std::size_t i = 0; i < ps.size(); ++i) {
    if (labels.id(names[i]) < 0)
      throw std::runtime_error("prep: line " + std::to_string(i + 1) + ": unknown label '" +
                               names[i] + "'");
    nlohmann::json sent[2];
    const ParsedSentence* src[2] = {&ps[i], &hs[i]};
    for (int k = 0; k < 2; ++k) {
      sent[k]["tokens"] = src[k]->tokens;
      sent[k]["heads"] = src[k]->heads;
      sent[k]["deprels"] = src[k]->deprels;
    }
    char id[32];
    std::snprintf(id, sizeof id, "pair-%06zu", i + 1);
    nlohmann::json j{{"pair_id", id}, {"label", names[i]}, {"premise", sent[0]},
                     {"hypothesis", sent[1]}};
    body << j.dump() << "\n";
  }
  write_file(out, body.str());

  LoadReport check = load_pairs(out, labels);  // round trip must validate
  for (const auto& w : check.warnings) std::cerr << "gmatch: warning: " << w << "\n";
  std::printf("wrote %zu pairs to %s\n", check.pairs.size(), out.c_str());
  return 0;
}

// ---------------------------------------------------------------------------
// build-graph: print one pair's graph as JSON.

int cmd_build_graph(const std::string& data, const std::string& labels_spec,
                    const std::string& pair_id, const StrategyOpts& strat, std::uint64_t seed,
                    const std::string& out) {
  const LabelSet labels = parse_label_set(labels_spec);
  const auto pairs = load_dataset(data, labels);
  const LabeledPair* pair = nullptr;
  for (const auto& p : pairs)
    if (p.pair_id == pair_id) pair = &p;
  if (pair == nullptr) throw std::runtime_error("pair '" + pair_id + "' not found in " + data);

  const StrategyConfig cfg = strat.build();
  const RelationVocab rels = build_relation_vocab(pairs);
  const SentencePairGraph g =
      build_pair_graph(*pair, cfg, rels, train_graph_seed(seed, pair_id, 0, false));
  const std::string json = graph_to_json(g);
  if (out.empty())
    std::fputs(json.c_str(), stdout);
  else
    write_file(out, json);
  return 0;
}

// ---------------------------------------------------------------------------
// train

int cmd_train(const std::string& data, const std::string& val, const std::string& labels_spec,
              StrategyOpts& strat, ModelOpts& model, OptimOpts& optim, int min_count,
              const std::string& embeddings, const std::string& checkpoint,
              const std::string& metrics, const std::string& resume) {
  if (!resume.empty()) {
    Pipeline pipe = pipeline_from_checkpoint(load_checkpoint(resume));
    const auto train_pairs = load_dataset(data, pipe.labels);
    std::vector<LabeledPair> val_pairs;
    if (!val.empty()) val_pairs = load_dataset(val, pipe.labels);

    StrategyConfig strategy = strat.given() ? strat.build() : pipe.strategy;
    if (optim.seed_opt->count() > 0 && optim.seed != pipe.seed)
      std::cerr << "gmatch: warning: --seed ignored on resume, checkpoint seed "
                << pipe.seed << " wins\n";
    optim.seed = pipe.seed;
    TrainConfig cfg = optim.build(checkpoint.empty() ? resume : checkpoint, metrics);

    std::printf("resuming from %s at epoch %d\n", resume.c_str(), pipe.epoch);
    RunMetrics run = train(train_pairs, val_pairs, *pipe.params, pipe.adam, pipe.vocab,
                           pipe.relations, pipe.labels, strategy, cfg, pipe.epoch);
    print_run_summary(run, cfg.checkpoint_path);
    return 0;
  }

  const LabelSet labels = parse_label_set(labels_spec);
  const auto train_pairs = load_dataset(data, labels);
  std::vector<LabeledPair> val_pairs;
  if (!val.empty()) val_pairs = load_dataset(val, labels);

  const Vocab vocab = build_vocab(train_pairs, min_count);
  const RelationVocab rels = relations_over(train_pairs, val_pairs);
  const ModelConfig model_cfg = model.build(labels);
  const StrategyConfig strategy = strat.build();
  const TrainConfig cfg = optim.build(checkpoint, metrics);

  std::unique_ptr<EmbeddingMatrix> pretrained;
  if (!embeddings.empty()) {
    pretrained = std::make_unique<EmbeddingMatrix>(
        load_embeddings(embeddings, vocab, model_cfg.embed_dim, cfg.seed));
    std::printf("embeddings: %d/%d words covered by %s\n", pretrained->hits, vocab.size(),
                embeddings.c_str());
  }

  std::printf("%zu train pairs, %zu val pairs, vocab %d, relations %d, classes %d\n",
              train_pairs.size(), val_pairs.size(), vocab.size(), rels.size(), labels.size());

  ModelParams params(model_cfg, vocab.size(), rels.size(), cfg.seed, pretrained.get());
  AdamState adam;
  adam.init(params.store());

  RunMetrics run =
      train(train_pairs, val_pairs, params, adam, vocab, rels, labels, strategy, cfg);
  print_run_summary(run, cfg.checkpoint_path);
  return 0;
}

// ---------------------------------------------------------------------------
// eval

int cmd_eval(const std::string& checkpoint, const std::string& data, StrategyOpts& strat) {
  Pipeline pipe = pipeline_from_checkpoint(load_checkpoint(checkpoint));
  const auto pairs = load_dataset(data, pipe.labels);
  const StrategyConfig strategy = strat.given() ? strat.build() : pipe.strategy;
  const double acc = evaluate(pairs, *pipe.params, pipe.vocab, pipe.relations, strategy);
  std::printf("accuracy %.6f on %zu pairs (strategy %s)\n", acc, pairs.size(),
              strategy_name(strategy.strategy));
  return 0;
}

// ---------------------------------------------------------------------------
// sweep-alpha

int cmd_sweep(const std::string& data, const std::string& val, const std::string& labels_spec,
              const std::string& alphas_csv, StrategyOpts& strat, ModelOpts& model,
              OptimOpts& optim, int min_count, const std::string& out) {
  const LabelSet labels = parse_label_set(labels_spec);
  const auto train_pairs = load_dataset(data, labels);
  std::vector<LabeledPair> val_pairs;
  if (!val.empty()) val_pairs = load_dataset(val, labels);

  const Vocab vocab = build_vocab(train_pairs, min_count);
  const RelationVocab rels = relations_over(train_pairs, val_pairs);
  const ModelConfig model_cfg = model.build(labels);
  StrategyConfig strategy = strat.build();
  strategy.strategy = Strategy::kDenoise;
  const TrainConfig cfg = optim.build("", "");
  const std::vector<double> alphas = parse_alphas(alphas_csv);

  const auto results = alpha_sweep(train_pairs, val_pairs, model_cfg, strategy, cfg, alphas,
                                   vocab, rels, labels);

  std::ostringstream csv;
  csv << "alpha,accuracy\n";
  const AlphaResult* best = &results.front();
  for (const auto& r : results) {
    char row[64];
    std::snprintf(row, sizeof row, "%.9g,%.9g\n", r.alpha, r.accuracy);
    csv << row;
    if (r.accuracy > best->accuracy) best = &r;
  }
  if (out.empty())
    std::fputs(csv.str().c_str(), stdout);
  else
    write_file(out, csv.str());
  std::fprintf(stderr, "best alpha %.9g with accuracy %.9g\n", best->alpha, best->accuracy);
  return 0;
}

// ---------------------------------------------------------------------------
// gradcheck: finite differences against the full model, scaled down.

LabeledPair builtin_pair() {
  LabeledPair pair;
  pair.pair_id = "gradcheck-1";
  pair.label = 1;
  pair.premise.tokens = {"a", "small", "dog", "runs"};
  pair.premise.heads = {2, 2, 3, -1};
  pair.premise.deprels = {"det", "amod", "nsubj", "root"};
  pair.premise.root_index = 3;
  pair.hypothesis.tokens = {"the", "dog", "is", "not", "asleep"};
  pair.hypothesis.heads = {1, 4, 4, 4, -1};
  pair.hypothesis.deprels = {"det", "nsubj", "cop", "advmod", "root"};
  pair.hypothesis.root_index = 4;
  return pair;
}

int cmd_gradcheck(std::uint64_t seed, double epsilon, double threshold, int max_entries) {
  ModelConfig cfg;
  cfg.embed_dim = 8;
  cfg.lstm_layers = 2;
  cfg.lstm_hidden = 8;
  cfg.gat_layers = 2;
  cfg.heads = 2;
  cfg.head_dim = 4;
  cfg.relation_dim = 4;
  cfg.classifier_hidden = 8;
  cfg.num_classes = 3;
  cfg.validate();

  const LabeledPair pair = builtin_pair();
  const std::vector<LabeledPair> corpus{pair};
  const Vocab vocab = build_vocab(corpus, 1);
  const RelationVocab rels = build_relation_vocab(corpus);

  StrategyConfig strategy;
  strategy.strategy = Strategy::kFull;
  const SentencePairGraph graph =
      build_pair_graph(pair, strategy, rels, eval_graph_seed(pair.pair_id));

  ModelParams params(cfg, vocab.size(), rels.size(), seed);

  // Finite differences need a check point where every stage carries O(0.1)
  // signal. A training init collapses here: attention, tanh and half-dead
  // gates multiply into a ~100x shrink per layer, burying the true
  // gradients of the upper groups below the difference roundoff. Boosting
  // the multiplicative actors restores a per-layer gain near one.
  ad::randomize_params(params.store(), seed, 0.3);
  for (const auto& entry : params.store().entries()) {
    const std::string& name = entry.first;
    double k = 1;
    if (name.find(".wc") != std::string::npos) k = 8;
    else if (name.find(".wg") != std::string::npos || name.find(".rel") != std::string::npos)
      k = 5;
    else if (name.rfind("fuse.", 0) == 0) k = 5;
    if (k != 1) {
      ad::Value v = entry.second;
      for (std::size_t i = 0; i < v.size(); ++i) v.data()[i] *= k;
    }
  }

  auto loss = [&](ad::Tape& tape) {
    ad::Value logits = forward(tape, pair, graph, vocab, params);
    return ad::cross_entropy(tape, logits, pair.label);
  };

  const ad::GradCheckResult result = ad::grad_check(
      loss, params.store(), epsilon, mix_seed(seed, fnv1a("gradcheck-subsample")),
      static_cast<std::size_t>(max_entries));

  std::printf("checked %zu entries over %zu parameters (%zu kink-pinned skipped)\n",
              result.entries_checked, result.per_param.size(), result.entries_skipped);
  std::printf("worst rel err %.3e at %s[%zu]\n", result.worst_rel_err,
              result.worst_param.c_str(), result.worst_index);
  const bool ok = result.worst_rel_err < threshold;
  std::printf("%s (threshold %.1e)\n", ok ? "PASS" : "FAIL", threshold);
  return ok ? 0 : 1;
}

// ---------------------------------------------------------------------------
// inspect

int cmd_inspect(const std::string& checkpoint, const std::string& data,
                const std::string& pair_id, StrategyOpts& strat, double threshold,
                bool threshold_given, const std::string& out_prefix) {
  Pipeline pipe = pipeline_from_checkpoint(load_checkpoint(checkpoint));
  const auto pairs = load_dataset(data, pipe.labels);
  const LabeledPair* pair = nullptr;
  for (const auto& p : pairs)
    if (p.pair_id == pair_id) pair = &p;
  if (pair == nullptr) throw std::runtime_error("pair '" + pair_id + "' not found in " + data);

  const StrategyConfig strategy = strat.given() ? strat.build() : pipe.strategy;
  const SentencePairGraph graph =
      build_pair_graph(*pair, strategy, pipe.relations, eval_graph_seed(pair->pair_id));

  ad::Tape tape;
  ForwardTrace trace;
  forward(tape, *pair, graph, pipe.vocab, *pipe.params, &trace);
  const ImportanceReport report = importance_report(trace, graph);

  const double cut = threshold_given ? threshold : default_dot_threshold(report);
  const std::string prefix = out_prefix.empty() ? pair_id : out_prefix;
  write_file(prefix + ".dot", export_dot(graph, report, cut));
  write_file(prefix + ".json", report_to_json(report, graph, pair->pair_id,
                                              pipe.labels.name(report.predicted_label)));

  std::printf("pair %s: predicted %s (gold %s)\n", pair->pair_id.c_str(),
              pipe.labels.name(report.predicted_label).c_str(),
              pipe.labels.name(pair->label).c_str());
  std::printf("wrote %s.dot and %s.json (threshold %.6g)\n", prefix.c_str(), prefix.c_str(),
              cut);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"sentence pair matching over gated graph attention"};
  app.require_subcommand(1);

  // prep
  auto* prep = app.add_subcommand("prep", "validate a JSONL dataset or assemble one");
  std::string prep_data, prep_prem, prep_hyp, prep_lab, prep_labels = "snli3", prep_out;
  prep->add_option("--data", prep_data, "JSONL dataset to validate");
  prep->add_option("--premises", prep_prem, "premise sentences, CoNLL-U");
  prep->add_option("--hypotheses", prep_hyp, "hypothesis sentences, CoNLL-U");
  prep->add_option("--pair-labels", prep_lab, "gold labels, one per line");
  prep->add_option("--labels", prep_labels, "label set: snli3, binary, or a file")
      ->capture_default_str();
  prep->add_option("--out", prep_out, "JSONL output path when assembling");

  // build-graph
  auto* bg = app.add_subcommand("build-graph", "print one pair's graph as JSON");
  std::string bg_data, bg_labels = "snli3", bg_pair, bg_out;
  std::uint64_t bg_seed = 0;
  StrategyOpts bg_strat;
  bg->add_option("--data", bg_data, "JSONL dataset")->required();
  bg->add_option("--labels", bg_labels, "label set: snli3, binary, or a file")
      ->capture_default_str();
  bg->add_option("--pair-id", bg_pair, "pair to build")->required();
  bg_strat.add(bg);
  bg->add_option("--seed", bg_seed, "run seed mixed with the pair id")->capture_default_str();
  bg->add_option("--out", bg_out, "output path, stdout when omitted");

  // train
  auto* tr = app.add_subcommand("train", "train a matcher");
  std::string tr_data, tr_val, tr_labels = "snli3", tr_emb, tr_ckpt, tr_metrics, tr_resume;
  int tr_min_count = 1;
  StrategyOpts tr_strat;
  ModelOpts tr_model;
  OptimOpts tr_optim;
  tr->add_option("--data", tr_data, "training JSONL")->required();
  tr->add_option("--val", tr_val, "validation JSONL");
  tr->add_option("--labels", tr_labels, "label set: snli3, binary, or a file")
      ->capture_default_str();
  tr_strat.add(tr);
  tr_model.add(tr);
  tr_optim.add(tr);
  tr->add_option("--min-count", tr_min_count, "vocabulary frequency cutoff")
      ->capture_default_str();
  tr->add_option("--embeddings", tr_emb, "pretrained word vectors, text format");
  tr->add_option("--checkpoint", tr_ckpt, "checkpoint output path");
  tr->add_option("--out", tr_metrics, "metrics CSV path");
  tr->add_option("--resume", tr_resume, "checkpoint to continue from");

  // eval
  auto* ev = app.add_subcommand("eval", "evaluate a checkpoint on a dataset");
  std::string ev_ckpt, ev_data;
  StrategyOpts ev_strat;
  ev->add_option("--checkpoint", ev_ckpt, "trained checkpoint")->required();
  ev->add_option("--data", ev_data, "JSONL dataset")->required();
  ev_strat.add(ev);

  // sweep-alpha
  auto* sw = app.add_subcommand("sweep-alpha", "train once per denoise alpha and compare");
  std::string sw_data, sw_val, sw_labels = "snli3", sw_out;
  std::string sw_alphas = "0,0.1,0.2,0.3,0.4,0.5,0.6,0.7,0.8,0.9,1";
  int sw_min_count = 1;
  StrategyOpts sw_strat;
  ModelOpts sw_model;
  OptimOpts sw_optim;
  sw->add_option("--data", sw_data, "training JSONL")->required();
  sw->add_option("--val", sw_val, "validation JSONL used for the accuracy column");
  sw->add_option("--labels", sw_labels, "label set: snli3, binary, or a file")
      ->capture_default_str();
  sw->add_option("--alphas", sw_alphas, "comma-separated keep probabilities")
      ->capture_default_str();
  sw_strat.add(sw);
  sw_model.add(sw);
  sw_optim.add(sw);
  sw->add_option("--min-count", sw_min_count, "vocabulary frequency cutoff")
      ->capture_default_str();
  sw->add_option("--out", sw_out, "CSV output path, stdout when omitted");

  // gradcheck
  auto* gc = app.add_subcommand("gradcheck",
                                "finite-difference check of a scaled-down matcher");
  std::uint64_t gc_seed = 7;
  double gc_eps = 1e-5, gc_threshold = 1e-4;
  int gc_max = 10000;
  gc->add_option("--seed", gc_seed, "parameter init seed")->capture_default_str();
  gc->add_option("--epsilon", gc_eps, "central difference step")->capture_default_str();
  gc->add_option("--threshold", gc_threshold, "worst relative error allowed")
      ->capture_default_str();
  gc->add_option("--max-entries", gc_max, "subsample size over all parameters")
      ->capture_default_str();

  // inspect
  auto* in = app.add_subcommand("inspect", "export DOT and JSON importance for one pair");
  std::string in_ckpt, in_data, in_pair, in_out;
  double in_threshold = 0;
  StrategyOpts in_strat;
  in->add_option("--checkpoint", in_ckpt, "trained checkpoint")->required();
  in->add_option("--data", in_data, "JSONL dataset")->required();
  in->add_option("--pair-id", in_pair, "pair to inspect")->required();
  in_strat.add(in);
  auto* in_thr_opt =
      in->add_option("--threshold", in_threshold,
                     "interactive edge cutoff, default half the mean edge weight");
  in->add_option("--out", in_out, "output prefix for .dot/.json, default the pair id");

  CLI11_PARSE(app, argc, argv);

  try {
    if (prep->parsed())
      return cmd_prep(prep_data, prep_prem, prep_hyp, prep_lab, prep_labels, prep_out);
    if (bg->parsed())
      return cmd_build_graph(bg_data, bg_labels, bg_pair, bg_strat, bg_seed, bg_out);
    if (tr->parsed())
      return cmd_train(tr_data, tr_val, tr_labels, tr_strat, tr_model, tr_optim, tr_min_count,
                       tr_emb, tr_ckpt, tr_metrics, tr_resume);
    if (ev->parsed()) return cmd_eval(ev_ckpt, ev_data, ev_strat);
    if (sw->parsed())
      return cmd_sweep(sw_data, sw_val, sw_labels, sw_alphas, sw_strat, sw_model, sw_optim,
                       sw_min_count, sw_out);
    if (gc->parsed()) return cmd_gradcheck(gc_seed, gc_eps, gc_threshold, gc_max);
    if (in->parsed())
      return cmd_inspect(in_ckpt, in_data, in_pair, in_strat, in_threshold,
                         in_thr_opt->count() > 0, in_out);
  } catch (const std::exception& e) {
    std::cerr << "gmatch: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
