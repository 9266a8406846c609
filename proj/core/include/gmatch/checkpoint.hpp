#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "gmatch/ad/tape.hpp"
#include "gmatch/graph.hpp"
#include "gmatch/model.hpp"

namespace gmatch {

struct NamedArray {
  std::string name;
  ad::Shape shape;
  std::vector<ad::real> data;
};

// Everything needed to rebuild a run: config, the three string tables,
// every parameter and optimizer array (manifest order), and the training
// cursor. Parameter arrays are named "param.<name>", Adam moments
// "adam.m.<name>" / "adam.v.<name>".
struct CheckpointData {
  ModelConfig config;
  StrategyConfig strategy;  // graph construction used in training
  std::vector<std::string> vocab_words;
  std::vector<std::string> relation_labels;
  std::vector<std::string> label_names;
  std::vector<NamedArray> arrays;
  int epoch = 0;  // completed epochs
  std::int64_t adam_t = 0;
  double best_val_acc = -1;
  std::uint64_t seed = 0;

  const NamedArray* find(const std::string& name) const;
};

// On-disk layout: magic "GMCHKPT1", u64 little-endian JSON header length,
// JSON header (format version, dtype, config, string tables, cursor, array
// manifest), then each array's raw little-endian row-major bytes in
// manifest order. Save/load round-trips bit-exactly.
void save_checkpoint(const std::string& path, const CheckpointData& data);
CheckpointData load_checkpoint(const std::string& path);

}  // namespace gmatch
