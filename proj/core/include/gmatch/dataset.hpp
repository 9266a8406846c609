#pragma once

#include <string>
#include <vector>

#include "gmatch/conllu.hpp"

namespace gmatch {

// Closed label inventory for a task. Label ids are positions in names().
class LabelSet {
 public:
  static LabelSet snli3();   // entailment, neutral, contradiction
  static LabelSet binary();  // 0, 1
  // One label name per line, blank lines skipped, order preserved.
  static LabelSet from_file(const std::string& path);
  static LabelSet from_names(std::vector<std::string> names);

  int id(const std::string& name) const;  // -1 if unknown
  const std::string& name(int id) const;
  const std::vector<std::string>& names() const { return names_; }
  int size() const { return static_cast<int>(names_.size()); }

 private:
  std::vector<std::string> names_;
};

struct LabeledPair {
  std::string pair_id;
  int label = -1;
  ParsedSentence premise;
  ParsedSentence hypothesis;
};

struct LoadReport {
  std::vector<LabeledPair> pairs;
  std::vector<std::string> warnings;
};

// Reads one JSON object per line:
//   {"pair_id": "...", "label": "...",
//    "premise":    {"tokens": [...], "heads": [...], "deprels": [...]},
//    "hypothesis": {"tokens": [...], "heads": [...], "deprels": [...]}}
// Heads are 0-based token indices with -1 marking the root. Both sentences
// must form a single-rooted tree and the label must be in `labels`;
// violations raise FormatError/StructuralError naming the line. Sentences
// made entirely of punctuation tokens are kept but reported as warnings.
LoadReport load_pairs(const std::string& path, const LabelSet& labels);

// True when every character is ASCII punctuation.
bool is_punctuation(const std::string& token);

}  // namespace gmatch
