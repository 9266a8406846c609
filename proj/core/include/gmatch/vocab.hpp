#pragma once

#include <string>
#include <unordered_map>
#include <vector>

#include "gmatch/dataset.hpp"

namespace gmatch {

std::string lowercase_ascii(std::string s);

// Word table with PAD at 0 and UNK at 1. Lookup lowercases the token and
// falls back to UNK. Kept words are stored lexicographically so the table
// depends only on the corpus multiset, not on pair order.
class Vocab {
 public:
  static constexpr int kPad = 0;
  static constexpr int kUnk = 1;

  // `words` is the full table including the two specials at the front,
  // as produced by words() (checkpoint reload path).
  static Vocab from_words(std::vector<std::string> words);

  int id(const std::string& token) const;
  const std::vector<std::string>& words() const { return words_; }
  int size() const { return static_cast<int>(words_.size()); }

 private:
  std::vector<std::string> words_;
  std::unordered_map<std::string, int> index_;
};

Vocab build_vocab(const std::vector<LabeledPair>& pairs, int min_count = 10);

// Edge-relation table. Ids 0..2 are the structural specials; dependency
// labels follow in sorted order, each immediately followed by its
// reverse-direction partner "<label>:rev".
class RelationVocab {
 public:
  static constexpr int kSeq = 0;
  static constexpr int kInter = 1;
  static constexpr int kSelf = 2;

  static RelationVocab from_labels(std::vector<std::string> labels);

  // -1 when the label is unknown.
  int id(const std::string& label) const;
  // SEQ/INTER/SELF map to themselves; a dependency id maps to its partner.
  int inverse(int rel_id) const;
  const std::vector<std::string>& labels() const { return labels_; }
  int size() const { return static_cast<int>(labels_.size()); }

 private:
  std::vector<std::string> labels_;
  std::unordered_map<std::string, int> index_;
};

RelationVocab build_relation_vocab(const std::vector<LabeledPair>& pairs);

}  // namespace gmatch
