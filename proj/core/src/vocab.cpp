#include "gmatch/vocab.hpp"

#include <algorithm>
#include <cctype>
#include <map>
#include <set>
#include <stdexcept>

namespace gmatch {

std::string lowercase_ascii(std::string s) {
  for (char& c : s) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return s;
}

Vocab Vocab::from_words(std::vector<std::string> words) {
  if (words.size() < 2 || words[kPad] != "<pad>" || words[kUnk] != "<unk>") {
    throw std::invalid_argument("word table must start with <pad>, <unk>");
  }
  Vocab v;
  v.words_ = std::move(words);
  for (std::size_t i = 0; i < v.words_.size(); ++i) {
    if (!v.index_.emplace(v.words_[i], static_cast<int>(i)).second) {
      throw std::invalid_argument("duplicate word in table: " + v.words_[i]);
    }
  }
  return v;
}

int Vocab::id(const std::string& token) const {
  const auto it = index_.find(lowercase_ascii(token));
  return it == index_.end() ? kUnk : it->second;
}

Vocab build_vocab(const std::vector<LabeledPair>& pairs, int min_count) {
  if (min_count < 1) throw std::invalid_argument("min_count must be >= 1");
  std::map<std::string, int> freq;
  for (const auto& pair : pairs) {
    for (const auto* side : {&pair.premise, &pair.hypothesis}) {
      for (const auto& tok : side->tokens) ++freq[lowercase_ascii(tok)];
    }
  }
  std::vector<std::string> words = {"<pad>", "<unk>"};
  for (const auto& [word, count] : freq) {
    if (count >= min_count) words.push_back(word);
  }
  return Vocab::from_words(std::move(words));
}

RelationVocab RelationVocab::from_labels(std::vector<std::string> labels) {
  if (labels.size() < 3 || labels[kSeq] != "<seq>" || labels[kInter] != "<inter>" ||
      labels[kSelf] != "<self>") {
    throw std::invalid_argument("relation table must start with <seq>, <inter>, <self>");
  }
  if ((labels.size() - 3) % 2 != 0) {
    throw std::invalid_argument("dependency relations must come in forward/reverse pairs");
  }
  for (std::size_t i = 3; i < labels.size(); i += 2) {
    if (labels[i + 1] != labels[i] + ":rev") {
      throw std::invalid_argument("relation '" + labels[i] + "' not followed by its reverse");
    }
  }
  RelationVocab v;
  v.labels_ = std::move(labels);
  for (std::size_t i = 0; i < v.labels_.size(); ++i) {
    if (!v.index_.emplace(v.labels_[i], static_cast<int>(i)).second) {
      throw std::invalid_argument("duplicate relation label: " + v.labels_[i]);
    }
  }
  return v;
}

int RelationVocab::id(const std::string& label) const {
  const auto it = index_.find(label);
  return it == index_.end() ? -1 : it->second;
}

int RelationVocab::inverse(int rel_id) const {
  if (rel_id < 0 || rel_id >= size()) throw std::out_of_range("relation id out of range");
  if (rel_id < 3) return rel_id;
  return 3 + ((rel_id - 3) ^ 1);
}

RelationVocab build_relation_vocab(const std::vector<LabeledPair>& pairs) {
  std::set<std::string> deprels;
  for (const auto& pair : pairs) {
    for (const auto* side : {&pair.premise, &pair.hypothesis}) {
      deprels.insert(side->deprels.begin(), side->deprels.end());
    }
  }
  std::vector<std::string> labels = {"<seq>", "<inter>", "<self>"};
  for (const auto& rel : deprels) {
    labels.push_back(rel);
    labels.push_back(rel + ":rev");
  }
  return RelationVocab::from_labels(std::move(labels));
}

}  // namespace gmatch
