#include "gmatch/dataset.hpp"

#include <cctype>
#include <fstream>
#include <stdexcept>

#include "json.hpp"

namespace gmatch {

LabelSet LabelSet::snli3() {
  return from_names({"entailment", "neutral", "contradiction"});
}

LabelSet LabelSet::binary() { return from_names({"0", "1"}); }

LabelSet LabelSet::from_file(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw FormatError("cannot open label file: " + path);
  std::vector<std::string> names;
  std::string line;
  while (std::getline(is, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (!line.empty()) names.push_back(line);
  }
  if (names.empty()) throw FormatError("label file is empty: " + path);
  return from_names(std::move(names));
}

LabelSet LabelSet::from_names(std::vector<std::string> names) {
  for (std::size_t i = 0; i < names.size(); ++i) {
    for (std::size_t j = i + 1; j < names.size(); ++j) {
      if (names[i] == names[j]) throw FormatError("duplicate label: " + names[i]);
    }
  }
  LabelSet s;
  s.names_ = std::move(names);
  return s;
}

int LabelSet::id(const std::string& name) const {
  for (std::size_t i = 0; i < names_.size(); ++i) {
    if (names_[i] == name) return static_cast<int>(i);
  }
  return -1;
}

const std::string& LabelSet::name(int id) const {
  if (id < 0 || id >= size()) throw std::out_of_range("label id out of range");
  return names_[static_cast<std::size_t>(id)];
}

bool is_punctuation(const std::string& token) {
  if (token.empty()) return false;
  for (unsigned char c : token) {
    if (!std::ispunct(c)) return false;
  }
  return true;
}

namespace {

using nlohmann::json;

ParsedSentence sentence_from_json(const json& j, const std::string& where) {
  if (!j.is_object()) throw FormatError(where + ": sentence must be an object");
  for (const char* key : {"tokens", "heads", "deprels"}) {
    if (!j.contains(key) || !j[key].is_array()) {
      throw FormatError(where + ": missing array field '" + key + "'");
    }
  }
  ParsedSentence s;
  for (const auto& t : j["tokens"]) {
    if (!t.is_string()) throw FormatError(where + ": tokens must be strings");
    s.tokens.push_back(t.get<std::string>());
  }
  for (const auto& h : j["heads"]) {
    if (!h.is_number_integer()) throw FormatError(where + ": heads must be integers");
    s.heads.push_back(h.get<int>());
  }
  for (const auto& d : j["deprels"]) {
    if (!d.is_string()) throw FormatError(where + ": deprels must be strings");
    s.deprels.push_back(d.get<std::string>());
  }
  if (s.tokens.size() != s.heads.size() || s.tokens.size() != s.deprels.size()) {
    throw FormatError(where + ": tokens/heads/deprels lengths disagree");
  }
  if (s.tokens.empty()) throw FormatError(where + ": empty sentence");
  return s;
}

}  // namespace

LoadReport load_pairs(const std::string& path, const LabelSet& labels) {
  std::ifstream is(path);
  if (!is) throw FormatError("cannot open dataset: " + path);

  LoadReport report;
  std::string line;
  int line_no = 0;
  while (std::getline(is, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const std::string where = path + ":" + std::to_string(line_no);

    json j;
    try {
      j = json::parse(line);
    } catch (const json::parse_error& e) {
      throw FormatError(where + ": invalid JSON: " + e.what());
    }
    if (!j.is_object()) throw FormatError(where + ": expected a JSON object");
    for (const char* key : {"pair_id", "label", "premise", "hypothesis"}) {
      if (!j.contains(key)) throw FormatError(where + ": missing field '" + key + "'");
    }
    if (!j["pair_id"].is_string() || !j["label"].is_string()) {
      throw FormatError(where + ": pair_id and label must be strings");
    }

    LabeledPair pair;
    pair.pair_id = j["pair_id"].get<std::string>();
    const std::string label_name = j["label"].get<std::string>();
    pair.label = labels.id(label_name);
    if (pair.label < 0) {
      throw FormatError(where + ": unknown label '" + label_name + "'");
    }
    pair.premise = sentence_from_json(j["premise"], where + " premise");
    pair.hypothesis = sentence_from_json(j["hypothesis"], where + " hypothesis");

    const int idx = static_cast<int>(report.pairs.size());
    try {
      pair.premise.root_index = validate_tree(pair.premise.heads, idx);
      pair.hypothesis.root_index = validate_tree(pair.hypothesis.heads, idx);
    } catch (const StructuralError& e) {
      throw StructuralError(where + " (pair " + pair.pair_id + "): " + e.what());
    }

    for (const auto* side : {&pair.premise, &pair.hypothesis}) {
      bool all_punct = true;
      for (const auto& tok : side->tokens) {
        if (!is_punctuation(tok)) {
          all_punct = false;
          break;
        }
      }
      if (all_punct) {
        report.warnings.push_back(where + " (pair " + pair.pair_id +
                                  "): sentence is punctuation only");
      }
    }
    report.pairs.push_back(std::move(pair));
  }
  return report;
}

}  // namespace gmatch
