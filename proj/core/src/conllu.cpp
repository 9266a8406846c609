#include "gmatch/conllu.hpp"

#include <sstream>

namespace gmatch {

int validate_tree(const std::vector<int>& heads, int sentence_index) {
  const int n = static_cast<int>(heads.size());
  const std::string where = "sentence " + std::to_string(sentence_index);
  if (n == 0) throw StructuralError(where + ": empty sentence");

  int root = -1;
  for (int i = 0; i < n; ++i) {
    if (heads[i] == ParsedSentence::kRootHead) {
      if (root != -1) throw StructuralError(where + ": multiple roots");
      root = i;
    } else if (heads[i] < 0 || heads[i] >= n) {
      throw StructuralError(where + ": head index " + std::to_string(heads[i]) +
                            " out of range");
    } else if (heads[i] == i) {
      throw StructuralError(where + ": token is its own head");
    }
  }
  if (root == -1) throw StructuralError(where + ": no root token");

  // Every token must reach the root without revisiting a node.
  for (int i = 0; i < n; ++i) {
    int cur = i;
    int steps = 0;
    while (heads[cur] != ParsedSentence::kRootHead) {
      cur = heads[cur];
      if (++steps > n) throw StructuralError(where + ": cycle in head structure");
    }
  }
  return root;
}

void validate_sentence(const ParsedSentence& s, int sentence_index) {
  const std::string where = "sentence " + std::to_string(sentence_index);
  if (s.tokens.size() != s.heads.size() || s.tokens.size() != s.deprels.size()) {
    throw StructuralError(where + ": tokens/heads/deprels lengths disagree");
  }
  const int root = validate_tree(s.heads, sentence_index);
  if (s.root_index != root) {
    throw StructuralError(where + ": root_index " + std::to_string(s.root_index) +
                          " does not point at the root token");
  }
}

namespace {

std::vector<std::string> split_columns(const std::string& line) {
  std::vector<std::string> cols;
  if (line.find('\t') != std::string::npos) {
    std::size_t start = 0;
    while (true) {
      const std::size_t tab = line.find('\t', start);
      cols.push_back(line.substr(start, tab == std::string::npos ? tab : tab - start));
      if (tab == std::string::npos) break;
      start = tab + 1;
    }
  } else {
    std::istringstream is(line);
    std::string tok;
    while (is >> tok) cols.push_back(tok);
  }
  return cols;
}

bool parse_int(const std::string& s, int& out) {
  if (s.empty()) return false;
  std::size_t pos = 0;
  try {
    out = std::stoi(s, &pos);
  } catch (...) {
    return false;
  }
  return pos == s.size();
}

}  // namespace

std::vector<ParsedSentence> parse_conllu(const std::string& text) {
  std::vector<ParsedSentence> sentences;
  ParsedSentence cur;
  std::vector<int> raw_heads;  // 1-based, 0 = root

  int line_no = 0;
  std::istringstream is(text);
  std::string line;

  auto flush = [&]() {
    if (cur.tokens.empty()) return;
    cur.heads.resize(raw_heads.size());
    for (std::size_t i = 0; i < raw_heads.size(); ++i) {
      cur.heads[i] = raw_heads[i] == 0 ? ParsedSentence::kRootHead : raw_heads[i] - 1;
    }
    const int idx = static_cast<int>(sentences.size());
    cur.root_index = validate_tree(cur.heads, idx);
    sentences.push_back(std::move(cur));
    cur = ParsedSentence{};
    raw_heads.clear();
  };

  while (std::getline(is, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) {
      flush();
      continue;
    }
    if (line[0] == '#') continue;

    const std::vector<std::string> cols = split_columns(line);
    const std::string where = "line " + std::to_string(line_no);
    std::string form, deprel;
    std::string id_col, head_col;
    if (cols.size() >= 8) {
      id_col = cols[0];
      form = cols[1];
      head_col = cols[6];
      deprel = cols[7];
    } else if (cols.size() == 4) {
      id_col = cols[0];
      form = cols[1];
      head_col = cols[2];
      deprel = cols[3];
    } else {
      throw FormatError(where + ": expected 4 or >=8 columns, got " +
                        std::to_string(cols.size()));
    }

    int id = 0, head = 0;
    if (!parse_int(id_col, id)) throw FormatError(where + ": bad token id '" + id_col + "'");
    if (!parse_int(head_col, head) || head < 0) {
      throw FormatError(where + ": bad head '" + head_col + "'");
    }
    if (id != static_cast<int>(cur.tokens.size()) + 1) {
      throw FormatError(where + ": token ids must count 1..n, got " + std::to_string(id));
    }
    cur.tokens.push_back(form);
    raw_heads.push_back(head);
    cur.deprels.push_back(deprel);
  }
  flush();
  return sentences;
}

std::string to_conllu(const ParsedSentence& s) {
  std::ostringstream os;
  for (int i = 0; i < s.length(); ++i) {
    const int head = s.heads[i] == ParsedSentence::kRootHead ? 0 : s.heads[i] + 1;
    os << (i + 1) << '\t' << s.tokens[i] << "\t_\t_\t_\t_\t" << head << '\t' << s.deprels[i]
       << '\n';
  }
  os << '\n';
  return os.str();
}

}  // namespace gmatch
