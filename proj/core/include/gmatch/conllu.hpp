#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace gmatch {

// Thrown for malformed input lines/records; carries the offending location.
struct FormatError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Thrown when token heads do not form a rooted tree.
struct StructuralError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// One dependency-parsed sentence. Heads are 0-based token indices with
// kRootHead marking the single root token. Invariants: exactly one root,
// heads form a tree (acyclic, all tokens reachable from the root).
struct ParsedSentence {
  static constexpr int kRootHead = -1;

  std::vector<std::string> tokens;
  std::vector<int> heads;
  std::vector<std::string> deprels;
  int root_index = -1;

  int length() const { return static_cast<int>(tokens.size()); }
};

// Validates the tree invariants; throws StructuralError mentioning
// `sentence_index` on violation and returns the root index otherwise.
int validate_tree(const std::vector<int>& heads, int sentence_index);
void validate_sentence(const ParsedSentence& s, int sentence_index);

// Reads CoNLL-U style blocks: tab- (or space-) separated columns
// ID FORM _ _ _ _ HEAD DEPREL, one token per line, '#' comments, blank line
// between sentences. A 4-column ID FORM HEAD DEPREL shorthand is also
// accepted. Heads are 1-based in the file with 0 meaning root.
std::vector<ParsedSentence> parse_conllu(const std::string& text);

// Serializes back to the 8-column subset; parse_conllu(to_conllu(s)) is
// identity.
std::string to_conllu(const ParsedSentence& s);

}  // namespace gmatch
