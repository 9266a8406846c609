#include "gmatch/embeddings.hpp"

#include <fstream>
#include <sstream>
#include <unordered_map>

#include "gmatch/conllu.hpp"
#include "gmatch/rng.hpp"

namespace gmatch {

namespace {

void fill_random_row(EmbeddingMatrix& m, int r, Rng& rng) {
  ad::real* row = m.row(r);
  for (int c = 0; c < m.cols; ++c) row[c] = rng.uniform(-0.05, 0.05);
}

bool is_integer(const std::string& s) {
  if (s.empty()) return false;
  for (char c : s) {
    if (c < '0' || c > '9') return false;
  }
  return true;
}

}  // namespace

EmbeddingMatrix random_embeddings(const Vocab& vocab, int dim, std::uint64_t seed) {
  EmbeddingMatrix m;
  m.rows = vocab.size();
  m.cols = dim;
  m.data.assign(static_cast<std::size_t>(m.rows) * dim, 0);
  Rng rng(mix_seed(seed, fnv1a("embeddings")));
  for (int r = 0; r < m.rows; ++r) {
    if (r == Vocab::kPad) continue;
    fill_random_row(m, r, rng);
  }
  return m;
}

EmbeddingMatrix load_embeddings(const std::string& path, const Vocab& vocab, int dim,
                                std::uint64_t seed) {
  std::ifstream is(path);
  if (!is) throw FormatError("cannot open embeddings file: " + path);

  std::unordered_map<std::string, std::vector<ad::real>> vectors;
  std::string line;
  int line_no = 0;
  while (std::getline(is, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;

    std::istringstream ls(line);
    std::string word;
    ls >> word;
    std::vector<ad::real> vec;
    std::string field;
    bool bad_number = false;
    while (ls >> field) {
      try {
        std::size_t pos = 0;
        vec.push_back(static_cast<ad::real>(std::stod(field, &pos)));
        if (pos != field.size()) bad_number = true;
      } catch (...) {
        bad_number = true;
      }
      if (bad_number) break;
    }
    if (line_no == 1 && vec.size() == 1 && !bad_number && is_integer(word) && dim != 1) {
      continue;  // "count dim" header
    }
    if (bad_number || static_cast<int>(vec.size()) != dim) {
      throw FormatError(path + ":" + std::to_string(line_no) + ": expected word + " +
                        std::to_string(dim) + " numbers");
    }
    vectors.emplace(lowercase_ascii(word), std::move(vec));
  }

  EmbeddingMatrix m;
  m.rows = vocab.size();
  m.cols = dim;
  m.data.assign(static_cast<std::size_t>(m.rows) * dim, 0);
  Rng rng(mix_seed(seed, fnv1a("embeddings")));
  for (int r = 0; r < m.rows; ++r) {
    if (r == Vocab::kPad) continue;
    const auto it = r == Vocab::kUnk ? vectors.end() : vectors.find(vocab.words()[r]);
    if (it == vectors.end()) {
      fill_random_row(m, r, rng);
    } else {
      std::copy(it->second.begin(), it->second.end(), m.row(r));
      ++m.hits;
    }
  }
  return m;
}

}  // namespace gmatch
