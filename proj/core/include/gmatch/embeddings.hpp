#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "gmatch/ad/tape.hpp"
#include "gmatch/vocab.hpp"

namespace gmatch {

struct EmbeddingMatrix {
  int rows = 0;
  int cols = 0;
  std::vector<ad::real> data;  // row-major [rows x cols]
  int hits = 0;                // vocab entries found in the file

  ad::real* row(int r) { return data.data() + static_cast<std::size_t>(r) * cols; }
  const ad::real* row(int r) const {
    return data.data() + static_cast<std::size_t>(r) * cols;
  }
};

// Every row drawn from uniform(-0.05, 0.05) except the zero PAD row.
EmbeddingMatrix random_embeddings(const Vocab& vocab, int dim, std::uint64_t seed);

// Text format: "word v1 ... v_dim" per line; an optional leading
// "count dim" header line is skipped. Matching lowercases the file word and
// keeps the first occurrence. Rows for vocab words present in the file are
// copied; the rest (UNK included) are drawn as in random_embeddings and the
// PAD row stays zero. The fill order is vocab order, so the random rows do
// not depend on how the file is sorted.
EmbeddingMatrix load_embeddings(const std::string& path, const Vocab& vocab, int dim,
                                std::uint64_t seed);

}  // namespace gmatch
