#pragma once

#include <vector>

#include "gmatch/ad/tape.hpp"

namespace gmatch::ad {

// Dense primitives. Every op records an exact analytic backward on the
// tape; binary elementwise ops accept identical shapes or a scalar
// (1-element) operand on either side. Shape violations throw ShapeError
// naming both shapes.

Value matmul(Tape& t, Value a, Value b);  // [m x k] . [k x n] -> [m x n]

Value add(Tape& t, Value a, Value b);
Value sub(Tape& t, Value a, Value b);
Value mul(Tape& t, Value a, Value b);  // Hadamard
Value neg(Tape& t, Value a);
Value abs(Tape& t, Value a);
Value tanh(Tape& t, Value a);
Value sigmoid(Tape& t, Value a);
Value relu(Tape& t, Value a);
Value leaky_relu(Tape& t, Value a, real slope);

// Adds a row vector b [1 x C] (or [C]) to every row of a [R x C].
Value add_rowvec(Tape& t, Value a, Value b);

// Concatenation along axis 0 (rows / vector entries) or axis 1 (columns).
// All shapes must agree on the non-concat axis.
Value concat(Tape& t, const std::vector<Value>& vs, int axis);

Value slice_rows(Tape& t, Value a, int r0, int r1);
Value slice_cols(Tape& t, Value a, int c0, int c1);

// out[r] = a[ids[r]]; backward scatter-adds into a. Rows of `a` may repeat
// in `ids` (embedding lookup, per-edge gathers).
Value gather_rows(Tape& t, Value a, std::vector<int> ids);

// out[r, c] = a[r, c] * s[r] with s of shape [R] or [R x 1].
Value scale_rows(Tape& t, Value a, Value s);

// Softmax over groups of entries sharing a segment id. scores has shape
// [E] or [E x 1]; within each segment outputs are positive and sum to 1.
// Stabilized by per-segment max subtraction. Empty input is an error.
Value segment_softmax(Tape& t, Value scores, std::vector<int> segments);

// Per-segment sum of rows: messages [E x d] -> [num_segments x d].
// Segments with no entries yield zero rows.
Value segment_sum(Tape& t, Value messages, std::vector<int> segments,
                  int num_segments);

Value sum(Tape& t, Value a);  // scalar total

// -log softmax(logits)[label], stabilized via log-sum-exp. logits is [C]
// or [1 x C]; gradient w.r.t. logits is softmax - onehot.
Value cross_entropy(Tape& t, Value logits, int label);

}  // namespace gmatch::ad
