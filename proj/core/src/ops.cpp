#include "gmatch/ad/ops.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <utility>

namespace gmatch::ad {

namespace {

void require_rank2(const Value& v, const char* who) {
  if (v.shape().size() != 2) {
    throw ShapeError(std::string(who) + ": need a rank-2 value, got " + shape_str(v.shape()));
  }
}

bool any_grad(std::initializer_list<Value> vs) {
  for (const Value& v : vs) {
    if (v.requires_grad()) return true;
  }
  return false;
}

Value make_like(Tape& t, const Shape& shape, const char* op,
                std::initializer_list<Value> inputs) {
  Value out = t.alloc(shape, op);
  Node* n = out.node();
  for (const Value& v : inputs) n->inputs.push_back(v.node());
  n->requires_grad = any_grad(inputs);
  return out;
}

}  // namespace

Value matmul(Tape& t, Value a, Value b) {
  require_rank2(a, "matmul");
  require_rank2(b, "matmul");
  const int m = a.shape()[0], k = a.shape()[1];
  const int k2 = b.shape()[0], n = b.shape()[1];
  if (k != k2) {
    throw ShapeError("matmul: inner dimensions disagree, " + shape_str(a.shape()) +
                     " vs " + shape_str(b.shape()));
  }
  Value out = make_like(t, {m, n}, "matmul", {a, b});
  const real* pa = a.data().data();
  const real* pb = b.data().data();
  real* pc = out.data().data();
  for (int i = 0; i < m; ++i) {
    for (int p = 0; p < k; ++p) {
      const real av = pa[i * k + p];
      if (av == real(0)) continue;
      const real* brow = pb + p * n;
      real* crow = pc + i * n;
      for (int j = 0; j < n; ++j) crow[j] += av * brow[j];
    }
  }
  if (out.requires_grad()) {
    Node* an = a.node();
    Node* bn = b.node();
    out.node()->backward = [an, bn, m, k, n](Node& self) {
      const real* g = self.grad.data();
      if (an->requires_grad) {
        an->ensure_grad();
        // dA += G . B^T
        for (int i = 0; i < m; ++i) {
          for (int p = 0; p < k; ++p) {
            real acc = 0;
            const real* grow = g + i * n;
            const real* brow = bn->data.data() + p * n;
            for (int j = 0; j < n; ++j) acc += grow[j] * brow[j];
            an->grad[i * k + p] += acc;
          }
        }
      }
      if (bn->requires_grad) {
        bn->ensure_grad();
        // dB += A^T . G
        for (int i = 0; i < m; ++i) {
          const real* arow = an->data.data() + i * k;
          const real* grow = g + i * n;
          for (int p = 0; p < k; ++p) {
            const real av = arow[p];
            if (av == real(0)) continue;
            real* brow = bn->grad.data() + p * n;
            for (int j = 0; j < n; ++j) brow[j] += av * grow[j];
          }
        }
      }
    };
  }
  return out;
}

namespace {

enum class BinKind { kAdd, kSub, kMul };

Value binary_ew(Tape& t, Value a, Value b, BinKind kind, const char* name) {
  const bool a_scalar = a.size() == 1;
  const bool b_scalar = b.size() == 1;
  if (a.shape() != b.shape() && !a_scalar && !b_scalar) {
    throw ShapeError(std::string(name) + ": shapes " + shape_str(a.shape()) + " and " +
                     shape_str(b.shape()) + " do not match and neither is a scalar");
  }
  const Shape& out_shape = (a_scalar && !b_scalar) ? b.shape() : a.shape();
  Value out = make_like(t, out_shape, name, {a, b});
  const std::size_t n = out.size();
  const real* pa = a.data().data();
  const real* pb = b.data().data();
  real* po = out.data().data();
  for (std::size_t i = 0; i < n; ++i) {
    const real x = a_scalar ? pa[0] : pa[i];
    const real y = b_scalar ? pb[0] : pb[i];
    switch (kind) {
      case BinKind::kAdd: po[i] = x + y; break;
      case BinKind::kSub: po[i] = x - y; break;
      case BinKind::kMul: po[i] = x * y; break;
    }
  }
  if (out.requires_grad()) {
    Node* an = a.node();
    Node* bn = b.node();
    out.node()->backward = [an, bn, kind, a_scalar, b_scalar, n](Node& self) {
      const real* g = self.grad.data();
      if (an->requires_grad) {
        an->ensure_grad();
        for (std::size_t i = 0; i < n; ++i) {
          real gi = g[i];
          if (kind == BinKind::kMul) gi *= b_scalar ? bn->data[0] : bn->data[i];
          an->grad[a_scalar ? 0 : i] += gi;
        }
      }
      if (bn->requires_grad) {
        bn->ensure_grad();
        for (std::size_t i = 0; i < n; ++i) {
          real gi = g[i];
          switch (kind) {
            case BinKind::kAdd: break;
            case BinKind::kSub: gi = -gi; break;
            case BinKind::kMul: gi *= a_scalar ? an->data[0] : an->data[i]; break;
          }
          bn->grad[b_scalar ? 0 : i] += gi;
        }
      }
    };
  }
  return out;
}

template <typename Fwd, typename Bwd>
Value unary_ew(Tape& t, Value a, const char* name, Fwd fwd, Bwd dfn) {
  Value out = make_like(t, a.shape(), name, {a});
  const std::size_t n = out.size();
  for (std::size_t i = 0; i < n; ++i) out.data()[i] = fwd(a.data()[i]);
  if (out.requires_grad()) {
    Node* an = a.node();
    out.node()->backward = [an, n, dfn](Node& self) {
      an->ensure_grad();
      for (std::size_t i = 0; i < n; ++i) {
        an->grad[i] += self.grad[i] * dfn(an->data[i], self.data[i]);
      }
    };
  }
  return out;
}

}  // namespace

Value add(Tape& t, Value a, Value b) { return binary_ew(t, a, b, BinKind::kAdd, "add"); }
Value sub(Tape& t, Value a, Value b) { return binary_ew(t, a, b, BinKind::kSub, "sub"); }
Value mul(Tape& t, Value a, Value b) { return binary_ew(t, a, b, BinKind::kMul, "mul"); }

Value neg(Tape& t, Value a) {
  return unary_ew(
      t, a, "neg", [](real x) { return -x; },
      [](real, real) { return real(-1); });
}

Value abs(Tape& t, Value a) {
  for (real x : a.data()) t.note_branch(x > 0);
  return unary_ew(
      t, a, "abs", [](real x) { return std::fabs(x); },
      [](real x, real) { return x > 0 ? real(1) : (x < 0 ? real(-1) : real(0)); });
}

Value tanh(Tape& t, Value a) {
  return unary_ew(
      t, a, "tanh", [](real x) { return std::tanh(x); },
      [](real, real y) { return real(1) - y * y; });
}

Value sigmoid(Tape& t, Value a) {
  return unary_ew(
      t, a, "sigmoid",
      [](real x) { return real(1) / (real(1) + std::exp(-x)); },
      [](real, real y) { return y * (real(1) - y); });
}

Value relu(Tape& t, Value a) {
  for (real x : a.data()) t.note_branch(x > 0);
  return unary_ew(
      t, a, "relu", [](real x) { return x > 0 ? x : real(0); },
      [](real x, real) { return x > 0 ? real(1) : real(0); });
}

Value leaky_relu(Tape& t, Value a, real slope) {
  for (real x : a.data()) t.note_branch(x > 0);
  return unary_ew(
      t, a, "leaky_relu", [slope](real x) { return x > 0 ? x : slope * x; },
      [slope](real x, real) { return x > 0 ? real(1) : slope; });
}

Value add_rowvec(Tape& t, Value a, Value b) {
  require_rank2(a, "add_rowvec");
  const int r = a.shape()[0], c = a.shape()[1];
  if (static_cast<int>(b.size()) != c) {
    throw ShapeError("add_rowvec: row vector " + shape_str(b.shape()) +
                     " does not match columns of " + shape_str(a.shape()));
  }
  Value out = make_like(t, a.shape(), "add_rowvec", {a, b});
  for (int i = 0; i < r; ++i) {
    for (int j = 0; j < c; ++j) out.data()[i * c + j] = a.data()[i * c + j] + b.data()[j];
  }
  if (out.requires_grad()) {
    Node* an = a.node();
    Node* bn = b.node();
    out.node()->backward = [an, bn, r, c](Node& self) {
      if (an->requires_grad) {
        an->ensure_grad();
        for (std::size_t i = 0; i < self.grad.size(); ++i) an->grad[i] += self.grad[i];
      }
      if (bn->requires_grad) {
        bn->ensure_grad();
        for (int i = 0; i < r; ++i) {
          for (int j = 0; j < c; ++j) bn->grad[j] += self.grad[i * c + j];
        }
      }
    };
  }
  return out;
}

Value concat(Tape& t, const std::vector<Value>& vs, int axis) {
  if (vs.empty()) throw ShapeError("concat: no inputs");
  if (vs.size() == 1) {
    // Identity case; still record a node so the backward slice is uniform.
    const Value& a = vs[0];
    Value out = make_like(t, a.shape(), "concat", {a});
    out.data() = a.data();
    if (out.requires_grad()) {
      Node* an = a.node();
      out.node()->backward = [an](Node& self) {
        an->ensure_grad();
        for (std::size_t i = 0; i < self.grad.size(); ++i) an->grad[i] += self.grad[i];
      };
    }
    return out;
  }

  const std::size_t rank = vs[0].shape().size();
  if (axis < 0 || (rank <= 1 && axis != 0) || (rank == 2 && axis > 1)) {
    throw ShapeError("concat: bad axis for rank");
  }
  for (const Value& v : vs) {
    if (v.shape().size() != rank) throw ShapeError("concat: mixed ranks");
  }

  Shape out_shape = vs[0].shape();
  if (rank <= 1) {
    int total = 0;
    for (const Value& v : vs) total += static_cast<int>(v.size());
    out_shape = Shape{total};
  } else {
    const int other = axis == 0 ? 1 : 0;
    int total = 0;
    for (const Value& v : vs) {
      if (v.shape()[other] != vs[0].shape()[other]) {
        throw ShapeError("concat: shapes " + shape_str(vs[0].shape()) + " and " +
                         shape_str(v.shape()) + " disagree off the concat axis");
      }
      total += v.shape()[axis];
    }
    out_shape[axis] = total;
  }

  Value out = t.alloc(out_shape, "concat");
  Node* on = out.node();
  bool rg = false;
  for (const Value& v : vs) {
    on->inputs.push_back(v.node());
    rg = rg || v.requires_grad();
  }
  on->requires_grad = rg;

  const int out_cols = rank == 2 ? out_shape[1] : 1;
  if (rank <= 1 || axis == 0) {
    std::size_t off = 0;
    for (const Value& v : vs) {
      std::copy(v.data().begin(), v.data().end(), out.data().begin() + off);
      off += v.size();
    }
  } else {
    const int rows = out_shape[0];
    int coff = 0;
    for (const Value& v : vs) {
      const int c = v.shape()[1];
      for (int i = 0; i < rows; ++i) {
        std::copy(v.data().begin() + static_cast<std::size_t>(i) * c,
                  v.data().begin() + static_cast<std::size_t>(i + 1) * c,
                  out.data().begin() + static_cast<std::size_t>(i) * out_cols + coff);
      }
      coff += c;
    }
  }

  if (rg) {
    std::vector<Node*> ins = on->inputs;
    const bool along_rows = rank <= 1 || axis == 0;
    const int rows = rank == 2 ? out_shape[0] : 0;
    on->backward = [ins, along_rows, rows, out_cols](Node& self) {
      if (along_rows) {
        std::size_t off = 0;
        for (Node* in : ins) {
          if (in->requires_grad) {
            in->ensure_grad();
            for (std::size_t i = 0; i < in->data.size(); ++i) in->grad[i] += self.grad[off + i];
          }
          off += in->data.size();
        }
      } else {
        int coff = 0;
        for (Node* in : ins) {
          const int c = in->shape[1];
          if (in->requires_grad) {
            in->ensure_grad();
            for (int i = 0; i < rows; ++i) {
              for (int j = 0; j < c; ++j) {
                in->grad[static_cast<std::size_t>(i) * c + j] +=
                    self.grad[static_cast<std::size_t>(i) * out_cols + coff + j];
              }
            }
          }
          coff += c;
        }
      }
    };
  }
  return out;
}

Value slice_rows(Tape& t, Value a, int r0, int r1) {
  require_rank2(a, "slice_rows");
  const int r = a.shape()[0], c = a.shape()[1];
  if (r0 < 0 || r1 > r || r0 >= r1) {
    throw ShapeError("slice_rows: range [" + std::to_string(r0) + "," + std::to_string(r1) +
                     ") out of " + shape_str(a.shape()));
  }
  Value out = make_like(t, {r1 - r0, c}, "slice_rows", {a});
  std::copy(a.data().begin() + static_cast<std::size_t>(r0) * c,
            a.data().begin() + static_cast<std::size_t>(r1) * c, out.data().begin());
  if (out.requires_grad()) {
    Node* an = a.node();
    out.node()->backward = [an, r0, c](Node& self) {
      an->ensure_grad();
      const std::size_t base = static_cast<std::size_t>(r0) * c;
      for (std::size_t i = 0; i < self.grad.size(); ++i) an->grad[base + i] += self.grad[i];
    };
  }
  return out;
}

Value slice_cols(Tape& t, Value a, int c0, int c1) {
  require_rank2(a, "slice_cols");
  const int r = a.shape()[0], c = a.shape()[1];
  if (c0 < 0 || c1 > c || c0 >= c1) {
    throw ShapeError("slice_cols: range [" + std::to_string(c0) + "," + std::to_string(c1) +
                     ") out of " + shape_str(a.shape()));
  }
  const int w = c1 - c0;
  Value out = make_like(t, {r, w}, "slice_cols", {a});
  for (int i = 0; i < r; ++i) {
    std::copy(a.data().begin() + static_cast<std::size_t>(i) * c + c0,
              a.data().begin() + static_cast<std::size_t>(i) * c + c1,
              out.data().begin() + static_cast<std::size_t>(i) * w);
  }
  if (out.requires_grad()) {
    Node* an = a.node();
    out.node()->backward = [an, r, c, c0, w](Node& self) {
      an->ensure_grad();
      for (int i = 0; i < r; ++i) {
        for (int j = 0; j < w; ++j) {
          an->grad[static_cast<std::size_t>(i) * c + c0 + j] +=
              self.grad[static_cast<std::size_t>(i) * w + j];
        }
      }
    };
  }
  return out;
}

Value gather_rows(Tape& t, Value a, std::vector<int> ids) {
  require_rank2(a, "gather_rows");
  const int r = a.shape()[0], c = a.shape()[1];
  for (int id : ids) {
    if (id < 0 || id >= r) {
      throw ShapeError("gather_rows: id " + std::to_string(id) + " out of " +
                       shape_str(a.shape()));
    }
  }
  const int e = static_cast<int>(ids.size());
  Value out = make_like(t, {e, c}, "gather_rows", {a});
  for (int i = 0; i < e; ++i) {
    std::copy(a.data().begin() + static_cast<std::size_t>(ids[i]) * c,
              a.data().begin() + static_cast<std::size_t>(ids[i] + 1) * c,
              out.data().begin() + static_cast<std::size_t>(i) * c);
  }
  if (out.requires_grad()) {
    Node* an = a.node();
    out.node()->backward = [an, ids = std::move(ids), c](Node& self) {
      an->ensure_grad();
      for (std::size_t i = 0; i < ids.size(); ++i) {
        real* dst = an->grad.data() + static_cast<std::size_t>(ids[i]) * c;
        const real* src = self.grad.data() + i * c;
        for (int j = 0; j < c; ++j) dst[j] += src[j];
      }
    };
  }
  return out;
}

Value scale_rows(Tape& t, Value a, Value s) {
  require_rank2(a, "scale_rows");
  const int r = a.shape()[0], c = a.shape()[1];
  if (static_cast<int>(s.size()) != r) {
    throw ShapeError("scale_rows: scale " + shape_str(s.shape()) + " does not match rows of " +
                     shape_str(a.shape()));
  }
  Value out = make_like(t, a.shape(), "scale_rows", {a, s});
  for (int i = 0; i < r; ++i) {
    const real sv = s.data()[i];
    for (int j = 0; j < c; ++j) {
      out.data()[static_cast<std::size_t>(i) * c + j] =
          a.data()[static_cast<std::size_t>(i) * c + j] * sv;
    }
  }
  if (out.requires_grad()) {
    Node* an = a.node();
    Node* sn = s.node();
    out.node()->backward = [an, sn, r, c](Node& self) {
      if (an->requires_grad) {
        an->ensure_grad();
        for (int i = 0; i < r; ++i) {
          const real sv = sn->data[i];
          for (int j = 0; j < c; ++j) {
            an->grad[static_cast<std::size_t>(i) * c + j] +=
                self.grad[static_cast<std::size_t>(i) * c + j] * sv;
          }
        }
      }
      if (sn->requires_grad) {
        sn->ensure_grad();
        for (int i = 0; i < r; ++i) {
          real acc = 0;
          for (int j = 0; j < c; ++j) {
            acc += self.grad[static_cast<std::size_t>(i) * c + j] *
                   an->data[static_cast<std::size_t>(i) * c + j];
          }
          sn->grad[i] += acc;
        }
      }
    };
  }
  return out;
}

namespace {

void require_entries(const Value& v, const std::vector<int>& segments, const char* who) {
  const std::size_t entries = v.shape().size() == 2
                                  ? static_cast<std::size_t>(v.shape()[0])
                                  : v.size();
  if (segments.size() != entries) {
    throw ShapeError(std::string(who) + ": " + std::to_string(segments.size()) +
                     " segment ids for value " + shape_str(v.shape()));
  }
}

}  // namespace

Value segment_softmax(Tape& t, Value scores, std::vector<int> segments) {
  if (scores.size() == 0) throw ShapeError("segment_softmax: empty input");
  if (scores.shape().size() == 2 && scores.shape()[1] != 1) {
    throw ShapeError("segment_softmax: scores must be [E] or [E x 1], got " +
                     shape_str(scores.shape()));
  }
  require_entries(scores, segments, "segment_softmax");
  const int e = static_cast<int>(scores.size());
  int max_seg = 0;
  for (int s : segments) {
    if (s < 0) throw ShapeError("segment_softmax: negative segment id");
    max_seg = std::max(max_seg, s);
  }
  const int nseg = max_seg + 1;

  Value out = make_like(t, scores.shape(), "segment_softmax", {scores});
  std::vector<real> seg_max(nseg, -std::numeric_limits<real>::infinity());
  for (int i = 0; i < e; ++i) seg_max[segments[i]] = std::max(seg_max[segments[i]], scores.data()[i]);
  std::vector<real> seg_sum(nseg, real(0));
  for (int i = 0; i < e; ++i) {
    const real ex = std::exp(scores.data()[i] - seg_max[segments[i]]);
    out.data()[i] = ex;
    seg_sum[segments[i]] += ex;
  }
  for (int i = 0; i < e; ++i) out.data()[i] /= seg_sum[segments[i]];

  if (out.requires_grad()) {
    Node* sn = scores.node();
    out.node()->backward = [sn, segments = std::move(segments), nseg, e](Node& self) {
      sn->ensure_grad();
      std::vector<real> dot(nseg, real(0));
      for (int i = 0; i < e; ++i) dot[segments[i]] += self.grad[i] * self.data[i];
      for (int i = 0; i < e; ++i) {
        sn->grad[i] += self.data[i] * (self.grad[i] - dot[segments[i]]);
      }
    };
  }
  return out;
}

Value segment_sum(Tape& t, Value messages, std::vector<int> segments, int num_segments) {
  require_rank2(messages, "segment_sum");
  require_entries(messages, segments, "segment_sum");
  const int e = messages.shape()[0], d = messages.shape()[1];
  for (int s : segments) {
    if (s < 0 || s >= num_segments) {
      throw ShapeError("segment_sum: segment id " + std::to_string(s) + " out of " +
                       std::to_string(num_segments));
    }
  }
  Value out = make_like(t, {num_segments, d}, "segment_sum", {messages});
  for (int i = 0; i < e; ++i) {
    real* dst = out.data().data() + static_cast<std::size_t>(segments[i]) * d;
    const real* src = messages.data().data() + static_cast<std::size_t>(i) * d;
    for (int j = 0; j < d; ++j) dst[j] += src[j];
  }
  if (out.requires_grad()) {
    Node* mn = messages.node();
    out.node()->backward = [mn, segments = std::move(segments), d](Node& self) {
      mn->ensure_grad();
      for (std::size_t i = 0; i < segments.size(); ++i) {
        const real* src = self.grad.data() + static_cast<std::size_t>(segments[i]) * d;
        real* dst = mn->grad.data() + i * d;
        for (int j = 0; j < d; ++j) dst[j] += src[j];
      }
    };
  }
  return out;
}

Value sum(Tape& t, Value a) {
  Value out = make_like(t, Shape{}, "sum", {a});
  real acc = 0;
  for (real x : a.data()) acc += x;
  out.data()[0] = acc;
  if (out.requires_grad()) {
    Node* an = a.node();
    out.node()->backward = [an](Node& self) {
      an->ensure_grad();
      for (real& g : an->grad) g += self.grad[0];
    };
  }
  return out;
}

Value cross_entropy(Tape& t, Value logits, int label) {
  if (logits.shape().size() == 2 && logits.shape()[0] != 1) {
    throw ShapeError("cross_entropy: logits must be [C] or [1 x C], got " +
                     shape_str(logits.shape()));
  }
  const int c = static_cast<int>(logits.size());
  if (label < 0 || label >= c) {
    throw ShapeError("cross_entropy: label " + std::to_string(label) + " out of " +
                     std::to_string(c) + " classes");
  }
  real mx = -std::numeric_limits<real>::infinity();
  for (real z : logits.data()) {
    if (!std::isfinite(z)) throw std::runtime_error("cross_entropy: non-finite logit");
    mx = std::max(mx, z);
  }
  real lse = 0;
  for (real z : logits.data()) lse += std::exp(z - mx);
  lse = mx + std::log(lse);

  Value out = make_like(t, Shape{}, "cross_entropy", {logits});
  out.data()[0] = lse - logits.data()[label];
  if (out.requires_grad()) {
    std::vector<real> probs(c);
    for (int i = 0; i < c; ++i) probs[i] = std::exp(logits.data()[i] - lse);
    Node* ln = logits.node();
    out.node()->backward = [ln, probs = std::move(probs), label](Node& self) {
      ln->ensure_grad();
      const real g = self.grad[0];
      for (std::size_t i = 0; i < probs.size(); ++i) {
        ln->grad[i] += g * (probs[i] - (static_cast<int>(i) == label ? real(1) : real(0)));
      }
    };
  }
  return out;
}

}  // namespace gmatch::ad
