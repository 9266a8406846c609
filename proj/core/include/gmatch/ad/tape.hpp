#pragma once

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <deque>
#include <functional>
#include <stdexcept>
#include <string>
#include <vector>

namespace gmatch::ad {

#ifdef GMATCH_SINGLE_PRECISION
using real = float;
#else
using real = double;
#endif

// Row-major dense shapes. Rank 0 is a scalar, rank 1 a vector, rank 2 a
// matrix; nothing in the model needs more.
using Shape = std::vector<int>;

std::size_t numel(const Shape& s);
std::string shape_str(const Shape& s);

struct ShapeError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct Node;

// Lightweight handle to a tape node. Valid as long as the owning Tape (or
// ParamStore) is alive and has not been cleared.
class Value {
 public:
  Value() = default;
  explicit Value(Node* n) : n_(n) {}

  bool valid() const { return n_ != nullptr; }
  Node* node() const { return n_; }

  const Shape& shape() const;
  std::size_t size() const;
  int rows() const;  // rank-1 values count as a column vector
  int cols() const;

  std::vector<real>& data();
  const std::vector<real>& data() const;
  // Gradient buffer; allocates (zero-filled) on first access.
  std::vector<real>& grad();
  bool has_grad() const;
  bool requires_grad() const;

  real scalar() const;  // requires numel == 1

 private:
  Node* n_ = nullptr;
};

// One provenance record: forward data plus the closure that routes the
// incoming gradient to the inputs. Records live in creation order, which is
// a topological order of the DAG (inputs always precede their consumers).
struct Node {
  std::vector<real> data;
  std::vector<real> grad;  // empty until first touched
  Shape shape;
  bool requires_grad = false;
  const char* op = "leaf";
  std::vector<Node*> inputs;
  std::function<void(Node&)> backward;

  void ensure_grad() {
    if (grad.empty()) grad.assign(data.size(), real(0));
  }
};

// Arena for one forward/backward pass. Parameters live on their own
// long-lived tape (see ParamStore); computation tapes are created per
// forward pass and cleared or destroyed afterwards. A tape is single
// threaded; independent tapes may evaluate concurrently over shared
// read-only parameters.
class Tape {
 public:
  Tape() = default;
  Tape(const Tape&) = delete;
  Tape& operator=(const Tape&) = delete;
  Tape(Tape&&) = default;
  Tape& operator=(Tape&&) = default;

  Value alloc(Shape shape, const char* op);
  Value leaf(Shape shape, bool requires_grad);
  Value constant(std::vector<real> data, Shape shape);
  Value scalar(real v);

  // Reverse sweep from `loss` (which must be a scalar on this tape). Seeds
  // the root gradient with 1 and accumulates into every reachable
  // requires_grad node, including leaves on other tapes. Gradients are not
  // reset here; callers zero them explicitly.
  void backward(Value loss);

  void clear() { nodes_.clear(); }
  std::size_t size() const { return nodes_.size(); }

  // Discrete branch pattern of this pass: kinked ops (relu, leaky_relu,
  // abs) fold the sign of every input entry in here. Two evaluations with
  // equal signatures took the same side of every kink, so a finite
  // difference between them probes a smooth region of the function.
  std::uint64_t branch_signature() const { return branch_sig_; }
  void note_branch(bool positive) {
    branch_sig_ = branch_sig_ * 1099511628211ull + (positive ? 2 : 1);
  }

 private:
  std::deque<Node> nodes_;  // deque keeps node addresses stable
  std::uint64_t branch_sig_ = 1469598103934665603ull;
};

}  // namespace gmatch::ad
