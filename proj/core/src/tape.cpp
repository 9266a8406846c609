#include "gmatch/ad/tape.hpp"

#include <numeric>
#include <sstream>

namespace gmatch::ad {

std::size_t numel(const Shape& s) {
  std::size_t n = 1;
  for (int d : s) n *= static_cast<std::size_t>(d);
  return n;
}

std::string shape_str(const Shape& s) {
  std::ostringstream os;
  os << '[';
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (i) os << 'x';
    os << s[i];
  }
  os << ']';
  return os.str();
}

const Shape& Value::shape() const { return n_->shape; }
std::size_t Value::size() const { return n_->data.size(); }

int Value::rows() const {
  if (n_->shape.empty()) return 1;
  return n_->shape[0];
}

int Value::cols() const {
  if (n_->shape.size() < 2) return n_->shape.empty() ? 1 : 1;
  return n_->shape[1];
}

std::vector<real>& Value::data() { return n_->data; }
const std::vector<real>& Value::data() const { return n_->data; }

std::vector<real>& Value::grad() {
  n_->ensure_grad();
  return n_->grad;
}

bool Value::has_grad() const { return !n_->grad.empty(); }
bool Value::requires_grad() const { return n_->requires_grad; }

real Value::scalar() const {
  if (n_->data.size() != 1) {
    throw ShapeError("scalar() on non-scalar value of shape " + shape_str(n_->shape));
  }
  return n_->data[0];
}

Value Tape::alloc(Shape shape, const char* op) {
  Node& n = nodes_.emplace_back();
  n.shape = std::move(shape);
  n.data.assign(numel(n.shape), real(0));
  n.op = op;
  return Value(&n);
}

Value Tape::leaf(Shape shape, bool requires_grad) {
  Value v = alloc(std::move(shape), "leaf");
  v.node()->requires_grad = requires_grad;
  return v;
}

Value Tape::constant(std::vector<real> data, Shape shape) {
  if (data.size() != numel(shape)) {
    throw ShapeError("constant data size does not match shape " + shape_str(shape));
  }
  Value v = alloc(std::move(shape), "const");
  v.node()->data = std::move(data);
  return v;
}

Value Tape::scalar(real v) { return constant({v}, Shape{}); }

void Tape::backward(Value loss) {
  if (!loss.valid() || loss.size() != 1) {
    throw ShapeError("backward() needs a scalar loss, got shape " +
                     (loss.valid() ? shape_str(loss.shape()) : std::string("<null>")));
  }
  loss.node()->ensure_grad();
  loss.node()->grad[0] += real(1);
  for (auto it = nodes_.rbegin(); it != nodes_.rend(); ++it) {
    Node& n = *it;
    if (n.grad.empty() || !n.backward) continue;
    n.backward(n);
  }
}

}  // namespace gmatch::ad
