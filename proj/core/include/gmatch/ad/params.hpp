#pragma once

#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "gmatch/ad/tape.hpp"

namespace gmatch::ad {

// Named trainable leaves on their own long-lived tape. Registration order is
// fixed and defines the checkpoint manifest order. Immutable during a
// forward pass; the optimizer step mutates data in place under exclusive
// access.
class ParamStore {
 public:
  ParamStore() = default;
  ParamStore(const ParamStore&) = delete;
  ParamStore& operator=(const ParamStore&) = delete;
  ParamStore(ParamStore&&) = default;
  ParamStore& operator=(ParamStore&&) = default;

  Value create(const std::string& name, Shape shape) {
    if (index_.count(name)) throw std::runtime_error("duplicate parameter: " + name);
    Value v = tape_.leaf(std::move(shape), /*requires_grad=*/true);
    index_[name] = entries_.size();
    entries_.emplace_back(name, v);
    return v;
  }

  Value find(const std::string& name) const {
    auto it = index_.find(name);
    return it == index_.end() ? Value() : entries_[it->second].second;
  }

  const std::vector<std::pair<std::string, Value>>& entries() const { return entries_; }

  void zero_grads() {
    for (auto& [name, v] : entries_) {
      auto& g = v.grad();
      std::fill(g.begin(), g.end(), real(0));
    }
  }

  std::size_t total_entries() const {
    std::size_t n = 0;
    for (const auto& [name, v] : entries_) n += v.size();
    return n;
  }

 private:
  Tape tape_;
  std::vector<std::pair<std::string, Value>> entries_;
  std::unordered_map<std::string, std::size_t> index_;
};

}  // namespace gmatch::ad
