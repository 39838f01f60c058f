#pragma once

#include <algorithm>
#include <cstdint>
#include <unordered_map>
#include <utility>
#include <vector>

#include "sksynth/errors.hpp"

namespace sksynth {

using VarId = std::uint32_t;

// A total valuation over its declared domain: every variable that was `set`
// has a value, and reading any other variable is a usage error.
class Assignment {
 public:
  Assignment() = default;

  void set(VarId v, bool value) { values_[v] = value; }

  bool has(VarId v) const { return values_.find(v) != values_.end(); }

  bool value(VarId v) const {
    auto it = values_.find(v);
    if (it == values_.end())
      throw UsageError("assignment does not cover variable " + std::to_string(v));
    return it->second;
  }

  std::size_t size() const { return values_.size(); }
  bool empty() const { return values_.empty(); }

  // Domain/value pairs in ascending variable order (deterministic iteration).
  std::vector<std::pair<VarId, bool>> items() const {
    std::vector<std::pair<VarId, bool>> out(values_.begin(), values_.end());
    std::sort(out.begin(), out.end());
    return out;
  }

  friend bool operator==(const Assignment& a, const Assignment& b) {
    return a.values_ == b.values_;
  }

 private:
  std::unordered_map<VarId, bool> values_;
};

}  // namespace sksynth
