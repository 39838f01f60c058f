#include "sksynth/aig.hpp"

#include <algorithm>
#include <cassert>

namespace sksynth {

namespace {

std::uint64_t pair_key(NodeRef a, NodeRef b) {
  return (std::uint64_t(a.raw()) << 32) | b.raw();
}

}  // namespace

AigManager::AigManager() {
  nodes_.push_back(Node{});  // node 0: the constant
}

NodeRef AigManager::mk_var(VarId id) {
  if (auto it = var_leaf_.find(id); it != var_leaf_.end())
    return NodeRef::from_raw(it->second << 1);
  check_node_budget();
  const auto idx = static_cast<std::uint32_t>(nodes_.size());
  Node n;
  n.var = id;
  nodes_.push_back(n);
  var_leaf_.emplace(id, idx);
  max_var_ = std::max(max_var_, id);
  return NodeRef::from_raw(idx << 1);
}

std::optional<NodeRef> AigManager::lookup_var(VarId id) const {
  auto it = var_leaf_.find(id);
  if (it == var_leaf_.end()) return std::nullopt;
  return NodeRef::from_raw(it->second << 1);
}

VarId AigManager::fresh_var() { return max_var_ + 1; }

std::string AigManager::var_name(VarId v) const {
  auto it = names_.find(v);
  if (it != names_.end()) return it->second;
  return "v" + std::to_string(v);
}

NodeRef AigManager::mk_and(NodeRef a, NodeRef b) {
  check_ref(a);
  check_ref(b);
  if (a == false_ref() || b == false_ref()) return false_ref();
  if (a == true_ref()) return b;
  if (b == true_ref()) return a;
  if (a == b) return a;
  if (a == b.negated()) return false_ref();
  if (b.raw() < a.raw()) std::swap(a, b);  // canonical child order

  const auto key = pair_key(a, b);
  if (auto it = unique_.find(key); it != unique_.end())
    return NodeRef::from_raw(it->second << 1);

  check_node_budget();
  const auto idx = static_cast<std::uint32_t>(nodes_.size());
  Node n;
  n.fanin0 = a;
  n.fanin1 = b;
  n.is_and = true;
  nodes_.push_back(n);
  unique_.emplace(key, idx);
  return NodeRef::from_raw(idx << 1);
}

NodeRef AigManager::mk_or(NodeRef a, NodeRef b) {
  return mk_and(a.negated(), b.negated()).negated();
}

NodeRef AigManager::mk_iff(NodeRef a, NodeRef b) {
  // !(a & !b) & !(!a & b)
  return mk_and(mk_and(a, b.negated()).negated(), mk_and(a.negated(), b).negated());
}

NodeRef AigManager::mk_big_and(std::span<const NodeRef> refs) {
  if (refs.empty()) return true_ref();
  // Balanced reduction keeps cones shallow.
  std::vector<NodeRef> layer(refs.begin(), refs.end());
  while (layer.size() > 1) {
    std::vector<NodeRef> next;
    next.reserve((layer.size() + 1) / 2);
    for (std::size_t i = 0; i + 1 < layer.size(); i += 2)
      next.push_back(mk_and(layer[i], layer[i + 1]));
    if (layer.size() % 2 == 1) next.push_back(layer.back());
    layer.swap(next);
  }
  return layer.front();
}

NodeRef AigManager::mk_big_or(std::span<const NodeRef> refs) {
  std::vector<NodeRef> neg;
  neg.reserve(refs.size());
  for (NodeRef r : refs) neg.push_back(r.negated());
  return mk_big_and(neg).negated();
}

VarId AigManager::var_of(NodeRef r) const {
  if (!is_var_node(r)) throw UsageError("var_of: not a variable leaf");
  return nodes_[r.index()].var;
}

NodeRef AigManager::fanin0(NodeRef r) const {
  if (!is_and_node(r)) throw UsageError("fanin0: not an AND node");
  return nodes_[r.index()].fanin0;
}

NodeRef AigManager::fanin1(NodeRef r) const {
  if (!is_and_node(r)) throw UsageError("fanin1: not an AND node");
  return nodes_[r.index()].fanin1;
}

NodeRef AigManager::cofactor(NodeRef f, VarId v, bool bit) {
  check_ref(f);
  if (!support_contains(f, v)) return f;

  std::vector<std::uint32_t> stack{f.index()};
  while (!stack.empty()) {
    const std::uint32_t n = stack.back();
    if (cof_cache_.find(CofKey{n, v, bit}) != cof_cache_.end()) {
      stack.pop_back();
      continue;
    }
    const Node node = nodes_[n];  // copy: mk_and below may grow nodes_
    if (!node.is_and) {
      NodeRef r;
      if (n == 0)
        r = false_ref();
      else if (node.var == v)
        r = bit ? true_ref() : false_ref();
      else
        r = NodeRef::from_raw(n << 1);
      cof_cache_.emplace(CofKey{n, v, bit}, r);
      stack.pop_back();
      continue;
    }
    const auto i0 = cof_cache_.find(CofKey{node.fanin0.index(), v, bit});
    const auto i1 = cof_cache_.find(CofKey{node.fanin1.index(), v, bit});
    if (i0 == cof_cache_.end() || i1 == cof_cache_.end()) {
      if (i0 == cof_cache_.end()) stack.push_back(node.fanin0.index());
      if (i1 == cof_cache_.end()) stack.push_back(node.fanin1.index());
      continue;
    }
    const NodeRef c0 = i0->second.apply_complement(node.fanin0.complemented());
    const NodeRef c1 = i1->second.apply_complement(node.fanin1.complemented());
    cof_cache_.emplace(CofKey{n, v, bit}, mk_and(c0, c1));
    stack.pop_back();
  }
  return cof_cache_.at(CofKey{f.index(), v, bit}).apply_complement(f.complemented());
}

NodeRef AigManager::compose(NodeRef f, VarId v, NodeRef g) {
  check_ref(f);
  check_ref(g);
  if (g == true_ref()) return cofactor(f, v, true);
  if (g == false_ref()) return cofactor(f, v, false);
  if (!support_contains(f, v)) return f;
  if (auto leaf = lookup_var(v); leaf && g == *leaf) return f;

  std::vector<std::uint32_t> stack{f.index()};
  while (!stack.empty()) {
    const std::uint32_t n = stack.back();
    if (comp_cache_.find(CompKey{n, v, g.raw()}) != comp_cache_.end()) {
      stack.pop_back();
      continue;
    }
    const Node node = nodes_[n];
    if (!node.is_and) {
      NodeRef r;
      if (n == 0)
        r = false_ref();
      else if (node.var == v)
        r = g;
      else
        r = NodeRef::from_raw(n << 1);
      comp_cache_.emplace(CompKey{n, v, g.raw()}, r);
      stack.pop_back();
      continue;
    }
    const auto i0 = comp_cache_.find(CompKey{node.fanin0.index(), v, g.raw()});
    const auto i1 = comp_cache_.find(CompKey{node.fanin1.index(), v, g.raw()});
    if (i0 == comp_cache_.end() || i1 == comp_cache_.end()) {
      if (i0 == comp_cache_.end()) stack.push_back(node.fanin0.index());
      if (i1 == comp_cache_.end()) stack.push_back(node.fanin1.index());
      continue;
    }
    const NodeRef c0 = i0->second.apply_complement(node.fanin0.complemented());
    const NodeRef c1 = i1->second.apply_complement(node.fanin1.complemented());
    comp_cache_.emplace(CompKey{n, v, g.raw()}, mk_and(c0, c1));
    stack.pop_back();
  }
  return comp_cache_.at(CompKey{f.index(), v, g.raw()}).apply_complement(f.complemented());
}

const std::vector<VarId>& AigManager::support(NodeRef f) {
  check_ref(f);
  std::vector<std::uint32_t> stack{f.index()};
  while (!stack.empty()) {
    const std::uint32_t n = stack.back();
    if (support_cache_.find(n) != support_cache_.end()) {
      stack.pop_back();
      continue;
    }
    const Node& node = nodes_[n];
    if (!node.is_and) {
      std::vector<VarId> s;
      if (n != 0) s.push_back(node.var);
      support_cache_.emplace(n, std::move(s));
      stack.pop_back();
      continue;
    }
    const auto i0 = support_cache_.find(node.fanin0.index());
    const auto i1 = support_cache_.find(node.fanin1.index());
    if (i0 == support_cache_.end() || i1 == support_cache_.end()) {
      if (i0 == support_cache_.end()) stack.push_back(node.fanin0.index());
      if (i1 == support_cache_.end()) stack.push_back(node.fanin1.index());
      continue;
    }
    std::vector<VarId> merged;
    merged.reserve(i0->second.size() + i1->second.size());
    std::set_union(i0->second.begin(), i0->second.end(), i1->second.begin(), i1->second.end(),
                   std::back_inserter(merged));
    support_cache_.emplace(n, std::move(merged));
    stack.pop_back();
  }
  return support_cache_.at(f.index());
}

bool AigManager::support_contains(NodeRef f, VarId v) {
  const auto& s = support(f);
  return std::binary_search(s.begin(), s.end(), v);
}

bool AigManager::eval(NodeRef f, const Assignment& pi) const {
  check_ref(f);
  std::unordered_map<std::uint32_t, bool> val;
  val.emplace(0u, false);
  std::vector<std::uint32_t> stack{f.index()};
  while (!stack.empty()) {
    const std::uint32_t n = stack.back();
    if (val.find(n) != val.end()) {
      stack.pop_back();
      continue;
    }
    const Node& node = nodes_[n];
    if (!node.is_and) {
      val.emplace(n, pi.value(node.var));
      stack.pop_back();
      continue;
    }
    const auto i0 = val.find(node.fanin0.index());
    const auto i1 = val.find(node.fanin1.index());
    if (i0 == val.end() || i1 == val.end()) {
      if (i0 == val.end()) stack.push_back(node.fanin0.index());
      if (i1 == val.end()) stack.push_back(node.fanin1.index());
      continue;
    }
    const bool v0 = i0->second != node.fanin0.complemented();
    const bool v1 = i1->second != node.fanin1.complemented();
    val.emplace(n, v0 && v1);
    stack.pop_back();
  }
  return val.at(f.index()) != f.complemented();
}

std::size_t AigManager::node_count(NodeRef f) const {
  check_ref(f);
  std::vector<std::uint32_t> stack{f.index()};
  std::unordered_map<std::uint32_t, bool> seen;
  std::size_t count = 0;
  while (!stack.empty()) {
    const std::uint32_t n = stack.back();
    stack.pop_back();
    if (!seen.emplace(n, true).second) continue;
    const Node& node = nodes_[n];
    if (!node.is_and) continue;
    ++count;
    stack.push_back(node.fanin0.index());
    stack.push_back(node.fanin1.index());
  }
  return count;
}

void AigManager::clear_op_caches() {
  cof_cache_.clear();
  comp_cache_.clear();
}

}  // namespace sksynth
