#include "sksynth/truth_table.hpp"

#include <algorithm>
#include <unordered_map>

namespace sksynth {

Cone::Cone(const AigManager& m, std::span<const NodeRef> roots, std::span<const VarId> leaves,
           std::span<const std::pair<VarId, bool>> pinned) {
  num_leaves_ = leaves.size();
  std::unordered_map<VarId, std::uint32_t> leaf_slot;
  for (std::size_t j = 0; j < leaves.size(); ++j)
    leaf_slot.emplace(leaves[j], static_cast<std::uint32_t>(1 + j));
  std::unordered_map<VarId, bool> pin;
  for (auto [v, b] : pinned) pin.emplace(v, b);

  // node index -> encoded slot ref of the non-complemented node
  std::unordered_map<std::uint32_t, std::uint32_t> slot_of;
  slot_of.emplace(0u, 0u);  // constant node -> constant-false slot

  std::vector<std::uint32_t> stack;
  for (NodeRef r : roots) stack.push_back(r.index());
  while (!stack.empty()) {
    const std::uint32_t n = stack.back();
    if (slot_of.find(n) != slot_of.end()) {
      stack.pop_back();
      continue;
    }
    const NodeRef nref = NodeRef::from_raw(n << 1);
    if (m.is_var_node(nref)) {
      const VarId v = m.var_of(nref);
      if (auto it = pin.find(v); it != pin.end()) {
        slot_of.emplace(n, it->second ? 1u : 0u);  // constant slot, maybe complemented
      } else if (auto it2 = leaf_slot.find(v); it2 != leaf_slot.end()) {
        slot_of.emplace(n, it2->second << 1);
      } else {
        throw UsageError("cone: variable " + m.var_name(v) +
                         " in support but not in the leaf or pinned list");
      }
      stack.pop_back();
      continue;
    }
    const NodeRef f0 = m.fanin0(nref);
    const NodeRef f1 = m.fanin1(nref);
    const auto i0 = slot_of.find(f0.index());
    const auto i1 = slot_of.find(f1.index());
    if (i0 == slot_of.end() || i1 == slot_of.end()) {
      if (i0 == slot_of.end()) stack.push_back(f0.index());
      if (i1 == slot_of.end()) stack.push_back(f1.index());
      continue;
    }
    const std::uint32_t slot = static_cast<std::uint32_t>(1 + num_leaves_ + gates_.size());
    gates_.push_back(Gate{i0->second ^ (f0.complemented() ? 1u : 0u),
                          i1->second ^ (f1.complemented() ? 1u : 0u)});
    slot_of.emplace(n, slot << 1);
    stack.pop_back();
  }

  roots_.reserve(roots.size());
  for (NodeRef r : roots)
    roots_.push_back(slot_of.at(r.index()) ^ (r.complemented() ? 1u : 0u));
}

void Cone::eval_words(std::span<const std::uint64_t> leaf_words, Scratch& scratch,
                      std::span<std::uint64_t> roots_out) const {
  auto& slots = scratch.slots;
  slots.resize(1 + num_leaves_ + gates_.size());
  slots[0] = 0;
  for (std::size_t j = 0; j < num_leaves_; ++j) slots[1 + j] = leaf_words[j];
  const std::size_t base = 1 + num_leaves_;
  for (std::size_t i = 0; i < gates_.size(); ++i) {
    const Gate g = gates_[i];
    const std::uint64_t a = slots[g.a >> 1] ^ ((g.a & 1u) ? ~std::uint64_t(0) : 0);
    const std::uint64_t b = slots[g.b >> 1] ^ ((g.b & 1u) ? ~std::uint64_t(0) : 0);
    slots[base + i] = a & b;
  }
  for (std::size_t k = 0; k < roots_.size(); ++k) {
    const std::uint32_t r = roots_[k];
    roots_out[k] = slots[r >> 1] ^ ((r & 1u) ? ~std::uint64_t(0) : 0);
  }
}

namespace {

void check_table_width(std::size_t k) {
  if (k > 30) throw BoundError("truth table over " + std::to_string(k) + " variables is too large");
}

std::uint64_t narrow_mask(std::size_t rows) {
  return rows >= 64 ? ~std::uint64_t(0) : ((std::uint64_t(1) << rows) - 1);
}

TruthTable table_shell(std::span<const VarId> vars) {
  check_table_width(vars.size());
  TruthTable t;
  t.vars.assign(vars.begin(), vars.end());
  const std::size_t rows = t.rows();
  t.words.assign(rows <= 64 ? 1 : rows / 64, 0);
  return t;
}

// The word-parallel kernel: one cone evaluation per 64-row block, OpenMP
// across blocks for large tables.
TruthTable table_fast(const AigManager& m, NodeRef f, std::span<const VarId> vars,
                      std::span<const std::pair<VarId, bool>> pinned) {
  TruthTable t = table_shell(vars);
  const std::size_t num_words = t.words.size();
  const NodeRef roots[1] = {f};
  const Cone cone(m, roots, vars, pinned);

#pragma omp parallel if (num_words > 256)
  {
    Cone::Scratch scratch;
    std::vector<std::uint64_t> leaf(vars.size());
    std::uint64_t out[1];
#pragma omp for schedule(static)
    for (std::int64_t b = 0; b < static_cast<std::int64_t>(num_words); ++b) {
      for (std::size_t j = 0; j < vars.size(); ++j)
        leaf[j] = leaf_word(j, static_cast<std::size_t>(b));
      cone.eval_words(leaf, scratch, out);
      t.words[static_cast<std::size_t>(b)] = out[0];
    }
  }
  t.words.back() &= narrow_mask(t.rows());
  return t;
}

// Reference: one manager eval per row.
TruthTable table_reference(const AigManager& m, NodeRef f, std::span<const VarId> vars,
                           std::span<const std::pair<VarId, bool>> pinned) {
  TruthTable t = table_shell(vars);
  for (std::size_t r = 0; r < t.rows(); ++r) {
    Assignment pi;
    for (std::size_t j = 0; j < vars.size(); ++j) pi.set(vars[j], (r >> j) & 1u);
    for (auto [v, b] : pinned) pi.set(v, b);
    t.set(r, m.eval(f, pi));
  }
  return t;
}

template <typename TableFn>
TruthTable exists_reduce(const AigManager& m, NodeRef f, std::span<const VarId> inner,
                         std::span<const VarId> outer,
                         std::span<const std::pair<VarId, bool>> pinned, TableFn&& full_table) {
  check_table_width(inner.size() + outer.size());
  std::vector<VarId> all(inner.begin(), inner.end());
  all.insert(all.end(), outer.begin(), outer.end());
  const TruthTable full = full_table(m, f, all, pinned);

  TruthTable out = table_shell(outer);
  const std::size_t block = std::size_t(1) << inner.size();
  for (std::size_t o = 0; o < out.rows(); ++o) {
    bool any = false;
    for (std::size_t i = 0; i < block && !any; ++i) any = full.get((o << inner.size()) | i);
    out.set(o, any);
  }
  return out;
}

}  // namespace

TruthTable truth_table(const AigManager& m, NodeRef f, std::span<const VarId> vars) {
  return table_fast(m, f, vars, {});
}

TruthTable truth_table_serial(const AigManager& m, NodeRef f, std::span<const VarId> vars) {
  return table_reference(m, f, vars, {});
}

TruthTable exists_table(const AigManager& m, NodeRef f, std::span<const VarId> inner,
                        std::span<const VarId> outer,
                        std::span<const std::pair<VarId, bool>> pinned) {
  return exists_reduce(m, f, inner, outer, pinned, table_fast);
}

TruthTable exists_table_serial(const AigManager& m, NodeRef f, std::span<const VarId> inner,
                               std::span<const VarId> outer,
                               std::span<const std::pair<VarId, bool>> pinned) {
  return exists_reduce(m, f, inner, outer, pinned, table_reference);
}

bool equal_on(const AigManager& m, NodeRef a, NodeRef b, std::span<const VarId> vars) {
  return truth_table(m, a, vars) == truth_table(m, b, vars);
}

bool semantically_equal(AigManager& m, NodeRef a, NodeRef b) {
  std::vector<VarId> vars;
  {
    const auto& sa = m.support(a);
    const auto& sb = m.support(b);
    std::set_union(sa.begin(), sa.end(), sb.begin(), sb.end(), std::back_inserter(vars));
  }
  if (vars.size() > 24)
    throw BoundError("semantic equality check over " + std::to_string(vars.size()) +
                     " variables exceeds the 24-variable bound");
  return equal_on(m, a, b, vars);
}

}  // namespace sksynth
