#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "sksynth/assignment.hpp"
#include "sksynth/errors.hpp"

namespace sksynth {

// Edge into an AIG node table: node index plus a complement bit, packed the
// AIGER way (raw = 2*index + complemented). Node 0 is the constant node, so
// raw 0 is FALSE and raw 1 is TRUE.
class NodeRef {
 public:
  constexpr NodeRef() = default;  // FALSE

  static constexpr NodeRef from_raw(std::uint32_t raw) {
    NodeRef r;
    r.raw_ = raw;
    return r;
  }

  constexpr std::uint32_t raw() const { return raw_; }
  constexpr std::uint32_t index() const { return raw_ >> 1; }
  constexpr bool complemented() const { return (raw_ & 1u) != 0; }
  constexpr NodeRef negated() const { return from_raw(raw_ ^ 1u); }
  constexpr NodeRef apply_complement(bool c) const { return c ? negated() : *this; }

  friend constexpr bool operator==(NodeRef a, NodeRef b) { return a.raw_ == b.raw_; }
  friend constexpr bool operator!=(NodeRef a, NodeRef b) { return a.raw_ != b.raw_; }
  friend constexpr bool operator<(NodeRef a, NodeRef b) { return a.raw_ < b.raw_; }

 private:
  std::uint32_t raw_ = 0;
};

// Hash-consed And-Inverter-Graph store. Every formula handled by the system
// is a NodeRef into exactly one manager. Complement edges encode NOT, so
// negation never allocates. AND construction applies the constant rules
// (a&0=0, a&1=a, a&a=a, a&!a=0) and orders children canonically before
// consulting the unique table; no further rewriting is done. Semantic checks
// belong to the SAT oracle or truth tables, never to structural equality.
//
// A manager is single-threaded. Const member functions (eval, node_count,
// structural accessors) do not touch shared mutable state and may be called
// concurrently from several threads as long as no thread mutates.
class AigManager {
 public:
  AigManager();

  static constexpr NodeRef false_ref() { return NodeRef::from_raw(0); }
  static constexpr NodeRef true_ref() { return NodeRef::from_raw(1); }

  // Idempotent: the same id always yields the identical ref.
  NodeRef mk_var(VarId id);
  std::optional<NodeRef> lookup_var(VarId id) const;

  NodeRef mk_not(NodeRef a) const {
    check_ref(a);
    return a.negated();
  }
  NodeRef mk_and(NodeRef a, NodeRef b);
  NodeRef mk_or(NodeRef a, NodeRef b);
  NodeRef mk_iff(NodeRef a, NodeRef b);
  NodeRef mk_big_and(std::span<const NodeRef> refs);
  NodeRef mk_big_or(std::span<const NodeRef> refs);

  // f[v := bit]. The variable disappears from the structural support of the
  // result. Memoized; see clear_op_caches().
  NodeRef cofactor(NodeRef f, VarId v, bool bit);

  // f[v := g]. compose(f, v, constant) coincides with cofactor.
  NodeRef compose(NodeRef f, VarId v, NodeRef g);

  // Structural support after constant-rule simplification, sorted ascending.
  // Cached per node; the returned reference is stable until more support
  // queries run (it aliases the cache).
  const std::vector<VarId>& support(NodeRef f);
  bool support_contains(NodeRef f, VarId v);

  // Evaluate under a valuation that covers the structural support.
  bool eval(NodeRef f, const Assignment& pi) const;

  // Distinct AND nodes reachable from f. Shared nodes count once; variable
  // leaves and the constant do not count. This is the size metric reported
  // everywhere in the tool.
  std::size_t node_count(NodeRef f) const;

  // Flush the cofactor/compose memo tables. Engines call this between
  // top-level phases to bound memory.
  void clear_op_caches();

  // 0 = unlimited. Exceeding the limit throws NodeLimitError from the
  // constructor that would cross it.
  void set_node_limit(std::size_t max_nodes) { node_limit_ = max_nodes; }
  std::size_t node_limit() const { return node_limit_; }

  std::size_t num_nodes() const { return nodes_.size(); }  // constant + leaves + ANDs

  // A variable id strictly above every id seen so far.
  VarId fresh_var();

  void set_var_name(VarId v, std::string name) { names_[v] = std::move(name); }
  std::string var_name(VarId v) const;

  // Structural accessors (used by encoders, writers, and the evaluation
  // kernels).
  bool is_const(NodeRef r) const {
    check_ref(r);
    return r.index() == 0;
  }
  bool is_var_node(NodeRef r) const {
    check_ref(r);
    return r.index() != 0 && !nodes_[r.index()].is_and;
  }
  bool is_and_node(NodeRef r) const {
    check_ref(r);
    return nodes_[r.index()].is_and;
  }
  VarId var_of(NodeRef r) const;
  NodeRef fanin0(NodeRef r) const;
  NodeRef fanin1(NodeRef r) const;

 private:
  struct Node {
    NodeRef fanin0;
    NodeRef fanin1;
    VarId var = 0;
    bool is_and = false;
  };

  struct CofKey {
    std::uint32_t node;
    VarId var;
    bool bit;
    friend bool operator==(const CofKey&, const CofKey&) = default;
  };
  struct CofKeyHash {
    std::size_t operator()(const CofKey& k) const {
      std::uint64_t h = (std::uint64_t(k.node) << 33) ^ (std::uint64_t(k.var) << 1) ^ k.bit;
      return std::hash<std::uint64_t>()(h * 0x9e3779b97f4a7c15ull);
    }
  };
  struct CompKey {
    std::uint32_t node;
    VarId var;
    std::uint32_t g_raw;
    friend bool operator==(const CompKey&, const CompKey&) = default;
  };
  struct CompKeyHash {
    std::size_t operator()(const CompKey& k) const {
      std::uint64_t h = std::uint64_t(k.node) * 0x9e3779b97f4a7c15ull;
      h ^= std::uint64_t(k.var) * 0xc2b2ae3d27d4eb4full;
      h ^= std::uint64_t(k.g_raw) << 17;
      return std::hash<std::uint64_t>()(h);
    }
  };

  void check_ref(NodeRef r) const {
    if (r.index() >= nodes_.size())
      throw UsageError("NodeRef does not belong to this manager (index " +
                       std::to_string(r.index()) + " out of range)");
  }
  void check_node_budget() const {
    if (node_limit_ != 0 && nodes_.size() >= node_limit_)
      throw NodeLimitError("AIG node budget of " + std::to_string(node_limit_) + " exceeded");
  }

  std::vector<Node> nodes_;
  std::unordered_map<std::uint64_t, std::uint32_t> unique_;  // (fanin0,fanin1) -> index
  std::unordered_map<VarId, std::uint32_t> var_leaf_;
  std::unordered_map<VarId, std::string> names_;
  VarId max_var_ = 0;
  std::size_t node_limit_ = 0;

  std::unordered_map<CofKey, NodeRef, CofKeyHash> cof_cache_;
  std::unordered_map<CompKey, NodeRef, CompKeyHash> comp_cache_;
  std::unordered_map<std::uint32_t, std::vector<VarId>> support_cache_;
};

}  // namespace sksynth

template <>
struct std::hash<sksynth::NodeRef> {
  std::size_t operator()(sksynth::NodeRef r) const {
    return std::hash<std::uint32_t>()(r.raw());
  }
};
