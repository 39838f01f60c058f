#pragma once

#include <memory>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "sksynth/aig.hpp"
#include "sksynth/cnf.hpp"

namespace sksynth {

// A problem instance: the factors f^j of F = /\ f^j, the ordered existential
// variables X, and the free variables Y, all living in one manager.
struct FactoredSpec {
  std::shared_ptr<AigManager> mgr;
  std::vector<NodeRef> factors;
  std::vector<VarId> x_order;
  std::vector<VarId> y_vars;  // sorted ascending

  bool is_existential(VarId v) const {
    for (VarId x : x_order)
      if (x == v) return true;
    return false;
  }
};

// QDIMACS: `p cnf V C` header, optional 0-terminated `a`/`e` prefix lines,
// 0-terminated clauses. Each clause becomes one factor. X is the innermost
// existential block; everything else (universal, outer, or unquantified) is
// free. Prefixes other than an optional universal block followed by one
// existential block are rejected.
FactoredSpec parse_qdimacs(const std::string& text);

// Structured factor format:
//   var <name> : x;        declarations, one per variable
//   var <name> : y;
//   <expr>;                one factor per statement, over ! & | ^ and ()
// `#` starts a line comment. Precedence: ! > & > ^ > |. XOR expands as
// (a|b) & !(a&b).
FactoredSpec parse_factored(const std::string& text);

// Occurrence heuristic: variables occurring in fewer factors are indexed
// lower; ties keep the original order.
FactoredSpec order_variables(FactoredSpec spec);

struct TseitinResult {
  Cnf cnf;
  std::unordered_map<VarId, int> var_to_cnf;  // original variable -> CNF variable
  std::vector<VarId> cnf_to_var;              // CNF variable -> original variable (0 = auxiliary)
};

// Equisatisfiable CNF asserting every root true: one auxiliary variable per
// AND node, three clauses per node (t->a, t->b, a&b->t), one unit per root.
TseitinResult tseitin_cnf(const AigManager& m, std::span<const NodeRef> roots);

// Incremental encoder. Definitional clauses accumulate across calls, so the
// static part of a query family is encoded exactly once and only new
// subgraphs pay encoding cost.
class TseitinEncoder {
 public:
  explicit TseitinEncoder(const AigManager& m) : mgr_(&m) {}

  // DIMACS literal for a non-constant r, encoding the cone of r on first
  // sight.
  int literal_for(NodeRef r);

  // All definitional clauses so far plus one unit per asserted root.
  // Constant roots short-circuit: TRUE is dropped, FALSE yields an empty
  // clause.
  Cnf query(std::span<const NodeRef> asserted_roots);

  const std::unordered_map<VarId, int>& var_to_cnf() const { return var_to_cnf_; }
  const std::vector<VarId>& cnf_to_var() const { return cnf_to_var_; }
  int num_cnf_vars() const { return next_var_ - 1; }

 private:
  int fresh_cnf_var(VarId origin);

  const AigManager* mgr_;
  Cnf base_;
  int next_var_ = 1;
  std::unordered_map<std::uint32_t, int> node_var_;  // node index -> CNF variable
  std::unordered_map<VarId, int> var_to_cnf_;
  std::vector<VarId> cnf_to_var_ = {0};  // slot 0 unused
};

}  // namespace sksynth
