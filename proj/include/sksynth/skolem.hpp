#pragma once

#include <cstdint>
#include <span>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "sksynth/frontend.hpp"
#include "sksynth/sat_oracle.hpp"

namespace sksynth {

// chained: psi[i] may still mention x_{i+1}..x_n; y_only: support is in Y.
enum class SkolemPhase { chained, y_only };

struct SkolemVector {
  std::vector<NodeRef> psi;  // indexed by position in x_order
  SkolemPhase phase = SkolemPhase::chained;
};

enum class GeneralizeStrategy { cube, whole, element };

struct EngineOptions {
  GeneralizeStrategy generalize = GeneralizeStrategy::element;
  std::uint64_t max_refinements = 1'000'000;
  double time_limit_s = 0.0;   // 0 = unlimited
  std::size_t node_limit = 0;  // 0 = unlimited
  bool record_trace = false;
};

enum class SynthStatus { ok, timeout, node_budget, refinement_budget };
const char* to_string(SynthStatus s);

struct RunStats {
  std::uint64_t refinements = 0;
  std::uint64_t sat_calls = 0;
  double sat_seconds = 0.0;
  double total_seconds = 0.0;
  double avg_size = 0.0;  // mean node_count over the final vector
  std::size_t max_size = 0;
};

// One refinement set: an ordered family of AIG roots, implicitly disjoined.
// The member list and the cached disjunction stay in sync. FALSE elements
// are never stored, and structural duplicates are skipped, so the empty set
// denotes the FALSE function.
class CbSet {
 public:
  // Returns false when the element was dropped (constant FALSE or duplicate).
  bool insert(AigManager& m, NodeRef r) {
    if (r == AigManager::false_ref()) return false;
    if (!members_.insert(r.raw()).second) return false;
    elems_.push_back(r);
    disj_ = m.mk_or(disj_, r);
    return true;
  }

  const std::vector<NodeRef>& elements() const { return elems_; }
  NodeRef disjunction() const { return disj_; }
  bool empty() const { return elems_.empty(); }

 private:
  std::vector<NodeRef> elems_;
  std::unordered_set<std::uint32_t> members_;
  NodeRef disj_ = AigManager::false_ref();
};

// Per-variable refinements cbr0[i], cbr1[i]; the abstract Skolem function
// for position i is the complement of cbr1[i]'s disjunction.
struct CbState {
  std::vector<CbSet> cbr0, cbr1;

  NodeRef abstract_skolem(AigManager& m, std::size_t i) const {
    return m.mk_not(cbr1[i].disjunction());
  }
  SkolemVector abstract_vector(AigManager& m) const {
    SkolemVector v;
    v.phase = SkolemPhase::chained;
    v.psi.reserve(cbr1.size());
    for (std::size_t i = 0; i < cbr1.size(); ++i) v.psi.push_back(abstract_skolem(m, i));
    return v;
  }
};

struct ErrorFormula {
  NodeRef root;
  std::unordered_map<VarId, VarId> primed;  // x -> fresh x'
};

// One CEGAR iteration, recorded when EngineOptions::record_trace is set.
// The cbr vectors hold the per-position disjunction roots.
struct RefinementRecord {
  Assignment cex;       // total over X' + X + Y
  std::size_t pivot = 0;  // position k chosen by the refinement scan
  NodeRef error_root;   // the error formula this counterexample satisfied
  std::vector<NodeRef> cbr0_before, cbr1_before;
  std::vector<NodeRef> cbr0_after, cbr1_after;
};

struct SynthResult {
  SynthStatus status = SynthStatus::ok;
  SkolemVector vector;  // meaningful iff status == ok
  RunStats stats;
  std::vector<RefinementRecord> trace;          // iff record_trace
  NodeRef final_error_root;                     // the UNSAT error formula (cegar, trace only)
  std::vector<NodeRef> final_cbr0, final_cbr1;  // disjunctions at exit (cegar only)
};

// Phase 2 back-substitution: for i from n down to 2, substitute psi[i] into
// psi[1..i-1]. Turns a chained vector into a Y-only one.
SkolemVector reverse_substitute(AigManager& m, std::span<const VarId> x_order, SkolemVector v);

// Per-factor contributions to the refinement sets, existentially eliminating
// each variable factor-locally. Also returns the initial abstract vector.
std::pair<CbState, SkolemVector> init_abs_ref(FactoredSpec& spec);

// F(X',Y) & /\ (x_i <-> psi_i) & !F(X,Y) over fresh primed variables. Pass
// `reuse_primed` to keep X' stable across repeated builds.
ErrorFormula build_error_formula(FactoredSpec& spec, const SkolemVector& psi,
                                 const std::unordered_map<VarId, VarId>* reuse_primed = nullptr);

// A function xi with Supp(xi) within Supp of the set's disjunction, pi |= xi,
// and xi implying the disjunction. `mu_other` is the conjunct the result will
// be combined with; the element strategy minimizes the support of that
// conjunction (ties: fewer AIG nodes, then insertion order).
NodeRef generalize(AigManager& m, const Assignment& pi, const CbSet& set, NodeRef mu_other,
                   GeneralizeStrategy strategy);

// One counterexample-driven refinement step. pi must be a verified model of
// the current error formula. Returns the pivot position.
std::size_t update_abs_ref(FactoredSpec& spec, CbState& state, const Assignment& pi,
                           GeneralizeStrategy strategy);

// The cofactor-composition baseline: builds the monolithic conjunction of
// factors containing each variable, takes its positive cofactor as the
// Skolem function, and substitutes it back.
SynthResult mono_skolem(FactoredSpec& spec, const EngineOptions& opts = {});

// The counterexample-guided engine: initial per-factor abstraction, SAT
// oracle on the error formula, refinement until UNSAT, then back
// substitution.
SynthResult cegar_skolem(FactoredSpec& spec, SatOracle& oracle, const EngineOptions& opts = {});

}  // namespace sksynth
