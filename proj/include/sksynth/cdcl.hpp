#pragma once

#include <cstdint>
#include <vector>

#include "sksynth/cnf.hpp"

namespace sksynth {

// Conflict-driven clause-learning SAT solver: two watched literals, 1UIP
// learning, VSIDS-style activities, phase saving, Luby restarts. Fully
// deterministic. Learnt clauses are kept for the lifetime of the solver,
// which is adequate for the query sizes this tool produces.
class CdclSolver {
 public:
  explicit CdclSolver(const Cnf& cnf);

  bool solve();  // true = satisfiable

  // Valid after solve() returned true. Indexed 1..num_vars; variables that
  // never occurred in a clause stay -1 (caller completes them).
  const std::vector<std::int8_t>& model() const { return model_; }

 private:
  // Internal literal encoding: 2v for +v, 2v+1 for -v.
  static int lit_of(int dimacs) {
    return dimacs > 0 ? 2 * dimacs : -2 * dimacs + 1;
  }
  static int neg(int l) { return l ^ 1; }
  static int var(int l) { return l >> 1; }

  struct Clause {
    std::vector<int> lits;
  };
  struct Watcher {
    int clause;
    int blocker;
  };

  int value(int lit) const {  // -1 unassigned, 0 false, 1 true
    const std::int8_t a = assign_[var(lit)];
    if (a < 0) return -1;
    return (lit & 1) ? 1 - a : a;
  }

  void enqueue(int lit, int reason_clause);
  int propagate();  // returns conflicting clause index, or -1
  void analyze(int conflict, std::vector<int>& learnt, int& bt_level);
  void backtrack(int to_level);
  int pick_branch_var();
  void bump(int v);
  void decay() { var_inc_ *= (1.0 / 0.95); }
  void attach(int clause_idx);

  // indexed max-heap on activity
  void heap_insert(int v);
  void heap_sift_up(std::size_t i);
  void heap_sift_down(std::size_t i);
  int heap_pop();
  bool heap_less(int a, int b) const {
    return activity_[a] < activity_[b] || (activity_[a] == activity_[b] && a > b);
  }

  int nvars_ = 0;
  bool unsat_at_load_ = false;
  std::vector<Clause> clauses_;
  std::vector<std::vector<Watcher>> watches_;
  std::vector<std::int8_t> assign_;   // var -> -1/0/1
  std::vector<std::int8_t> phase_;    // saved phase, defaults to 0
  std::vector<int> trail_;
  std::vector<int> trail_lim_;        // trail size at each decision level
  std::size_t qhead_ = 0;
  std::vector<int> level_;
  std::vector<int> reason_;           // var -> clause index or -1
  std::vector<double> activity_;
  double var_inc_ = 1.0;
  std::vector<std::int8_t> seen_;
  std::vector<int> heap_;
  std::vector<int> heap_pos_;         // var -> heap index, -1 if absent
  std::vector<std::int8_t> model_;
  std::uint64_t conflicts_ = 0;
};

}  // namespace sksynth
