#include "sksynth/cdcl.hpp"

#include <algorithm>
#include <cmath>

#include "sksynth/errors.hpp"

namespace sksynth {

namespace {

// restart scaling sequence 1,1,2,1,1,2,4,...
std::uint64_t luby(std::uint64_t x) {
  std::uint64_t size = 1, seq = 0;
  while (size < x + 1) {
    ++seq;
    size = 2 * size + 1;
  }
  while (size - 1 != x) {
    size = (size - 1) >> 1;
    --seq;
    x = x % size;
  }
  return std::uint64_t(1) << seq;
}

}  // namespace

CdclSolver::CdclSolver(const Cnf& cnf) {
  nvars_ = cnf.num_vars;
  assign_.assign(nvars_ + 1, -1);
  phase_.assign(nvars_ + 1, 0);
  level_.assign(nvars_ + 1, 0);
  reason_.assign(nvars_ + 1, -1);
  activity_.assign(nvars_ + 1, 0.0);
  seen_.assign(nvars_ + 1, 0);
  heap_pos_.assign(nvars_ + 1, -1);
  watches_.assign(2 * nvars_ + 2, {});
  model_.assign(nvars_ + 1, -1);

  for (const auto& clause : cnf.clauses) {
    std::vector<int> lits;
    lits.reserve(clause.size());
    bool tautology = false;
    for (int dl : clause) {
      if (dl == 0 || std::abs(dl) > nvars_)
        throw UsageError("CNF literal " + std::to_string(dl) + " out of range");
      const int l = lit_of(dl);
      if (std::find(lits.begin(), lits.end(), l) != lits.end()) continue;
      if (std::find(lits.begin(), lits.end(), neg(l)) != lits.end()) {
        tautology = true;
        break;
      }
      lits.push_back(l);
    }
    if (tautology) continue;
    if (lits.empty()) {
      unsat_at_load_ = true;
      return;
    }
    if (lits.size() == 1) {
      const int v = value(lits[0]);
      if (v == 0) {
        unsat_at_load_ = true;
        return;
      }
      if (v == -1) enqueue(lits[0], -1);
      continue;
    }
    clauses_.push_back(Clause{std::move(lits)});
    attach(static_cast<int>(clauses_.size()) - 1);
  }
}

void CdclSolver::attach(int ci) {
  const auto& lits = clauses_[ci].lits;
  watches_[lits[0]].push_back(Watcher{ci, lits[1]});
  watches_[lits[1]].push_back(Watcher{ci, lits[0]});
}

void CdclSolver::enqueue(int lit, int reason_clause) {
  const int v = var(lit);
  assign_[v] = (lit & 1) ? 0 : 1;
  phase_[v] = assign_[v];
  level_[v] = static_cast<int>(trail_lim_.size());
  reason_[v] = reason_clause;
  trail_.push_back(lit);
}

int CdclSolver::propagate() {
  while (qhead_ < trail_.size()) {
    const int p = trail_[qhead_++];
    const int fl = neg(p);  // literal that just became false
    auto& ws = watches_[fl];
    std::size_t keep = 0;
    for (std::size_t i = 0; i < ws.size(); ++i) {
      const Watcher w = ws[i];
      if (value(w.blocker) == 1) {
        ws[keep++] = w;
        continue;
      }
      auto& lits = clauses_[w.clause].lits;
      if (lits[0] == fl) std::swap(lits[0], lits[1]);
      if (value(lits[0]) == 1) {
        ws[keep++] = Watcher{w.clause, lits[0]};
        continue;
      }
      bool moved = false;
      for (std::size_t k = 2; k < lits.size(); ++k) {
        if (value(lits[k]) != 0) {
          std::swap(lits[1], lits[k]);
          watches_[lits[1]].push_back(Watcher{w.clause, lits[0]});
          moved = true;
          break;
        }
      }
      if (moved) continue;
      // unit or conflicting
      ws[keep++] = w;
      if (value(lits[0]) == 0) {
        for (std::size_t j = i + 1; j < ws.size(); ++j) ws[keep++] = ws[j];
        ws.resize(keep);
        qhead_ = trail_.size();
        return w.clause;
      }
      enqueue(lits[0], w.clause);
    }
    ws.resize(keep);
  }
  return -1;
}

void CdclSolver::bump(int v) {
  activity_[v] += var_inc_;
  if (activity_[v] > 1e100) {
    for (int i = 1; i <= nvars_; ++i) activity_[i] *= 1e-100;
    var_inc_ *= 1e-100;
  }
  if (heap_pos_[v] >= 0) heap_sift_up(static_cast<std::size_t>(heap_pos_[v]));
}

void CdclSolver::analyze(int conflict, std::vector<int>& learnt, int& bt_level) {
  learnt.assign(1, 0);  // slot 0 reserved for the asserting literal
  int counter = 0;
  int p = -1;
  std::size_t idx = trail_.size();
  const int current = static_cast<int>(trail_lim_.size());
  int ci = conflict;
  do {
    // For a reason clause, lits[0] is the literal it implied; skip it.
    const auto& lits = clauses_[ci].lits;
    for (std::size_t j = (p == -1 ? 0 : 1); j < lits.size(); ++j) {
      const int q = lits[j];
      const int v = var(q);
      if (!seen_[v] && level_[v] > 0) {
        seen_[v] = 1;
        bump(v);
        if (level_[v] >= current)
          ++counter;
        else
          learnt.push_back(q);
      }
    }
    while (!seen_[var(trail_[idx - 1])]) --idx;
    p = trail_[idx - 1];
    --idx;
    ci = reason_[var(p)];
    seen_[var(p)] = 0;
    --counter;
  } while (counter > 0);
  learnt[0] = neg(p);
  for (std::size_t i = 1; i < learnt.size(); ++i) seen_[var(learnt[i])] = 0;

  bt_level = 0;
  if (learnt.size() > 1) {
    std::size_t best = 1;
    for (std::size_t i = 2; i < learnt.size(); ++i)
      if (level_[var(learnt[i])] > level_[var(learnt[best])]) best = i;
    std::swap(learnt[1], learnt[best]);
    bt_level = level_[var(learnt[1])];
  }
}

void CdclSolver::backtrack(int to_level) {
  if (static_cast<int>(trail_lim_.size()) <= to_level) return;
  const int bound = trail_lim_[to_level];
  for (std::size_t i = trail_.size(); i > static_cast<std::size_t>(bound); --i) {
    const int v = var(trail_[i - 1]);
    assign_[v] = -1;
    reason_[v] = -1;
    if (heap_pos_[v] < 0) heap_insert(v);
  }
  trail_.resize(bound);
  trail_lim_.resize(to_level);
  qhead_ = trail_.size();
}

void CdclSolver::heap_insert(int v) {
  heap_pos_[v] = static_cast<int>(heap_.size());
  heap_.push_back(v);
  heap_sift_up(heap_.size() - 1);
}

void CdclSolver::heap_sift_up(std::size_t i) {
  while (i > 0) {
    const std::size_t parent = (i - 1) / 2;
    if (!heap_less(heap_[parent], heap_[i])) break;
    std::swap(heap_[parent], heap_[i]);
    heap_pos_[heap_[parent]] = static_cast<int>(parent);
    heap_pos_[heap_[i]] = static_cast<int>(i);
    i = parent;
  }
}

void CdclSolver::heap_sift_down(std::size_t i) {
  while (true) {
    std::size_t largest = i;
    const std::size_t l = 2 * i + 1, r = 2 * i + 2;
    if (l < heap_.size() && heap_less(heap_[largest], heap_[l])) largest = l;
    if (r < heap_.size() && heap_less(heap_[largest], heap_[r])) largest = r;
    if (largest == i) break;
    std::swap(heap_[i], heap_[largest]);
    heap_pos_[heap_[i]] = static_cast<int>(i);
    heap_pos_[heap_[largest]] = static_cast<int>(largest);
    i = largest;
  }
}

int CdclSolver::heap_pop() {
  const int top = heap_[0];
  heap_pos_[top] = -1;
  heap_[0] = heap_.back();
  heap_.pop_back();
  if (!heap_.empty()) {
    heap_pos_[heap_[0]] = 0;
    heap_sift_down(0);
  }
  return top;
}

int CdclSolver::pick_branch_var() {
  while (!heap_.empty()) {
    const int v = heap_pop();
    if (assign_[v] < 0) return v;
  }
  return 0;
}

bool CdclSolver::solve() {
  if (unsat_at_load_) return false;
  if (propagate() != -1) return false;

  for (int v = 1; v <= nvars_; ++v)
    if (assign_[v] < 0) heap_insert(v);

  std::uint64_t restart_seq = 0;
  std::uint64_t conflict_budget = 64 * luby(restart_seq);
  std::uint64_t conflicts_here = 0;
  std::vector<int> learnt;

  while (true) {
    const int conflict = propagate();
    if (conflict != -1) {
      ++conflicts_;
      ++conflicts_here;
      if (trail_lim_.empty()) return false;
      int bt = 0;
      analyze(conflict, learnt, bt);
      backtrack(bt);
      if (learnt.size() == 1) {
        enqueue(learnt[0], -1);
      } else {
        clauses_.push_back(Clause{learnt});
        attach(static_cast<int>(clauses_.size()) - 1);
        enqueue(learnt[0], static_cast<int>(clauses_.size()) - 1);
      }
      decay();
      continue;
    }
    if (conflicts_here >= conflict_budget) {
      conflicts_here = 0;
      conflict_budget = 64 * luby(++restart_seq);
      backtrack(0);
      continue;
    }
    const int v = pick_branch_var();
    if (v == 0) {
      for (int u = 1; u <= nvars_; ++u) model_[u] = assign_[u];
      return true;
    }
    trail_lim_.push_back(static_cast<int>(trail_.size()));
    enqueue(phase_[v] ? 2 * v : 2 * v + 1, -1);
  }
}

}  // namespace sksynth
