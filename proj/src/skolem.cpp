#include "sksynth/skolem.hpp"

#include <algorithm>
#include <cassert>
#include <chrono>
#include <optional>

#include "sksynth/errors.hpp"

namespace sksynth {

namespace {

using Clock = std::chrono::steady_clock;

struct TimeoutSignal {};

struct Deadline {
  Clock::time_point at{};
  bool armed = false;

  static Deadline in(double seconds) {
    Deadline d;
    if (seconds > 0) {
      d.at = Clock::now() + std::chrono::duration_cast<Clock::duration>(
                                std::chrono::duration<double>(seconds));
      d.armed = true;
    }
    return d;
  }
  void check() const {
    if (armed && Clock::now() >= at) throw TimeoutSignal{};
  }
};

// Restores the manager's previous node limit on scope exit.
class NodeLimitScope {
 public:
  NodeLimitScope(AigManager& m, std::size_t limit) : m_(m), saved_(m.node_limit()) {
    if (limit != 0) m_.set_node_limit(limit);
  }
  ~NodeLimitScope() { m_.set_node_limit(saved_); }

 private:
  AigManager& m_;
  std::size_t saved_;
};

void fill_sizes(AigManager& m, const SkolemVector& v, RunStats& stats) {
  if (v.psi.empty()) return;
  std::size_t total = 0;
  for (NodeRef r : v.psi) {
    const std::size_t s = m.node_count(r);
    total += s;
    stats.max_size = std::max(stats.max_size, s);
  }
  stats.avg_size = static_cast<double>(total) / static_cast<double>(v.psi.size());
}

SkolemVector reverse_substitute_impl(AigManager& m, std::span<const VarId> x_order,
                                     SkolemVector v, const Deadline& deadline) {
  const std::size_t n = v.psi.size();
  for (std::size_t i = n; i-- > 1;) {
    deadline.check();
    for (std::size_t k = i; k-- > 0;)
      v.psi[k] = m.compose(v.psi[k], x_order[i], v.psi[i]);
  }
  v.phase = SkolemPhase::y_only;
  return v;
}

std::vector<NodeRef> disjunctions(const std::vector<CbSet>& sets) {
  std::vector<NodeRef> out;
  out.reserve(sets.size());
  for (const auto& s : sets) out.push_back(s.disjunction());
  return out;
}

}  // namespace

const char* to_string(SynthStatus s) {
  switch (s) {
    case SynthStatus::ok: return "ok";
    case SynthStatus::timeout: return "timeout";
    case SynthStatus::node_budget: return "node-budget";
    case SynthStatus::refinement_budget: return "refinement-budget";
  }
  return "?";
}

SkolemVector reverse_substitute(AigManager& m, std::span<const VarId> x_order, SkolemVector v) {
  if (v.psi.size() != x_order.size())
    throw UsageError("reverse_substitute: vector length does not match x_order");
  return reverse_substitute_impl(m, x_order, std::move(v), Deadline{});
}

std::pair<CbState, SkolemVector> init_abs_ref(FactoredSpec& spec) {
  AigManager& m = *spec.mgr;
  const std::size_t n = spec.x_order.size();
  CbState state;
  state.cbr0.resize(n);
  state.cbr1.resize(n);

  for (NodeRef factor : spec.factors) {
    NodeRef f = factor;
    for (std::size_t i = 0; i < n; ++i) {
      const VarId xi = spec.x_order[i];
      if (!m.support_contains(f, xi)) continue;
      const NodeRef pos = m.cofactor(f, xi, true);
      const NodeRef neg = m.cofactor(f, xi, false);
      state.cbr0[i].insert(m, m.mk_not(neg));
      state.cbr1[i].insert(m, m.mk_not(pos));
      f = m.compose(f, xi, pos);  // equals (exists xi . f)
    }
  }
  SkolemVector initial = state.abstract_vector(m);
  return {std::move(state), std::move(initial)};
}

ErrorFormula build_error_formula(FactoredSpec& spec, const SkolemVector& psi,
                                 const std::unordered_map<VarId, VarId>* reuse_primed) {
  AigManager& m = *spec.mgr;
  const std::size_t n = spec.x_order.size();
  if (psi.psi.size() != n)
    throw UsageError("build_error_formula: vector length does not match x_order");

  ErrorFormula ef;
  if (reuse_primed) {
    ef.primed = *reuse_primed;
  } else {
    for (VarId x : spec.x_order) {
      const VarId fresh = m.fresh_var();
      m.mk_var(fresh);
      m.set_var_name(fresh, m.var_name(x) + "'");
      ef.primed.emplace(x, fresh);
    }
  }

  const NodeRef f_all = m.mk_big_and(spec.factors);
  NodeRef f_primed = f_all;
  for (VarId x : spec.x_order)
    f_primed = m.compose(f_primed, x, m.mk_var(ef.primed.at(x)));

  std::vector<NodeRef> conjuncts;
  conjuncts.reserve(n + 2);
  conjuncts.push_back(f_primed);
  for (std::size_t i = 0; i < n; ++i)
    conjuncts.push_back(m.mk_iff(m.mk_var(spec.x_order[i]), psi.psi[i]));
  conjuncts.push_back(m.mk_not(f_all));
  ef.root = m.mk_big_and(conjuncts);
  return ef;
}

NodeRef generalize(AigManager& m, const Assignment& pi, const CbSet& set, NodeRef mu_other,
                   GeneralizeStrategy strategy) {
  const NodeRef disj = set.disjunction();
  if (!m.eval(disj, pi))
    throw InternalError("generalize: assignment does not satisfy the set");

  switch (strategy) {
    case GeneralizeStrategy::whole:
      return disj;
    case GeneralizeStrategy::cube: {
      std::vector<NodeRef> lits;
      for (VarId v : m.support(disj)) {
        const NodeRef leaf = m.mk_var(v);
        lits.push_back(pi.value(v) ? leaf : m.mk_not(leaf));
      }
      return m.mk_big_and(lits);
    }
    case GeneralizeStrategy::element: {
      const auto& other_supp = m.support(mu_other);
      NodeRef best;
      std::size_t best_union = 0, best_nodes = 0;
      bool have = false;
      for (NodeRef e : set.elements()) {
        if (!m.eval(e, pi)) continue;
        const auto& se = m.support(e);
        std::vector<VarId> u;
        std::set_union(se.begin(), se.end(), other_supp.begin(), other_supp.end(),
                       std::back_inserter(u));
        const std::size_t nodes = m.node_count(e);
        if (!have || u.size() < best_union ||
            (u.size() == best_union && nodes < best_nodes)) {
          best = e;
          best_union = u.size();
          best_nodes = nodes;
          have = true;
        }
      }
      if (!have) throw InternalError("generalize: no element satisfied by the assignment");
      return best;
    }
  }
  throw InternalError("generalize: unknown strategy");
}

std::size_t update_abs_ref(FactoredSpec& spec, CbState& state, const Assignment& pi,
                           GeneralizeStrategy strategy) {
  AigManager& m = *spec.mgr;
  const std::size_t n = spec.x_order.size();

  // largest position whose two refinement sets are both satisfied
  std::size_t k = n;
  for (std::size_t i = n; i-- > 0;) {
    if (m.eval(state.cbr0[i].disjunction(), pi) && m.eval(state.cbr1[i].disjunction(), pi)) {
      k = i;
      break;
    }
  }
  if (k == n)
    throw InternalError("update_abs_ref: no pivot position; counterexample is inconsistent");

  NodeRef mu0 = generalize(m, pi, state.cbr0[k], AigManager::true_ref(), strategy);
  NodeRef mu1 = generalize(m, pi, state.cbr1[k], mu0, strategy);
  NodeRef mu = m.mk_and(mu0, mu1);

  for (std::size_t l = k + 1;; ++l) {
    if (l >= n)
      throw InternalError("update_abs_ref: refinement scan ran past the last variable");
    const VarId xl = spec.x_order[l];
    if (!m.support_contains(mu, xl)) continue;
    if (pi.value(xl)) {
      mu1 = m.cofactor(mu, xl, true);
      state.cbr1[l].insert(m, mu1);
      if (m.eval(state.cbr0[l].disjunction(), pi)) {
        mu0 = generalize(m, pi, state.cbr0[l], mu1, strategy);
        mu = m.mk_and(mu0, mu1);
      } else {
        break;
      }
    } else {
      mu0 = m.cofactor(mu, xl, false);
      state.cbr0[l].insert(m, mu0);
      // holds because pi satisfies x_l <-> not cbr1[l]; assert, don't assume
      if (!m.eval(state.cbr1[l].disjunction(), pi))
        throw InternalError("update_abs_ref: cbr1 not satisfied on the 0-branch");
      mu1 = generalize(m, pi, state.cbr1[l], mu0, strategy);
      mu = m.mk_and(mu0, mu1);
    }
  }
  return k;
}

SynthResult mono_skolem(FactoredSpec& spec, const EngineOptions& opts) {
  AigManager& m = *spec.mgr;
  const std::size_t n = spec.x_order.size();
  if (n == 0) throw UsageError("mono_skolem: empty existential block");

  SynthResult result;
  const auto start = Clock::now();
  const Deadline deadline = Deadline::in(opts.time_limit_s);
  NodeLimitScope limit(m, opts.node_limit);

  try {
    std::vector<NodeRef> factors;
    bool falsum = false;
    for (NodeRef f : spec.factors) {
      if (f == AigManager::false_ref()) falsum = true;
      if (f != AigManager::true_ref()) factors.push_back(f);
    }
    if (falsum) {
      // F is constant false; the all-FALSE vector is vacuously a Skolem
      // vector and short-circuits the variable loop, which would otherwise
      // never see the empty-support factor.
      result.vector.phase = SkolemPhase::y_only;
      result.vector.psi.assign(n, AigManager::false_ref());
      result.status = SynthStatus::ok;
      result.stats.total_seconds = std::chrono::duration<double>(Clock::now() - start).count();
      return result;
    }

    SkolemVector chained;
    chained.phase = SkolemPhase::chained;
    chained.psi.assign(n, AigManager::true_ref());

    for (std::size_t i = 0; i < n; ++i) {
      deadline.check();
      const VarId xi = spec.x_order[i];
      std::vector<NodeRef> with_xi, rest;
      for (NodeRef f : factors)
        (m.support_contains(f, xi) ? with_xi : rest).push_back(f);
      if (with_xi.empty()) continue;  // psi stays TRUE
      const NodeRef fi = m.mk_big_and(with_xi);
      chained.psi[i] = m.cofactor(fi, xi, true);  // the complement of Cb1
      const NodeRef eliminated = m.compose(fi, xi, chained.psi[i]);
      factors = std::move(rest);
      if (eliminated != AigManager::true_ref()) factors.push_back(eliminated);
    }

    m.clear_op_caches();  // phase boundary
    result.vector = reverse_substitute_impl(m, spec.x_order, std::move(chained), deadline);
    result.status = SynthStatus::ok;
    fill_sizes(m, result.vector, result.stats);
  } catch (const TimeoutSignal&) {
    result.status = SynthStatus::timeout;
  } catch (const NodeLimitError&) {
    result.status = SynthStatus::node_budget;
  }
  m.clear_op_caches();
  result.stats.total_seconds = std::chrono::duration<double>(Clock::now() - start).count();
  return result;
}

SynthResult cegar_skolem(FactoredSpec& spec, SatOracle& oracle, const EngineOptions& opts) {
  AigManager& m = *spec.mgr;

  SynthResult result;
  const auto start = Clock::now();
  const Deadline deadline = Deadline::in(opts.time_limit_s);
  NodeLimitScope limit(m, opts.node_limit);
  const std::uint64_t calls_before = oracle.num_calls();
  const double sat_before = oracle.seconds();

  try {
    auto [state, psi_a] = init_abs_ref(spec);
    m.clear_op_caches();  // phase boundary

    // X' and the static error-formula core stay fixed across iterations, so
    // the incremental CNF encoder pays for them exactly once.
    std::optional<std::unordered_map<VarId, VarId>> primed;
    TseitinEncoder encoder(m);

    while (true) {
      deadline.check();
      ErrorFormula ef = build_error_formula(spec, psi_a, primed ? &*primed : nullptr);
      if (!primed) primed = ef.primed;

      const Cnf query = encoder.query(std::span<const NodeRef>(&ef.root, 1));
      const SatResult sat = oracle.solve(query);
      if (sat.status == SatStatus::unsat) {
        if (opts.record_trace) result.final_error_root = ef.root;
        break;
      }
      if (result.stats.refinements >= opts.max_refinements) {
        result.status = SynthStatus::refinement_budget;
        break;
      }

      // Total counterexample over X' + X + Y; don't-cares complete with 0.
      Assignment pi;
      const auto& var_to_cnf = encoder.var_to_cnf();
      auto project = [&](VarId v) {
        auto it = var_to_cnf.find(v);
        pi.set(v, it != var_to_cnf.end() && sat.model.value(static_cast<VarId>(it->second)));
      };
      for (VarId x : spec.x_order) {
        project(x);
        project(primed->at(x));
      }
      for (VarId y : spec.y_vars) project(y);

      if (!m.eval(ef.root, pi))
        throw InternalError("cegar: oracle model does not satisfy the error formula");

      RefinementRecord record;
      if (opts.record_trace) {
        record.cex = pi;
        record.error_root = ef.root;
        record.cbr0_before = disjunctions(state.cbr0);
        record.cbr1_before = disjunctions(state.cbr1);
      }

      const std::size_t pivot = update_abs_ref(spec, state, pi, opts.generalize);
      ++result.stats.refinements;
      psi_a = state.abstract_vector(m);

      if (opts.record_trace) {
        record.pivot = pivot;
        record.cbr0_after = disjunctions(state.cbr0);
        record.cbr1_after = disjunctions(state.cbr1);
        result.trace.push_back(std::move(record));
      }
    }

    if (result.status == SynthStatus::ok) {
      result.final_cbr0 = disjunctions(state.cbr0);
      result.final_cbr1 = disjunctions(state.cbr1);
      m.clear_op_caches();  // phase boundary
      result.vector = reverse_substitute_impl(m, spec.x_order, std::move(psi_a), deadline);
      fill_sizes(m, result.vector, result.stats);
    }
  } catch (const TimeoutSignal&) {
    result.status = SynthStatus::timeout;
  } catch (const NodeLimitError&) {
    result.status = SynthStatus::node_budget;
  }
  m.clear_op_caches();
  result.stats.sat_calls = oracle.num_calls() - calls_before;
  result.stats.sat_seconds = oracle.seconds() - sat_before;
  result.stats.total_seconds = std::chrono::duration<double>(Clock::now() - start).count();
  return result;
}

}  // namespace sksynth
