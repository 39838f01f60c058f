#include "sksynth/verify.hpp"

#include <algorithm>
#include <atomic>

#include "sksynth/errors.hpp"

namespace sksynth {

namespace {

void require_y_only(FactoredSpec& spec, const SkolemVector& psi) {
  if (psi.phase != SkolemPhase::y_only)
    throw UsageError("exhaustive certification requires a Y-only vector");
  if (psi.psi.size() != spec.x_order.size())
    throw UsageError("vector length does not match x_order");
  for (NodeRef r : psi.psi)
    for (VarId v : spec.mgr->support(r))
      if (!std::binary_search(spec.y_vars.begin(), spec.y_vars.end(), v))
        throw UsageError("vector is tagged Y-only but mentions variable " +
                         spec.mgr->var_name(v));
}

std::uint64_t broadcast(bool b) { return b ? ~std::uint64_t(0) : 0; }

}  // namespace

bool certify_sat(FactoredSpec& spec, const SkolemVector& psi, SatOracle& oracle) {
  ErrorFormula ef = build_error_formula(spec, psi);
  const TseitinResult enc = tseitin_cnf(*spec.mgr, std::span<const NodeRef>(&ef.root, 1));
  return oracle.solve(enc.cnf).status == SatStatus::unsat;
}

bool certify_exhaustive(FactoredSpec& spec, const SkolemVector& psi, SatOracle& oracle,
                        const VerifyLimits& limits) {
  require_y_only(spec, psi);
  AigManager& m = *spec.mgr;
  const auto& x = spec.x_order;
  const auto& y = spec.y_vars;
  if (y.size() > limits.max_y)
    throw BoundError("|Y| = " + std::to_string(y.size()) + " exceeds the exhaustive bound");

  const NodeRef f_all = m.mk_big_and(spec.factors);

  if (x.size() > limits.max_x) {
    // SAT fallback for the inner exists; the Y sweep stays serial because a
    // single oracle instance serves all rows.
    TseitinEncoder encoder(m);
    std::vector<NodeRef> roots{f_all};
    const Cnf base = encoder.query(roots);
    const auto& var_to_cnf = encoder.var_to_cnf();
    const std::size_t y_rows = std::size_t(1) << y.size();
    for (std::size_t r = 0; r < y_rows; ++r) {
      Assignment ay;
      for (std::size_t j = 0; j < y.size(); ++j) ay.set(y[j], (r >> j) & 1u);
      Assignment full = ay;
      for (std::size_t i = 0; i < x.size(); ++i) full.set(x[i], m.eval(psi.psi[i], ay));
      const bool substituted = m.eval(f_all, full);
      Cnf query = base;
      for (std::size_t j = 0; j < y.size(); ++j) {
        auto it = var_to_cnf.find(y[j]);
        if (it == var_to_cnf.end()) continue;  // y_j not in F's cone
        query.add_clause({((r >> j) & 1u) ? it->second : -it->second});
      }
      const bool exists = oracle.solve(query).status == SatStatus::sat;
      if (substituted != exists) return false;
    }
    return true;
  }

  // Enumeration path: parallel sweep over Y rows; the inner exists runs 64
  // X rows per cone evaluation.
  std::vector<VarId> xy(x.begin(), x.end());
  xy.insert(xy.end(), y.begin(), y.end());
  const Cone cone_f(m, std::span<const NodeRef>(&f_all, 1), xy);
  const Cone cone_psi(m, psi.psi, y);

  const std::size_t nx = x.size();
  const std::size_t y_rows = std::size_t(1) << y.size();
  const std::size_t x_blocks = nx <= 6 ? 1 : (std::size_t(1) << (nx - 6));
  const std::uint64_t x_mask =
      nx >= 6 ? ~std::uint64_t(0) : ((std::uint64_t(1) << (std::size_t(1) << nx)) - 1);

  std::atomic<bool> ok{true};
#pragma omp parallel if (y_rows > 128)
  {
    Cone::Scratch s_psi, s_f;
    std::vector<std::uint64_t> leaf_psi(y.size());
    std::vector<std::uint64_t> leaf_f(xy.size());
    std::vector<std::uint64_t> x_vals(nx);
    std::uint64_t out[1];
#pragma omp for schedule(dynamic, 64)
    for (std::int64_t r = 0; r < static_cast<std::int64_t>(y_rows); ++r) {
      if (!ok.load(std::memory_order_relaxed)) continue;
      const auto row = static_cast<std::size_t>(r);
      for (std::size_t j = 0; j < y.size(); ++j) leaf_psi[j] = broadcast((row >> j) & 1u);
      cone_psi.eval_words(leaf_psi, s_psi, x_vals);

      // F with X substituted by the vector's values for this Y row
      for (std::size_t i = 0; i < nx; ++i) leaf_f[i] = x_vals[i];
      for (std::size_t j = 0; j < y.size(); ++j) leaf_f[nx + j] = leaf_psi[j];
      cone_f.eval_words(leaf_f, s_f, out);
      const bool substituted = out[0] & 1u;

      bool exists = false;
      for (std::size_t xb = 0; xb < x_blocks && !exists; ++xb) {
        for (std::size_t i = 0; i < nx; ++i) leaf_f[i] = leaf_word(i, xb);
        cone_f.eval_words(leaf_f, s_f, out);
        exists = (out[0] & x_mask) != 0;
      }
      if (substituted != exists) ok.store(false, std::memory_order_relaxed);
    }
  }
  return ok.load();
}

bool certify_exhaustive_serial(FactoredSpec& spec, const SkolemVector& psi,
                               const VerifyLimits& limits) {
  require_y_only(spec, psi);
  AigManager& m = *spec.mgr;
  const auto& x = spec.x_order;
  const auto& y = spec.y_vars;
  if (y.size() > limits.max_y)
    throw BoundError("|Y| = " + std::to_string(y.size()) + " exceeds the exhaustive bound");
  if (x.size() > limits.max_x)
    throw BoundError("|X| = " + std::to_string(x.size()) +
                     " exceeds the enumeration bound of the reference checker");

  const NodeRef f_all = m.mk_big_and(spec.factors);
  const std::size_t y_rows = std::size_t(1) << y.size();
  const std::size_t x_rows = std::size_t(1) << x.size();
  for (std::size_t r = 0; r < y_rows; ++r) {
    Assignment ay;
    for (std::size_t j = 0; j < y.size(); ++j) ay.set(y[j], (r >> j) & 1u);
    Assignment full = ay;
    for (std::size_t i = 0; i < x.size(); ++i) full.set(x[i], m.eval(psi.psi[i], ay));
    const bool substituted = m.eval(f_all, full);
    bool exists = false;
    for (std::size_t xr = 0; xr < x_rows && !exists; ++xr) {
      Assignment ax = ay;
      for (std::size_t i = 0; i < x.size(); ++i) ax.set(x[i], (xr >> i) & 1u);
      exists = m.eval(f_all, ax);
    }
    if (substituted != exists) return false;
  }
  return true;
}

std::vector<VarId> cb_table_vars(const FactoredSpec& spec, std::size_t position) {
  std::vector<VarId> outer(spec.x_order.begin() + static_cast<std::ptrdiff_t>(position) + 1,
                           spec.x_order.end());
  outer.insert(outer.end(), spec.y_vars.begin(), spec.y_vars.end());
  return outer;
}

namespace {

template <typename ExistsFn>
TruthTable exact_cb_impl(FactoredSpec& spec, std::size_t position, bool bit,
                         ExistsFn&& exists_fn) {
  if (position >= spec.x_order.size()) throw UsageError("exact_cb: position out of range");
  if (spec.x_order.size() + spec.y_vars.size() > 16)
    throw BoundError("exact_cb is bounded at |X| + |Y| <= 16");
  AigManager& m = *spec.mgr;
  const NodeRef f_all = m.mk_big_and(spec.factors);
  const std::vector<VarId> inner(spec.x_order.begin(),
                                 spec.x_order.begin() + static_cast<std::ptrdiff_t>(position));
  const std::vector<VarId> outer = cb_table_vars(spec, position);
  const std::pair<VarId, bool> pin[1] = {{spec.x_order[position], bit}};
  return exists_fn(m, f_all, inner, outer, pin).negated();
}

}  // namespace

TruthTable exact_cb(FactoredSpec& spec, std::size_t position, bool bit) {
  return exact_cb_impl(spec, position, bit,
                       [](const AigManager& m, NodeRef f, std::span<const VarId> inner,
                          std::span<const VarId> outer,
                          std::span<const std::pair<VarId, bool>> pin) {
                         return exists_table(m, f, inner, outer, pin);
                       });
}

TruthTable exact_cb_serial(FactoredSpec& spec, std::size_t position, bool bit) {
  return exact_cb_impl(spec, position, bit,
                       [](const AigManager& m, NodeRef f, std::span<const VarId> inner,
                          std::span<const VarId> outer,
                          std::span<const std::pair<VarId, bool>> pin) {
                         return exists_table_serial(m, f, inner, outer, pin);
                       });
}

bool in_skolem_space(FactoredSpec& spec, std::size_t position, NodeRef psi) {
  if (position >= spec.x_order.size())
    throw UsageError("in_skolem_space: position out of range");
  if (spec.x_order.size() + spec.y_vars.size() > 16)
    throw BoundError("in_skolem_space is bounded at |X| + |Y| <= 16");
  AigManager& m = *spec.mgr;
  const NodeRef f_all = m.mk_big_and(spec.factors);
  const std::vector<VarId> inner(spec.x_order.begin(),
                                 spec.x_order.begin() + static_cast<std::ptrdiff_t>(position));
  const std::vector<VarId> outer = cb_table_vars(spec, position);
  for (VarId v : m.support(psi)) {
    if (std::find(outer.begin(), outer.end(), v) == outer.end())
      throw UsageError("candidate mentions " + m.var_name(v) +
                       ", outside {x_{i+1}..x_n} + Y");
  }

  const std::pair<VarId, bool> pin1[1] = {{spec.x_order[position], true}};
  const std::pair<VarId, bool> pin0[1] = {{spec.x_order[position], false}};
  const TruthTable a = exists_table(m, f_all, inner, outer, pin1);
  const TruthTable b = exists_table(m, f_all, inner, outer, pin0);
  const TruthTable p = truth_table(m, psi, outer);
  for (std::size_t w = 0; w < p.words.size(); ++w) {
    const std::uint64_t lower = a.words[w] & ~b.words[w];   // must imply psi
    const std::uint64_t not_upper = ~a.words[w] & b.words[w];  // psi must avoid
    if ((lower & ~p.words[w]) != 0) return false;
    if ((p.words[w] & not_upper) != 0) return false;
  }
  return true;
}

}  // namespace sksynth
