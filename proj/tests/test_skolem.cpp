#include "sksynth/skolem.hpp"

#include <fstream>
#include <sstream>

#include "doctest.h"
#include "sksynth/random_spec.hpp"
#include "sksynth/truth_table.hpp"
#include "sksynth/verify.hpp"
#include "test_util.hpp"

using namespace sksynth;

namespace {

std::string read_fixture(const char* name) {
  std::ifstream in(std::string(TEST_DATA_DIR) + "/" + name);
  REQUIRE(in.good());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

FactoredSpec golden() { return parse_qdimacs(read_fixture("golden.qdimacs")); }

// ids of the golden instance
constexpr VarId kX1 = 1, kX2 = 2, kY1 = 3, kY2 = 4, kY3 = 5;

NodeRef not_y1_or_not_y3(AigManager& m) {
  return m.mk_or(m.mk_not(m.mk_var(kY1)), m.mk_not(m.mk_var(kY3)));
}
NodeRef not_y1_or_y3(AigManager& m) {
  return m.mk_or(m.mk_not(m.mk_var(kY1)), m.mk_var(kY3));
}

// the counterexample published for the golden instance:
// y1=1, y2=1, y3=0, x1=0, x2=1, x1'=0, x2'=0
Assignment golden_cex(const ErrorFormula& ef) {
  Assignment pi;
  pi.set(kY1, true);
  pi.set(kY2, true);
  pi.set(kY3, false);
  pi.set(kX1, false);
  pi.set(kX2, true);
  pi.set(ef.primed.at(kX1), false);
  pi.set(ef.primed.at(kX2), false);
  return pi;
}

}  // namespace

TEST_CASE("mono: golden instance") {
  FactoredSpec spec = golden();
  const SynthResult r = mono_skolem(spec);
  REQUIRE(r.status == SynthStatus::ok);
  REQUIRE(r.vector.phase == SkolemPhase::y_only);
  REQUIRE(r.vector.psi.size() == 2);
  AigManager& m = *spec.mgr;
  CHECK(semantically_equal(m, r.vector.psi[0], not_y1_or_not_y3(m)));
  CHECK(semantically_equal(m, r.vector.psi[1], not_y1_or_y3(m)));
}

TEST_CASE("mono: single conjunctive factor") {
  FactoredSpec spec = parse_factored("var x1:x; var y1:y; x1 & y1;");
  const SynthResult r = mono_skolem(spec);
  REQUIRE(r.status == SynthStatus::ok);
  CHECK(semantically_equal(*spec.mgr, r.vector.psi[0], spec.mgr->mk_var(2)));
}

TEST_CASE("mono: constant-false factor forces the all-false vector") {
  FactoredSpec spec = parse_qdimacs("p cnf 2 2\ne 1 2 0\n1 0\n0\n");
  const SynthResult r = mono_skolem(spec);
  REQUIRE(r.status == SynthStatus::ok);
  CHECK(r.vector.psi == std::vector<NodeRef>(2, AigManager::false_ref()));
  SatOracle oracle;
  CHECK(certify_sat(spec, r.vector, oracle));  // vacuously valid
}

TEST_CASE("mono: empty existential block is a usage error") {
  FactoredSpec spec = parse_qdimacs("p cnf 1 1\n1 0\n");
  CHECK_THROWS_AS(mono_skolem(spec), UsageError);
}

TEST_CASE("reverse substitution") {
  FactoredSpec spec = golden();
  AigManager& m = *spec.mgr;

  SUBCASE("golden chained pair") {
    SkolemVector v;
    v.phase = SkolemPhase::chained;
    v.psi = {m.mk_or(m.mk_not(m.mk_var(kX2)), m.mk_not(m.mk_var(kY1))), not_y1_or_y3(m)};
    const SkolemVector out = reverse_substitute(m, spec.x_order, v);
    CHECK(out.phase == SkolemPhase::y_only);
    CHECK(semantically_equal(m, out.psi[0], not_y1_or_not_y3(m)));
    CHECK(semantically_equal(m, out.psi[1], not_y1_or_y3(m)));
  }

  SUBCASE("already Y-only vectors pass through unchanged") {
    SkolemVector v;
    v.phase = SkolemPhase::chained;
    v.psi = {not_y1_or_not_y3(m), not_y1_or_y3(m)};
    const SkolemVector out = reverse_substitute(m, spec.x_order, v);
    CHECK(out.psi[0] == v.psi[0]);
    CHECK(out.psi[1] == v.psi[1]);
  }

  SUBCASE("single variable passes through") {
    SkolemVector v;
    v.phase = SkolemPhase::chained;
    v.psi = {m.mk_var(kY1)};
    const std::vector<VarId> order{kX1};
    CHECK(reverse_substitute(m, order, v).psi[0] == m.mk_var(kY1));
  }
}

TEST_CASE("initial abstraction on the golden instance") {
  FactoredSpec spec = golden();
  AigManager& m = *spec.mgr;
  auto [state, psi_a] = init_abs_ref(spec);

  REQUIRE(state.cbr0.size() == 2);
  const NodeRef x2y1 = m.mk_and(m.mk_var(kX2), m.mk_var(kY1));
  const NodeRef x2ny3 = m.mk_and(m.mk_var(kX2), m.mk_not(m.mk_var(kY3)));
  const NodeRef y2y3 = m.mk_and(m.mk_var(kY2), m.mk_var(kY3));

  CHECK(state.cbr1[0].elements().size() == 1);
  CHECK(semantically_equal(m, state.cbr1[0].disjunction(), x2y1));
  CHECK(state.cbr0[0].elements().size() == 1);
  CHECK(semantically_equal(m, state.cbr0[0].disjunction(), x2ny3));
  CHECK(state.cbr1[1].empty());
  CHECK(state.cbr1[1].disjunction() == AigManager::false_ref());
  CHECK(semantically_equal(m, state.cbr0[1].disjunction(), y2y3));

  CHECK(semantically_equal(m, psi_a.psi[0],
                           m.mk_or(m.mk_not(m.mk_var(kX2)), m.mk_not(m.mk_var(kY1)))));
  CHECK(psi_a.psi[1] == AigManager::true_ref());
}

TEST_CASE("initial abstraction edge cases") {
  SUBCASE("no factors") {
    FactoredSpec spec = parse_factored("var x1:x; var x2:x;");
    auto [state, psi_a] = init_abs_ref(spec);
    for (std::size_t i = 0; i < 2; ++i) {
      CHECK(state.cbr0[i].empty());
      CHECK(state.cbr1[i].empty());
      CHECK(psi_a.psi[i] == AigManager::true_ref());
    }
  }

  SUBCASE("one factor per variable is already correct") {
    FactoredSpec spec = parse_factored("var x1:x; var x2:x; var y1:y; var y2:y;"
                                       "(x1 | y1); (x2 | y2);");
    auto [state, psi_a] = init_abs_ref(spec);
    SatOracle oracle;
    CHECK(certify_sat(spec, psi_a, oracle));
    const SynthResult r = cegar_skolem(spec, oracle);
    CHECK(r.stats.refinements == 0);
  }
}

TEST_CASE("error formula on the golden instance") {
  FactoredSpec spec = golden();
  AigManager& m = *spec.mgr;
  auto [state, psi_a] = init_abs_ref(spec);
  ErrorFormula ef = build_error_formula(spec, psi_a);

  // the published counterexample satisfies the first error formula
  const Assignment pi = golden_cex(ef);
  CHECK(m.eval(ef.root, pi) == 1);

  SatOracle oracle;
  const TseitinResult enc = tseitin_cnf(m, std::span<const NodeRef>(&ef.root, 1));
  CHECK(oracle.solve(enc.cnf).status == SatStatus::sat);

  // the corrected vector renders it unsatisfiable
  SkolemVector fixed;
  fixed.phase = SkolemPhase::chained;
  fixed.psi = {m.mk_or(m.mk_not(m.mk_var(kX2)), m.mk_not(m.mk_var(kY1))), not_y1_or_y3(m)};
  ErrorFormula ef2 = build_error_formula(spec, fixed);
  const TseitinResult enc2 = tseitin_cnf(m, std::span<const NodeRef>(&ef2.root, 1));
  CHECK(oracle.solve(enc2.cnf).status == SatStatus::unsat);
}

TEST_CASE("error formula of a factor-free instance is constant false") {
  FactoredSpec spec = parse_factored("var x1:x; var y1:y;");
  SkolemVector v;
  v.phase = SkolemPhase::chained;
  v.psi = {AigManager::true_ref()};
  CHECK(build_error_formula(spec, v).root == AigManager::false_ref());
}

TEST_CASE("refinement sets drop false elements and duplicates") {
  AigManager m;
  CbSet set;
  CHECK(!set.insert(m, AigManager::false_ref()));
  const NodeRef g = m.mk_and(m.mk_var(1), m.mk_var(2));
  CHECK(set.insert(m, g));
  CHECK(!set.insert(m, g));  // structurally identical
  CHECK(set.insert(m, m.mk_not(g)));  // complement is a different element
  CHECK(set.elements().size() == 2);
  CHECK(set.disjunction() == AigManager::true_ref());  // g | !g folds
}

TEST_CASE("generalize strategies") {
  AigManager m;
  const NodeRef x2 = m.mk_var(kX2), y1 = m.mk_var(kY1), y2 = m.mk_var(kY2),
                y3 = m.mk_var(kY3);

  SUBCASE("singleton set") {
    CbSet set;
    set.insert(m, m.mk_and(x2, y1));
    Assignment pi;
    pi.set(kX2, true);
    pi.set(kY1, true);
    for (auto strat :
         {GeneralizeStrategy::cube, GeneralizeStrategy::whole, GeneralizeStrategy::element}) {
      const NodeRef g = generalize(m, pi, set, AigManager::true_ref(), strat);
      CHECK(m.eval(g, pi) == 1);
      CHECK(semantically_equal(m, g, m.mk_and(x2, y1)));
    }
  }

  SUBCASE("constant-true set") {
    CbSet set;
    set.insert(m, AigManager::true_ref());
    Assignment pi;
    for (auto strat :
         {GeneralizeStrategy::cube, GeneralizeStrategy::whole, GeneralizeStrategy::element}) {
      CHECK(generalize(m, pi, set, AigManager::true_ref(), strat) ==
            AigManager::true_ref());
    }
  }

  SUBCASE("element strategy minimizes the joint support") {
    CbSet set;
    set.insert(m, m.mk_and(y1, m.mk_not(y3)));
    set.insert(m, y2);
    Assignment pi;
    pi.set(kY1, true);
    pi.set(kY2, true);
    pi.set(kY3, false);
    CHECK(generalize(m, pi, set, AigManager::true_ref(), GeneralizeStrategy::element) == y2);
    // with a context that already contains y1 and y3, the wide element wins
    const NodeRef ctx = m.mk_and(y1, y3);
    CHECK(generalize(m, pi, set, ctx, GeneralizeStrategy::element) ==
          m.mk_and(y1, m.mk_not(y3)));
  }

  SUBCASE("violated precondition is an internal error") {
    CbSet set;
    set.insert(m, y2);
    Assignment pi;
    pi.set(kY2, false);
    CHECK_THROWS_AS(generalize(m, pi, set, AigManager::true_ref(),
                               GeneralizeStrategy::element),
                    InternalError);
  }
}

TEST_CASE("generalize contract on random sets") {
  std::mt19937_64 rng(509);
  const std::vector<VarId> vars{3, 4, 5, 6};
  AigManager m;
  for (int t = 0; t < 60; ++t) {
    CbSet set;
    const int k = 1 + static_cast<int>(rng() % 3);
    for (int j = 0; j < k; ++j)
      set.insert(m, testutil::build_aig(m, *testutil::random_expr(rng, vars, 3)));
    if (set.disjunction() == AigManager::false_ref()) continue;
    // find a satisfying row
    const auto& supp = m.support(set.disjunction());
    std::size_t row = 0;
    bool found = false;
    for (; row < (std::size_t(1) << vars.size()); ++row) {
      if (m.eval(set.disjunction(), testutil::row_assignment(vars, row))) {
        found = true;
        break;
      }
    }
    if (!found) continue;
    const Assignment pi = testutil::row_assignment(vars, row);
    for (auto strat :
         {GeneralizeStrategy::cube, GeneralizeStrategy::whole, GeneralizeStrategy::element}) {
      const NodeRef g = generalize(m, pi, set, AigManager::true_ref(), strat);
      CHECK(m.eval(g, pi) == 1);
      // Supp(result) within Supp(disjunction)
      for (VarId v : m.support(g)) CHECK(std::binary_search(supp.begin(), supp.end(), v));
      // result implies the disjunction
      for (std::size_t r2 = 0; r2 < (std::size_t(1) << vars.size()); ++r2) {
        const Assignment a2 = testutil::row_assignment(vars, r2);
        if (m.eval(g, a2)) CHECK(m.eval(set.disjunction(), a2) == 1);
      }
    }
  }
}

TEST_CASE("refinement step on the golden counterexample") {
  FactoredSpec spec = golden();
  AigManager& m = *spec.mgr;
  auto [state, psi_a] = init_abs_ref(spec);
  ErrorFormula ef = build_error_formula(spec, psi_a);
  const Assignment pi = golden_cex(ef);
  REQUIRE(m.eval(ef.root, pi) == 1);

  const std::size_t pivot = update_abs_ref(spec, state, pi, GeneralizeStrategy::element);
  CHECK(pivot == 0);

  // cbr1 for the second variable gains y1 & !y3; everything else is unchanged
  REQUIRE(state.cbr1[1].elements().size() == 1);
  const NodeRef gained = state.cbr1[1].elements()[0];
  CHECK(semantically_equal(m, gained, m.mk_and(m.mk_var(kY1), m.mk_not(m.mk_var(kY3)))));
  CHECK(state.cbr1[0].elements().size() == 1);
  CHECK(state.cbr0[0].elements().size() == 1);
  CHECK(state.cbr0[1].elements().size() == 1);

  // the refined second component reads !y1 | y3 and now disagrees with pi
  const NodeRef psi2 = state.abstract_skolem(m, 1);
  CHECK(semantically_equal(m, psi2, not_y1_or_y3(m)));
  CHECK(m.eval(psi2, pi) == 0);
  CHECK(pi.value(kX2) == 1);  // so this counterexample cannot recur
}

TEST_CASE("cegar: golden instance end to end") {
  FactoredSpec spec = golden();
  SatOracle oracle;
  EngineOptions opts;
  opts.record_trace = true;
  const SynthResult r = cegar_skolem(spec, oracle, opts);
  REQUIRE(r.status == SynthStatus::ok);
  CHECK(r.stats.refinements == 1);
  CHECK(r.stats.sat_calls == 2);
  AigManager& m = *spec.mgr;
  CHECK(semantically_equal(m, r.vector.psi[0], not_y1_or_not_y3(m)));
  CHECK(semantically_equal(m, r.vector.psi[1], not_y1_or_y3(m)));
  REQUIRE(r.trace.size() == 1);
  CHECK(r.trace[0].pivot == 0);
  CHECK(m.eval(r.trace[0].error_root, r.trace[0].cex) == 1);
  // the used counterexample fails the next (final) error formula
  CHECK(m.eval(r.final_error_root, r.trace[0].cex) == 0);
}

TEST_CASE("cegar: zero factors terminate on the first check") {
  FactoredSpec spec = parse_factored("var x1:x; var x2:x; var y1:y;");
  SatOracle oracle;
  const SynthResult r = cegar_skolem(spec, oracle);
  REQUIRE(r.status == SynthStatus::ok);
  CHECK(r.stats.refinements == 0);
  CHECK(r.vector.psi == std::vector<NodeRef>(2, AigManager::true_ref()));
}

TEST_CASE("cegar: empty existential block") {
  FactoredSpec spec = parse_qdimacs("p cnf 2 1\n1 -2 0\n");
  REQUIRE(spec.x_order.empty());
  SatOracle oracle;
  const SynthResult r = cegar_skolem(spec, oracle);
  CHECK(r.status == SynthStatus::ok);
  CHECK(r.vector.psi.empty());
}

TEST_CASE("cegar: random instances always verify") {
  SatOracle oracle;
  for (std::uint64_t seed = 1000; seed < 1040; ++seed) {
    FactoredSpec spec = order_variables(parse_factored(random_factored_text(seed)));
    EngineOptions opts;
    const SynthResult r = cegar_skolem(spec, oracle, opts);
    REQUIRE(r.status == SynthStatus::ok);
    CHECK(certify_exhaustive_serial(spec, r.vector));
  }
}

TEST_CASE("budget exhaustion is reported, not computed through") {
  SUBCASE("refinement budget") {
    FactoredSpec spec = golden();
    SatOracle oracle;
    EngineOptions opts;
    opts.max_refinements = 0;
    CHECK(cegar_skolem(spec, oracle, opts).status == SynthStatus::refinement_budget);
  }
  SUBCASE("node budget") {
    FactoredSpec spec = golden();
    SatOracle oracle;
    EngineOptions opts;
    opts.node_limit = 20;
    CHECK(cegar_skolem(spec, oracle, opts).status == SynthStatus::node_budget);
    FactoredSpec spec2 = golden();
    CHECK(mono_skolem(spec2, opts).status == SynthStatus::node_budget);
  }
  SUBCASE("time budget") {
    FactoredSpec spec = golden();
    SatOracle oracle;
    EngineOptions opts;
    opts.time_limit_s = 1e-9;
    CHECK(cegar_skolem(spec, oracle, opts).status == SynthStatus::timeout);
    FactoredSpec spec2 = golden();
    CHECK(mono_skolem(spec2, opts).status == SynthStatus::timeout);
  }
}

TEST_CASE("cegar trace invariants on random instances") {
  SatOracle oracle;
  int refining_runs = 0;
  for (std::uint64_t seed = 2000; seed < 2200; ++seed) {
    FactoredSpec spec = order_variables(parse_factored(random_factored_text(seed)));
    EngineOptions opts;
    opts.record_trace = true;
    const SynthResult r = cegar_skolem(spec, oracle, opts);
    REQUIRE(r.status == SynthStatus::ok);
    if (r.trace.empty()) continue;
    ++refining_runs;
    AigManager& m = *spec.mgr;
    const std::size_t n = spec.x_order.size();

    for (std::size_t t = 0; t < r.trace.size(); ++t) {
      const auto& rec = r.trace[t];

      // chained support: cbr sets at position i only mention later variables
      for (std::size_t i = 0; i < n; ++i) {
        for (const NodeRef d : {rec.cbr0_after[i], rec.cbr1_after[i]}) {
          for (VarId v : m.support(d)) {
            bool later_x = false;
            for (std::size_t j = i + 1; j < n; ++j) later_x |= spec.x_order[j] == v;
            const bool in_y =
                std::binary_search(spec.y_vars.begin(), spec.y_vars.end(), v);
            CHECK((later_x || in_y));
          }
        }
      }

      // the sets only grow: old disjunction implies the new one
      for (std::size_t i = 0; i < n; ++i) {
        CHECK(semantically_equal(
            m, m.mk_or(m.mk_not(rec.cbr1_before[i]), rec.cbr1_after[i]),
            AigManager::true_ref()));
        CHECK(semantically_equal(
            m, m.mk_or(m.mk_not(rec.cbr0_before[i]), rec.cbr0_after[i]),
            AigManager::true_ref()));
      }

      // some cbr1 flips from unsatisfied to satisfied under the cex
      bool flipped = false;
      for (std::size_t i = 0; i < n; ++i)
        flipped |= !m.eval(rec.cbr1_before[i], rec.cex) && m.eval(rec.cbr1_after[i], rec.cex);
      CHECK(flipped);

      // the counterexample never satisfies the next error formula
      const NodeRef next =
          t + 1 < r.trace.size() ? r.trace[t + 1].error_root : r.final_error_root;
      CHECK(m.eval(next, rec.cex) == 0);
    }
  }
  CHECK(refining_runs > 5);  // the sample must actually exercise refinement
}
