#include "sksynth/truth_table.hpp"

#include "doctest.h"
#include "test_util.hpp"

using namespace sksynth;

TEST_CASE("lane patterns enumerate rows in order") {
  // row r = block*64 + lane; bit j of r must equal lane j's word bit
  for (std::size_t j = 0; j < 8; ++j) {
    for (std::size_t block = 0; block < 4; ++block) {
      const std::uint64_t w = leaf_word(j, block);
      for (std::size_t lane = 0; lane < 64; ++lane) {
        const std::size_t row = block * 64 + lane;
        CHECK(((w >> lane) & 1u) == ((row >> j) & 1u));
      }
    }
  }
}

TEST_CASE("fast table agrees with the serial reference") {
  std::mt19937_64 rng(101);
  for (std::size_t nvars : {0u, 1u, 3u, 5u, 6u, 7u, 9u}) {
    std::vector<VarId> vars;
    for (std::size_t j = 0; j < nvars; ++j) vars.push_back(static_cast<VarId>(j + 1));
    for (int t = 0; t < 10; ++t) {
      AigManager m;
      for (VarId v : vars) m.mk_var(v);
      const NodeRef f = vars.empty()
                            ? (t % 2 ? AigManager::true_ref() : AigManager::false_ref())
                            : testutil::build_aig(m, *testutil::random_expr(rng, vars, 5));
      CHECK(truth_table(m, f, vars) == truth_table_serial(m, f, vars));
    }
  }
}

TEST_CASE("parallel-sized table agrees with the serial reference") {
  std::mt19937_64 rng(103);
  std::vector<VarId> vars;
  for (VarId v = 1; v <= 15; ++v) vars.push_back(v);
  AigManager m;
  const NodeRef f = testutil::build_aig(m, *testutil::random_expr(rng, vars, 8));
  CHECK(truth_table(m, f, vars) == truth_table_serial(m, f, vars));  // 512 words
}

TEST_CASE("exists_table projects correctly") {
  std::mt19937_64 rng(107);
  const std::vector<VarId> inner{1, 2};
  const std::vector<VarId> outer{3, 4, 5};
  const std::vector<VarId> all{1, 2, 3, 4, 5};
  for (int t = 0; t < 20; ++t) {
    AigManager m;
    const auto e = testutil::random_expr(rng, all, 5);
    const NodeRef f = testutil::build_aig(m, *e);
    const TruthTable fast = exists_table(m, f, inner, outer);
    CHECK(fast == exists_table_serial(m, f, inner, outer));
    // spot-check against direct enumeration
    for (std::size_t o = 0; o < 8; ++o) {
      bool any = false;
      for (std::size_t i = 0; i < 4 && !any; ++i) {
        Assignment pi = testutil::row_assignment(outer, o);
        pi.set(1, i & 1u);
        pi.set(2, (i >> 1) & 1u);
        any = m.eval(f, pi);
      }
      CHECK(fast.get(o) == any);
    }
  }
}

TEST_CASE("pinned variables are folded to constants") {
  std::mt19937_64 rng(109);
  const std::vector<VarId> all{1, 2, 3, 4};
  for (int t = 0; t < 20; ++t) {
    AigManager m;
    const NodeRef f = testutil::build_aig(m, *testutil::random_expr(rng, all, 4));
    const std::vector<VarId> inner{1};
    const std::vector<VarId> outer{3, 4};
    const std::pair<VarId, bool> pin[1] = {{2, static_cast<bool>(t % 2)}};
    const TruthTable a = exists_table(m, f, inner, outer, pin);
    const TruthTable b = exists_table_serial(m, f, inner, outer, pin);
    CHECK(a == b);
  }
}

TEST_CASE("semantic equality distinguishes xor encodings") {
  AigManager m;
  const NodeRef x = m.mk_var(1), y = m.mk_var(2);
  const NodeRef viaOr = m.mk_or(m.mk_and(x, m.mk_not(y)), m.mk_and(m.mk_not(x), y));
  const NodeRef viaAnd = m.mk_and(m.mk_or(x, y), m.mk_not(m.mk_and(x, y)));
  CHECK(semantically_equal(m, viaOr, viaAnd));
  CHECK(!semantically_equal(m, viaOr, m.mk_or(x, y)));
}

TEST_CASE("negated tables flip every row") {
  AigManager m;
  const NodeRef g = m.mk_and(m.mk_var(1), m.mk_var(2));
  const std::vector<VarId> vars{1, 2};
  const TruthTable t = truth_table(m, g, vars);
  const TruthTable nt = t.negated();
  for (std::size_t r = 0; r < t.rows(); ++r) CHECK(t.get(r) != nt.get(r));
  CHECK(nt.negated() == t);
}
