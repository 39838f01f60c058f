#pragma once

#include "sksynth/skolem.hpp"
#include "sksynth/truth_table.hpp"

namespace sksynth {

struct VerifyLimits {
  std::size_t max_y = 20;  // hard bound on the Y sweep
  std::size_t max_x = 20;  // beyond this the inner exists goes through SAT
};

// SAT certification: the vector is a Skolem vector iff its error formula is
// unsatisfiable. Accepts chained or Y-only vectors.
bool certify_sat(FactoredSpec& spec, const SkolemVector& psi, SatOracle& oracle);

// Exhaustive certification of a Y-only vector: for every Y valuation,
// F(Psi(Y), Y) must equal (exists X . F)(Y). The inner exists enumerates X
// when |X| <= max_x and otherwise asks the oracle. The Y sweep is the
// OpenMP-parallel kernel; certify_exhaustive_serial is the plain reference.
bool certify_exhaustive(FactoredSpec& spec, const SkolemVector& psi, SatOracle& oracle,
                        const VerifyLimits& limits = {});
bool certify_exhaustive_serial(FactoredSpec& spec, const SkolemVector& psi,
                               const VerifyLimits& limits = {});

// Exact can't-be table by enumeration, with no reliance on the cofactor or
// composition machinery: (not exists x_1..x_{i-1} . F)[x_i := bit], tabulated
// over {x_{i+1}..x_n} + Y. `position` is 0-based into x_order. Instances are
// bounded at |X| + |Y| <= 16.
TruthTable exact_cb(FactoredSpec& spec, std::size_t position, bool bit);
TruthTable exact_cb_serial(FactoredSpec& spec, std::size_t position, bool bit);

// Variable order used by the exact_cb tables: {x_{i+1}..x_n} then Y.
std::vector<VarId> cb_table_vars(const FactoredSpec& spec, std::size_t position);

// Both inclusions of the Skolem-space characterization against
// F' = exists x_1..x_{i-1} . F:  F'[x:=1] & !F'[x:=0]  =>  psi  =>
// F'[x:=1] | !F'[x:=0]. Same bound as exact_cb.
bool in_skolem_space(FactoredSpec& spec, std::size_t position, NodeRef psi);

}  // namespace sksynth
