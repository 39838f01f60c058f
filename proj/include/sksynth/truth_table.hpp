#pragma once

#include <cstdint>
#include <span>
#include <utility>
#include <vector>

#include "sksynth/aig.hpp"

namespace sksynth {

// Bit table over an explicit variable order: row r assigns vars[j] the bit
// (r >> j) & 1. Bits are packed little-endian into 64-bit words.
struct TruthTable {
  std::vector<VarId> vars;
  std::vector<std::uint64_t> words;

  std::size_t rows() const { return std::size_t(1) << vars.size(); }
  bool get(std::size_t row) const { return (words[row >> 6] >> (row & 63)) & 1u; }
  void set(std::size_t row, bool v) {
    const std::uint64_t mask = std::uint64_t(1) << (row & 63);
    if (v)
      words[row >> 6] |= mask;
    else
      words[row >> 6] &= ~mask;
  }

  TruthTable negated() const {
    TruthTable t = *this;
    for (auto& w : t.words) w = ~w;
    if (t.vars.size() < 6) t.words.back() &= (std::uint64_t(1) << t.rows()) - 1;
    return t;
  }

  friend bool operator==(const TruthTable& a, const TruthTable& b) = default;
};

// Compact topologically ordered cone of one or more roots, for repeated
// evaluation without touching the manager. Evaluation is 64 rows at a time:
// each slot holds one 64-bit word, one lane per row. Pinned variables are
// folded to constants at build time.
//
// Slot layout: slot 0 is constant false, slots 1..L are the leaves in the
// order given, gate slots follow topologically.
class Cone {
 public:
  Cone(const AigManager& m, std::span<const NodeRef> roots, std::span<const VarId> leaves,
       std::span<const std::pair<VarId, bool>> pinned = {});

  std::size_t num_leaves() const { return num_leaves_; }
  std::size_t num_gates() const { return gates_.size(); }
  std::size_t num_roots() const { return roots_.size(); }

  struct Scratch {
    std::vector<std::uint64_t> slots;
  };

  // leaf_words[j] = value of leaf j in each of the 64 lanes.
  void eval_words(std::span<const std::uint64_t> leaf_words, Scratch& scratch,
                  std::span<std::uint64_t> roots_out) const;

 private:
  struct Gate {
    std::uint32_t a, b;  // encoded slot refs: slot*2 + complement
  };
  std::vector<Gate> gates_;
  std::vector<std::uint32_t> roots_;  // encoded slot refs
  std::size_t num_leaves_ = 0;
};

// Lane pattern of variable j < 6 inside a 64-row block.
inline constexpr std::uint64_t kLanePattern[6] = {
    0xaaaaaaaaaaaaaaaaull, 0xccccccccccccccccull, 0xf0f0f0f0f0f0f0f0ull,
    0xff00ff00ff00ff00ull, 0xffff0000ffff0000ull, 0xffffffff00000000ull,
};

// Word for vars[j] in 64-row block `block`.
inline std::uint64_t leaf_word(std::size_t j, std::size_t block) {
  if (j < 6) return kLanePattern[j];
  return ((block >> (j - 6)) & 1u) ? ~std::uint64_t(0) : 0;
}

// Full table of f over vars (vars must cover the structural support).
// Word-parallel kernel, OpenMP over 64-row blocks for large tables.
TruthTable truth_table(const AigManager& m, NodeRef f, std::span<const VarId> vars);

// Reference implementation: one AigManager::eval per row.
TruthTable truth_table_serial(const AigManager& m, NodeRef f, std::span<const VarId> vars);

// Table over `outer` of (exists inner . f) with `pinned` variables fixed.
// inner + outer + pinned must cover the support of f.
TruthTable exists_table(const AigManager& m, NodeRef f, std::span<const VarId> inner,
                        std::span<const VarId> outer,
                        std::span<const std::pair<VarId, bool>> pinned = {});
TruthTable exists_table_serial(const AigManager& m, NodeRef f, std::span<const VarId> inner,
                               std::span<const VarId> outer,
                               std::span<const std::pair<VarId, bool>> pinned = {});

// Truth-table equality of a and b over an explicit variable list.
bool equal_on(const AigManager& m, NodeRef a, NodeRef b, std::span<const VarId> vars);

// Truth-table equality over the union of both supports. Bounded at 24
// variables (throws BoundError beyond).
bool semantically_equal(AigManager& m, NodeRef a, NodeRef b);

}  // namespace sksynth
