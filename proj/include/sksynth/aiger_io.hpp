#pragma once

#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "sksynth/aig.hpp"

namespace sksynth {

struct NamedRoot {
  std::string name;
  NodeRef root;
};

// ASCII AIGER ("aag") writer for combinational functions. Inputs are the
// union of the roots' supports plus extra_inputs, sorted by variable id and
// named via the manager's symbol table.
std::string write_aag(AigManager& m, std::span<const NamedRoot> outputs,
                      std::span<const VarId> extra_inputs = {});

// Combinational aag reader. Builds the functions into `m`, binding input
// symbols through name_to_var (a missing name is a usage error). Latches are
// rejected. Returns the outputs in file order.
std::vector<NamedRoot> read_aag(AigManager& m, const std::string& text,
                                const std::unordered_map<std::string, VarId>& name_to_var);

// Graphviz writer for debugging. Complement edges are dashed.
std::string write_dot(AigManager& m, std::span<const NamedRoot> roots);

}  // namespace sksynth
