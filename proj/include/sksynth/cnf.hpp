#pragma once

#include <string>
#include <vector>

namespace sksynth {

// Clause literals are signed DIMACS-style integers: +v / -v with v in
// 1..num_vars. No literal may be 0 and no clause may reference an
// undeclared variable.
struct Cnf {
  int num_vars = 0;
  std::vector<std::vector<int>> clauses;

  void add_clause(std::vector<int> lits) { clauses.push_back(std::move(lits)); }

  std::string to_dimacs() const;
};

}  // namespace sksynth
