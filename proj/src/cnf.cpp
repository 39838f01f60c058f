#include "sksynth/cnf.hpp"

#include <sstream>

namespace sksynth {

std::string Cnf::to_dimacs() const {
  std::ostringstream out;
  out << "p cnf " << num_vars << ' ' << clauses.size() << '\n';
  for (const auto& clause : clauses) {
    for (int lit : clause) out << lit << ' ';
    out << "0\n";
  }
  return out.str();
}

}  // namespace sksynth
