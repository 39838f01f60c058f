#include "sksynth/sat_oracle.hpp"

#include <unistd.h>

#include <atomic>
#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "sksynth/cdcl.hpp"
#include "sksynth/errors.hpp"

namespace sksynth {

namespace {

void check_model(const Cnf& cnf, const Assignment& model) {
  for (int v = 1; v <= cnf.num_vars; ++v)
    if (!model.has(static_cast<VarId>(v)))
      throw OracleError("backend model is not total: variable " + std::to_string(v));
  for (const auto& clause : cnf.clauses) {
    bool satisfied = false;
    for (int lit : clause) {
      const bool val = model.value(static_cast<VarId>(std::abs(lit)));
      if ((lit > 0) == val) {
        satisfied = true;
        break;
      }
    }
    if (!satisfied) throw OracleError("backend model falsifies a clause");
  }
}

}  // namespace

SatResult SatOracle::solve(const Cnf& cnf) {
  const auto start = std::chrono::steady_clock::now();
  SatResult result = external_cmd_ ? solve_external(cnf) : solve_internal(cnf);
  seconds_ += std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  ++calls_;
  if (result.status == SatStatus::sat) check_model(cnf, result.model);
  return result;
}

SatResult SatOracle::solve_internal(const Cnf& cnf) {
  CdclSolver solver(cnf);
  SatResult result;
  if (!solver.solve()) {
    result.status = SatStatus::unsat;
    return result;
  }
  result.status = SatStatus::sat;
  const auto& m = solver.model();
  for (int v = 1; v <= cnf.num_vars; ++v)
    result.model.set(static_cast<VarId>(v), m[v] == 1);  // -1 (never occurred) -> 0
  return result;
}

SatResult SatOracle::solve_external(const Cnf& cnf) {
  namespace fs = std::filesystem;
  static std::atomic<unsigned> counter{0};
  const fs::path path = fs::temp_directory_path() /
                        ("sksynth-" + std::to_string(::getpid()) + "-" +
                         std::to_string(counter.fetch_add(1)) + ".cnf");
  {
    std::ofstream out(path);
    if (!out) throw OracleError("cannot write temp DIMACS file " + path.string());
    out << cnf.to_dimacs();
  }

  const std::string cmd = *external_cmd_ + " " + path.string() + " 2>/dev/null";
  FILE* pipe = ::popen(cmd.c_str(), "r");
  if (!pipe) {
    fs::remove(path);
    throw OracleError("cannot launch external solver: " + *external_cmd_);
  }
  std::string output;
  char buf[4096];
  std::size_t got;
  while ((got = std::fread(buf, 1, sizeof buf, pipe)) > 0) output.append(buf, got);
  const int rc = ::pclose(pipe);
  fs::remove(path);

  std::optional<bool> sat;
  std::vector<int> lits;
  std::istringstream lines(output);
  std::string line;
  while (std::getline(lines, line)) {
    if (line.rfind("s ", 0) == 0) {
      if (line.find("UNSATISFIABLE") != std::string::npos)
        sat = false;
      else if (line.find("SATISFIABLE") != std::string::npos)
        sat = true;
    } else if (line.rfind("v ", 0) == 0) {
      std::istringstream vs(line.substr(2));
      int lit;
      while (vs >> lit)
        if (lit != 0) lits.push_back(lit);
    }
  }
  if (!sat)
    throw OracleError("external solver gave no verdict (exit status " + std::to_string(rc) +
                      "); command: " + *external_cmd_);

  SatResult result;
  if (!*sat) {
    result.status = SatStatus::unsat;
    return result;
  }
  result.status = SatStatus::sat;
  for (int lit : lits) {
    const int v = std::abs(lit);
    if (v < 1 || v > cnf.num_vars)
      throw OracleError("external solver reported out-of-range literal " + std::to_string(lit));
    result.model.set(static_cast<VarId>(v), lit > 0);
  }
  for (int v = 1; v <= cnf.num_vars; ++v)
    if (!result.model.has(static_cast<VarId>(v)))
      result.model.set(static_cast<VarId>(v), false);  // don't-care completion with 0
  return result;
}

}  // namespace sksynth
