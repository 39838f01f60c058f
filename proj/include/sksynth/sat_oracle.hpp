#pragma once

#include <cstdint>
#include <optional>
#include <string>

#include "sksynth/assignment.hpp"
#include "sksynth/cnf.hpp"

namespace sksynth {

enum class SatStatus { sat, unsat };

struct SatResult {
  SatStatus status = SatStatus::unsat;
  // Present iff SAT. Total over CNF variables 1..num_vars; don't-care
  // variables are completed with 0 (fixed convention: downstream reasoning
  // needs total assignments).
  Assignment model;
};

// Decides satisfiability of CNF queries and hands back total models. Every
// SAT model is checked against the clauses before being returned; a backend
// that produces a bad model raises OracleError. One query in flight per
// instance; independent instances may run concurrently.
class SatOracle {
 public:
  SatOracle() = default;

  // Bundled CDCL solver (the default).
  void set_backend_internal() { external_cmd_.reset(); }

  // Child process: DIMACS on a temp file argument in, SAT-competition
  // "s ..."/"v ..." output format out.
  void set_backend_external(std::string command) { external_cmd_ = std::move(command); }

  bool external() const { return external_cmd_.has_value(); }

  SatResult solve(const Cnf& cnf);

  std::uint64_t num_calls() const { return calls_; }
  double seconds() const { return seconds_; }

 private:
  SatResult solve_internal(const Cnf& cnf);
  SatResult solve_external(const Cnf& cnf);

  std::optional<std::string> external_cmd_;
  std::uint64_t calls_ = 0;
  double seconds_ = 0.0;
};

}  // namespace sksynth
