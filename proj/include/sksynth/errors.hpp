#pragma once

#include <stdexcept>
#include <string>

namespace sksynth {

// Caller broke a documented precondition (foreign ref, unassigned variable, ...).
struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Input text is not well-formed. `line` is 1-based (0 when the failure is not
// tied to a position, e.g. an unreadable file); `column` is 0 when unknown.
struct ParseError : std::runtime_error {
  int line;
  int column;
  ParseError(const std::string& msg, int line_, int column_ = 0)
      : std::runtime_error(line_ <= 0 ? msg
                           : column_ > 0
                               ? "line " + std::to_string(line_) + ", col " +
                                     std::to_string(column_) + ": " + msg
                               : "line " + std::to_string(line_) + ": " + msg),
        line(line_),
        column(column_) {}
};

// SAT backend failure: missing executable, protocol violation, rejected model.
struct OracleError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// The configured AIG node budget was exceeded while creating nodes.
struct NodeLimitError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// An exhaustive-check bound (variable count) was exceeded.
struct BoundError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Invariant violation inside an engine; indicates a bug, not bad input.
struct InternalError : std::logic_error {
  using std::logic_error::logic_error;
};

}  // namespace sksynth
