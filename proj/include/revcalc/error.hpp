#pragma once

#include <stdexcept>
#include <string>

namespace revcalc {

struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Lex/parse/validation failure; line and column are 1-based.
struct ParseError : Error {
  int line;
  int column;
  ParseError(const std::string& msg, int line_, int column_)
      : Error(std::to_string(line_) + ":" + std::to_string(column_) + ": " + msg),
        line(line_),
        column(column_) {}
};

// Raised when a step label names a rule whose head or side condition
// does not hold in the given state.
struct NotEnabled : Error {
  using Error::Error;
};

// Raised by initial_state / explore when the expression mentions
// revision or location identifiers.
struct NotAProgramExpression : Error {
  using Error::Error;
};

// Raised by the pairwise invariant checks when a revision id is not
// mapped by the state under inspection.
struct OutOfDomain : Error {
  using Error::Error;
};

// Raised when an operation's documented precondition is violated,
// e.g. renaming a keyed structure with a non-bijective renaming.
struct PreconditionError : Error {
  using Error::Error;
};

}  // namespace revcalc
