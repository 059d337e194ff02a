#pragma once

#include <map>
#include <string>

#include "revcalc/syntax.hpp"

namespace revcalc {

// Surface names and their interned numerals. Numbering follows first
// occurrence in the parsed (desugared) expression, pre-order, starting at
// 0; binders introduced by sugar get numerals but no name.
struct SymbolTable {
  std::map<std::string, Var> by_name;
  std::map<Var, std::string> by_index;

  const std::string* name_of(Var v) const {
    auto it = by_index.find(v);
    return it == by_index.end() ? nullptr : &it->second;
  }
};

struct ParseOptions {
  bool integers = false;        // accept Nat literals and '+'
  bool trace_literals = false;  // accept #r<n> / #l<n>
};

struct ParseResult {
  Expr expr;
  SymbolTable symbols;
};

// Throws ParseError (with 1-based line/column) on malformed input, on
// #r/#l literals outside trace mode, and on integer syntax without the
// extension enabled.
ParseResult parse(const std::string& src, const ParseOptions& opt = {});

// Canonical rendering: variables print as x<numeral>, revision and
// location identifiers as #r<n>/#l<n>, sugar is never reintroduced.
// parse(pretty(e)) reproduces e exactly for every canonically numbered
// expression (every parse image is one), reading back with trace literals
// and integers enabled as needed.
std::string pretty(const Expr& e);

// Same layout, but variables with a recorded surface name use it.
std::string pretty(const Expr& e, const SymbolTable& names);

}  // namespace revcalc
