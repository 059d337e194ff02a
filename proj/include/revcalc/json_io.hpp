#pragma once

#include <string>

#include "revcalc/analysis.hpp"

namespace revcalc {

// One-line human-readable forms. Maps print sorted by numeral with ε for
// the empty map (and for the empty global state); expressions render via
// the canonical pretty-printer.
std::string show_store(const Store& st);
std::string show_local(const LocalState& L);
std::string show_state(const GlobalState& s);
std::string show_label(const StepLabel& l);

// Multi-line execution rendering: the initial state on the first line,
// then one "--label--> state" line per step.
std::string show_trace(const Trace& t);

// JSON text, indented two spaces when indent >= 0, compact otherwise.
// Traces follow {"initial": state, "steps": [{"rule": string,
// "actor": nat, "allocated": nat|null, "state": state}]}; a state is an
// array of revision entries with stores as sorted [numeral, value] pairs.
std::string state_json(const GlobalState& s, int indent = -1);
std::string trace_json(const Trace& t, int indent = -1);
std::string exploration_json(const ExplorationResult& r, int indent = -1);

}  // namespace revcalc
