#pragma once

#include <cstdint>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "revcalc/semantics.hpp"

namespace revcalc {

// One execution: each successor replays from its predecessor via step(),
// the first predecessor being `initial`.
struct Trace {
  GlobalState initial;
  std::vector<std::pair<StepLabel, GlobalState>> steps;
};

struct Bounds {
  std::uint64_t max_depth = 10'000;     // transitions along any one execution
  std::uint64_t max_states = 1'000'000;  // distinct states kept in total
};

struct ExploreConfig {
  Mode mode = Mode::Conservative;
  AllocPolicy alloc = AllocPolicy::canonical();
  MergePolicy merge = MergePolicy::versioned();
  Bounds bounds;
  unsigned jobs = 1;  // frontier expansion fan-out; results are identical for any value
};

// Breadth-first closure of the step relation. Nodes are deduplicated
// syntactically and then collapsed up to renaming (fingerprint bucket
// first, equivalent() to confirm), so stored states are pairwise
// non-equivalent; an out-edge lands on the stored representative of the
// literal successor. nodes[0] is the initial state and parent chains
// always replay literally.
struct StateGraph {
  struct Node {
    GlobalState state;
    std::int64_t parent = -1;  // node this one was first reached from
    StepLabel via{};           // label on that edge; meaningless at the root
    std::uint32_t depth = 0;
    bool expanded = false;  // enabled_steps was evaluated here
    bool maximal = false;   // expanded and no step was enabled
    std::vector<std::pair<StepLabel, std::uint32_t>> out;
  };

  std::vector<Node> nodes;
  bool bound_exceeded = false;

  Trace trace_to(std::uint32_t idx) const;  // parent-chain witness execution
};

StateGraph explore_graph(const GlobalState& s0, const ExploreConfig& cfg);

struct ExplorationResult {
  std::set<GlobalState> maximal_states;
  std::set<GlobalState> terminal_values;  // maximal with every expression a value; ε counts
  std::set<GlobalState> deadlocks;        // maximal, non-empty, some expression stuck
  bool bound_exceeded = false;
  std::uint64_t state_count = 0;
  std::map<GlobalState, Trace> witness_traces;  // one execution per maximal state
};

ExplorationResult explore(const Expr& e, const ExploreConfig& cfg);

struct DeterminacyVerdict {
  enum class Kind : std::uint8_t { Determinate, Indeterminate, Unknown };
  Kind kind = Kind::Determinate;
  // Indeterminate only: two maximal states with no renaming between them,
  // each with its execution from the initial state
  GlobalState left, right;
  Trace to_left, to_right;
};

// Determinate when exploration closed and the maximal states are pairwise
// equivalent; Indeterminate as soon as two maximal states admit no
// renaming (conclusive even under an exceeded bound); otherwise Unknown.
DeterminacyVerdict check_determinacy(const Expr& e, const ExploreConfig& cfg);

// Subsumption per local state: every location the state mentions is bound
// by its own snapshot or write set.
bool check_S(const LocalState& L);
bool check_S_G(const GlobalState& s);

// Snapshot access: if revision r mentions r', then r''s snapshot only
// binds locations r has in its own domains. Throws OutOfDomain unless
// both revisions are mapped.
bool check_A(RevId r, RevId r2, const GlobalState& s);
bool check_A_G(const GlobalState& s);

// Subsumption and snapshot access at every explored state. On failure the
// execution reaching the offending state is written to *violation when
// given. States beyond the bounds are not inspected.
bool check_inductive_invariant(const Expr& e, const ExploreConfig& cfg,
                               Trace* violation = nullptr);

// For every explored state and every pair of its one-step successors,
// find closing states at most one further step down each side that are
// equivalent (zero further steps allowed). On failure *violation, when
// given, receives the execution to the state whose pair fails to close.
bool check_strong_local_confluence(const Expr& e, const ExploreConfig& cfg,
                                   Trace* violation = nullptr);

// One-step commutation with each renaming, both directions: transporting
// an enabled label through the renaming and replaying it on the renamed
// state reproduces the renamed successor exactly. Renamings must be
// bijective (PreconditionError otherwise). On failure *violation, when
// given, receives the execution to the state where commutation broke.
bool check_mimicking(const Expr& e, const std::vector<Renaming>& renamings,
                     const ExploreConfig& cfg, Trace* violation = nullptr);

// At every state reachable under mode `a`: the enabled labels under both
// modes coincide and the successors are pairwise equivalent. On failure
// *violation, when given, receives the execution to the differing state.
bool check_mode_equivalence(const Expr& e, Mode a, Mode b, const ExploreConfig& cfg,
                            Trace* violation = nullptr);

// DOT rendering of one execution: a solid chain per revision lifetime,
// dotted edges for fork and join, nodes named r<id>_<step>.
std::string emit_revision_diagram(const Trace& t);

}  // namespace revcalc
