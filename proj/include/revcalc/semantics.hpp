#pragma once

#include <functional>
#include <utility>
#include <vector>

#include "revcalc/binding.hpp"

namespace revcalc {

// How the freshness/domain side conditions of the rules are read.
//   Conservative: new wants l outside every identifier occurrence in s,
//     fork wants r' outside every occurrence, get/set want the location
//     bound in sigma::tau.
//   Relaxed: new only avoids the union of store domains; get/set checks
//     dropped (a read still needs a value to produce, so an unbound get
//     yields no step either way); fork as Conservative.
//   WeakFork: fork only avoids mapped revisions and identifiers inside
//     stores, so an identifier still referenced by some expression may be
//     reused; everything else as Conservative. This literal reading breaks
//     determinacy and exists to demonstrate exactly that.
enum class Mode : std::uint8_t { Conservative, Relaxed, WeakFork };

struct AllocPolicy {
  enum class Kind : std::uint8_t { CanonicalLowest, Arbitrary };
  Kind kind = Kind::CanonicalLowest;
  std::uint64_t seed = 0;

  static AllocPolicy canonical() { return {}; }
  static AllocPolicy arbitrary(std::uint64_t seed) { return {Kind::Arbitrary, seed}; }
};

struct MergePolicy {
  // called per location written by the joinee, when snapshot and joiner
  // both bind it: fn(snapshot value, joiner value, joinee value)
  using Fn = std::function<Val(const Val&, const Val&, const Val&)>;
  enum class Kind : std::uint8_t { Versioned, Custom };
  Kind kind = Kind::Versioned;
  Fn fn;

  static MergePolicy versioned() { return {}; }
  static MergePolicy custom(Fn f) { return {Kind::Custom, std::move(f)}; }
  // joiner + joinee - snapshot on integer literals (clamped at zero);
  // non-integer conflicts fall back to the joinee value
  static MergePolicy cumulative();
};

enum class Rule : std::uint8_t {
  Apply,
  IfTrue,
  IfFalse,
  New,
  Get,
  Set,
  Fork,
  Join,
  JoinEps,
  Add,
};

const char* rule_name(Rule r);

struct StepLabel {
  Rule rule;
  RevId actor;
  // LocId numeral for new, RevId numeral for fork, absent otherwise
  std::optional<std::uint32_t> allocated;

  friend bool operator==(const StepLabel&, const StepLabel&) = default;
};

// Every (label, successor) pair enabled in s, in deterministic order
// (actors ascending; a WeakFork fork contributes one entry per admissible
// identifier, ascending, the policy-fresh one included). For fixed
// (actor, rule, allocated) the successor is unique.
std::vector<std::pair<StepLabel, GlobalState>> enabled_steps(const GlobalState& s, Mode mode,
                                                             const AllocPolicy& alloc,
                                                             const MergePolicy& merge);

// Replay one labeled step; the allocated identifier is taken from the
// label, so recorded traces replay bit-exactly under any policy. Throws
// NotEnabled when the label's rule or side condition fails in s.
GlobalState step(const GlobalState& s, const StepLabel& label, Mode mode,
                 const MergePolicy& merge);

Store merge_stores(const Store& snapshot, const Store& joiner, const Store& joinee_tau,
                   const MergePolicy& policy);

// {r ↦ ⟨ε, ε, e⟩}; e must mention no revision or location identifiers
GlobalState initial_state(const Expr& e, RevId r);

}  // namespace revcalc
