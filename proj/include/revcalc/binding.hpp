#pragma once

#include <map>
#include <optional>
#include <set>

#include "revcalc/syntax.hpp"

namespace revcalc {

using Store = std::map<LocId, Val>;

// ⟨snapshot, local writes, expression⟩
struct LocalState {
  Store sigma;
  Store tau;
  Expr expr;

  friend bool operator==(const LocalState& x, const LocalState& y) {
    return x.sigma == y.sigma && x.tau == y.tau && x.expr == y.expr;
  }
  friend bool operator!=(const LocalState& x, const LocalState& y) { return !(x == y); }
  friend bool operator<(const LocalState& x, const LocalState& y);
};

// The empty map is ε, the collapsed state.
using GlobalState = std::map<RevId, LocalState>;

// sigma shadowed by tau; reads consult tau first
Store overlay(const Store& sigma, const Store& tau);
std::optional<Val> read(const Store& sigma, const Store& tau, LocId l);

std::set<LocId> doms(const LocalState& L);

std::set<RevId> rid(const Expr& e);
std::set<RevId> rid(const Val& v);
std::set<RevId> rid(const Context& c);
std::set<RevId> rid(const Store& st);
std::set<RevId> rid(const LocalState& L);
std::set<RevId> rid(const GlobalState& s);

std::set<LocId> lid(const Expr& e);
std::set<LocId> lid(const Val& v);
std::set<LocId> lid(const Context& c);
std::set<LocId> lid(const Store& st);
std::set<LocId> lid(const LocalState& L);
std::set<LocId> lid(const GlobalState& s);

// every variable occurrence, binder positions included
std::set<Var> vars(const Expr& e);
std::set<Var> free_vars(const Expr& e);

// capture-avoiding substitution of v for free x; going under a binder
// always renames the bound variable to a fresh one past every variable in
// sight (including x itself, so the new binder can never collide with the
// substitution target)
Expr subst(const Expr& body, Var x, const Expr& v);

// Total maps on identifiers, represented as finite overrides of the
// identity. Entries equal to the identity are dropped on normalization, so
// map comparison is meaningful.
struct Renaming {
  std::map<RevId, RevId> alpha;
  std::map<LocId, LocId> beta;

  RevId operator()(RevId r) const {
    auto it = alpha.find(r);
    return it == alpha.end() ? r : it->second;
  }
  LocId operator()(LocId l) const {
    auto it = beta.find(l);
    return it == beta.end() ? l : it->second;
  }

  // a finite override is a bijection on the whole universe exactly when it
  // permutes its own domain
  bool bijective() const;
  bool is_identity() const { return alpha.empty() && beta.empty(); }

  Renaming inverse() const;                  // pre: bijective
  Renaming after(const Renaming& g) const;   // composition: apply g, then this
  void normalize();                          // drop fixpoint entries

  static Renaming identity() { return {}; }
  static Renaming swap_revs(RevId x, RevId y);
  static Renaming swap_locs(LocId x, LocId y);

  friend bool operator==(const Renaming& x, const Renaming& y) {
    return x.alpha == y.alpha && x.beta == y.beta;
  }
};

Expr rename(const Renaming& w, const Expr& e);
Val rename(const Renaming& w, const Val& v);
Context rename(const Renaming& w, const Context& c);
// keyed structures demand a bijective renaming (PreconditionError otherwise)
Store rename(const Renaming& w, const Store& st);
LocalState rename(const Renaming& w, const LocalState& L);
GlobalState rename(const Renaming& w, const GlobalState& s);

// decision of s ≈ t: a bijective witness w with rename(w, s) == t, if any
std::optional<Renaming> equivalent(const GlobalState& s, const GlobalState& t);

// hashes invariant under identifier renaming (numerals erased, store and
// revision entries combined order-insensitively); used to bucket states
// before attempting the expensive equivalence decision
std::uint64_t shape_fingerprint(const Expr& e);
std::uint64_t shape_fingerprint(const Store& st);
std::uint64_t shape_fingerprint(const LocalState& L);
std::uint64_t shape_fingerprint(const GlobalState& s);

// plain syntactic hashes for exact-duplicate detection
std::uint64_t state_hash(const LocalState& L);
std::uint64_t state_hash(const GlobalState& s);

int compare(const Store& x, const Store& y);
int compare(const LocalState& x, const LocalState& y);
int compare(const GlobalState& x, const GlobalState& y);

inline bool operator<(const LocalState& x, const LocalState& y) { return compare(x, y) < 0; }

}  // namespace revcalc
