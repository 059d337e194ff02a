#include "revcalc/semantics.hpp"

#include <algorithm>
#include <cassert>

namespace revcalc {

namespace {

struct Site {
  Context ctx;
  Expr redex;
  RedexKind kind;
};

std::optional<Site> find_site(const LocalState& L) {
  auto d = decompose(L.expr);
  if (!d) return std::nullopt;
  auto k = classify_redex(d->redex);
  assert(k);  // decompose only surfaces redexes
  return Site{std::move(d->ctx), std::move(d->redex), *k};
}

[[noreturn]] void refuse(const char* why) { throw NotEnabled(why); }

// ---- identifier pools -------------------------------------------------

std::set<std::uint32_t> numerals(const std::set<RevId>& xs) {
  std::set<std::uint32_t> out;
  for (RevId x : xs) out.insert(x.value);
  return out;
}

std::set<std::uint32_t> numerals(const std::set<LocId>& xs) {
  std::set<std::uint32_t> out;
  for (LocId x : xs) out.insert(x.value);
  return out;
}

// identifiers a `new` step must avoid
std::set<std::uint32_t> new_excluded(const GlobalState& s, Mode mode) {
  if (mode == Mode::Relaxed) {
    // only the union of the store domains; dangling occurrences inside
    // expressions or store values do not block allocation
    std::set<std::uint32_t> out;
    for (const auto& [r, L] : s) {
      for (const auto& [l, v] : L.sigma) out.insert(l.value);
      for (const auto& [l, v] : L.tau) out.insert(l.value);
    }
    return out;
  }
  return numerals(lid(s));
}

// identifiers a fork must avoid when the weakened side condition is in
// force: mapped revisions plus anything a store mentions. Occurrences that
// live only inside expressions are (unsoundly) fair game.
std::set<std::uint32_t> weak_fork_excluded(const GlobalState& s) {
  std::set<std::uint32_t> out;
  for (const auto& [r, L] : s) {
    out.insert(r.value);
    for (RevId x : rid(L.sigma)) out.insert(x.value);
    for (RevId x : rid(L.tau)) out.insert(x.value);
  }
  return out;
}

std::uint64_t alloc_salt(const GlobalState& s, RevId actor, std::uint64_t kind) {
  return hash_combine(hash_combine(state_hash(s), actor.value), kind);
}

// Deterministic choice of an identifier outside `excluded`. Canonical
// picks the least such numeral. Arbitrary hashes (seed, state, actor) into
// a start point and probes upward; everything past the maximum excluded
// numeral is admissible, so the probe terminates.
std::uint32_t pick_id(const AllocPolicy& alloc, const std::set<std::uint32_t>& excluded,
                      std::uint64_t salt) {
  std::uint32_t c = 0;
  if (alloc.kind == AllocPolicy::Kind::Arbitrary) {
    std::uint32_t sup = excluded.empty() ? 0 : *excluded.rbegin() + 1;
    c = static_cast<std::uint32_t>(mix64(alloc.seed ^ salt) % (sup + 17));
  }
  while (excluded.count(c)) ++c;
  return c;
}

// ---- successor construction -------------------------------------------
// Shared between enabled_steps and step so that enumeration and replay
// cannot drift apart. Each builder assumes its side condition was checked.

GlobalState with_expr(GlobalState s, RevId r, Expr e) {
  s.at(r).expr = std::move(e);
  return s;
}

GlobalState succ_apply(const GlobalState& s, RevId r, const Site& site) {
  const Expr& f = site.redex.fn();
  return with_expr(s, r, plug(site.ctx, subst(f.body(), f.param(), site.redex.arg())));
}

GlobalState succ_ite(const GlobalState& s, RevId r, const Site& site, bool taken) {
  const Expr& branch = taken ? site.redex.then_branch() : site.redex.else_branch();
  return with_expr(s, r, plug(site.ctx, branch));
}

GlobalState succ_new(const GlobalState& s, RevId r, const Site& site, LocId l) {
  GlobalState t = s;
  LocalState& L = t.at(r);
  L.tau.insert_or_assign(l, Val(site.redex.inner()));
  L.expr = plug(site.ctx, Expr::loc(l));
  return t;
}

GlobalState succ_get(const GlobalState& s, RevId r, const Site& site, Val v) {
  return with_expr(s, r, plug(site.ctx, v));
}

GlobalState succ_set(const GlobalState& s, RevId r, const Site& site) {
  GlobalState t = s;
  LocalState& L = t.at(r);
  L.tau.insert_or_assign(site.redex.lhs().loc(), Val(site.redex.rhs()));
  L.expr = plug(site.ctx, Expr::unit());
  return t;
}

GlobalState succ_fork(const GlobalState& s, RevId r, const Site& site, RevId child) {
  assert(child != r);
  GlobalState t = s;
  LocalState& L = t.at(r);
  // the child starts from the forker's current view and an empty write set
  LocalState forked{overlay(L.sigma, L.tau), {}, site.redex.inner()};
  L.expr = plug(site.ctx, Expr::rev(child));
  t.insert_or_assign(child, std::move(forked));
  return t;
}

GlobalState succ_join(const GlobalState& s, RevId r, const Site& site,
                      const MergePolicy& merge) {
  RevId target = site.redex.inner().rev();
  GlobalState t = s;
  LocalState& L = t.at(r);
  const LocalState& J = t.at(target);
  L.tau = merge_stores(J.sigma, L.tau, J.tau, merge);
  L.expr = plug(site.ctx, Expr::unit());
  t.erase(target);
  return t;
}

GlobalState succ_add(const GlobalState& s, RevId r, const Site& site) {
  Expr sum = Expr::nat(site.redex.lhs().nat() + site.redex.rhs().nat());
  return with_expr(s, r, plug(site.ctx, std::move(sum)));
}

bool set_enabled(const LocalState& L, LocId l, Mode mode) {
  // the relaxed reading drops the domain check: the write happens whether
  // or not the location was ever allocated
  return mode == Mode::Relaxed || read(L.sigma, L.tau, l).has_value();
}

}  // namespace

const char* rule_name(Rule r) {
  switch (r) {
    case Rule::Apply:
      return "apply";
    case Rule::IfTrue:
      return "ifTrue";
    case Rule::IfFalse:
      return "ifFalse";
    case Rule::New:
      return "new";
    case Rule::Get:
      return "get";
    case Rule::Set:
      return "set";
    case Rule::Fork:
      return "fork";
    case Rule::Join:
      return "join";
    case Rule::JoinEps:
      return "joinEps";
    case Rule::Add:
      return "add";
  }
  return "?";
}

MergePolicy MergePolicy::cumulative() {
  return custom([](const Val& snap, const Val& joiner, const Val& joinee) {
    const Expr& a = snap;
    const Expr& b = joiner;
    const Expr& c = joinee;
    if (a.tag() == ETag::Nat && b.tag() == ETag::Nat && c.tag() == ETag::Nat) {
      std::uint64_t gain = b.nat() + c.nat();
      return Val(Expr::nat(gain > a.nat() ? gain - a.nat() : 0));
    }
    return joinee;
  });
}

Store merge_stores(const Store& snapshot, const Store& joiner, const Store& joinee_tau,
                   const MergePolicy& policy) {
  if (policy.kind == MergePolicy::Kind::Versioned) return overlay(joiner, joinee_tau);
  Store out = joiner;
  for (const auto& [l, joinee_v] : joinee_tau) {
    auto sv = snapshot.find(l);
    auto jv = joiner.find(l);
    if (sv != snapshot.end() && jv != joiner.end())
      out.insert_or_assign(l, policy.fn(sv->second, jv->second, joinee_v));
    else
      out.insert_or_assign(l, joinee_v);  // no conflict: the write lands as is
  }
  return out;
}

std::vector<std::pair<StepLabel, GlobalState>> enabled_steps(const GlobalState& s, Mode mode,
                                                             const AllocPolicy& alloc,
                                                             const MergePolicy& merge) {
  std::vector<std::pair<StepLabel, GlobalState>> out;
  for (const auto& [r, L] : s) {
    auto site = find_site(L);
    if (!site) continue;
    switch (site->kind) {
      case RedexKind::Apply:
        out.emplace_back(StepLabel{Rule::Apply, r, std::nullopt}, succ_apply(s, r, *site));
        break;
      case RedexKind::IfTrue:
        out.emplace_back(StepLabel{Rule::IfTrue, r, std::nullopt}, succ_ite(s, r, *site, true));
        break;
      case RedexKind::IfFalse:
        out.emplace_back(StepLabel{Rule::IfFalse, r, std::nullopt},
                         succ_ite(s, r, *site, false));
        break;
      case RedexKind::New: {
        std::uint32_t l = pick_id(alloc, new_excluded(s, mode), alloc_salt(s, r, 0x6e65u));
        out.emplace_back(StepLabel{Rule::New, r, l}, succ_new(s, r, *site, LocId{l}));
        break;
      }
      case RedexKind::Get: {
        // under every reading a read only fires when some value is visible;
        // the relaxed semantics merely stops calling the unbound case stuck
        if (auto v = read(L.sigma, L.tau, site->redex.inner().loc()))
          out.emplace_back(StepLabel{Rule::Get, r, std::nullopt},
                           succ_get(s, r, *site, std::move(*v)));
        break;
      }
      case RedexKind::Set:
        if (set_enabled(L, site->redex.lhs().loc(), mode))
          out.emplace_back(StepLabel{Rule::Set, r, std::nullopt}, succ_set(s, r, *site));
        break;
      case RedexKind::Fork: {
        std::vector<std::uint32_t> ids;
        auto conservative = numerals(rid(s));
        if (mode == Mode::WeakFork) {
          // identifiers in use somewhere, yet admissible under the weakened
          // condition: these occur only inside expressions
          auto weak = weak_fork_excluded(s);
          for (std::uint32_t c : conservative)
            if (!weak.count(c)) ids.push_back(c);
        }
        ids.push_back(pick_id(alloc, conservative, alloc_salt(s, r, 0x666fu)));
        std::sort(ids.begin(), ids.end());
        for (std::uint32_t c : ids)
          out.emplace_back(StepLabel{Rule::Fork, r, c}, succ_fork(s, r, *site, RevId{c}));
        break;
      }
      case RedexKind::Join: {
        RevId target = site->redex.inner().rev();
        auto it = s.find(target);
        if (it == s.end()) {
          // joining a revision the state no longer maps collapses everything
          out.emplace_back(StepLabel{Rule::JoinEps, r, std::nullopt}, GlobalState{});
        } else if (is_value(it->second.expr)) {
          out.emplace_back(StepLabel{Rule::Join, r, std::nullopt}, succ_join(s, r, *site, merge));
        }
        // target still running: the join blocks, no step from this revision
        break;
      }
      case RedexKind::Add:
        out.emplace_back(StepLabel{Rule::Add, r, std::nullopt}, succ_add(s, r, *site));
        break;
    }
  }
  return out;
}

GlobalState step(const GlobalState& s, const StepLabel& label, Mode mode,
                 const MergePolicy& merge) {
  auto actor_it = s.find(label.actor);
  if (actor_it == s.end()) refuse("step: actor is not mapped by the state");
  auto site = find_site(actor_it->second);
  if (!site) refuse("step: actor's expression has no redex");

  bool wants_id = label.rule == Rule::New || label.rule == Rule::Fork;
  if (wants_id != label.allocated.has_value())
    refuse("step: allocated identifier is present iff the rule is new or fork");

  switch (label.rule) {
    case Rule::Apply:
      if (site->kind != RedexKind::Apply) refuse("step: redex is not an application of a lambda");
      return succ_apply(s, label.actor, *site);
    case Rule::IfTrue:
      if (site->kind != RedexKind::IfTrue) refuse("step: redex is not a conditional on true");
      return succ_ite(s, label.actor, *site, true);
    case Rule::IfFalse:
      if (site->kind != RedexKind::IfFalse) refuse("step: redex is not a conditional on false");
      return succ_ite(s, label.actor, *site, false);
    case Rule::New: {
      if (site->kind != RedexKind::New) refuse("step: redex is not an allocation");
      LocId l{*label.allocated};
      if (new_excluded(s, mode).count(l.value))
        refuse("step: allocated location violates the freshness condition");
      return succ_new(s, label.actor, *site, l);
    }
    case Rule::Get: {
      if (site->kind != RedexKind::Get) refuse("step: redex is not a read");
      auto v = read(actor_it->second.sigma, actor_it->second.tau, site->redex.inner().loc());
      if (!v) refuse("step: read location is unbound");
      return succ_get(s, label.actor, *site, std::move(*v));
    }
    case Rule::Set:
      if (site->kind != RedexKind::Set) refuse("step: redex is not a write");
      if (!set_enabled(actor_it->second, site->redex.lhs().loc(), mode))
        refuse("step: written location is unbound");
      return succ_set(s, label.actor, *site);
    case Rule::Fork: {
      if (site->kind != RedexKind::Fork) refuse("step: redex is not a fork");
      RevId child{*label.allocated};
      bool fresh = mode == Mode::WeakFork ? !weak_fork_excluded(s).count(child.value)
                                          : !rid(s).count(child);
      if (!fresh) refuse("step: forked revision violates the freshness condition");
      return succ_fork(s, label.actor, *site, child);
    }
    case Rule::Join: {
      if (site->kind != RedexKind::Join) refuse("step: redex is not a join");
      auto it = s.find(site->redex.inner().rev());
      if (it == s.end()) refuse("step: join target is not mapped (the collapsing rule applies)");
      if (!is_value(it->second.expr)) refuse("step: join target has not terminated");
      return succ_join(s, label.actor, *site, merge);
    }
    case Rule::JoinEps:
      if (site->kind != RedexKind::Join) refuse("step: redex is not a join");
      if (s.count(site->redex.inner().rev()))
        refuse("step: join target is still mapped by the state");
      return {};
    case Rule::Add:
      if (site->kind != RedexKind::Add) refuse("step: redex is not an addition of literals");
      return succ_add(s, label.actor, *site);
  }
  refuse("step: unknown rule");
}

GlobalState initial_state(const Expr& e, RevId r) {
  if (!e.valid()) throw PreconditionError("initial_state: invalid expression");
  if (!rid(e).empty() || !lid(e).empty())
    throw NotAProgramExpression(
        "initial_state: a program may not mention revision or location identifiers");
  GlobalState s;
  s.emplace(r, LocalState{{}, {}, e});
  return s;
}

}  // namespace revcalc
