#include <functional>
#include <vector>

#include "revcalc/binding.hpp"

// Deciding s ≈ t. Renamings only touch revision/location identifiers, so
// matching two expressions is deterministic: structure and variables must
// agree exactly, and each identifier pair extends a partial bijection or
// contradicts it. The only genuine search is over which revision of t each
// revision of s plays, and which store entry of t each store entry of s
// maps to; both are pruned by renaming-invariant fingerprints first.

namespace revcalc {

namespace {

struct Bind {
  std::map<RevId, RevId> a, a_inv;
  std::map<LocId, LocId> b, b_inv;

  bool rev(RevId x, RevId y) {
    auto i = a.find(x);
    if (i != a.end()) return i->second == y;
    auto j = a_inv.find(y);
    if (j != a_inv.end()) return false;
    a.emplace(x, y);
    a_inv.emplace(y, x);
    return true;
  }
  bool loc(LocId x, LocId y) {
    auto i = b.find(x);
    if (i != b.end()) return i->second == y;
    auto j = b_inv.find(y);
    if (j != b_inv.end()) return false;
    b.emplace(x, y);
    b_inv.emplace(y, x);
    return true;
  }
};

bool unify_expr(const Expr& x, const Expr& y, Bind& m) {
  if (x.tag() != y.tag()) return false;
  switch (x.tag()) {
    case ETag::Unit:
    case ETag::True:
    case ETag::False:
      return true;
    case ETag::Var:
      return x.var() == y.var();
    case ETag::Nat:
      return x.nat() == y.nat();
    case ETag::Rev:
      return m.rev(x.rev(), y.rev());
    case ETag::Loc:
      return m.loc(x.loc(), y.loc());
    case ETag::Lam:
      return x.param() == y.param() && unify_expr(x.body(), y.body(), m);
    case ETag::App:
      return unify_expr(x.fn(), y.fn(), m) && unify_expr(x.arg(), y.arg(), m);
    case ETag::Ite:
      return unify_expr(x.cond(), y.cond(), m) &&
             unify_expr(x.then_branch(), y.then_branch(), m) &&
             unify_expr(x.else_branch(), y.else_branch(), m);
    case ETag::Ref:
    case ETag::Deref:
    case ETag::Rfork:
    case ETag::Rjoin:
      return unify_expr(x.inner(), y.inner(), m);
    case ETag::Assign:
    case ETag::Add:
      return unify_expr(x.lhs(), y.lhs(), m) && unify_expr(x.rhs(), y.rhs(), m);
  }
  return false;
}

using Entries = std::vector<std::pair<LocId, Val>>;

// Match xs[i..] against unused entries of ys, then run the continuation.
// Backtracking restores the binding by value copy; states are desk-sized.
bool unify_store(const Entries& xs, std::size_t i, const Entries& ys, std::vector<bool>& used,
                 Bind& m, const std::function<bool(Bind&)>& k) {
  if (i == xs.size()) return k(m);
  const auto& [l, v] = xs[i];
  const std::uint64_t fp = shape_fingerprint(v.expr());
  for (std::size_t j = 0; j < ys.size(); ++j) {
    if (used[j]) continue;
    const auto& [l2, v2] = ys[j];
    if (shape_fingerprint(v2.expr()) != fp) continue;
    Bind saved = m;
    if (m.loc(l, l2) && unify_expr(v.expr(), v2.expr(), m)) {
      used[j] = true;
      if (unify_store(xs, i + 1, ys, used, m, k)) return true;
      used[j] = false;
    }
    m = saved;
  }
  return false;
}

bool unify_local(const LocalState& x, const LocalState& y, Bind& m,
                 const std::function<bool(Bind&)>& k) {
  if (x.sigma.size() != y.sigma.size() || x.tau.size() != y.tau.size()) return false;
  if (!unify_expr(x.expr, y.expr, m)) return false;
  Entries xs(x.sigma.begin(), x.sigma.end());
  Entries ys(y.sigma.begin(), y.sigma.end());
  Entries xt(x.tau.begin(), x.tau.end());
  Entries yt(y.tau.begin(), y.tau.end());
  std::vector<bool> used_s(ys.size(), false);
  return unify_store(xs, 0, ys, used_s, m, [&](Bind& m2) {
    std::vector<bool> used_t(yt.size(), false);
    return unify_store(xt, 0, yt, used_t, m2, k);
  });
}

struct RevEntry {
  RevId r;
  const LocalState* L;
  std::uint64_t fp;
};

bool match_revs(const std::vector<RevEntry>& xs, std::size_t i, const std::vector<RevEntry>& ys,
                std::vector<bool>& used, Bind& m) {
  if (i == xs.size()) return true;
  for (std::size_t j = 0; j < ys.size(); ++j) {
    if (used[j] || xs[i].fp != ys[j].fp) continue;
    Bind saved = m;
    if (m.rev(xs[i].r, ys[j].r)) {
      used[j] = true;
      if (unify_local(*xs[i].L, *ys[j].L, m,
                      [&](Bind& m2) { return match_revs(xs, i + 1, ys, used, m2); }))
        return true;
      used[j] = false;
    }
    m = saved;
  }
  return false;
}

// Close an injective partial map into a permutation of domain ∪ image:
// elements of the image that are not yet mapped cycle back onto the unused
// domain elements, smallest first.
template <typename Id>
std::map<Id, Id> close_permutation(const std::map<Id, Id>& partial) {
  std::map<Id, Id> out = partial;
  std::set<Id> dom, img;
  for (const auto& [x, y] : partial) {
    dom.insert(x);
    img.insert(y);
  }
  std::vector<Id> pending, targets;
  for (Id y : img)
    if (!dom.count(y)) pending.push_back(y);
  for (Id x : dom)
    if (!img.count(x)) targets.push_back(x);
  for (std::size_t i = 0; i < pending.size(); ++i) out[pending[i]] = targets[i];
  return out;
}

}  // namespace

std::optional<Renaming> equivalent(const GlobalState& s, const GlobalState& t) {
  if (s.size() != t.size()) return std::nullopt;
  if (shape_fingerprint(s) != shape_fingerprint(t)) return std::nullopt;

  std::vector<RevEntry> xs, ys;
  xs.reserve(s.size());
  ys.reserve(t.size());
  for (const auto& [r, L] : s) xs.push_back({r, &L, shape_fingerprint(L)});
  for (const auto& [r, L] : t) ys.push_back({r, &L, shape_fingerprint(L)});

  Bind m;
  std::vector<bool> used(ys.size(), false);
  if (!match_revs(xs, 0, ys, used, m)) return std::nullopt;

  Renaming w;
  w.alpha = close_permutation(m.a);
  w.beta = close_permutation(m.b);
  w.normalize();
  if (!w.bijective() || rename(w, s) != t) return std::nullopt;  // defensive; must not trigger
  return w;
}

}  // namespace revcalc
