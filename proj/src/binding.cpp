#include "revcalc/binding.hpp"

#include "revcalc/error.hpp"

namespace revcalc {

Store overlay(const Store& sigma, const Store& tau) {
  Store out = sigma;
  for (const auto& [l, v] : tau) out.insert_or_assign(l, v);
  return out;
}

std::optional<Val> read(const Store& sigma, const Store& tau, LocId l) {
  if (auto it = tau.find(l); it != tau.end()) return it->second;
  if (auto it = sigma.find(l); it != sigma.end()) return it->second;
  return std::nullopt;
}

std::set<LocId> doms(const LocalState& L) {
  std::set<LocId> out;
  for (const auto& [l, v] : L.sigma) out.insert(l);
  for (const auto& [l, v] : L.tau) out.insert(l);
  return out;
}

namespace {

void collect_ids(const Expr& e, std::set<RevId>* rs, std::set<LocId>* ls) {
  switch (e.tag()) {
    case ETag::Rev:
      if (rs) rs->insert(e.rev());
      return;
    case ETag::Loc:
      if (ls) ls->insert(e.loc());
      return;
    case ETag::Lam:
      collect_ids(e.body(), rs, ls);
      return;
    case ETag::App:
      collect_ids(e.fn(), rs, ls);
      collect_ids(e.arg(), rs, ls);
      return;
    case ETag::Ite:
      collect_ids(e.cond(), rs, ls);
      collect_ids(e.then_branch(), rs, ls);
      collect_ids(e.else_branch(), rs, ls);
      return;
    case ETag::Ref:
    case ETag::Deref:
    case ETag::Rfork:
    case ETag::Rjoin:
      collect_ids(e.inner(), rs, ls);
      return;
    case ETag::Assign:
    case ETag::Add:
      collect_ids(e.lhs(), rs, ls);
      collect_ids(e.rhs(), rs, ls);
      return;
    default:
      return;
  }
}

void collect_ids(const Context& c, std::set<RevId>* rs, std::set<LocId>* ls) {
  switch (c.tag()) {
    case CTag::Hole:
      return;
    case CTag::AppL:
    case CTag::AssignL:
    case CTag::AddL:
      collect_ids(c.e1(), rs, ls);
      break;
    case CTag::AppR:
    case CTag::AddR:
      collect_ids(c.v().expr(), rs, ls);
      break;
    case CTag::Ite:
      collect_ids(c.e1(), rs, ls);
      collect_ids(c.e2(), rs, ls);
      break;
    case CTag::AssignR:
      if (ls) ls->insert(c.loc());
      break;
    case CTag::Ref:
    case CTag::Deref:
    case CTag::Rjoin:
      break;
  }
  collect_ids(c.inner(), rs, ls);
}

}  // namespace

std::set<RevId> rid(const Expr& e) {
  std::set<RevId> out;
  collect_ids(e, &out, nullptr);
  return out;
}
std::set<RevId> rid(const Val& v) { return rid(v.expr()); }
std::set<RevId> rid(const Context& c) {
  std::set<RevId> out;
  collect_ids(c, &out, nullptr);
  return out;
}
std::set<RevId> rid(const Store& st) {
  std::set<RevId> out;
  for (const auto& [l, v] : st) collect_ids(v.expr(), &out, nullptr);
  return out;
}
std::set<RevId> rid(const LocalState& L) {
  std::set<RevId> out;
  for (const auto& [l, v] : L.sigma) collect_ids(v.expr(), &out, nullptr);
  for (const auto& [l, v] : L.tau) collect_ids(v.expr(), &out, nullptr);
  collect_ids(L.expr, &out, nullptr);
  return out;
}
std::set<RevId> rid(const GlobalState& s) {
  std::set<RevId> out;
  for (const auto& [r, L] : s) {
    out.insert(r);
    auto sub = rid(L);
    out.insert(sub.begin(), sub.end());
  }
  return out;
}

std::set<LocId> lid(const Expr& e) {
  std::set<LocId> out;
  collect_ids(e, nullptr, &out);
  return out;
}
std::set<LocId> lid(const Val& v) { return lid(v.expr()); }
std::set<LocId> lid(const Context& c) {
  std::set<LocId> out;
  collect_ids(c, nullptr, &out);
  return out;
}
std::set<LocId> lid(const Store& st) {
  std::set<LocId> out;
  for (const auto& [l, v] : st) {
    out.insert(l);
    collect_ids(v.expr(), nullptr, &out);
  }
  return out;
}
std::set<LocId> lid(const LocalState& L) {
  std::set<LocId> out;
  for (const auto& [l, v] : L.sigma) {
    out.insert(l);
    collect_ids(v.expr(), nullptr, &out);
  }
  for (const auto& [l, v] : L.tau) {
    out.insert(l);
    collect_ids(v.expr(), nullptr, &out);
  }
  collect_ids(L.expr, nullptr, &out);
  return out;
}
std::set<LocId> lid(const GlobalState& s) {
  std::set<LocId> out;
  for (const auto& [r, L] : s) {
    auto sub = lid(L);
    out.insert(sub.begin(), sub.end());
  }
  return out;
}

namespace {

void collect_vars(const Expr& e, std::set<Var>& out, bool binders) {
  switch (e.tag()) {
    case ETag::Var:
      out.insert(e.var());
      return;
    case ETag::Lam:
      if (binders) out.insert(e.param());
      collect_vars(e.body(), out, binders);
      return;
    case ETag::App:
      collect_vars(e.fn(), out, binders);
      collect_vars(e.arg(), out, binders);
      return;
    case ETag::Ite:
      collect_vars(e.cond(), out, binders);
      collect_vars(e.then_branch(), out, binders);
      collect_vars(e.else_branch(), out, binders);
      return;
    case ETag::Ref:
    case ETag::Deref:
    case ETag::Rfork:
    case ETag::Rjoin:
      collect_vars(e.inner(), out, binders);
      return;
    case ETag::Assign:
    case ETag::Add:
      collect_vars(e.lhs(), out, binders);
      collect_vars(e.rhs(), out, binders);
      return;
    default:
      return;
  }
}

void collect_free(const Expr& e, std::set<Var>& bound, std::set<Var>& out) {
  switch (e.tag()) {
    case ETag::Var:
      if (!bound.count(e.var())) out.insert(e.var());
      return;
    case ETag::Lam: {
      bool fresh = bound.insert(e.param()).second;
      collect_free(e.body(), bound, out);
      if (fresh) bound.erase(e.param());
      return;
    }
    case ETag::App:
      collect_free(e.fn(), bound, out);
      collect_free(e.arg(), bound, out);
      return;
    case ETag::Ite:
      collect_free(e.cond(), bound, out);
      collect_free(e.then_branch(), bound, out);
      collect_free(e.else_branch(), bound, out);
      return;
    case ETag::Ref:
    case ETag::Deref:
    case ETag::Rfork:
    case ETag::Rjoin:
      collect_free(e.inner(), bound, out);
      return;
    case ETag::Assign:
    case ETag::Add:
      collect_free(e.lhs(), bound, out);
      collect_free(e.rhs(), bound, out);
      return;
    default:
      return;
  }
}

}  // namespace

std::set<Var> vars(const Expr& e) {
  std::set<Var> out;
  collect_vars(e, out, true);
  return out;
}

std::set<Var> free_vars(const Expr& e) {
  std::set<Var> bound, out;
  collect_free(e, bound, out);
  return out;
}

bool Renaming::bijective() const {
  std::set<RevId> rimg;
  for (const auto& [x, y] : alpha) rimg.insert(y);
  if (rimg.size() != alpha.size()) return false;
  for (RevId y : rimg)
    if (!alpha.count(y)) return false;
  std::set<LocId> limg;
  for (const auto& [x, y] : beta) limg.insert(y);
  if (limg.size() != beta.size()) return false;
  for (LocId y : limg)
    if (!beta.count(y)) return false;
  return true;
}

Renaming Renaming::inverse() const {
  if (!bijective()) throw PreconditionError("Renaming::inverse: not bijective");
  Renaming out;
  for (const auto& [x, y] : alpha) out.alpha[y] = x;
  for (const auto& [x, y] : beta) out.beta[y] = x;
  return out;
}

Renaming Renaming::after(const Renaming& g) const {
  Renaming out;
  std::set<RevId> rdom;
  for (const auto& [x, y] : g.alpha) rdom.insert(x);
  for (const auto& [x, y] : alpha) rdom.insert(x);
  for (RevId x : rdom) out.alpha[x] = (*this)(g(x));
  std::set<LocId> ldom;
  for (const auto& [x, y] : g.beta) ldom.insert(x);
  for (const auto& [x, y] : beta) ldom.insert(x);
  for (LocId x : ldom) out.beta[x] = (*this)(g(x));
  out.normalize();
  return out;
}

void Renaming::normalize() {
  for (auto it = alpha.begin(); it != alpha.end();)
    it = it->first == it->second ? alpha.erase(it) : std::next(it);
  for (auto it = beta.begin(); it != beta.end();)
    it = it->first == it->second ? beta.erase(it) : std::next(it);
}

Renaming Renaming::swap_revs(RevId x, RevId y) {
  Renaming out;
  if (x != y) {
    out.alpha[x] = y;
    out.alpha[y] = x;
  }
  return out;
}

Renaming Renaming::swap_locs(LocId x, LocId y) {
  Renaming out;
  if (x != y) {
    out.beta[x] = y;
    out.beta[y] = x;
  }
  return out;
}

Expr rename(const Renaming& w, const Expr& e) {
  switch (e.tag()) {
    case ETag::Rev:
      return Expr::rev(w(e.rev()));
    case ETag::Loc:
      return Expr::loc(w(e.loc()));
    case ETag::Lam:
      return Expr::lam(e.param(), rename(w, e.body()));
    case ETag::App:
      return Expr::app(rename(w, e.fn()), rename(w, e.arg()));
    case ETag::Ite:
      return Expr::ite(rename(w, e.cond()), rename(w, e.then_branch()),
                       rename(w, e.else_branch()));
    case ETag::Ref:
      return Expr::ref(rename(w, e.inner()));
    case ETag::Deref:
      return Expr::deref(rename(w, e.inner()));
    case ETag::Rfork:
      return Expr::rfork(rename(w, e.inner()));
    case ETag::Rjoin:
      return Expr::rjoin(rename(w, e.inner()));
    case ETag::Assign:
      return Expr::assign(rename(w, e.lhs()), rename(w, e.rhs()));
    case ETag::Add:
      return Expr::add(rename(w, e.lhs()), rename(w, e.rhs()));
    default:
      return e;
  }
}

Val rename(const Renaming& w, const Val& v) { return Val(rename(w, v.expr())); }

Context rename(const Renaming& w, const Context& c) {
  switch (c.tag()) {
    case CTag::Hole:
      return c;
    case CTag::AppL:
      return Context::app_l(rename(w, c.inner()), rename(w, c.e1()));
    case CTag::AppR:
      return Context::app_r(rename(w, c.v()), rename(w, c.inner()));
    case CTag::Ite:
      return Context::ite(rename(w, c.inner()), rename(w, c.e1()), rename(w, c.e2()));
    case CTag::Ref:
      return Context::ref(rename(w, c.inner()));
    case CTag::Deref:
      return Context::deref(rename(w, c.inner()));
    case CTag::AssignL:
      return Context::assign_l(rename(w, c.inner()), rename(w, c.e1()));
    case CTag::AssignR:
      return Context::assign_r(w(c.loc()), rename(w, c.inner()));
    case CTag::Rjoin:
      return Context::rjoin(rename(w, c.inner()));
    case CTag::AddL:
      return Context::add_l(rename(w, c.inner()), rename(w, c.e1()));
    case CTag::AddR:
      return Context::add_r(rename(w, c.v()), rename(w, c.inner()));
  }
  return c;
}

Store rename(const Renaming& w, const Store& st) {
  if (!w.bijective()) throw PreconditionError("rename(Store): renaming is not bijective");
  Store out;
  for (const auto& [l, v] : st) out.insert_or_assign(w(l), rename(w, v));
  return out;
}

LocalState rename(const Renaming& w, const LocalState& L) {
  return LocalState{rename(w, L.sigma), rename(w, L.tau), rename(w, L.expr)};
}

GlobalState rename(const Renaming& w, const GlobalState& s) {
  if (!w.bijective()) throw PreconditionError("rename(GlobalState): renaming is not bijective");
  GlobalState out;
  for (const auto& [r, L] : s) out.insert_or_assign(w(r), rename(w, L));
  return out;
}

namespace {

constexpr std::uint64_t kErasedId = 0x61bf5e0a7c93d24bull;

std::uint64_t shape_hash_expr(const Expr& e) {
  std::uint64_t h = mix64(static_cast<std::uint64_t>(e.tag()) + 0x51);
  switch (e.tag()) {
    case ETag::Rev:
    case ETag::Loc:
      return hash_combine(h, kErasedId);
    case ETag::Var:
      return hash_combine(h, e.var());
    case ETag::Nat:
      return hash_combine(h, e.nat());
    case ETag::Lam:
      return hash_combine(hash_combine(h, e.param()), shape_hash_expr(e.body()));
    case ETag::App:
      return hash_combine(hash_combine(h, shape_hash_expr(e.fn())), shape_hash_expr(e.arg()));
    case ETag::Ite:
      return hash_combine(
          hash_combine(hash_combine(h, shape_hash_expr(e.cond())),
                       shape_hash_expr(e.then_branch())),
          shape_hash_expr(e.else_branch()));
    case ETag::Ref:
    case ETag::Deref:
    case ETag::Rfork:
    case ETag::Rjoin:
      return hash_combine(h, shape_hash_expr(e.inner()));
    case ETag::Assign:
    case ETag::Add:
      return hash_combine(hash_combine(h, shape_hash_expr(e.lhs())), shape_hash_expr(e.rhs()));
    default:
      return h;
  }
}

}  // namespace

std::uint64_t shape_fingerprint(const Expr& e) { return shape_hash_expr(e); }

std::uint64_t shape_fingerprint(const Store& st) {
  // keys erased; entries combined commutatively so re-keying cannot matter
  std::uint64_t h = mix64(st.size() + 0x57);
  for (const auto& [l, v] : st) h += mix64(shape_hash_expr(v.expr()));
  return h;
}

std::uint64_t shape_fingerprint(const LocalState& L) {
  std::uint64_t h = shape_fingerprint(L.sigma);
  h = hash_combine(h, shape_fingerprint(L.tau));
  h = hash_combine(h, shape_hash_expr(L.expr));
  return h;
}

std::uint64_t shape_fingerprint(const GlobalState& s) {
  std::uint64_t h = mix64(s.size() + 0x9d);
  for (const auto& [r, L] : s) h += mix64(shape_fingerprint(L));
  return h;
}

std::uint64_t state_hash(const LocalState& L) {
  std::uint64_t h = mix64(L.sigma.size() * 31 + L.tau.size());
  for (const auto& [l, v] : L.sigma) h = hash_combine(hash_combine(h, l.value), v.expr().hash());
  for (const auto& [l, v] : L.tau) h = hash_combine(hash_combine(h, l.value), v.expr().hash());
  return hash_combine(h, L.expr.hash());
}

std::uint64_t state_hash(const GlobalState& s) {
  std::uint64_t h = mix64(s.size() + 0x777);
  for (const auto& [r, L] : s) h = hash_combine(hash_combine(h, r.value), state_hash(L));
  return h;
}

int compare(const Store& x, const Store& y) {
  auto i = x.begin();
  auto j = y.begin();
  for (; i != x.end() && j != y.end(); ++i, ++j) {
    if (i->first != j->first) return i->first < j->first ? -1 : 1;
    if (int c = Expr::compare(i->second.expr(), j->second.expr())) return c;
  }
  if (i != x.end()) return 1;
  if (j != y.end()) return -1;
  return 0;
}

int compare(const LocalState& x, const LocalState& y) {
  if (int c = compare(x.sigma, y.sigma)) return c;
  if (int c = compare(x.tau, y.tau)) return c;
  return Expr::compare(x.expr, y.expr);
}

int compare(const GlobalState& x, const GlobalState& y) {
  auto i = x.begin();
  auto j = y.begin();
  for (; i != x.end() && j != y.end(); ++i, ++j) {
    if (i->first != j->first) return i->first < j->first ? -1 : 1;
    if (int c = compare(i->second, j->second)) return c;
  }
  if (i != x.end()) return 1;
  if (j != y.end()) return -1;
  return 0;
}

}  // namespace revcalc
