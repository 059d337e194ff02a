#include "revcalc/syntax.hpp"

namespace revcalc {

namespace {

std::uint64_t node_hash(ETag tag, std::uint32_t num, std::uint64_t lit, const Expr& a,
                        const Expr& b, const Expr& c) {
  std::uint64_t h = mix64(static_cast<std::uint64_t>(tag) + 1);
  h = hash_combine(h, num);
  h = hash_combine(h, lit);
  h = hash_combine(h, a.hash());
  h = hash_combine(h, b.hash());
  h = hash_combine(h, c.hash());
  return h;
}

}  // namespace

Expr Expr::make(ETag tag, std::uint32_t num, std::uint64_t lit, Expr a, Expr b, Expr c) {
  auto n = std::make_shared<Node>();
  n->tag = tag;
  n->num = num;
  n->lit = lit;
  n->a = std::move(a);
  n->b = std::move(b);
  n->c = std::move(c);
  n->h = node_hash(tag, num, lit, n->a, n->b, n->c);
  return Expr(std::move(n));
}

// The three constants are shared singletons; everything else allocates.
Expr Expr::unit() {
  static const Expr e = make(ETag::Unit, 0, 0, {}, {}, {});
  return e;
}
Expr Expr::true_() {
  static const Expr e = make(ETag::True, 0, 0, {}, {}, {});
  return e;
}
Expr Expr::false_() {
  static const Expr e = make(ETag::False, 0, 0, {}, {}, {});
  return e;
}
Expr Expr::var(Var v) { return make(ETag::Var, v, 0, {}, {}, {}); }
Expr Expr::loc(LocId l) { return make(ETag::Loc, l.value, 0, {}, {}, {}); }
Expr Expr::rev(RevId r) { return make(ETag::Rev, r.value, 0, {}, {}, {}); }
Expr Expr::nat(std::uint64_t n) { return make(ETag::Nat, 0, n, {}, {}, {}); }
Expr Expr::lam(Var param, Expr body) {
  assert(body.valid());
  return make(ETag::Lam, param, 0, std::move(body), {}, {});
}
Expr Expr::app(Expr fn, Expr arg) {
  assert(fn.valid() && arg.valid());
  return make(ETag::App, 0, 0, std::move(fn), std::move(arg), {});
}
Expr Expr::ite(Expr c, Expr t, Expr e) {
  assert(c.valid() && t.valid() && e.valid());
  return make(ETag::Ite, 0, 0, std::move(c), std::move(t), std::move(e));
}
Expr Expr::ref(Expr e) {
  assert(e.valid());
  return make(ETag::Ref, 0, 0, std::move(e), {}, {});
}
Expr Expr::deref(Expr e) {
  assert(e.valid());
  return make(ETag::Deref, 0, 0, std::move(e), {}, {});
}
Expr Expr::assign(Expr lhs, Expr rhs) {
  assert(lhs.valid() && rhs.valid());
  return make(ETag::Assign, 0, 0, std::move(lhs), std::move(rhs), {});
}
Expr Expr::rfork(Expr e) {
  assert(e.valid());
  return make(ETag::Rfork, 0, 0, std::move(e), {}, {});
}
Expr Expr::rjoin(Expr e) {
  assert(e.valid());
  return make(ETag::Rjoin, 0, 0, std::move(e), {}, {});
}
Expr Expr::add(Expr lhs, Expr rhs) {
  assert(lhs.valid() && rhs.valid());
  return make(ETag::Add, 0, 0, std::move(lhs), std::move(rhs), {});
}

bool operator==(const Expr& x, const Expr& y) {
  if (x.p_ == y.p_) return true;
  if (!x.p_ || !y.p_) return false;
  const auto& a = *x.p_;
  const auto& b = *y.p_;
  if (a.h != b.h || a.tag != b.tag || a.num != b.num || a.lit != b.lit) return false;
  return a.a == b.a && a.b == b.b && a.c == b.c;
}

int Expr::compare(const Expr& x, const Expr& y) {
  if (x.p_ == y.p_) return 0;
  if (!x.p_) return -1;
  if (!y.p_) return 1;
  const auto& a = *x.p_;
  const auto& b = *y.p_;
  if (a.tag != b.tag) return a.tag < b.tag ? -1 : 1;
  if (a.num != b.num) return a.num < b.num ? -1 : 1;
  if (a.lit != b.lit) return a.lit < b.lit ? -1 : 1;
  if (int c = compare(a.a, b.a)) return c;
  if (int c = compare(a.b, b.b)) return c;
  return compare(a.c, b.c);
}

bool is_value(const Expr& e) {
  switch (e.tag()) {
    case ETag::Unit:
    case ETag::True:
    case ETag::False:
    case ETag::Var:
    case ETag::Loc:
    case ETag::Rev:
    case ETag::Nat:
    case ETag::Lam:
      return true;
    default:
      return false;
  }
}

Context Context::app_l(Context c, Expr arg) {
  auto n = std::make_shared<Node>();
  n->tag = CTag::AppL;
  n->inner = std::move(c);
  n->e1 = std::move(arg);
  return Context(std::move(n));
}
Context Context::app_r(Val fn, Context c) {
  auto n = std::make_shared<Node>();
  n->tag = CTag::AppR;
  n->inner = std::move(c);
  n->val = std::move(fn);
  return Context(std::move(n));
}
Context Context::ite(Context c, Expr t, Expr e) {
  auto n = std::make_shared<Node>();
  n->tag = CTag::Ite;
  n->inner = std::move(c);
  n->e1 = std::move(t);
  n->e2 = std::move(e);
  return Context(std::move(n));
}
Context Context::ref(Context c) {
  auto n = std::make_shared<Node>();
  n->tag = CTag::Ref;
  n->inner = std::move(c);
  return Context(std::move(n));
}
Context Context::deref(Context c) {
  auto n = std::make_shared<Node>();
  n->tag = CTag::Deref;
  n->inner = std::move(c);
  return Context(std::move(n));
}
Context Context::assign_l(Context c, Expr rhs) {
  auto n = std::make_shared<Node>();
  n->tag = CTag::AssignL;
  n->inner = std::move(c);
  n->e1 = std::move(rhs);
  return Context(std::move(n));
}
Context Context::assign_r(LocId l, Context c) {
  auto n = std::make_shared<Node>();
  n->tag = CTag::AssignR;
  n->inner = std::move(c);
  n->l = l;
  return Context(std::move(n));
}
Context Context::rjoin(Context c) {
  auto n = std::make_shared<Node>();
  n->tag = CTag::Rjoin;
  n->inner = std::move(c);
  return Context(std::move(n));
}
Context Context::add_l(Context c, Expr rhs) {
  auto n = std::make_shared<Node>();
  n->tag = CTag::AddL;
  n->inner = std::move(c);
  n->e1 = std::move(rhs);
  return Context(std::move(n));
}
Context Context::add_r(Val lhs, Context c) {
  auto n = std::make_shared<Node>();
  n->tag = CTag::AddR;
  n->inner = std::move(c);
  n->val = std::move(lhs);
  return Context(std::move(n));
}

bool operator==(const Context& x, const Context& y) {
  if (x.p_ == y.p_) return true;
  if (!x.p_ || !y.p_) return false;
  const auto& a = *x.p_;
  const auto& b = *y.p_;
  if (a.tag != b.tag) return false;
  switch (a.tag) {
    case CTag::Hole:
      return true;
    case CTag::AppL:
    case CTag::AssignL:
    case CTag::AddL:
      if (!(a.e1 == b.e1)) return false;
      break;
    case CTag::AppR:
    case CTag::AddR:
      if (!(*a.val == *b.val)) return false;
      break;
    case CTag::Ite:
      if (!(a.e1 == b.e1) || !(a.e2 == b.e2)) return false;
      break;
    case CTag::AssignR:
      if (a.l != b.l) return false;
      break;
    case CTag::Ref:
    case CTag::Deref:
    case CTag::Rjoin:
      break;
  }
  return a.inner == b.inner;
}

Expr plug(const Context& ctx, const Expr& e) {
  switch (ctx.tag()) {
    case CTag::Hole:
      return e;
    case CTag::AppL:
      return Expr::app(plug(ctx.inner(), e), ctx.e1());
    case CTag::AppR:
      return Expr::app(ctx.v().expr(), plug(ctx.inner(), e));
    case CTag::Ite:
      return Expr::ite(plug(ctx.inner(), e), ctx.e1(), ctx.e2());
    case CTag::Ref:
      return Expr::ref(plug(ctx.inner(), e));
    case CTag::Deref:
      return Expr::deref(plug(ctx.inner(), e));
    case CTag::AssignL:
      return Expr::assign(plug(ctx.inner(), e), ctx.e1());
    case CTag::AssignR:
      return Expr::assign(Expr::loc(ctx.loc()), plug(ctx.inner(), e));
    case CTag::Rjoin:
      return Expr::rjoin(plug(ctx.inner(), e));
    case CTag::AddL:
      return Expr::add(plug(ctx.inner(), e), ctx.e1());
    case CTag::AddR:
      return Expr::add(ctx.v().expr(), plug(ctx.inner(), e));
  }
  assert(false);
  return e;
}

std::optional<RedexKind> classify_redex(const Expr& e) {
  switch (e.tag()) {
    case ETag::App:
      if (e.fn().tag() == ETag::Lam && is_value(e.arg())) return RedexKind::Apply;
      return std::nullopt;
    case ETag::Ite:
      if (e.cond().tag() == ETag::True) return RedexKind::IfTrue;
      if (e.cond().tag() == ETag::False) return RedexKind::IfFalse;
      return std::nullopt;
    case ETag::Ref:
      if (is_value(e.inner())) return RedexKind::New;
      return std::nullopt;
    case ETag::Deref:
      if (e.inner().tag() == ETag::Loc) return RedexKind::Get;
      return std::nullopt;
    case ETag::Assign:
      if (e.lhs().tag() == ETag::Loc && is_value(e.rhs())) return RedexKind::Set;
      return std::nullopt;
    case ETag::Rfork:
      // rfork e is a redex for arbitrary e; there is no context descending
      // into a fork body, so the forked expression is never pre-evaluated.
      return RedexKind::Fork;
    case ETag::Rjoin:
      // Only join on a revision identifier is a rule head. rjoin applied to
      // some other value is a stuck normal form.
      if (e.inner().tag() == ETag::Rev) return RedexKind::Join;
      return std::nullopt;
    case ETag::Add:
      if (e.lhs().tag() == ETag::Nat && e.rhs().tag() == ETag::Nat) return RedexKind::Add;
      return std::nullopt;
    default:
      return std::nullopt;
  }
}

// Top-down search for the unique active position. The top-redex case wins
// first; in the congruence cases at most one branch can succeed because
// values never decompose.
std::optional<Decomposition> decompose(const Expr& e) {
  if (is_redex(e)) return Decomposition{Context::hole(), e};
  switch (e.tag()) {
    case ETag::App: {
      if (!is_value(e.fn())) {
        if (auto d = decompose(e.fn()))
          return Decomposition{Context::app_l(std::move(d->ctx), e.arg()), std::move(d->redex)};
        return std::nullopt;
      }
      if (!is_value(e.arg())) {
        if (auto d = decompose(e.arg()))
          return Decomposition{Context::app_r(Val(e.fn()), std::move(d->ctx)),
                               std::move(d->redex)};
      }
      return std::nullopt;
    }
    case ETag::Ite: {
      if (!is_value(e.cond())) {
        if (auto d = decompose(e.cond()))
          return Decomposition{Context::ite(std::move(d->ctx), e.then_branch(), e.else_branch()),
                               std::move(d->redex)};
      }
      return std::nullopt;
    }
    case ETag::Ref: {
      if (!is_value(e.inner())) {
        if (auto d = decompose(e.inner()))
          return Decomposition{Context::ref(std::move(d->ctx)), std::move(d->redex)};
      }
      return std::nullopt;
    }
    case ETag::Deref: {
      if (!is_value(e.inner())) {
        if (auto d = decompose(e.inner()))
          return Decomposition{Context::deref(std::move(d->ctx)), std::move(d->redex)};
      }
      return std::nullopt;
    }
    case ETag::Assign: {
      if (!is_value(e.lhs())) {
        if (auto d = decompose(e.lhs()))
          return Decomposition{Context::assign_l(std::move(d->ctx), e.rhs()),
                               std::move(d->redex)};
        return std::nullopt;
      }
      // Assignment only evaluates its right side under a location on the
      // left; `true := e` and the like are stuck even if e could step.
      if (e.lhs().tag() == ETag::Loc && !is_value(e.rhs())) {
        if (auto d = decompose(e.rhs()))
          return Decomposition{Context::assign_r(e.lhs().loc(), std::move(d->ctx)),
                               std::move(d->redex)};
      }
      return std::nullopt;
    }
    case ETag::Rjoin: {
      if (!is_value(e.inner())) {
        if (auto d = decompose(e.inner()))
          return Decomposition{Context::rjoin(std::move(d->ctx)), std::move(d->redex)};
      }
      return std::nullopt;
    }
    case ETag::Add: {
      if (!is_value(e.lhs())) {
        if (auto d = decompose(e.lhs()))
          return Decomposition{Context::add_l(std::move(d->ctx), e.rhs()), std::move(d->redex)};
        return std::nullopt;
      }
      if (!is_value(e.rhs())) {
        if (auto d = decompose(e.rhs()))
          return Decomposition{Context::add_r(Val(e.lhs()), std::move(d->ctx)),
                               std::move(d->redex)};
      }
      return std::nullopt;
    }
    default:
      return std::nullopt;
  }
}

}  // namespace revcalc
