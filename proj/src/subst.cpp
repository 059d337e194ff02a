#include <algorithm>

#include "revcalc/binding.hpp"

namespace revcalc {

namespace {

// total variable renaming: every occurrence of y, binders included, becomes z
Expr rename_var(const Expr& e, Var y, Var z) {
  switch (e.tag()) {
    case ETag::Var:
      return e.var() == y ? Expr::var(z) : e;
    case ETag::Lam:
      return Expr::lam(e.param() == y ? z : e.param(), rename_var(e.body(), y, z));
    case ETag::App:
      return Expr::app(rename_var(e.fn(), y, z), rename_var(e.arg(), y, z));
    case ETag::Ite:
      return Expr::ite(rename_var(e.cond(), y, z), rename_var(e.then_branch(), y, z),
                       rename_var(e.else_branch(), y, z));
    case ETag::Ref:
      return Expr::ref(rename_var(e.inner(), y, z));
    case ETag::Deref:
      return Expr::deref(rename_var(e.inner(), y, z));
    case ETag::Rfork:
      return Expr::rfork(rename_var(e.inner(), y, z));
    case ETag::Rjoin:
      return Expr::rjoin(rename_var(e.inner(), y, z));
    case ETag::Assign:
      return Expr::assign(rename_var(e.lhs(), y, z), rename_var(e.rhs(), y, z));
    case ETag::Add:
      return Expr::add(rename_var(e.lhs(), y, z), rename_var(e.rhs(), y, z));
    default:
      return e;
  }
}

Var max_var(const Expr& e) {
  auto vs = vars(e);
  return vs.empty() ? 0 : *vs.rbegin();
}

}  // namespace

Expr subst(const Expr& body, Var x, const Expr& v) {
  switch (body.tag()) {
    case ETag::Var:
      return body.var() == x ? v : body;
    case ETag::Lam: {
      if (body.param() == x) return body;
      // The bound variable is renamed unconditionally to a numeral past
      // everything in sight. Taking the maximum over x as well keeps the
      // fresh binder from ever landing on the substitution target, which
      // would capture former bound occurrences on the recursive pass.
      Var z = std::max({max_var(body), max_var(v), x}) + 1;
      return Expr::lam(z, subst(rename_var(body.body(), body.param(), z), x, v));
    }
    case ETag::App:
      return Expr::app(subst(body.fn(), x, v), subst(body.arg(), x, v));
    case ETag::Ite:
      return Expr::ite(subst(body.cond(), x, v), subst(body.then_branch(), x, v),
                       subst(body.else_branch(), x, v));
    case ETag::Ref:
      return Expr::ref(subst(body.inner(), x, v));
    case ETag::Deref:
      return Expr::deref(subst(body.inner(), x, v));
    case ETag::Rfork:
      return Expr::rfork(subst(body.inner(), x, v));
    case ETag::Rjoin:
      return Expr::rjoin(subst(body.inner(), x, v));
    case ETag::Assign:
      return Expr::assign(subst(body.lhs(), x, v), subst(body.rhs(), x, v));
    case ETag::Add:
      return Expr::add(subst(body.lhs(), x, v), subst(body.rhs(), x, v));
    default:
      return body;
  }
}

}  // namespace revcalc
