#pragma once

#include <cstdint>
#include <vector>

#include "revcalc/syntax.hpp"

// Locally nameless terms as an independent substitution oracle. Bound
// variables become indices, free variables keep their name. A converted
// term is always locally closed, so substituting one for a free variable
// needs no shifting and cannot capture; comparing conversions therefore
// checks the named-side substitution for capture bugs.

namespace revcalc::testoracle {

struct DB {
  enum class K : std::uint8_t {
    BVar,
    FVar,
    Unit,
    True,
    False,
    Loc,
    Rev,
    Nat,
    Lam,
    App,
    Ite,
    Ref,
    Deref,
    Assign,
    Rfork,
    Rjoin,
    Add,
  };
  K k;
  std::uint64_t n = 0;  // BVar index, FVar name, Loc/Rev numeral, Nat payload
  std::vector<DB> kids;

  friend bool operator==(const DB& x, const DB& y) {
    return x.k == y.k && x.n == y.n && x.kids == y.kids;
  }
};

inline DB to_db(const Expr& e, std::vector<Var>& env) {
  auto leaf = [](DB::K k, std::uint64_t n = 0) { return DB{k, n, {}}; };
  switch (e.tag()) {
    case ETag::Var: {
      for (std::size_t i = env.size(); i-- > 0;)
        if (env[i] == e.var()) return leaf(DB::K::BVar, env.size() - 1 - i);
      return leaf(DB::K::FVar, e.var());
    }
    case ETag::Unit:
      return leaf(DB::K::Unit);
    case ETag::True:
      return leaf(DB::K::True);
    case ETag::False:
      return leaf(DB::K::False);
    case ETag::Loc:
      return leaf(DB::K::Loc, e.loc().value);
    case ETag::Rev:
      return leaf(DB::K::Rev, e.rev().value);
    case ETag::Nat:
      return leaf(DB::K::Nat, e.nat());
    case ETag::Lam: {
      env.push_back(e.param());
      DB body = to_db(e.body(), env);
      env.pop_back();
      return DB{DB::K::Lam, 0, {std::move(body)}};
    }
    case ETag::App:
      return DB{DB::K::App, 0, {to_db(e.fn(), env), to_db(e.arg(), env)}};
    case ETag::Ite:
      return DB{DB::K::Ite,
                0,
                {to_db(e.cond(), env), to_db(e.then_branch(), env), to_db(e.else_branch(), env)}};
    case ETag::Ref:
      return DB{DB::K::Ref, 0, {to_db(e.inner(), env)}};
    case ETag::Deref:
      return DB{DB::K::Deref, 0, {to_db(e.inner(), env)}};
    case ETag::Assign:
      return DB{DB::K::Assign, 0, {to_db(e.lhs(), env), to_db(e.rhs(), env)}};
    case ETag::Rfork:
      return DB{DB::K::Rfork, 0, {to_db(e.inner(), env)}};
    case ETag::Rjoin:
      return DB{DB::K::Rjoin, 0, {to_db(e.inner(), env)}};
    case ETag::Add:
      return DB{DB::K::Add, 0, {to_db(e.lhs(), env), to_db(e.rhs(), env)}};
  }
  return leaf(DB::K::Unit);
}

inline DB to_db(const Expr& e) {
  std::vector<Var> env;
  return to_db(e, env);
}

inline DB db_subst(const DB& e, Var x, const DB& v) {
  if (e.k == DB::K::FVar && e.n == x) return v;
  DB out{e.k, e.n, {}};
  out.kids.reserve(e.kids.size());
  for (const DB& kid : e.kids) out.kids.push_back(db_subst(kid, x, v));
  return out;
}

}  // namespace revcalc::testoracle
