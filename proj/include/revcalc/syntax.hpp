#pragma once

#include <cassert>
#include <cstdint>
#include <memory>
#include <optional>

#include "revcalc/error.hpp"
#include "revcalc/ids.hpp"

namespace revcalc {

// Expression trees are immutable and shared; copying an Expr is a pointer
// copy. Equality and ordering are structural (hash-accelerated), never by
// address, so results stay deterministic across runs.

enum class ETag : std::uint8_t {
  Unit,
  True,
  False,
  Var,
  Loc,
  Rev,
  Nat,  // integer extension
  Lam,
  App,
  Ite,
  Ref,
  Deref,
  Assign,
  Rfork,
  Rjoin,
  Add,  // integer extension
};

class Expr {
 public:
  Expr() = default;  // invalid; factories produce valid nodes

  bool valid() const { return p_ != nullptr; }
  ETag tag() const;
  std::uint64_t hash() const;

  Var var() const;            // Var
  LocId loc() const;          // Loc
  RevId rev() const;          // Rev
  std::uint64_t nat() const;  // Nat
  Var param() const;          // Lam

  const Expr& body() const;         // Lam
  const Expr& fn() const;           // App
  const Expr& arg() const;          // App
  const Expr& cond() const;         // Ite
  const Expr& then_branch() const;  // Ite
  const Expr& else_branch() const;  // Ite
  const Expr& inner() const;        // Ref, Deref, Rfork, Rjoin
  const Expr& lhs() const;          // Assign, Add
  const Expr& rhs() const;          // Assign, Add

  static Expr unit();
  static Expr true_();
  static Expr false_();
  static Expr var(Var v);
  static Expr loc(LocId l);
  static Expr rev(RevId r);
  static Expr nat(std::uint64_t n);
  static Expr lam(Var param, Expr body);
  static Expr app(Expr fn, Expr arg);
  static Expr ite(Expr c, Expr t, Expr e);
  static Expr ref(Expr e);
  static Expr deref(Expr e);
  static Expr assign(Expr lhs, Expr rhs);
  static Expr rfork(Expr e);
  static Expr rjoin(Expr e);
  static Expr add(Expr lhs, Expr rhs);

  // Total structural order; negative/zero/positive like strcmp.
  static int compare(const Expr& x, const Expr& y);

  friend bool operator==(const Expr& x, const Expr& y);
  friend bool operator!=(const Expr& x, const Expr& y) { return !(x == y); }
  friend bool operator<(const Expr& x, const Expr& y) { return compare(x, y) < 0; }

 private:
  struct Node;
  explicit Expr(std::shared_ptr<const Node> p) : p_(std::move(p)) {}
  static Expr make(ETag tag, std::uint32_t num, std::uint64_t lit, Expr a, Expr b, Expr c);

  std::shared_ptr<const Node> p_;
};

struct Expr::Node {
  ETag tag;
  std::uint32_t num = 0;  // Var index, Loc/Rev numeral, Lam parameter
  std::uint64_t lit = 0;  // Nat payload
  Expr a, b, c;
  std::uint64_t h = 0;
};

inline ETag Expr::tag() const {
  assert(p_);
  return p_->tag;
}
inline std::uint64_t Expr::hash() const { return p_ ? p_->h : 0; }
inline Var Expr::var() const {
  assert(tag() == ETag::Var);
  return p_->num;
}
inline LocId Expr::loc() const {
  assert(tag() == ETag::Loc);
  return LocId{p_->num};
}
inline RevId Expr::rev() const {
  assert(tag() == ETag::Rev);
  return RevId{p_->num};
}
inline std::uint64_t Expr::nat() const {
  assert(tag() == ETag::Nat);
  return p_->lit;
}
inline Var Expr::param() const {
  assert(tag() == ETag::Lam);
  return p_->num;
}
inline const Expr& Expr::body() const {
  assert(tag() == ETag::Lam);
  return p_->a;
}
inline const Expr& Expr::fn() const {
  assert(tag() == ETag::App);
  return p_->a;
}
inline const Expr& Expr::arg() const {
  assert(tag() == ETag::App);
  return p_->b;
}
inline const Expr& Expr::cond() const {
  assert(tag() == ETag::Ite);
  return p_->a;
}
inline const Expr& Expr::then_branch() const {
  assert(tag() == ETag::Ite);
  return p_->b;
}
inline const Expr& Expr::else_branch() const {
  assert(tag() == ETag::Ite);
  return p_->c;
}
inline const Expr& Expr::inner() const {
  assert(tag() == ETag::Ref || tag() == ETag::Deref || tag() == ETag::Rfork ||
         tag() == ETag::Rjoin);
  return p_->a;
}
inline const Expr& Expr::lhs() const {
  assert(tag() == ETag::Assign || tag() == ETag::Add);
  return p_->a;
}
inline const Expr& Expr::rhs() const {
  assert(tag() == ETag::Assign || tag() == ETag::Add);
  return p_->b;
}

bool is_value(const Expr& e);

// A value is an expression; the wrapper just carries the proof.
class Val {
 public:
  explicit Val(Expr e) : e_(std::move(e)) {
    if (!e_.valid() || !is_value(e_))
      throw PreconditionError("Val: expression is not a value");
  }
  const Expr& expr() const { return e_; }
  operator const Expr&() const { return e_; }

  friend bool operator==(const Val& x, const Val& y) { return x.e_ == y.e_; }
  friend bool operator!=(const Val& x, const Val& y) { return !(x == y); }
  friend bool operator<(const Val& x, const Val& y) { return x.e_ < y.e_; }

 private:
  Expr e_;
};

inline std::optional<Val> as_value(const Expr& e) {
  if (is_value(e)) return Val(e);
  return std::nullopt;
}

// Evaluation contexts. A default-constructed Context is the hole.
enum class CTag : std::uint8_t {
  Hole,
  AppL,     // E e
  AppR,     // v E
  Ite,      // E ? e : e
  Ref,      // ref E
  Deref,    // !E
  AssignL,  // E := e
  AssignR,  // l := E
  Rjoin,    // rjoin E
  AddL,     // E + e   (integer extension)
  AddR,     // v + E   (integer extension)
};

class Context {
 public:
  Context() = default;  // the hole

  CTag tag() const;
  const Context& inner() const;
  const Expr& e1() const;  // AppL/AssignL/AddL right operand, Ite then-branch
  const Expr& e2() const;  // Ite else-branch
  const Val& v() const;    // AppR/AddR left value
  LocId loc() const;       // AssignR target

  static Context hole() { return Context(); }
  static Context app_l(Context c, Expr arg);
  static Context app_r(Val fn, Context c);
  static Context ite(Context c, Expr t, Expr e);
  static Context ref(Context c);
  static Context deref(Context c);
  static Context assign_l(Context c, Expr rhs);
  static Context assign_r(LocId l, Context c);
  static Context rjoin(Context c);
  static Context add_l(Context c, Expr rhs);
  static Context add_r(Val lhs, Context c);

  friend bool operator==(const Context& x, const Context& y);
  friend bool operator!=(const Context& x, const Context& y) { return !(x == y); }

 private:
  struct Node;
  explicit Context(std::shared_ptr<const Node> p) : p_(std::move(p)) {}
  std::shared_ptr<const Node> p_;
};

struct Context::Node {
  CTag tag;
  Context inner;
  Expr e1, e2;
  std::optional<Val> val;
  LocId l{};
};

inline CTag Context::tag() const { return p_ ? p_->tag : CTag::Hole; }
inline const Context& Context::inner() const {
  assert(p_);
  return p_->inner;
}
inline const Expr& Context::e1() const {
  assert(p_);
  return p_->e1;
}
inline const Expr& Context::e2() const {
  assert(p_ && p_->tag == CTag::Ite);
  return p_->e2;
}
inline const Val& Context::v() const {
  assert(p_ && p_->val);
  return *p_->val;
}
inline LocId Context::loc() const {
  assert(p_ && p_->tag == CTag::AssignR);
  return p_->l;
}

Expr plug(const Context& ctx, const Expr& e);

// The rule head an expression matches, if any. Join covers both join and
// join-on-missing-revision; which rule fires depends on the global state.
enum class RedexKind : std::uint8_t {
  Apply,
  IfTrue,
  IfFalse,
  New,
  Get,
  Set,
  Fork,
  Join,
  Add,  // integer extension
};

std::optional<RedexKind> classify_redex(const Expr& e);
inline bool is_redex(const Expr& e) { return classify_redex(e).has_value(); }

struct Decomposition {
  Context ctx;
  Expr redex;
};

// Unique context/redex split, or nullopt for values and stuck shapes.
std::optional<Decomposition> decompose(const Expr& e);

}  // namespace revcalc

template <>
struct std::hash<revcalc::Expr> {
  std::size_t operator()(const revcalc::Expr& e) const noexcept {
    return static_cast<std::size_t>(e.hash());
  }
};
