#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "revcalc/frontend.hpp"
#include "support/gen.hpp"

using namespace revcalc;

namespace {

// first-occurrence renumbering, binders counting at their binding site;
// mirrors what parse produces so generated trees can be made comparable
void canon_walk(const Expr& e, std::map<Var, Var>& m) {
  auto visit = [&](Var v) {
    if (!m.count(v)) m.emplace(v, static_cast<Var>(m.size()));
  };
  switch (e.tag()) {
    case ETag::Var: visit(e.var()); return;
    case ETag::Lam:
      visit(e.param());
      canon_walk(e.body(), m);
      return;
    case ETag::App:
      canon_walk(e.fn(), m);
      canon_walk(e.arg(), m);
      return;
    case ETag::Ite:
      canon_walk(e.cond(), m);
      canon_walk(e.then_branch(), m);
      canon_walk(e.else_branch(), m);
      return;
    case ETag::Ref:
    case ETag::Deref:
    case ETag::Rfork:
    case ETag::Rjoin:
      canon_walk(e.inner(), m);
      return;
    case ETag::Assign:
    case ETag::Add:
      canon_walk(e.lhs(), m);
      canon_walk(e.rhs(), m);
      return;
    default:
      return;
  }
}

Expr canon_apply(const Expr& e, const std::map<Var, Var>& m) {
  switch (e.tag()) {
    case ETag::Var: return Expr::var(m.at(e.var()));
    case ETag::Lam: return Expr::lam(m.at(e.param()), canon_apply(e.body(), m));
    case ETag::App: return Expr::app(canon_apply(e.fn(), m), canon_apply(e.arg(), m));
    case ETag::Ite:
      return Expr::ite(canon_apply(e.cond(), m), canon_apply(e.then_branch(), m),
                       canon_apply(e.else_branch(), m));
    case ETag::Ref: return Expr::ref(canon_apply(e.inner(), m));
    case ETag::Deref: return Expr::deref(canon_apply(e.inner(), m));
    case ETag::Rfork: return Expr::rfork(canon_apply(e.inner(), m));
    case ETag::Rjoin: return Expr::rjoin(canon_apply(e.inner(), m));
    case ETag::Assign: return Expr::assign(canon_apply(e.lhs(), m), canon_apply(e.rhs(), m));
    case ETag::Add: return Expr::add(canon_apply(e.lhs(), m), canon_apply(e.rhs(), m));
    default: return e;
  }
}

Expr canon(const Expr& e) {
  std::map<Var, Var> m;
  canon_walk(e, m);
  return canon_apply(e, m);
}

}  // namespace

TEST_CASE("atoms and constants") {
  CHECK(parse("unit").expr == Expr::unit());
  CHECK(parse("true").expr == Expr::true_());
  CHECK(parse(" ( false ) ").expr == Expr::false_());
  CHECK(parse("x y").expr == Expr::app(Expr::var(0), Expr::var(1)));
  CHECK(parse("x x").expr == Expr::app(Expr::var(0), Expr::var(0)));
}

TEST_CASE("grammar shapes") {
  CHECK(parse("fun x -> x").expr == Expr::lam(0, Expr::var(0)));
  CHECK(parse("a b c").expr ==
        Expr::app(Expr::app(Expr::var(0), Expr::var(1)), Expr::var(2)));
  CHECK(parse("a ? b : c").expr == Expr::ite(Expr::var(0), Expr::var(1), Expr::var(2)));
  // conditional is right-associative
  CHECK(parse("a ? b : c ? d : e").expr ==
        Expr::ite(Expr::var(0), Expr::var(1),
                  Expr::ite(Expr::var(2), Expr::var(3), Expr::var(4))));
  CHECK(parse("ref !x").expr == Expr::ref(Expr::deref(Expr::var(0))));
  CHECK(parse("a := b := c").expr ==
        Expr::assign(Expr::var(0), Expr::assign(Expr::var(1), Expr::var(2))));
  CHECK(parse("rfork rjoin x").expr == Expr::rfork(Expr::rjoin(Expr::var(0))));
  // prefix operands bind tighter than application
  CHECK(parse("rjoin x rfork unit").expr ==
        Expr::app(Expr::rjoin(Expr::var(0)), Expr::rfork(Expr::unit())));
  // comments
  CHECK(parse("unit // trailing words\n").expr == Expr::unit());
}

TEST_CASE("sugar") {
  auto r = parse("let x = ref true in !x");
  CHECK(r.expr == Expr::app(Expr::lam(0, Expr::deref(Expr::var(0))), Expr::ref(Expr::true_())));
  CHECK(r.symbols.by_name.at("x") == 0);

  // sequencing introduces an unnamed binder
  auto s = parse("unit; true");
  CHECK(s.expr == Expr::app(Expr::lam(0, Expr::true_()), Expr::unit()));
  CHECK(s.symbols.name_of(0) == nullptr);

  // numerals follow the desugared tree, not raw text order
  auto t = parse("let x = fun a -> a in fun b -> b");
  CHECK(t.expr == Expr::app(Expr::lam(0, Expr::lam(1, Expr::var(1))),
                            Expr::lam(2, Expr::var(2))));
  CHECK(t.symbols.by_name.at("x") == 0);
  CHECK(t.symbols.by_name.at("b") == 1);
  CHECK(t.symbols.by_name.at("a") == 2);
}

TEST_CASE("the fork-join race program parses to its known tree") {
  auto r = parse("(fun x -> rfork (rjoin x) ((rjoin x) (rfork unit))) (rfork unit)");
  Expr x = Expr::var(0);
  Expr body = Expr::app(Expr::rfork(Expr::rjoin(x)),
                        Expr::app(Expr::rjoin(x), Expr::rfork(Expr::unit())));
  CHECK(r.expr == Expr::app(Expr::lam(0, body), Expr::rfork(Expr::unit())));
}

TEST_CASE("parse errors carry position") {
  try {
    parse("fun x ->\n  (unit");
    FAIL("expected ParseError");
  } catch (const ParseError& e) {
    CHECK(e.line == 2);
    CHECK(e.column == 8);
  }
  CHECK_THROWS_AS(parse("x +"), ParseError);       // extension off
  CHECK_THROWS_AS(parse("3"), ParseError);         // extension off
  CHECK_THROWS_AS(parse("#r1"), ParseError);       // trace literal in source
  CHECK_THROWS_AS(parse("#l0 := unit"), ParseError);
  CHECK_THROWS_AS(parse("let x = unit"), ParseError);
  CHECK_THROWS_AS(parse("x ) y"), ParseError);
  CHECK_THROWS_AS(parse("x - y"), ParseError);
}

TEST_CASE("extension and trace modes") {
  ParseOptions ints;
  ints.integers = true;
  CHECK(parse("1 + 2 + 3", ints).expr ==
        Expr::add(Expr::add(Expr::nat(1), Expr::nat(2)), Expr::nat(3)));
  ParseOptions trace;
  trace.trace_literals = true;
  CHECK(parse("rjoin #r4", trace).expr == Expr::rjoin(Expr::rev(RevId{4})));
  CHECK(parse("!#l2", trace).expr == Expr::deref(Expr::loc(LocId{2})));
}

TEST_CASE("pretty canonical forms") {
  CHECK(pretty(Expr::unit()) == "unit");
  CHECK(pretty(Expr::app(Expr::var(0), Expr::var(1))) == "x0 x1");
  CHECK(pretty(Expr::rev(RevId{3})) == "#r3");
  CHECK(pretty(Expr::loc(LocId{0})) == "#l0");
  CHECK(pretty(Expr::app(Expr::lam(0, Expr::var(0)), Expr::unit())) ==
        "(fun x0 -> x0) unit");
  CHECK(pretty(Expr::deref(Expr::app(Expr::var(0), Expr::var(1)))) == "!(x0 x1)");
  CHECK(pretty(Expr::assign(Expr::deref(Expr::var(0)), Expr::true_())) == "!x0 := true");
  CHECK(pretty(Expr::app(Expr::rjoin(Expr::var(0)), Expr::rfork(Expr::unit()))) ==
        "rjoin x0 rfork unit");

  SymbolTable names;
  names.by_index[0] = "x";
  names.by_index[1] = "y";
  CHECK(pretty(Expr::app(Expr::var(0), Expr::var(1)), names) == "x y");
}

TEST_CASE("parse after pretty is the identity on canonical expressions") {
  std::mt19937_64 rng(0x90913);
  testgen::GenOptions opt;
  opt.max_depth = 7;
  opt.with_ints = true;
  ParseOptions popt;
  popt.integers = true;
  popt.trace_literals = true;
  for (int i = 0; i < 6000; ++i) {
    Expr e = canon(testgen::gen_expr(rng, opt));
    std::string text = pretty(e);
    CAPTURE(text);
    Expr back = parse(text, popt).expr;
    CHECK(back == e);
    // and printing again is stable byte for byte
    CHECK(pretty(back) == text);
  }
}

TEST_CASE("program texts round trip through pretty") {
  ParseOptions popt;
  popt.integers = true;
  popt.trace_literals = true;
  for (const char* text : {
           "(fun x -> rfork (rjoin x) ((rjoin x) (rfork unit))) (rfork unit)",
           "let l = ref true in let r = rfork (l := false) in rjoin r; !l",
           "a ? b : c ? d : e",
           "!x := true; unit",
           "(fun f -> f (f unit)) (fun u -> u)",
       }) {
    Expr e = parse(text, popt).expr;
    CHECK(parse(pretty(e), popt).expr == e);
  }
}
