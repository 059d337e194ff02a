#include "revcalc/frontend.hpp"

#include <cctype>
#include <cstdlib>
#include <sstream>
#include <vector>

#include "revcalc/binding.hpp"
#include "revcalc/error.hpp"

namespace revcalc {

namespace {

enum class Tok : std::uint8_t {
  Ident,
  Number,
  RevLit,   // #r<n>
  LocLit,   // #l<n>
  KwFun,
  KwLet,
  KwIn,
  KwRef,
  KwRfork,
  KwRjoin,
  KwUnit,
  KwTrue,
  KwFalse,
  Arrow,    // ->
  Question,
  Colon,
  Assign,   // :=
  Semi,
  Bang,
  Plus,
  Equal,
  LParen,
  RParen,
  End,
};

struct Token {
  Tok kind;
  std::string text;
  std::uint64_t number = 0;
  int line = 1;
  int col = 1;
};

const char* tok_name(Tok t) {
  switch (t) {
    case Tok::Ident: return "identifier";
    case Tok::Number: return "number";
    case Tok::RevLit: return "#r literal";
    case Tok::LocLit: return "#l literal";
    case Tok::KwFun: return "'fun'";
    case Tok::KwLet: return "'let'";
    case Tok::KwIn: return "'in'";
    case Tok::KwRef: return "'ref'";
    case Tok::KwRfork: return "'rfork'";
    case Tok::KwRjoin: return "'rjoin'";
    case Tok::KwUnit: return "'unit'";
    case Tok::KwTrue: return "'true'";
    case Tok::KwFalse: return "'false'";
    case Tok::Arrow: return "'->'";
    case Tok::Question: return "'?'";
    case Tok::Colon: return "':'";
    case Tok::Assign: return "':='";
    case Tok::Semi: return "';'";
    case Tok::Bang: return "'!'";
    case Tok::Plus: return "'+'";
    case Tok::Equal: return "'='";
    case Tok::LParen: return "'('";
    case Tok::RParen: return "')'";
    case Tok::End: return "end of input";
  }
  return "?";
}

std::vector<Token> lex(const std::string& src) {
  std::vector<Token> out;
  int line = 1;
  int col = 1;
  std::size_t i = 0;
  auto advance = [&](std::size_t n) {
    for (std::size_t k = 0; k < n; ++k) {
      if (i < src.size() && src[i] == '\n') {
        ++line;
        col = 1;
      } else {
        ++col;
      }
      ++i;
    }
  };
  while (i < src.size()) {
    char c = src[i];
    if (c == ' ' || c == '\t' || c == '\r' || c == '\n') {
      advance(1);
      continue;
    }
    if (c == '/' && i + 1 < src.size() && src[i + 1] == '/') {
      while (i < src.size() && src[i] != '\n') advance(1);
      continue;
    }
    Token t;
    t.line = line;
    t.col = col;
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
      std::size_t j = i;
      while (j < src.size() && (std::isalnum(static_cast<unsigned char>(src[j])) ||
                                src[j] == '_' || src[j] == '\''))
        ++j;
      t.text = src.substr(i, j - i);
      if (t.text == "fun") t.kind = Tok::KwFun;
      else if (t.text == "let") t.kind = Tok::KwLet;
      else if (t.text == "in") t.kind = Tok::KwIn;
      else if (t.text == "ref") t.kind = Tok::KwRef;
      else if (t.text == "rfork") t.kind = Tok::KwRfork;
      else if (t.text == "rjoin") t.kind = Tok::KwRjoin;
      else if (t.text == "unit") t.kind = Tok::KwUnit;
      else if (t.text == "true") t.kind = Tok::KwTrue;
      else if (t.text == "false") t.kind = Tok::KwFalse;
      else t.kind = Tok::Ident;
      advance(j - i);
      out.push_back(std::move(t));
      continue;
    }
    if (std::isdigit(static_cast<unsigned char>(c))) {
      std::size_t j = i;
      std::uint64_t n = 0;
      while (j < src.size() && std::isdigit(static_cast<unsigned char>(src[j]))) {
        n = n * 10 + static_cast<std::uint64_t>(src[j] - '0');
        ++j;
      }
      t.kind = Tok::Number;
      t.number = n;
      t.text = src.substr(i, j - i);
      advance(j - i);
      out.push_back(std::move(t));
      continue;
    }
    switch (c) {
      case '#': {
        if (i + 1 < src.size() && (src[i + 1] == 'r' || src[i + 1] == 'l')) {
          bool is_rev = src[i + 1] == 'r';
          std::size_t j = i + 2;
          if (j >= src.size() || !std::isdigit(static_cast<unsigned char>(src[j])))
            throw ParseError("expected digits after #r/#l", line, col);
          std::uint64_t n = 0;
          while (j < src.size() && std::isdigit(static_cast<unsigned char>(src[j]))) {
            n = n * 10 + static_cast<std::uint64_t>(src[j] - '0');
            ++j;
          }
          t.kind = is_rev ? Tok::RevLit : Tok::LocLit;
          t.number = n;
          advance(j - i);
          out.push_back(std::move(t));
          continue;
        }
        throw ParseError("stray '#'", line, col);
      }
      case '-':
        if (i + 1 < src.size() && src[i + 1] == '>') {
          t.kind = Tok::Arrow;
          advance(2);
          out.push_back(std::move(t));
          continue;
        }
        throw ParseError("unexpected '-'", line, col);
      case ':':
        if (i + 1 < src.size() && src[i + 1] == '=') {
          t.kind = Tok::Assign;
          advance(2);
        } else {
          t.kind = Tok::Colon;
          advance(1);
        }
        out.push_back(std::move(t));
        continue;
      case '?': t.kind = Tok::Question; break;
      case ';': t.kind = Tok::Semi; break;
      case '!': t.kind = Tok::Bang; break;
      case '+': t.kind = Tok::Plus; break;
      case '=': t.kind = Tok::Equal; break;
      case '(': t.kind = Tok::LParen; break;
      case ')': t.kind = Tok::RParen; break;
      default:
        throw ParseError(std::string("unexpected character '") + c + "'", line, col);
    }
    advance(1);
    out.push_back(std::move(t));
  }
  Token end;
  end.kind = Tok::End;
  end.line = line;
  end.col = col;
  out.push_back(std::move(end));
  return out;
}

// Parsing builds expressions with provisional numbering: named variables
// are interned by text order, sugar binders draw from a disjoint high
// range. A renumbering pass afterwards reassigns numerals by first
// occurrence in the finished expression (binders count at their binding
// position), which is what makes parse(pretty(e)) the identity on parse
// images even though `let` and `;` reorder their pieces when desugared.
constexpr Var kSugarBase = 1u << 30;

struct Parser {
  const std::vector<Token>& ts;
  std::size_t pos = 0;
  const ParseOptions& opt;
  std::map<std::string, Var> provisional;
  std::map<Var, std::string> provisional_names;
  Var next_sugar = kSugarBase;

  const Token& peek() const { return ts[pos]; }
  Token take() { return ts[pos++]; }

  [[noreturn]] void fail(const std::string& msg) const {
    throw ParseError(msg, peek().line, peek().col);
  }

  Token expect(Tok k) {
    if (peek().kind != k)
      fail(std::string("expected ") + tok_name(k) + ", found " + tok_name(peek().kind));
    return take();
  }

  Var intern(const std::string& name) {
    auto it = provisional.find(name);
    if (it != provisional.end()) return it->second;
    Var v = static_cast<Var>(provisional.size());
    provisional.emplace(name, v);
    provisional_names.emplace(v, name);
    return v;
  }

  Expr parse_expr() { return parse_cond(); }

  Expr parse_cond() {
    Expr c = parse_seq();
    if (peek().kind == Tok::Question) {
      take();
      Expr t = parse_cond();
      expect(Tok::Colon);
      Expr e = parse_cond();
      return Expr::ite(std::move(c), std::move(t), std::move(e));
    }
    return c;
  }

  Expr parse_seq() {
    Expr first = parse_assign();
    if (peek().kind == Tok::Semi) {
      take();
      Expr rest = parse_seq();
      return Expr::app(Expr::lam(next_sugar++, std::move(rest)), std::move(first));
    }
    return first;
  }

  Expr parse_assign() {
    Expr lhs = parse_add();
    if (peek().kind == Tok::Assign) {
      take();
      Expr rhs = parse_assign();
      return Expr::assign(std::move(lhs), std::move(rhs));
    }
    return lhs;
  }

  Expr parse_add() {
    Expr lhs = parse_app();
    while (peek().kind == Tok::Plus) {
      if (!opt.integers) fail("'+' requires the integer extension");
      take();
      Expr rhs = parse_app();
      lhs = Expr::add(std::move(lhs), std::move(rhs));
    }
    return lhs;
  }

  bool starts_prefix() const {
    switch (peek().kind) {
      case Tok::Ident:
      case Tok::Number:
      case Tok::RevLit:
      case Tok::LocLit:
      case Tok::KwFun:
      case Tok::KwLet:
      case Tok::KwRef:
      case Tok::KwRfork:
      case Tok::KwRjoin:
      case Tok::KwUnit:
      case Tok::KwTrue:
      case Tok::KwFalse:
      case Tok::Bang:
      case Tok::LParen:
        return true;
      default:
        return false;
    }
  }

  Expr parse_app() {
    Expr e = parse_prefix();
    while (starts_prefix()) e = Expr::app(std::move(e), parse_prefix());
    return e;
  }

  Expr parse_prefix() {
    switch (peek().kind) {
      case Tok::KwRef:
        take();
        return Expr::ref(parse_prefix());
      case Tok::Bang:
        take();
        return Expr::deref(parse_prefix());
      case Tok::KwRfork:
        take();
        return Expr::rfork(parse_prefix());
      case Tok::KwRjoin:
        take();
        return Expr::rjoin(parse_prefix());
      default:
        return parse_atom();
    }
  }

  Expr parse_atom() {
    const Token& t = peek();
    switch (t.kind) {
      case Tok::KwUnit:
        take();
        return Expr::unit();
      case Tok::KwTrue:
        take();
        return Expr::true_();
      case Tok::KwFalse:
        take();
        return Expr::false_();
      case Tok::Ident: {
        Token id = take();
        return Expr::var(intern(id.text));
      }
      case Tok::Number: {
        if (!opt.integers) fail("integer literals require the integer extension");
        Token n = take();
        return Expr::nat(n.number);
      }
      case Tok::RevLit: {
        if (!opt.trace_literals) fail("revision-identifier literals are not valid in programs");
        Token n = take();
        return Expr::rev(RevId{static_cast<std::uint32_t>(n.number)});
      }
      case Tok::LocLit: {
        if (!opt.trace_literals) fail("location-identifier literals are not valid in programs");
        Token n = take();
        return Expr::loc(LocId{static_cast<std::uint32_t>(n.number)});
      }
      case Tok::KwFun: {
        take();
        Token id = expect(Tok::Ident);
        Var v = intern(id.text);
        expect(Tok::Arrow);
        Expr body = parse_expr();
        return Expr::lam(v, std::move(body));
      }
      case Tok::KwLet: {
        take();
        Token id = expect(Tok::Ident);
        Var v = intern(id.text);
        expect(Tok::Equal);
        Expr bound = parse_expr();
        expect(Tok::KwIn);
        Expr body = parse_expr();
        return Expr::app(Expr::lam(v, std::move(body)), std::move(bound));
      }
      case Tok::LParen: {
        take();
        Expr e = parse_expr();
        expect(Tok::RParen);
        return e;
      }
      default:
        fail(std::string("expected an expression, found ") + tok_name(t.kind));
    }
  }
};

void renumber_walk(const Expr& e, std::map<Var, Var>& map) {
  auto visit = [&](Var v) {
    if (!map.count(v)) map.emplace(v, static_cast<Var>(map.size()));
  };
  switch (e.tag()) {
    case ETag::Var:
      visit(e.var());
      return;
    case ETag::Lam:
      visit(e.param());
      renumber_walk(e.body(), map);
      return;
    case ETag::App:
      renumber_walk(e.fn(), map);
      renumber_walk(e.arg(), map);
      return;
    case ETag::Ite:
      renumber_walk(e.cond(), map);
      renumber_walk(e.then_branch(), map);
      renumber_walk(e.else_branch(), map);
      return;
    case ETag::Ref:
    case ETag::Deref:
    case ETag::Rfork:
    case ETag::Rjoin:
      renumber_walk(e.inner(), map);
      return;
    case ETag::Assign:
    case ETag::Add:
      renumber_walk(e.lhs(), map);
      renumber_walk(e.rhs(), map);
      return;
    default:
      return;
  }
}

Expr apply_renumber(const Expr& e, const std::map<Var, Var>& map) {
  switch (e.tag()) {
    case ETag::Var:
      return Expr::var(map.at(e.var()));
    case ETag::Lam:
      return Expr::lam(map.at(e.param()), apply_renumber(e.body(), map));
    case ETag::App:
      return Expr::app(apply_renumber(e.fn(), map), apply_renumber(e.arg(), map));
    case ETag::Ite:
      return Expr::ite(apply_renumber(e.cond(), map), apply_renumber(e.then_branch(), map),
                       apply_renumber(e.else_branch(), map));
    case ETag::Ref:
      return Expr::ref(apply_renumber(e.inner(), map));
    case ETag::Deref:
      return Expr::deref(apply_renumber(e.inner(), map));
    case ETag::Rfork:
      return Expr::rfork(apply_renumber(e.inner(), map));
    case ETag::Rjoin:
      return Expr::rjoin(apply_renumber(e.inner(), map));
    case ETag::Assign:
      return Expr::assign(apply_renumber(e.lhs(), map), apply_renumber(e.rhs(), map));
    case ETag::Add:
      return Expr::add(apply_renumber(e.lhs(), map), apply_renumber(e.rhs(), map));
    default:
      return e;
  }
}

}  // namespace

ParseResult parse(const std::string& src, const ParseOptions& opt) {
  auto tokens = lex(src);
  Parser p{tokens, 0, opt, {}, {}, kSugarBase};
  Expr raw = p.parse_expr();
  if (p.peek().kind != Tok::End)
    throw ParseError(std::string("trailing input: ") + tok_name(p.peek().kind), p.peek().line,
                     p.peek().col);

  std::map<Var, Var> map;
  renumber_walk(raw, map);
  ParseResult out;
  out.expr = apply_renumber(raw, map);
  for (const auto& [name, v] : p.provisional) {
    auto it = map.find(v);
    if (it == map.end()) continue;  // cannot happen: every interned name occurred
    out.symbols.by_name.emplace(name, it->second);
    out.symbols.by_index.emplace(it->second, name);
  }
  return out;
}

namespace {

// precedence levels, loosest first: conditional 0, assignment 2, addition
// 3, application 4, prefix 5, atoms 6 (sequencing never reappears: sugar
// is not reintroduced when printing)
struct Printer {
  const SymbolTable* names;
  std::ostringstream out;

  void var(Var v) {
    if (names) {
      if (const std::string* n = names->name_of(v)) {
        out << *n;
        return;
      }
    }
    out << 'x' << v;
  }

  void print(const Expr& e, int min_level) {
    switch (e.tag()) {
      case ETag::Unit:
        out << "unit";
        return;
      case ETag::True:
        out << "true";
        return;
      case ETag::False:
        out << "false";
        return;
      case ETag::Var:
        var(e.var());
        return;
      case ETag::Loc:
        out << "#l" << e.loc().value;
        return;
      case ETag::Rev:
        out << "#r" << e.rev().value;
        return;
      case ETag::Nat:
        out << e.nat();
        return;
      case ETag::Lam: {
        bool paren = min_level > 0;
        if (paren) out << '(';
        out << "fun ";
        var(e.param());
        out << " -> ";
        print(e.body(), 0);
        if (paren) out << ')';
        return;
      }
      case ETag::Ite: {
        bool paren = min_level > 0;
        if (paren) out << '(';
        print(e.cond(), 1);
        out << " ? ";
        print(e.then_branch(), 0);
        out << " : ";
        print(e.else_branch(), 0);
        if (paren) out << ')';
        return;
      }
      case ETag::Assign: {
        bool paren = min_level > 2;
        if (paren) out << '(';
        print(e.lhs(), 3);
        out << " := ";
        print(e.rhs(), 2);
        if (paren) out << ')';
        return;
      }
      case ETag::Add: {
        bool paren = min_level > 3;
        if (paren) out << '(';
        print(e.lhs(), 3);
        out << " + ";
        print(e.rhs(), 4);
        if (paren) out << ')';
        return;
      }
      case ETag::App: {
        bool paren = min_level > 4;
        if (paren) out << '(';
        print(e.fn(), 4);
        out << ' ';
        print(e.arg(), 5);
        if (paren) out << ')';
        return;
      }
      case ETag::Ref: {
        bool paren = min_level > 5;
        if (paren) out << '(';
        out << "ref ";
        print(e.inner(), 5);
        if (paren) out << ')';
        return;
      }
      case ETag::Deref: {
        bool paren = min_level > 5;
        if (paren) out << '(';
        out << '!';
        print(e.inner(), 5);
        if (paren) out << ')';
        return;
      }
      case ETag::Rfork: {
        bool paren = min_level > 5;
        if (paren) out << '(';
        out << "rfork ";
        print(e.inner(), 5);
        if (paren) out << ')';
        return;
      }
      case ETag::Rjoin: {
        bool paren = min_level > 5;
        if (paren) out << '(';
        out << "rjoin ";
        print(e.inner(), 5);
        if (paren) out << ')';
        return;
      }
    }
  }
};

}  // namespace

std::string pretty(const Expr& e) {
  Printer p{nullptr, {}};
  p.print(e, 0);
  return p.out.str();
}

std::string pretty(const Expr& e, const SymbolTable& names) {
  Printer p{&names, {}};
  p.print(e, 0);
  return p.out.str();
}

}  // namespace revcalc
