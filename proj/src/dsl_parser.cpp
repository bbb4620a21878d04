#include <set>
#include <string>
#include <vector>

#include "dsl_lexer.hpp"
#include "sceneforge/dsl.hpp"
#include "sceneforge/error.hpp"

namespace sceneforge::dsl {

using detail::Tok;
using detail::Token;

Expr num(double v) { return Expr{Number{v}}; }
Expr var(std::string name) { return Expr{Var{std::move(name)}}; }
Expr call(std::string callee, std::vector<Expr> args) {
  return Expr{Call{std::move(callee), std::move(args)}};
}
Expr tuple(std::vector<Expr> items) { return Expr{Tuple{std::move(items)}}; }
Expr list(std::vector<Expr> items) { return Expr{ListLit{std::move(items)}}; }
Expr binop(BinaryOp op, Expr lhs, Expr rhs) {
  return Expr{BinOp{op, std::move(lhs), std::move(rhs)}};
}
Stmt assign(std::string name, Expr value) { return Stmt{Assign{std::move(name), std::move(value)}}; }

std::string category_of(std::string_view name) {
  std::size_t end = name.size();
  std::size_t k = end;
  while (k > 0 && name[k - 1] >= '0' && name[k - 1] <= '9') --k;
  if (k < end && k >= 2 && name[k - 1] == '_') return std::string(name.substr(0, k - 1));
  return std::string(name);
}

bool is_valid_variable_name(std::string_view name) {
  // [a-z_]+(_[0-9]+)?
  std::size_t k = name.size();
  while (k > 0 && name[k - 1] >= '0' && name[k - 1] <= '9') --k;
  std::string_view stem = name;
  if (k < name.size()) {
    if (k < 2 || name[k - 1] != '_') return false;
    stem = name.substr(0, k - 1);
  }
  if (stem.empty()) return false;
  for (char c : stem) {
    if (!((c >= 'a' && c <= 'z') || c == '_')) return false;
  }
  return true;
}

namespace {

constexpr int kMaxDepth = 200;

class Parser {
 public:
  Parser(std::vector<Token> tokens, bool check_names)
      : toks_(std::move(tokens)), check_names_(check_names) {}

  Program program() {
    Program prog;
    frames_.push_back({{}});
    while (true) {
      skip_newlines();
      if (peek().kind == Tok::kEnd) break;
      if (is_keyword("def")) {
        prog.defs.push_back(def());
        continue;
      }
      if (is_keyword("for") || is_keyword("return")) {
        fail("'" + peek().text + "' is only allowed inside a def body");
      }
      prog.statements.push_back(simple_stmt());
      end_of_statement();
    }
    return prog;
  }

  Expr standalone_expression() {
    skip_newlines();
    Expr e = expression();
    skip_newlines();
    if (peek().kind != Tok::kEnd) fail("unexpected trailing input");
    return e;
  }

 private:
  using Scope = std::set<std::string>;
  using Frame = std::vector<Scope>;

  const Token& peek(std::size_t ahead = 0) const {
    return toks_[std::min(pos_ + ahead, toks_.size() - 1)];
  }
  const Token& next() {
    const Token& t = toks_[pos_];
    if (pos_ + 1 < toks_.size()) ++pos_;
    return t;
  }
  bool is_keyword(std::string_view kw) const {
    return peek().kind == Tok::kIdent && peek().text == kw;
  }

  [[noreturn]] void fail(const std::string& msg) const { fail_at(peek(), msg); }
  [[noreturn]] static void fail_at(const Token& t, const std::string& msg) {
    throw SyntaxError(msg, t.line, t.column);
  }

  const Token& expect(Tok kind, std::string_view what) {
    if (peek().kind != kind) {
      const std::string got = peek().kind == Tok::kNewline ? "end of line"
                              : peek().kind == Tok::kEnd   ? "end of input"
                                                           : "'" + peek().text + "'";
      fail("expected " + std::string(what) + ", got " + got);
    }
    return next();
  }

  void skip_newlines() {
    while (peek().kind == Tok::kNewline) next();
  }

  void end_of_statement() {
    if (peek().kind == Tok::kNewline) {
      next();
      return;
    }
    if (peek().kind == Tok::kEnd) return;
    fail("expected end of statement, got '" + peek().text + "'");
  }

  bool bound(const std::string& name) const {
    for (const Scope& s : frames_.back()) {
      if (s.count(name)) return true;
    }
    return false;
  }

  void bind(const Token& at, const std::string& name) {
    if (!check_names_) return;
    if (!is_valid_variable_name(name)) fail_at(at, "invalid variable name '" + name + "'");
    if (bound(name)) fail_at(at, "'" + name + "' is already bound");
    frames_.back().back().insert(name);
  }

  static bool reserved(const std::string& s) {
    return s == "def" || s == "for" || s == "in" || s == "return";
  }

  FuncDef def() {
    next();  // def
    const Token& name_tok = expect(Tok::kIdent, "function name");
    if (reserved(name_tok.text)) fail_at(name_tok, "reserved word used as function name");
    FuncDef fn;
    fn.name = name_tok.text;
    frames_.push_back({{}});
    expect(Tok::kLParen, "'('");
    if (peek().kind != Tok::kRParen) {
      while (true) {
        const Token& p = expect(Tok::kIdent, "parameter name");
        bind(p, p.text);
        fn.params.push_back(p.text);
        if (peek().kind == Tok::kComma) {
          next();
          if (peek().kind == Tok::kRParen) break;
          continue;
        }
        break;
      }
    }
    expect(Tok::kRParen, "')'");
    const Token& open = peek();
    fn.body = block(/*allow_return=*/true);
    if (fn.body.empty() || !std::holds_alternative<Return>(fn.body.back().node)) {
      fail_at(open, "def body must end with a return statement");
    }
    frames_.pop_back();
    end_of_statement();
    return fn;
  }

  std::vector<Stmt> block(bool allow_return) {
    expect(Tok::kLBrace, "'{'");
    std::vector<Stmt> body;
    bool returned = false;
    while (true) {
      skip_newlines();
      if (peek().kind == Tok::kRBrace) {
        next();
        break;
      }
      if (peek().kind == Tok::kEnd) fail("unterminated block, expected '}'");
      if (returned) fail("statement after return");
      if (is_keyword("return")) {
        if (!allow_return) fail("return is only allowed at the end of a def body");
        next();
        body.push_back(Stmt{Return{expression()}});
        returned = true;
      } else if (is_keyword("for")) {
        body.push_back(range_for());
      } else {
        body.push_back(simple_stmt());
      }
      if (peek().kind == Tok::kRBrace) continue;
      expect(Tok::kNewline, "end of statement");
    }
    return body;
  }

  Stmt range_for() {
    next();  // for
    const Token& var_tok = expect(Tok::kIdent, "loop variable");
    if (!(peek().kind == Tok::kIdent && peek().text == "in")) fail("expected 'in'");
    next();
    Expr lo = expression();
    expect(Tok::kDotDot, "'..'");
    Expr hi = expression();
    frames_.back().push_back({});
    bind(var_tok, var_tok.text);
    std::vector<Stmt> body = block(/*allow_return=*/false);
    Scope inner = std::move(frames_.back().back());
    frames_.back().pop_back();
    // Body bindings are gathered into the enclosing scope after the loop.
    inner.erase(var_tok.text);
    for (const std::string& n : inner) frames_.back().back().insert(n);
    return Stmt{RangeFor{var_tok.text, std::move(lo), std::move(hi), std::move(body)}};
  }

  Stmt simple_stmt() {
    if (peek().kind == Tok::kIdent && peek(1).kind == Tok::kAssign) {
      const Token& name_tok = next();
      if (reserved(name_tok.text)) fail_at(name_tok, "reserved word used as variable");
      next();  // =
      Expr value = expression();
      bind(name_tok, name_tok.text);
      return Stmt{Assign{name_tok.text, std::move(value)}};
    }
    return Stmt{ExprStmt{expression()}};
  }

  struct DepthGuard {
    explicit DepthGuard(Parser& p) : p_(p) {
      if (++p_.depth_ > kMaxDepth) p_.fail("expression nested too deeply");
    }
    ~DepthGuard() { --p_.depth_; }
    Parser& p_;
  };

  Expr expression() {
    DepthGuard guard(*this);
    Expr lhs = term();
    while (peek().kind == Tok::kPlus || peek().kind == Tok::kMinus) {
      const BinaryOp op = next().kind == Tok::kPlus ? BinaryOp::kAdd : BinaryOp::kSub;
      lhs = binop(op, std::move(lhs), term());
    }
    return lhs;
  }

  Expr term() {
    Expr lhs = unary();
    while (peek().kind == Tok::kStar || peek().kind == Tok::kSlash) {
      const BinaryOp op = next().kind == Tok::kStar ? BinaryOp::kMul : BinaryOp::kDiv;
      lhs = binop(op, std::move(lhs), unary());
    }
    return lhs;
  }

  Expr unary() {
    DepthGuard guard(*this);
    if (peek().kind == Tok::kMinus) {
      next();
      if (peek().kind == Tok::kNumber) return num(-next().number);
      return binop(BinaryOp::kSub, num(0.0), unary());
    }
    return primary();
  }

  std::vector<Expr> items(Tok close, std::string_view what, bool* trailing_comma) {
    std::vector<Expr> out;
    if (trailing_comma) *trailing_comma = false;
    while (peek().kind != close) {
      out.push_back(expression());
      if (peek().kind == Tok::kComma) {
        next();
        if (trailing_comma) *trailing_comma = true;
        continue;
      }
      if (trailing_comma) *trailing_comma = false;
      break;
    }
    expect(close, what);
    return out;
  }

  Expr primary() {
    const Token& t = peek();
    switch (t.kind) {
      case Tok::kNumber:
        next();
        return num(t.number);
      case Tok::kIdent: {
        next();
        if (reserved(t.text)) fail_at(t, "unexpected keyword '" + t.text + "'");
        if (peek().kind == Tok::kLParen) {
          next();
          return call(t.text, items(Tok::kRParen, "')'", nullptr));
        }
        if (check_names_ && !bound(t.text)) fail_at(t, "'" + t.text + "' used before definition");
        return var(t.text);
      }
      case Tok::kLParen: {
        next();
        bool trailing = false;
        std::vector<Expr> parts = items(Tok::kRParen, "')'", &trailing);
        if (parts.size() == 1 && !trailing) return std::move(parts.front());
        return tuple(std::move(parts));
      }
      case Tok::kLBracket: {
        next();
        return list(items(Tok::kRBracket, "']'", nullptr));
      }
      default:
        fail(t.kind == Tok::kNewline ? "unexpected end of line"
             : t.kind == Tok::kEnd   ? "unexpected end of input"
                                     : "unexpected '" + t.text + "'");
    }
  }

  std::vector<Token> toks_;
  std::size_t pos_ = 0;
  bool check_names_;
  int depth_ = 0;
  std::vector<Frame> frames_;
};

}  // namespace

Program parse(std::string_view source) {
  Parser parser(detail::lex(source), /*check_names=*/true);
  return parser.program();
}

Expr parse_expression(std::string_view source) {
  Parser parser(detail::lex(source), /*check_names=*/false);
  return parser.standalone_expression();
}

}  // namespace sceneforge::dsl
