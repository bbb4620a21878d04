#include <charconv>
#include <cmath>
#include <string>

#include "dsl_lexer.hpp"
#include "sceneforge/dsl.hpp"
#include "sceneforge/error.hpp"

namespace sceneforge::dsl {

namespace {

template <class... Fs>
struct Overloaded : Fs... {
  using Fs::operator()...;
};
template <class... Fs>
Overloaded(Fs...) -> Overloaded<Fs...>;

int precedence(const Expr& e) {
  if (const auto* b = std::get_if<BinOp>(&e.node)) {
    return (b->op == BinaryOp::kAdd || b->op == BinaryOp::kSub) ? 1 : 2;
  }
  return 3;
}

void emit_expr(const Expr& e, std::string& out);

void emit_items(const std::vector<Expr>& items, std::string& out) {
  for (std::size_t i = 0; i < items.size(); ++i) {
    if (i) out += ", ";
    emit_expr(items[i], out);
  }
}

void emit_operand(const Expr& e, bool parens, std::string& out) {
  if (parens) out += '(';
  emit_expr(e, out);
  if (parens) out += ')';
}

void emit_expr(const Expr& e, std::string& out) {
  std::visit(Overloaded{
                 [&](const Number& n) { out += format_number(n.value); },
                 [&](const Var& v) { out += v.name; },
                 [&](const Call& c) {
                   out += c.callee;
                   out += '(';
                   emit_items(c.args, out);
                   out += ')';
                 },
                 [&](const Tuple& t) {
                   out += '(';
                   emit_items(t.items, out);
                   if (t.items.size() == 1) out += ',';
                   out += ')';
                 },
                 [&](const ListLit& l) {
                   out += '[';
                   emit_items(l.items, out);
                   out += ']';
                 },
                 [&](const BinOp& b) {
                   const int p = precedence(e);
                   emit_operand(*b.lhs, precedence(*b.lhs) < p, out);
                   switch (b.op) {
                     case BinaryOp::kAdd: out += " + "; break;
                     case BinaryOp::kSub: out += " - "; break;
                     case BinaryOp::kMul: out += " * "; break;
                     case BinaryOp::kDiv: out += " / "; break;
                   }
                   emit_operand(*b.rhs, precedence(*b.rhs) <= p, out);
                 },
             },
             e.node);
}

void emit_stmt(const Stmt& s, int indent, std::string& out) {
  const std::string pad(static_cast<std::size_t>(indent) * 4, ' ');
  std::visit(Overloaded{
                 [&](const Assign& a) {
                   out += pad + a.name + " = ";
                   emit_expr(a.value, out);
                   out += '\n';
                 },
                 [&](const ExprStmt& x) {
                   out += pad;
                   emit_expr(x.value, out);
                   out += '\n';
                 },
                 [&](const Return& r) {
                   out += pad + "return ";
                   emit_expr(r.value, out);
                   out += '\n';
                 },
                 [&](const RangeFor& f) {
                   out += pad + "for " + f.var + " in ";
                   emit_expr(f.lo, out);
                   out += "..";
                   emit_expr(f.hi, out);
                   out += " {\n";
                   for (const Stmt& inner : f.body) emit_stmt(inner, indent + 1, out);
                   out += pad + "}\n";
                 },
             },
             s.node);
}

void emit_def(const FuncDef& d, std::string& out) {
  out += "def " + d.name + "(";
  for (std::size_t i = 0; i < d.params.size(); ++i) {
    if (i) out += ", ";
    out += d.params[i];
  }
  out += ") {\n";
  for (const Stmt& s : d.body) emit_stmt(s, 1, out);
  out += "}\n";
}

std::size_t count_tokens(const std::string& text) {
  std::size_t n = 0;
  for (const detail::Token& t : detail::lex(text)) {
    switch (t.kind) {
      case detail::Tok::kNewline:
      case detail::Tok::kEnd:
      case detail::Tok::kRParen:
      case detail::Tok::kRBracket:
      case detail::Tok::kRBrace:
        break;
      default:
        ++n;
    }
  }
  return n;
}

}  // namespace

std::string format_number(double value) {
  if (!std::isfinite(value)) throw FormatError("non-finite number cannot be formatted");
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), value);
  std::string s(buf, res.ptr);
  if (s.find_first_of(".e") == std::string::npos) s += ".0";
  return s;
}

std::string format(const Expr& expr) {
  std::string out;
  emit_expr(expr, out);
  return out;
}

std::string format(const Stmt& stmt) {
  std::string out;
  emit_stmt(stmt, 0, out);
  return out;
}

std::string format(const FuncDef& def) {
  std::string out;
  emit_def(def, out);
  return out;
}

std::string format(const Program& program) {
  std::string out;
  for (const FuncDef& d : program.defs) emit_def(d, out);
  for (const Stmt& s : program.statements) emit_stmt(s, 0, out);
  return out;
}

std::size_t description_length(const Program& program) { return count_tokens(format(program)); }
std::size_t description_length(const FuncDef& def) { return count_tokens(format(def)); }

}  // namespace sceneforge::dsl
