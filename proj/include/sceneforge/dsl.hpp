#pragma once

#include <memory>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace sceneforge::dsl {

// Heap cell with value semantics, used to close the recursive Expr type.
template <class T>
class Indirect {
 public:
  Indirect() : ptr_(std::make_unique<T>()) {}
  Indirect(T value) : ptr_(std::make_unique<T>(std::move(value))) {}  // NOLINT
  Indirect(const Indirect& other) : ptr_(std::make_unique<T>(*other.ptr_)) {}
  Indirect(Indirect&&) noexcept = default;
  Indirect& operator=(const Indirect& other) {
    if (this != &other) ptr_ = std::make_unique<T>(*other.ptr_);
    return *this;
  }
  Indirect& operator=(Indirect&&) noexcept = default;

  const T& operator*() const { return *ptr_; }
  T& operator*() { return *ptr_; }
  const T* operator->() const { return ptr_.get(); }
  T* operator->() { return ptr_.get(); }

  friend bool operator==(const Indirect& a, const Indirect& b) { return *a == *b; }

 private:
  std::unique_ptr<T> ptr_;
};

struct Expr;

struct Number {
  double value = 0.0;
  friend bool operator==(const Number&, const Number&) = default;
};

struct Tuple {
  std::vector<Expr> items;
  friend bool operator==(const Tuple&, const Tuple&) = default;
};

struct ListLit {
  std::vector<Expr> items;
  friend bool operator==(const ListLit&, const ListLit&) = default;
};

struct Var {
  std::string name;
  friend bool operator==(const Var&, const Var&) = default;
};

struct Call {
  std::string callee;
  std::vector<Expr> args;
  friend bool operator==(const Call&, const Call&) = default;
};

enum class BinaryOp { kAdd, kSub, kMul, kDiv };

struct BinOp {
  BinaryOp op = BinaryOp::kAdd;
  Indirect<Expr> lhs;
  Indirect<Expr> rhs;
  friend bool operator==(const BinOp&, const BinOp&) = default;
};

struct Expr {
  std::variant<Number, Tuple, ListLit, Var, Call, BinOp> node;
  friend bool operator==(const Expr&, const Expr&) = default;
};

struct Stmt;

struct Assign {
  std::string name;
  Expr value;
  friend bool operator==(const Assign&, const Assign&) = default;
};

struct ExprStmt {
  Expr value;
  friend bool operator==(const ExprStmt&, const ExprStmt&) = default;
};

/// `for var in lo..hi { body }` over the half-open integer range [lo, hi).
/// Names bound in the body are visible after the loop as the concatenation
/// of their per-iteration values.
struct RangeFor {
  std::string var;
  Expr lo;
  Expr hi;
  std::vector<Stmt> body;
  friend bool operator==(const RangeFor&, const RangeFor&) = default;
};

struct Return {
  Expr value;
  friend bool operator==(const Return&, const Return&) = default;
};

struct Stmt {
  std::variant<Assign, ExprStmt, RangeFor, Return> node;
  friend bool operator==(const Stmt&, const Stmt&) = default;
};

struct FuncDef {
  std::string name;
  std::vector<std::string> params;
  std::vector<Stmt> body;
  friend bool operator==(const FuncDef&, const FuncDef&) = default;
};

struct Program {
  std::vector<Stmt> statements;
  std::vector<FuncDef> defs;
  friend bool operator==(const Program&, const Program&) = default;
};

// Convenience constructors.
Expr num(double v);
Expr var(std::string name);
Expr call(std::string callee, std::vector<Expr> args);
Expr tuple(std::vector<Expr> items);
Expr list(std::vector<Expr> items);
Expr binop(BinaryOp op, Expr lhs, Expr rhs);
Stmt assign(std::string name, Expr value);

/// Parses a whole program. Throws SyntaxError (with line/column) on malformed
/// input, invalid variable names, rebinding, or use before definition.
Program parse(std::string_view source);

/// Parses one standalone expression; free variables are allowed.
Expr parse_expression(std::string_view source);

/// Canonical source: defs first, then statements, one per line.
std::string format(const Program& program);
std::string format(const FuncDef& def);
std::string format(const Stmt& stmt);
std::string format(const Expr& expr);
std::string format_number(double value);

/// Token count of the canonical text. Identifiers, keywords, numbers,
/// operators, commas and opening brackets count one each; a closing bracket
/// is covered by its opener and newlines are free.
std::size_t description_length(const Program& program);
std::size_t description_length(const FuncDef& def);

/// `chair_12` -> `chair`; names without a numeric suffix are returned as is.
std::string category_of(std::string_view name);
bool is_valid_variable_name(std::string_view name);

}  // namespace sceneforge::dsl
